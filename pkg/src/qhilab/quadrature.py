"""Composite Gauss-Legendre quadrature over complex polylines.

This is the one quadrature engine shared by the special-function integrals
and the contour integrals.  Panels are doubled until the requested relative
tolerance is met; Gauss-Legendre nodes are computed once per (order,
precision) pair and cached.
"""

from __future__ import annotations

from typing import Callable, Sequence

import mpmath as mp

from .errors import NonConvergent
from .precision import PrecisionContext

__all__ = [
    "gauss_legendre_nodes",
    "integrate_segment",
    "integrate_polyline",
    "integrate_arc",
]

_NODE_CACHE: dict[tuple[int, int], tuple[list, list]] = {}


def _legendre_pair(order: int, x):
    """(P_order(x), P'_order(x)) by the three-term recurrence."""
    p0, p1 = mp.mpf(1), x
    for j in range(2, order + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    dp = order * (x * p1 - p0) / (x * x - 1)
    return p1, dp


def gauss_legendre_nodes(order: int, dps: int) -> tuple[list, list]:
    """Nodes and weights of the `order`-point Gauss-Legendre rule on [-1, 1].

    Computed by Newton iteration on the Legendre recurrence at `dps` + guard
    digits and cached.
    """
    key = (order, dps)
    if key in _NODE_CACHE:
        return _NODE_CACHE[key]
    with mp.workdps(dps + 10):
        half_nodes, half_weights = [], []
        tol = mp.mpf(10) ** (-(dps + 5))
        for k in range(1, order // 2 + 1):
            x = mp.mpf(mp.cos(mp.pi * (k - 0.25) / (order + 0.5)))
            for _ in range(100):
                p, dp = _legendre_pair(order, x)
                dx = p / dp
                x -= dx
                if abs(dx) < tol:
                    break
            _, dp = _legendre_pair(order, x)
            half_nodes.append(x)
            half_weights.append(2 / ((1 - x * x) * dp * dp))
        nodes = [-x for x in half_nodes]
        weights = list(half_weights)
        if order % 2 == 1:
            _, dp = _legendre_pair(order, mp.mpf(0))
            nodes.append(mp.mpf(0))
            weights.append(2 / (dp * dp))
        nodes.extend(reversed(half_nodes))
        weights.extend(reversed(half_weights))
    _NODE_CACHE[key] = (nodes, weights)
    return _NODE_CACHE[key]


def integrate_segment(f: Callable, a, b, panels: int, order: int, dps: int):
    """Composite `order`-point Gauss-Legendre over `panels` equal panels of
    the straight segment [a, b]."""
    nodes, weights = gauss_legendre_nodes(order, dps)
    a = mp.mpc(a)
    b = mp.mpc(b)
    step = (b - a) / panels
    half = step / 2
    total = mp.mpc(0)
    for p in range(panels):
        mid = a + step * p + half
        acc = mp.mpc(0)
        for x, w in zip(nodes, weights):
            acc += w * f(mid + half * x)
        total += acc
    return total * half


def integrate_polyline(f: Callable, vertices: Sequence, ctx: PrecisionContext,
                       panels: int | Sequence[int] = 4, order: int = 12,
                       max_doublings: int = 10, rel_tol: float | None = None,
                       scale=None, confirm: bool = True):
    """Integrate f along the polyline through `vertices`.

    Each segment starts at its requested panel count and is doubled until
    two successive composite rules agree to the target relative tolerance.
    Convergence is measured against the largest segment magnitude (or the
    caller-supplied `scale`), so that cancellation between segments of a
    closed contour does not make the target unattainable.  Raises
    NonConvergent when the doubling cap is hit.

    confirm=False integrates each segment once at its requested panel
    count with no error control; callers use it for panel rules that were
    validated against the adaptive route beforehand.
    """
    if len(vertices) < 2:
        raise ValueError("polyline needs at least two vertices")
    nseg = len(vertices) - 1
    if isinstance(panels, int):
        panels = [panels] * nseg
    if len(panels) != nseg:
        raise ValueError("one panel count per segment required")
    tol = mp.mpf(rel_tol if rel_tol is not None else ctx.quad_rel_tol)
    with ctx.workdps():
        segs = []
        for i in range(nseg):
            a, b = mp.mpc(vertices[i]), mp.mpc(vertices[i + 1])
            if a == b:
                continue
            n = max(1, panels[i])
            segs.append([a, b, n, integrate_segment(f, a, b, n, order,
                                                    ctx.digits)])
        if not confirm:
            return mp.fsum(s[3] for s in segs)
        ref = mp.mpf(scale) if scale is not None else mp.mpf(0)
        ref = max([ref] + [abs(s[3]) for s in segs])
        total = mp.mpc(0)
        err_total = mp.mpf(0)
        for s in segs:
            a, b, n, prev = s
            for _ in range(max_doublings):
                n *= 2
                cur = integrate_segment(f, a, b, n, order, ctx.digits)
                err = abs(cur - prev)
                prev = cur
                ref = max(ref, abs(cur))
                if err <= tol * ref:
                    break
            else:
                raise NonConvergent(
                    f"segment [{mp.nstr(a, 6)}, {mp.nstr(b, 6)}] did not "
                    f"reach rel_tol={float(tol)} after {max_doublings} "
                    f"doublings")
            total += prev
            err_total += err
        if err_total > 8 * tol * max(ref, abs(total)):
            raise NonConvergent(
                f"accumulated quadrature error {float(err_total)} exceeds "
                f"budget {float(8 * tol * max(ref, abs(total)))}")
        return total


def integrate_arc(f: Callable, center, radius, theta0, theta1,
                  ctx: PrecisionContext, panels: int = 4, order: int = 12,
                  max_doublings: int = 10, rel_tol: float | None = None,
                  scale=None):
    """Integrate f along the arc center + radius*e^{i theta}, theta running
    from theta0 to theta1, with the same panel-doubling strategy."""
    tol = mp.mpf(rel_tol if rel_tol is not None else ctx.quad_rel_tol)
    with ctx.workdps():
        c = mp.mpc(center)
        r = mp.mpf(radius)

        def g(theta):
            w = c + r * mp.exp(1j * theta)
            return f(w) * 1j * r * mp.exp(1j * theta)

        ref = mp.mpf(scale) if scale is not None else mp.mpf(0)
        n = max(1, panels)
        prev = integrate_segment(g, theta0, theta1, n, order, ctx.digits)
        for _ in range(max_doublings):
            n *= 2
            cur = integrate_segment(g, theta0, theta1, n, order, ctx.digits)
            err = abs(cur - prev)
            prev = cur
            if err <= tol * max(abs(cur), ref):
                return cur
        raise NonConvergent("arc quadrature did not converge")
