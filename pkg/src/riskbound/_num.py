"""Shared numerical kernels.

Bracketed root finding, Gauss-Legendre panel quadrature on geometric panel
chains (stable down to distances ~1e-60 from an endpoint, far below what a
double can represent as ``1 - t``), and the upper incomplete gamma integral.
"""

from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np

from .errors import NoSignChange

_GL20 = np.polynomial.legendre.leggauss(20)
_GL10 = np.polynomial.legendre.leggauss(10)


def bisect_root(f: Callable[[float], float], lo: float, hi: float,
                max_iter: int = 200) -> float:
    """Unique root of ``f`` in ``[lo, hi]`` by bisection with secant polish.

    The bracket must straddle a sign change, otherwise NoSignChange is
    raised.  Iterates essentially to machine precision.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if not (np.isfinite(flo) and np.isfinite(fhi)):
        raise NoSignChange(f"non-finite bracket values f({lo})={flo}, f({hi})={fhi}")
    if flo * fhi > 0.0:
        raise NoSignChange(f"no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")
    a, b, fa, fb = lo, hi, flo, fhi
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        if b - a <= 4.0 * np.finfo(float).eps * max(1.0, abs(m)):
            break
        fm = f(m)
        if fm == 0.0:
            return m
        if fa * fm < 0.0:
            b, fb = m, fm
        else:
            a, fa = m, fm
    root = 0.5 * (a + b)
    # a couple of secant steps sharpen the last bits when f is smooth
    x0, x1, f0, f1 = a, b, fa, fb
    for _ in range(3):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not (a <= x2 <= b):
            break
        f2 = f(x2)
        x0, f0, x1, f1 = x1, f1, x2, f2
        if f2 == 0.0:
            break
    if a <= x1 <= b and abs(f1) <= abs(f(root)):
        root = x1
    return root


def log_chain(hi: float, lo: float, per_octave: int) -> np.ndarray:
    """Descending geometric offsets from ``hi`` to ~``lo``, ratio 2**(-1/per_octave)."""
    if hi <= lo:
        return np.array([hi], dtype=float)
    n = int(math.ceil(per_octave * math.log2(hi / lo)))
    return hi * np.exp2(-np.arange(n + 1, dtype=float) / per_octave)


def panel_gauss(f: Callable[[np.ndarray], np.ndarray], edges_desc: np.ndarray,
                order: int = 20) -> float:
    """Integrate ``f`` over [edges[-1], edges[0]] given descending panel edges."""
    nodes, weights = _GL20 if order >= 20 else _GL10
    hi = edges_desc[:-1]
    lo = edges_desc[1:]
    mid = 0.5 * (hi + lo)
    half = 0.5 * (hi - lo)
    ts = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    vals = np.asarray(f(ts), dtype=float).reshape(len(mid), len(nodes))
    return float(np.dot(half, vals @ weights))


def integrate_segment(fn: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                      fn_lo: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                      fn_hi: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                      t_floor: float = 1e-60, per_octave: int = 4,
                      order: int = 20) -> float:
    """``∫_a^b fn(u) du`` with geometric panels accumulating toward both ends.

    ``fn_lo(t)`` / ``fn_hi(t)`` are stable reparametrizations of the integrand
    at distance ``t`` from u=0 / u=1; they are used (and the chain deepened to
    ``t_floor``) only when the segment actually ends at 0 or 1.  Interior ends
    are assumed smooth and chained to a relative depth of ~1e-14.
    """
    if b <= a:
        return 0.0
    half = 0.5 * (b - a)
    total = 0.0
    # lower side: u = a + t
    if a == 0.0 and fn_lo is not None:
        edges = log_chain(half, t_floor, per_octave)
        total += panel_gauss(fn_lo, edges, order)
        total += float(np.asarray(fn_lo(np.array([0.5 * edges[-1]])))[0]) * edges[-1]
    else:
        edges = log_chain(half, half * 1e-14, per_octave)
        total += panel_gauss(lambda t: fn(a + t), edges, order)
        total += float(np.asarray(fn(np.array([a + 0.5 * edges[-1]])))[0]) * edges[-1]
    # upper side: u = b - t
    if b == 1.0 and fn_hi is not None:
        edges = log_chain(half, t_floor, per_octave)
        total += panel_gauss(fn_hi, edges, order)
        total += float(np.asarray(fn_hi(np.array([0.5 * edges[-1]])))[0]) * edges[-1]
    else:
        edges = log_chain(half, half * 1e-14, per_octave)
        total += panel_gauss(lambda t: fn(b - t), edges, order)
        total += float(np.asarray(fn(np.array([b - 0.5 * edges[-1]])))[0]) * edges[-1]
    return total


def upper_incomplete_gamma(s: float, x: float, rel_tol: float = 1e-10) -> float:
    """``∫_x^∞ t^(s-1) e^(-t) dt`` by panel quadrature of the defining integral.

    Valid for s > 0, x > 0.  The infinite tail is truncated once the
    analytic remainder bound drops below ``rel_tol`` times the accumulated
    value.
    """
    if x <= 0.0:
        if s <= 0.0:
            raise ValueError("upper_incomplete_gamma requires s > 0 when x <= 0")
        return math.gamma(s)

    def f(t):
        return np.exp((s - 1.0) * np.log(t) - t)

    total = 0.0
    left = x
    width = max(1.0, 0.5 * abs(s - 1.0))
    while True:
        right = left + width
        edges = np.array([right, 0.5 * (left + right), left])
        total += panel_gauss(f, edges)
        # remainder bound: for t >= T and T > 2(s-1), integrand decays faster
        # than e^(-t/2) * T^(s-1) e^(-T/2)
        T = right
        if T > 2.0 * abs(s - 1.0) + 2.0:
            tail = 2.0 * math.exp((s - 1.0) * math.log(T) - T)
            if tail <= rel_tol * max(total, 1e-300):
                break
        left = right
        width *= 1.6
        if left > x + 800.0:
            break
    return total


def gauss_nodes(order: int = 20):
    """Expose the cached Gauss-Legendre rule (nodes, weights)."""
    return _GL20 if order >= 20 else _GL10
