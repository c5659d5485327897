"""Bracket-and-bisect root finding on a uniform grid."""

from __future__ import annotations

import numpy as np


def bisect(func, a, b, fa=None, fb=None, xtol=1e-12, maxiter=200):
    """Bisection on [a, b] where func(a) and func(b) differ in sign.

    Returns the midpoint of the final bracket once it is narrower than
    ``xtol`` (absolute) or an exact zero is hit.
    """
    fa = func(a) if fa is None else fa
    fb = func(b) if fb is None else fb
    if fa == 0:
        return a
    if fb == 0:
        return b
    if np.sign(fa) == np.sign(fb):
        raise ValueError(f"root not bracketed on [{a}, {b}]: f = {fa}, {fb}")
    for _ in range(maxiter):
        m = 0.5 * (a + b)
        if b - a <= xtol or m in (a, b):
            break
        fm = func(m)
        if fm == 0:
            return m
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def grid_roots(func, grid, tol, xtol=1e-12, values=None):
    """All roots of ``func`` on the span of ``grid``.

    ``func`` must accept both arrays and scalars.  A sign change between
    neighbouring grid points is refined by bisection.  A contiguous run of
    grid points with |f| <= tol counts as one root (tangential touch); it is
    refined by bisection when the run straddles a sign change, otherwise the
    point of smallest |f| is reported.

    ``values`` may carry func(grid) when the caller already has it.

    Returns a list of (x, f(x)) in ascending x.
    """
    x = np.asarray(grid, dtype=float)
    f = np.asarray(func(x) if values is None else values, dtype=float)
    near = np.abs(f) <= tol
    roots = []
    i = 0
    n = len(x)
    while i < n:
        if near[i]:
            j = i
            while j + 1 < n and near[j + 1]:
                j += 1
            lo, hi = max(i - 1, 0), min(j + 1, n - 1)
            if f[lo] * f[hi] < 0:
                r = bisect(func, x[lo], x[hi], f[lo], f[hi], xtol=xtol)
            else:
                k = i + int(np.argmin(np.abs(f[i : j + 1])))
                r = x[k]
            roots.append(r)
            i = j + 1
            continue
        if i + 1 < n and not near[i + 1] and f[i] * f[i + 1] < 0:
            roots.append(bisect(func, x[i], x[i + 1], f[i], f[i + 1], xtol=xtol))
        i += 1
    return [(float(r), float(func(r))) for r in roots]
