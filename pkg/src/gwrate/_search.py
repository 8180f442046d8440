"""Scalar search helpers."""

import math

INV_PHI = (math.sqrt(5) - 1) / 2


def golden_section(f, lo, hi, tol=1e-10, max_iter=500):
    """Minimize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = float(lo), float(hi)
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    best = min(((f1, x1), (f2, x2), (f(lo), lo), (f(hi), hi)))
    return best[1], best[0]


def bisect_sign_change(g, lo, hi, tol=1e-12, max_iter=200):
    """Point where an increasing ``g`` crosses zero on ``[lo, hi]``.

    Returns the nearer endpoint when ``g`` does not change sign.
    """
    a, b = float(lo), float(hi)
    if g(a) >= 0:
        return a
    if g(b) <= 0:
        return b
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        if b - a <= tol or m in (a, b):
            break
        if g(m) < 0:
            a = m
        else:
            b = m
    return 0.5 * (a + b)
