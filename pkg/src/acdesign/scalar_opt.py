"""Scalar search utilities: golden-section maximization and guarded bisection."""

from __future__ import annotations

import math

from .exceptions import InfeasibleGeometryError

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_max(f, a: float, b: float, tol: float) -> tuple[float, float]:
    """Golden-section maximization of a unimodal f on [a, b].

    Returns (argmax, max). The bracket shrinks below tol before evaluating
    the midpoint winner, so the argmax is located within tol.
    """
    a, b = (a, b) if a <= b else (b, a)
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x)
    n = int(math.ceil(math.log(tol / h) / math.log(_INV_PHI)))
    c = a + _INV_PHI2 * h
    d = a + _INV_PHI * h
    yc, yd = f(c), f(d)
    for _ in range(n - 1):
        if yc > yd:
            b, d, yd = d, c, yc
            h *= _INV_PHI
            c = a + _INV_PHI2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h *= _INV_PHI
            d = a + _INV_PHI * h
            yd = f(d)
    return (c, yc) if yc > yd else (d, yd)


def bracketed_root(f, lo: float, hi: float, scan: int = 64, tol: float = 0.0) -> float:
    """Root of f on (lo, hi) after a sign-change scan over `scan` subintervals.

    Exactly one sign change is required; zero or several raise, because a
    silent pick could hide a multiple-root pathology.  Bisection to tol,
    then one Newton polish from a central difference.
    """
    import numpy as np

    xs = np.linspace(lo, hi, scan + 1)
    vals = np.array([f(x) for x in xs])
    sign_changes = [
        i for i in range(scan) if vals[i] == 0.0 or vals[i] * vals[i + 1] < 0
    ]
    if not sign_changes:
        raise InfeasibleGeometryError("no root bracketed in the dose range")
    if len(sign_changes) > 1:
        raise InfeasibleGeometryError(
            f"{len(sign_changes)} sign changes found; root is ambiguous"
        )
    i = sign_changes[0]
    a, b = float(xs[i]), float(xs[i + 1])
    fa = f(a)
    if tol <= 0:
        tol = 1e-14 * (hi - lo)
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if fa * fm < 0:
            b = m
        else:
            a, fa = m, fm
    x = 0.5 * (a + b)
    h = max(1e-7 * (hi - lo), 1e-12)
    deriv = (f(x + h) - f(x - h)) / (2.0 * h)
    if deriv != 0.0:
        step = f(x) / deriv
        if abs(step) < (b - a) + h:
            x -= step
    return min(max(x, lo), hi)
