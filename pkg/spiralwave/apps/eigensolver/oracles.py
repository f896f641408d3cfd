"""
Closed-form spectra used to cross-check the shooting solver.

Sphere: lambda_n^m = (m + n)(m + n + 1).
Disk: lambda_n^m = x^2 where x is the (n+1)-th positive root of
alpha1 J_m(x) + alpha2 x J_m'(x) = 0. Bessel values come from the ascending
series, refined in exact rational arithmetic during bisection.
"""

import math
from fractions import Fraction
from typing import List

from spiralwave.apps.geometry.boundary import BoundaryCondition

SCAN_STEP = 0.02
BISECTION_STEPS = 64


def sphere_eigenvalue(m: int, n: int) -> float:
    return float((m + n) * (m + n + 1))


def bessel_series(m: int, x: float) -> float:
    """J_m(x) from the ascending series, summed with math.fsum."""
    half = 0.5 * x
    terms = []
    term = half**m / math.factorial(m)
    k = 0
    while True:
        terms.append(term)
        k += 1
        term = -term * half * half / (k * (k + m))
        if abs(term) < 1e-18 * max(1.0, abs(terms[0])) and k > half:
            break
    return math.fsum(terms)


def _bessel_exact(m: int, x: Fraction, terms: int) -> Fraction:
    half_sq = (x / 2) ** 2
    term = (x / 2) ** m / math.factorial(m)
    total = term
    for k in range(1, terms):
        term = -term * half_sq / (k * (k + m))
        total += term
    return total


def _robin_exact(m: int, x: float, alpha1: float, alpha2: float) -> Fraction:
    # enough terms for the tail to fall below 1e-40 for x up to ~ 60
    terms = int(2 * x) + 60
    X = Fraction(x)
    j_m = _bessel_exact(m, X, terms)
    if alpha2 == 0.0:
        return j_m
    # J_m' = (J_{m-1} - J_{m+1}) / 2
    derivative = (_bessel_exact(m - 1, X, terms) - _bessel_exact(m + 1, X, terms)) / 2
    return Fraction(alpha1) * j_m + Fraction(alpha2) * X * derivative


def _robin_float(m: int, x: float, alpha1: float, alpha2: float) -> float:
    j_m = bessel_series(m, x)
    if alpha2 == 0.0:
        return j_m
    derivative = 0.5 * (bessel_series(m - 1, x) - bessel_series(m + 1, x))
    return alpha1 * j_m + alpha2 * x * derivative


def disk_roots(m: int, bc: BoundaryCondition, count: int) -> List[float]:
    """
    First `count` positive roots of alpha1 J_m(x) + alpha2 x J_m'(x).

    Sign changes are located by a float scan and refined by bisection on the
    exact rational series.
    """
    if m < 1:
        raise ValueError("Winding number m must be at least 1")
    if bc.is_none:
        raise ValueError("Disk roots need a Robin condition")
    roots: List[float] = []
    x = SCAN_STEP
    previous = _robin_float(m, x, bc.alpha1, bc.alpha2)
    while len(roots) < count:
        nxt = x + SCAN_STEP
        current = _robin_float(m, nxt, bc.alpha1, bc.alpha2)
        if previous == 0.0:
            roots.append(x)
        elif previous * current < 0.0:
            roots.append(_bisect(m, x, nxt, bc.alpha1, bc.alpha2))
        x, previous = nxt, current
    return roots


def _bisect(m: int, lo: float, hi: float, alpha1: float, alpha2: float) -> float:
    f_lo = _robin_exact(m, lo, alpha1, alpha2)
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        f_mid = _robin_exact(m, mid, alpha1, alpha2)
        if f_mid == 0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def disk_eigenvalues(m: int, bc: BoundaryCondition, count: int) -> List[float]:
    return [root * root for root in disk_roots(m, bc, count)]
