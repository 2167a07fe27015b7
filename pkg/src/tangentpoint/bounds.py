"""Closed-form sharp lower bounds and (p, q) parameter regions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "BoundValue",
    "ParamRegion",
    "FLAGS",
    "gamma_fn",
    "sin_power_integral",
    "tp_lower_bound",
    "willmore_lower_bound",
    "g_slice_bound",
    "f_slice_bound",
    "classify_region",
    "sigma_mu",
]

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

# boundary membership tolerance for region classification
REGION_TOL = 1e-12

FLAGS = (
    "repulsive",
    "mildly_repulsive",
    "lower_limit",
    "infinite_energy",
    "bound_valid_all",
    "bound_valid_convex_only",
    "no_minimizer",
)


def gamma_fn(x: float) -> float:
    """Gamma function for positive real arguments.

    Uses the reflection formula below 1/2 and the Lanczos series above.
    Relative accuracy is better than 1e-13 on (0, 50].
    """
    x = float(x)
    if not x > 0:
        raise ValueError(f"gamma_fn needs x > 0, got {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    # split the power to keep t**(x+1/2) finite for large x
    half = t ** (0.5 * (x + 0.5))
    return _SQRT_2PI * half * (half * math.exp(-t)) * acc


def sin_power_integral(a: float) -> float:
    """Integral of ``sin(pi w)**a`` over (0, 1), finite for ``a > -1``."""
    a = float(a)
    if not a > -1:
        raise ValueError(f"integral of sin(pi w)**{a} diverges (need a > -1)")
    return gamma_fn(0.5 * (a + 1.0)) / (math.sqrt(math.pi) * gamma_fn(0.5 * (a + 2.0)))


@dataclass(frozen=True)
class BoundValue:
    value: float
    formula: str
    params: dict = field(default_factory=dict)

    def __float__(self):
        return self.value


def tp_lower_bound(L: float, p: float, q: float) -> BoundValue:
    """Sharp lower bound for the (p, q) tangent-point energy at length ``L``.

    Equal to ``L**(q+2-p) * pi**(p-q) * int_0^1 sin(pi w)**(2q-p) dw``.
    Circles attain it.
    """
    if L <= 0:
        raise ValueError("length must be positive")
    a = 2.0 * q - p
    if not a > -1:
        raise ValueError(f"bound undefined for 2q - p = {a} <= -1 (energy is infinite)")
    value = L ** (q + 2.0 - p) * math.pi ** (p - q) * sin_power_integral(a)
    return BoundValue(value, "tp_sharp", {"L": L, "p": p, "q": q})


def willmore_lower_bound(L: float, s: float, p: float) -> BoundValue:
    if L <= 0:
        raise ValueError("perimeter must be positive")
    if not 0 < s < 1:
        raise ValueError(f"s must lie in (0, 1), got {s}")
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    base = math.pi ** (1.0 + s) * sin_power_integral(-s)
    value = L ** (1.0 - p * s) * base**p
    return BoundValue(value, "willmore", {"L": L, "s": s, "p": p})


def g_slice_bound(p: float, q: float, w: float) -> BoundValue:
    """Pointwise-in-w bound ``pi**(p-q) sin(pi w)**(2q-p)`` for the G slice at unit length."""
    if not 0 < w < 1:
        raise ValueError("w must lie in (0, 1)")
    value = math.pi ** (p - q) * math.sin(math.pi * w) ** (2.0 * q - p)
    return BoundValue(value, "g_slice", {"p": p, "q": q, "w": w})


def f_slice_bound(q: float) -> BoundValue:
    """Bound ``pi * int sin(pi w)**(q-1) dw`` for the F slice in the lower limit case p = q + 1."""
    value = math.pi * sin_power_integral(q - 1.0)
    return BoundValue(value, "f_slice", {"p": q + 1.0, "q": q})


@dataclass(frozen=True)
class ParamRegion:
    p: float
    q: float
    flags: frozenset

    def __contains__(self, flag):
        return flag in self.flags

    def sorted_flags(self):
        return [f for f in FLAGS if f in self.flags]


def _closed(x, lo, hi, tol=REGION_TOL):
    return lo - tol <= x <= hi + tol


def _half_open(x, lo, hi, tol=REGION_TOL):
    return lo - tol <= x < hi - tol


def _open(x, lo, hi, tol=REGION_TOL):
    return lo + tol < x < hi - tol


def classify_region(p: float, q: float) -> ParamRegion:
    """Flag the regimes of the (p, q) plane that the point belongs to.

    The unconditional and convex-only validity of the sharp bound may both be
    set where their ranges overlap; interpretation is left to the caller.
    """
    flags = set()
    tol = REGION_TOL
    if q > 1 + tol and _half_open(p, q + 2.0, 2.0 * q + 1.0):
        flags.add("repulsive")
    if _open(p, q + 1.0, q + 2.0):
        flags.add("mildly_repulsive")
    lower = abs(p - (q + 1.0)) <= tol
    if lower:
        flags.add("lower_limit")
    if q > 1 + tol and p >= 2.0 * q + 1.0 - tol:
        flags.add("infinite_energy")
    if q >= 1 - tol:
        main = _half_open(p, q + 1.0, 2.0 * q + 1.0) and _closed(p, 2.0 * q - 2.0, 4.0 * q - 2.0)
        if (main or lower) and "infinite_energy" not in flags:
            flags.add("bound_valid_all")
        if _open(p, 2.0 * q, 2.0 * q + 1.0):
            flags.add("bound_valid_convex_only")
    if p < q + 1.0 - tol:
        flags.add("no_minimizer")
    return ParamRegion(p=float(p), q=float(q), flags=frozenset(flags))


def sigma_mu(p: float, q: float):
    """Exponent split used to reduce p in (q+1, 2q) to the lower limit case.

    Returns ``(sigma, mu)`` with ``sigma + mu = 2q - p``; when ``sigma + mu``
    is nonzero the identities ``sigma/(sigma+mu) + sigma = q`` and
    ``2 sigma/(sigma+mu) + sigma - mu = p`` are checked as well.
    """
    den = 2.0 * q - p + 1.0
    if abs(den) < 1e-14:
        raise ValueError("degenerate split: 2q - p + 1 = 0")
    a = 2.0 * q - p
    sigma = a * q / den
    mu = a * (q - p + 1.0) / den
    scale = max(1.0, abs(p), abs(q))
    checks = [(sigma + mu, a)]
    if abs(sigma + mu) > 1e-12:
        checks.append((sigma / (sigma + mu) + sigma, q))
        checks.append((2.0 * sigma / (sigma + mu) + sigma - mu, p))
    for got, want in checks:
        if abs(got - want) > 1e-12 * scale:
            raise ArithmeticError(f"sigma/mu identity violated: {got} != {want}")
    return sigma, mu
