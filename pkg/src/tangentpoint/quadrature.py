"""Quadrature rules for the singular double integrals over parameter pairs.

The outer variable ``u`` always lives on a uniform periodic grid, where the
trapezoid rule is spectrally accurate.  The inner variable ``w`` runs over
the open interval (0, 1) and the integrands typically behave like
``w**a * (1 - w)**a`` at both ends.  Two rules are provided for it:

* a graded midpoint rule, obtained by pushing a uniform midpoint grid
  through the sigmoidal map ``t**g / (t**g + (1 - t)**g)``.  It needs no
  knowledge of ``a`` and is used for generic integrands and for probing
  divergence when ``a <= -1``;
* Gauss-Jacobi with weight ``(w (1 - w))**a``, used whenever the endpoint
  exponent is known and ``a > -1``.  The remaining factor is analytic for
  smooth embedded curves, so this converges geometrically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import mpmath
import numpy as np
from scipy.special import roots_jacobi

__all__ = [
    "QuadratureSpec",
    "ConvergenceStudy",
    "WRule",
    "graded_nodes",
    "graded_rule",
    "jacobi_rule",
    "select_w_rule",
    "periodic_trapezoid",
    "convergence_study",
    "parse_quad",
]

# below this relative size a difference between grid levels is rounding noise
ROUNDOFF_RTOL = 1e-13


@dataclass(frozen=True)
class QuadratureSpec:
    """Grid sizes and convergence settings for the double integrals.

    ``rule`` selects the inner rule: ``"auto"`` uses Gauss-Jacobi when the
    integrand's endpoint exponent is known and larger than -1 and the graded
    midpoint rule otherwise; ``"graded"`` forces the graded rule.
    """

    N_u: int = 256
    N_w: int = 256
    grading_exponent: float = 4.0
    doubling_rounds: int = 3
    convergence_rtol: float = 1e-6
    rule: str = "auto"

    def __post_init__(self):
        if self.N_u < 16 or self.N_w < 16:
            raise ValueError("N_u and N_w must be at least 16")
        if self.N_u % 2 or self.N_w % 2:
            raise ValueError("N_u and N_w must be even")
        if not 1.0 <= self.grading_exponent <= 8.0:
            raise ValueError("grading_exponent must lie in [1, 8]")
        if self.doubling_rounds < 1:
            raise ValueError("doubling_rounds must be >= 1")
        if self.convergence_rtol <= 0:
            raise ValueError("convergence_rtol must be positive")
        if self.rule not in ("auto", "graded"):
            raise ValueError(f"unknown rule {self.rule!r}")

    def with_grid(self, N_u: Optional[int] = None, N_w: Optional[int] = None) -> "QuadratureSpec":
        return QuadratureSpec(
            N_u=self.N_u if N_u is None else N_u,
            N_w=self.N_w if N_w is None else N_w,
            grading_exponent=self.grading_exponent,
            doubling_rounds=self.doubling_rounds,
            convergence_rtol=self.convergence_rtol,
            rule=self.rule,
        )


@dataclass(frozen=True)
class ConvergenceStudy:
    values: list
    sizes: list
    richardson_estimate: float
    observed_order: float
    converged: bool

    @property
    def error_estimate(self) -> float:
        if len(self.values) < 2:
            return 0.0
        return abs(self.values[-1] - self.values[-2])


@dataclass(frozen=True)
class WRule:
    """Nodes and weights on (0, 1), together with exact complements ``1 - w``.

    ``offsets`` maps each node to the representative of ``w`` mod 1 that is
    closest to zero, so that secants near ``w = 1`` are formed from a small
    negative shift instead of a difference of nearly equal parameters.
    """

    nodes: np.ndarray
    complements: np.ndarray
    weights: np.ndarray
    kind: str = field(default="graded")

    @property
    def offsets(self) -> np.ndarray:
        return np.where(self.nodes <= 0.5, self.nodes, -self.complements)


def _sigmoid_map(N: int, exponent: float):
    t = (np.arange(N) + 0.5) / N
    s = 1.0 - t
    tg = t**exponent
    sg = s**exponent
    den = tg + sg
    nodes = tg / den
    comps = sg / den
    jac = exponent * t ** (exponent - 1) * s ** (exponent - 1) / den**2
    # the midpoint sum of the Jacobian misses 1 by up to ~1e-11 for small exponents
    return nodes, comps, jac / jac.sum()


def graded_nodes(N: int, exponent: float):
    """Endpoint-graded midpoint rule on (0, 1).

    Parameters
    ----------
    N : int
        Number of nodes, even.
    exponent : float
        Grading strength ``g >= 1``; nodes near either endpoint behave like
        ``t**g``.  ``g = 1`` gives the plain midpoint rule.

    Returns
    -------
    nodes, weights : ndarray
        Symmetric nodes in (0, 1) and positive weights summing to one.
    """
    if N < 2 or N % 2:
        raise ValueError("N must be a positive even integer")
    if exponent < 1:
        raise ValueError("grading exponent must be >= 1")
    nodes, _, weights = _sigmoid_map(N, exponent)
    return nodes, weights


@lru_cache(maxsize=64)
def _graded_cached(N: int, exponent: float) -> WRule:
    nodes, comps, weights = _sigmoid_map(N, exponent)
    for a in (nodes, comps, weights):
        a.setflags(write=False)
    return WRule(nodes, comps, weights, kind="graded")


def graded_rule(N: int, exponent: float) -> WRule:
    graded_nodes(2, exponent)  # argument validation
    if N % 2:
        raise ValueError("N must be even")
    return _graded_cached(int(N), float(exponent))


def _jacobi_mp(n, a, x):
    """``P_n^{(a,a)}(x)`` and its derivative, by the three-term recurrence in mpmath."""

    def value(n, al, x):
        if n == 0:
            return mpmath.mpf(1)
        p0 = mpmath.mpf(1)
        p1 = (al + 1) + (2 * al + 2) * (x - 1) / 2
        ab = 2 * al
        for k in range(2, n + 1):
            c = 2 * k + ab
            p0, p1 = p1, ((c - 1) * (c * (c - 2) * x) * p1 - 2 * (k + al - 1) ** 2 * c * p0) / (
                2 * k * (k + ab) * (c - 2)
            )
        return p1

    return value(n, a, x), (n + 2 * a + 1) / 2 * value(n - 1, a + 1, x)


def _polish_tail(N: int, a: float, count: int):
    """Largest ``count`` roots of ``P_N^{(a,a)}`` as ``1 - x`` plus their weights, in mpmath.

    Double-precision roots carry an absolute error near 1e-16, a large
    relative error in the distance to the endpoint where the weight is
    singular.  Newton steps in extended precision starting from the
    classical approximation fix that.
    """
    x0, _ = roots_jacobi(N, a, a)
    out = []
    with mpmath.workdps(34):
        am = mpmath.mpf(a)
        const = (
            mpmath.gamma(N + am + 1) ** 2
            / (mpmath.gamma(N + 2 * am + 1) * mpmath.factorial(N))
            * mpmath.mpf(2) ** (2 * am + 1)
        )
        for k in range(N - count, N):
            t = mpmath.mpf(float(x0[k]))
            for _ in range(20):
                P, dP = _jacobi_mp(N, am, t)
                step = P / dP
                t -= step
                if abs(step) < mpmath.mpf(10) ** -30:
                    break
            _, dP = _jacobi_mp(N, am, t)
            out.append((1 - t, const / ((1 - t * t) * dP * dP)))
    return out


@lru_cache(maxsize=64)
def _jacobi_cached(N: int, a: float) -> WRule:
    x, wt = roots_jacobi(N, a, a)
    x = 0.5 * (x - x[::-1])  # exact symmetry
    y = 1.0 - x  # distance to +1
    if a != 0.0:
        count = min(8, N // 4)
        tail = _polish_tail(N, a, count)
        moment = 2.0 ** (2.0 * a + 1.0) * math.exp(2.0 * math.lgamma(a + 1.0) - math.lgamma(2.0 * a + 2.0))
        tail_sum = 2.0 * float(mpmath.fsum(w for _, w in tail))
        inner = slice(count, N - count)
        wt = wt.copy()
        # the classical weights are right up to a common factor away from the ends
        wt[inner] *= (moment - tail_sum) / wt[inner].sum()
        for i, (yk, wk) in enumerate(tail):
            k = N - count + i
            y[k] = float(yk)
            wt[k] = wt[N - 1 - k] = float(wk)
    # mirror the upper half so both ends carry exact distances
    lo, hi = N // 2, N - N // 2
    comps = 0.5 * y
    nodes = 1.0 - comps
    nodes[:lo] = comps[hi:][::-1]
    comps[:lo] = 1.0 - nodes[:lo]
    # weights act on the full integrand, singular factor divided back out
    weights = wt * 2.0 ** (-(2.0 * a + 1.0)) / (nodes * comps) ** a
    for arr in (nodes, comps, weights):
        arr.setflags(write=False)
    return WRule(nodes, comps, weights, kind="jacobi")


def jacobi_rule(N: int, a: float) -> WRule:
    """Gauss-Jacobi rule for integrands ``(w (1 - w))**a * smooth(w)`` on (0, 1).

    The returned weights already include the factor ``(w (1 - w))**-a``, so
    they are applied to samples of the full integrand.
    """
    if a <= -1:
        raise ValueError("Gauss-Jacobi needs an endpoint exponent > -1")
    return _jacobi_cached(int(N), round(float(a), 14))


def select_w_rule(spec: QuadratureSpec, N_w: int, exponent: Optional[float]) -> WRule:
    """Inner rule for an integrand with endpoint exponent ``exponent`` (None if unknown)."""
    if spec.rule == "auto" and exponent is not None and exponent > -1 + 1e-9:
        if abs(exponent) < 1e-14:
            return jacobi_rule(N_w, 0.0)
        return jacobi_rule(N_w, exponent)
    return graded_rule(N_w, spec.grading_exponent)


def periodic_trapezoid(f_values) -> float:
    """Trapezoid rule on a uniform periodic grid over one period of length one."""
    f = np.asarray(f_values, dtype=float)
    if f.size == 0:
        raise ValueError("need at least one sample")
    return float(np.mean(f))


def _observed_order(values) -> float:
    if len(values) < 3:
        return math.nan
    d1 = abs(values[-2] - values[-3])
    d2 = abs(values[-1] - values[-2])
    scale = max(abs(values[-1]), 1e-300)
    if d2 <= ROUNDOFF_RTOL * scale:
        return math.inf
    if d1 == 0:
        return math.nan
    return math.log2(d1 / d2)


def summarize_levels(values, sizes, rtol: float) -> ConvergenceStudy:
    """Build a ConvergenceStudy from values on successively doubled grids."""
    values = [float(v) for v in values]
    order = _observed_order(values)
    last = values[-1]
    if len(values) >= 2:
        diff = last - values[-2]
        converged = bool(np.isfinite(last) and abs(diff) <= rtol * abs(last))
        if np.isfinite(order) and order > 0:
            richardson = last + diff / (2.0**order - 1.0)
        else:
            richardson = last
    else:
        converged = bool(np.isfinite(last))
        richardson = last
    return ConvergenceStudy(
        values=values,
        sizes=list(sizes),
        richardson_estimate=float(richardson),
        observed_order=float(order),
        converged=converged,
    )


def convergence_study(
    evaluator: Callable[[int], float],
    spec: QuadratureSpec,
    start: Optional[int] = None,
) -> ConvergenceStudy:
    """Evaluate on N, 2N, 4N, ... and judge contraction.

    ``start`` defaults to ``spec.N_w``; ``spec.doubling_rounds`` doublings are
    performed, so ``doubling_rounds + 1`` values are produced.  A sequence
    whose last increment exceeds ``convergence_rtol`` relative to the last
    value is reported as not converged; this is how divergent energies show
    up.
    """
    n0 = spec.N_w if start is None else int(start)
    sizes = [n0 * 2**k for k in range(spec.doubling_rounds + 1)]
    values = [float(evaluator(n)) for n in sizes]
    return summarize_levels(values, sizes, spec.convergence_rtol)


def parse_quad(text: str, base: Optional[QuadratureSpec] = None) -> QuadratureSpec:
    """Parse the ``NU,NW,G`` command-line form (G optional)."""
    base = base or QuadratureSpec()
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if len(parts) not in (2, 3):
        raise ValueError(f"expected NU,NW[,G], got {text!r}")
    N_u, N_w = int(parts[0]), int(parts[1])
    g = float(parts[2]) if len(parts) == 3 else base.grading_exponent
    return QuadratureSpec(
        N_u=N_u,
        N_w=N_w,
        grading_exponent=g,
        doubling_rounds=base.doubling_rounds,
        convergence_rtol=base.convergence_rtol,
        rule=base.rule,
    )
