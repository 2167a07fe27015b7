"""Tangent-point energies, their Gauss-map minorants, and fractional Willmore energies.

All double integrals run over pairs ``(u, u + w)`` with ``u`` on the sample
grid (periodic trapezoid rule) and ``w`` in (0, 1) on a rule from
:mod:`tangentpoint.quadrature`.  The value is reported from the finest grid
and the error estimate is the change from the next coarser grid, where the
coarse grids use every ``2**l``-th sample row and ``N_w / 2**l`` inner nodes.

Notation: ``delta = gamma(u + w) - gamma(u)``, ``chord = |delta|``,
``P0 delta`` is the part of ``delta`` normal to the tangent at ``u``.

=========  ==============================================================
TP         |P0 delta|**q / chord**p * |gamma'(u)| |gamma'(u + w)|
TPClassic  (1 / r_TP)**q * |gamma'(u)| |gamma'(u + w)|, 1/r_TP = 2|P0 delta|/chord**2
G          (|d_u phi| / 2)**q * chord**(2q - p)
F          (|P0 delta| / chord)**(2q - p) * |d_w phi|**(p - q)
=========  ==============================================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .curves import CurveSamples, Secants, is_convex_planar, is_embedded_check, regrid
from .gaussmap import grid_offsets, project_perp
from .quadrature import (
    ConvergenceStudy,
    QuadratureSpec,
    WRule,
    select_w_rule,
    summarize_levels,
)

__all__ = [
    "KINDS",
    "EnergySpec",
    "EnergyValue",
    "tp_energy",
    "tp_classic",
    "g_energy",
    "g_slice_w",
    "f_energy",
    "f_slice_u",
    "nonlocal_mean_curvature",
    "willmore_fractional",
    "functional_I1",
    "functional_I2",
    "functional_I3",
    "wirtinger_check",
    "evaluate",
]

KINDS = ("TP", "TPClassic", "G", "GSliceW", "F", "FSliceU", "Willmore", "I1", "I2", "I3")

# the error estimate never drops below accumulated rounding
ERROR_FLOOR_RTOL = 1e-14
# rows * nodes * modes per block of secant evaluations
_BLOCK = 3_000_000
EMBED_TOL = 1e-6


@dataclass(frozen=True)
class EnergySpec:
    """Which functional to evaluate and its parameters."""

    kind: str = "TP"
    p: float = 4.0
    q: float = 2.0
    s: float = 0.5
    slice_value: float = 0.5
    z_variable: str = "u"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown energy kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "Willmore":
            if not 0.0 < self.s < 1.0:
                raise ValueError(f"Willmore needs s in (0, 1), got {self.s}")
            if self.p < 1.0:
                raise ValueError(f"Willmore needs p >= 1, got {self.p}")
        elif self.kind in ("TP", "TPClassic", "G", "GSliceW", "F", "FSliceU"):
            if self.p < 0 or not self.q > 0:
                raise ValueError(f"need p >= 0 and q > 0, got p={self.p}, q={self.q}")
        if self.z_variable not in ("u", "w"):
            raise ValueError("z_variable must be 'u' or 'w'")

    @property
    def alpha(self) -> float:
        return self.p - self.q

    @property
    def beta(self) -> float:
        return 2.0 * self.q - self.p

    @property
    def requires_arclength(self) -> bool:
        return self.kind in ("F", "FSliceU", "I2")


@dataclass(frozen=True)
class EnergyValue:
    value: float
    quadrature_error_estimate: float
    N_u: int
    N_w: int
    converged: bool
    kind: str = "TP"
    p: float = math.nan
    q: float = math.nan
    s: float = math.nan
    study: Optional[ConvergenceStudy] = field(default=None, repr=False, compare=False)

    @property
    def error_estimate(self) -> float:
        return self.quadrature_error_estimate

    @property
    def grid(self):
        return (self.N_u, self.N_w)

    def __float__(self):
        return self.value

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "p": self.p,
            "q": self.q,
            "s": self.s,
            "value": self.value,
            "error_estimate": self.quadrature_error_estimate,
            "N_u": self.N_u,
            "N_w": self.N_w,
            "converged": self.converged,
        }

    def to_json(self) -> str:
        from .jsonio import dumps

        return dumps(self.to_dict())


# engine ------------------------------------------------------------------


def _norm(x):
    return np.linalg.norm(x, axis=-1)


def _row_integrals(samples: CurveSamples, rows, rule: WRule, integrand) -> np.ndarray:
    """``sum_j weight_j * integrand(u_row, w_j)`` for every requested row."""
    offsets = rule.offsets
    block = max(1, _BLOCK // (len(offsets) * samples.series_modes))
    out = np.empty(len(rows))
    for start in range(0, len(rows), block):
        r = rows[start : start + block]
        sec = samples.secants(
            samples.params[r][:, None], offsets[None, :], base_orig=samples.orig_params[r][:, None]
        )
        if np.any(sec.chord < 1e-14 * samples.length):
            raise ValueError("coincident sample points: the curve is not embedded")
        out[start : start + len(r)] = integrand(sec, r) @ rule.weights
    return out


def _grid_value(samples, rows, rule, integrand, combine):
    per_row = _row_integrals(samples, rows, rule, integrand)
    if combine is None:
        return float(np.mean(per_row))
    return float(combine(per_row, rows))


def _prepare(samples: CurveSamples, quad: QuadratureSpec) -> CurveSamples:
    if samples.N != quad.N_u:
        samples = regrid(samples, quad.N_u)
    if not is_embedded_check(samples, EMBED_TOL):
        raise ValueError("samples are not embedded (pairwise chord scan failed)")
    return samples


def _study(samples, quad, exponent, integrand, combine=None):
    N = samples.N
    values, sizes = [], []
    for lvl in range(quad.doubling_rounds, -1, -1):
        f = 2**lvl
        nw = quad.N_w // f
        if N % f or nw < 2 or nw % 2:
            raise ValueError("grid sizes must be divisible by 2**doubling_rounds")
        rule = select_w_rule(quad, nw, exponent)
        rows = np.arange(0, N, f)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            values.append(_grid_value(samples, rows, rule, integrand, combine))
        sizes.append((N // f, nw))
    return summarize_levels(values, sizes, quad.convergence_rtol)


def _result(study: ConvergenceStudy, samples, quad, kind, p=math.nan, q=math.nan, s=math.nan):
    value = study.values[-1]
    err = study.error_estimate
    if math.isfinite(value):
        err = max(err, ERROR_FLOOR_RTOL * abs(value))
    converged = study.converged and math.isfinite(value)
    return EnergyValue(
        value=float(value),
        quadrature_error_estimate=float(err) if math.isfinite(err) else math.inf,
        N_u=samples.N,
        N_w=quad.N_w,
        converged=bool(converged),
        kind=kind,
        p=float(p),
        q=float(q),
        s=float(s),
        study=study,
    )


def _tp_exponent(p, q):
    return 2.0 * q - p


def _dw_norm(sec: Secants):
    c = sec.chord
    return _norm(sec.tan1) * _norm(sec.perp1) / (c * c)


def _du_norm(sec: Secants):
    c = sec.chord
    return _norm(project_perp(sec.delta / c[..., None], sec.dtan)) / c


# tangent-point energies ----------------------------------------------------


def tp_energy(samples: CurveSamples, p: float, q: float, quad: QuadratureSpec = None) -> EnergyValue:
    """Generalized tangent-point energy of exponents ``(p, q)``.

    Finite on smooth embedded curves iff ``p < 2q + 1``; otherwise the
    grid sums keep growing and the result is returned with
    ``converged=False``.
    """
    quad = quad or QuadratureSpec()
    EnergySpec("TP", p=p, q=q)
    samples = _prepare(samples, quad)

    def integrand(sec, rows):
        c = sec.chord
        return _norm(sec.perp0) ** q / c**p * _norm(sec.tan0) * _norm(sec.tan1)

    study = _study(samples, quad, _tp_exponent(p, q), integrand)
    return _result(study, samples, quad, "TP", p, q)


def tp_classic(samples: CurveSamples, q: float, quad: QuadratureSpec = None) -> EnergyValue:
    """Classical tangent-point energy: integral of ``r_TP**-q`` against both speeds.

    Equals ``2**q`` times the ``(2q, q)`` energy.
    """
    quad = quad or QuadratureSpec()
    EnergySpec("TPClassic", p=2.0 * q, q=q)
    samples = _prepare(samples, quad)

    def integrand(sec, rows):
        c = sec.chord
        inv_r = 2.0 * _norm(sec.perp0) / (c * c)
        return inv_r**q * _norm(sec.tan0) * _norm(sec.tan1)

    study = _study(samples, quad, 0.0, integrand)
    return _result(study, samples, quad, "TPClassic", 2.0 * q, q)


# minorants -------------------------------------------------------------------


def _g_integrand(p, q):
    def integrand(sec, rows):
        return (0.5 * _du_norm(sec)) ** q * sec.chord ** (2.0 * q - p)

    return integrand


def g_energy(samples: CurveSamples, p: float, q: float, quad: QuadratureSpec = None) -> EnergyValue:
    """Minorant built from ``|d_u phi|``; no speed weights are applied."""
    quad = quad or QuadratureSpec()
    EnergySpec("G", p=p, q=q)
    samples = _prepare(samples, quad)
    study = _study(samples, quad, _tp_exponent(p, q), _g_integrand(p, q))
    return _result(study, samples, quad, "G", p, q)


def g_slice_w(samples: CurveSamples, p: float, q: float, w: float) -> float:
    """``G_w``: integral over ``u`` of ``(|d_u phi|/2)**q chord**(2q - p)`` at fixed ``w``."""
    if not 0.0 < w < 1.0:
        raise ValueError("w must lie in (0, 1)")
    EnergySpec("GSliceW", p=p, q=q, slice_value=w)
    off = w if w <= 0.5 else -(1.0 - w)
    sec = samples.secants(samples.params, off, base_orig=samples.orig_params)
    if np.any(sec.chord < 1e-14 * samples.length):
        raise ValueError("coincident sample points: the curve is not embedded")
    return float(np.mean(_g_integrand(p, q)(sec, None)))


def _require_arclength(samples: CurveSamples, what: str):
    if not samples.is_arclength:
        raise ValueError(f"{what} is defined for arc-length samples; use resample_arclength")


def _f_integrand(p, q):
    alpha, beta = p - q, 2.0 * q - p

    def integrand(sec, rows):
        c = sec.chord
        return (_norm(sec.perp0) / c) ** beta * _dw_norm(sec) ** alpha

    return integrand


def f_energy(samples: CurveSamples, p: float, q: float, quad: QuadratureSpec = None) -> EnergyValue:
    """Minorant ``F`` with exponents ``alpha = p - q`` and ``beta = 2q - p``."""
    quad = quad or QuadratureSpec()
    EnergySpec("F", p=p, q=q)
    _require_arclength(samples, "F")
    samples = _prepare(samples, quad)
    study = _study(samples, quad, 2.0 * q - p, _f_integrand(p, q))
    return _result(study, samples, quad, "F", p, q)


def f_slice_u(samples: CurveSamples, p: float, q: float, i: int, quad: QuadratureSpec = None) -> float:
    """``F_u`` at the sample ``u_i``, integrated over ``w`` with ``quad.N_w`` nodes."""
    quad = quad or QuadratureSpec()
    EnergySpec("FSliceU", p=p, q=q)
    _require_arclength(samples, "F_u")
    rule = select_w_rule(quad, quad.N_w, 2.0 * q - p)
    rows = np.array([int(i) % samples.N])
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        return float(_row_integrals(samples, rows, rule, _f_integrand(p, q))[0])


# fractional Willmore -----------------------------------------------------


def _convex_orientation(samples: CurveSamples) -> float:
    if samples.dims != 2:
        raise ValueError("nonlocal mean curvature needs planar (dims = 2) samples")
    rep = is_convex_planar(samples)
    if not rep.is_convex:
        raise ValueError("nonlocal mean curvature needs a convex curve")
    return 1.0 if rep.total_turning > 0 else -1.0


def _h_integrand(s, method, orient):
    if method == "gauss":

        def integrand(sec, rows):
            return _dw_norm(sec) * sec.chord ** (-s)

    elif method == "normal":

        def integrand(sec, rows):
            t1 = sec.tan1
            sp = _norm(t1)
            # inward normal at gamma(u + w): tangent rotated towards the interior
            n1 = orient * np.stack([-t1[..., 1], t1[..., 0]], axis=-1) / sp[..., None]
            # <n, gamma(u) - gamma(u + w)> only sees the normal part of the secant
            num = -np.sum(n1 * sec.perp1, axis=-1)
            return num / sec.chord ** (2.0 + s) * sp

    else:
        raise ValueError("method must be 'gauss' or 'normal'")
    return integrand


def nonlocal_mean_curvature(
    samples: CurveSamples,
    i: int,
    s: float,
    quad: QuadratureSpec = None,
    method: str = "gauss",
) -> float:
    """Nonlocal mean curvature (normalizing constant 1) at the sample ``u_i``.

    ``method="normal"`` integrates the inward-normal form directly;
    ``method="gauss"`` uses ``|d_w phi| chord**-s``, which agrees with it on
    convex curves.
    """
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0, 1), got {s}")
    quad = quad or QuadratureSpec()
    orient = _convex_orientation(samples)
    rule = select_w_rule(quad, quad.N_w, -s)
    rows = np.array([int(i) % samples.N])
    return float(_row_integrals(samples, rows, rule, _h_integrand(s, method, orient))[0])


def willmore_fractional(
    samples: CurveSamples,
    s: float,
    p: float,
    quad: QuadratureSpec = None,
    method: str = "gauss",
) -> EnergyValue:
    """``W_{s,p}``: integral of ``|H|**p`` along the boundary curve."""
    quad = quad or QuadratureSpec()
    EnergySpec("Willmore", p=p, s=s)
    samples = _prepare(samples, quad)
    orient = _convex_orientation(samples)

    def combine(H, rows):
        return np.mean(np.abs(H) ** p * samples.speeds[rows])

    study = _study(samples, quad, -s, _h_integrand(s, method, orient), combine)
    return _result(study, samples, quad, "Willmore", p=p, s=s)


# generic functionals ------------------------------------------------------


def _vectorize(fn):
    def apply(x):
        try:
            out = fn(x)
            out = np.broadcast_to(np.asarray(out, dtype=float), np.shape(x))
            return out
        except (TypeError, ValueError):
            return np.vectorize(fn, otypes=[float])(x)

    return apply


def _graded(quad: QuadratureSpec) -> QuadratureSpec:
    return QuadratureSpec(
        N_u=quad.N_u,
        N_w=quad.N_w,
        grading_exponent=quad.grading_exponent,
        doubling_rounds=quad.doubling_rounds,
        convergence_rtol=quad.convergence_rtol,
        rule="graded",
    )


def functional_I1(samples: CurveSamples, f: Callable, z: str = "u", quad: QuadratureSpec = None) -> EnergyValue:
    """Double integral of ``f(|d_z phi|)`` over parameter pairs, without speed factors."""
    if z not in ("u", "w"):
        raise ValueError("z must be 'u' or 'w'")
    quad = _graded(quad or QuadratureSpec())
    samples = _prepare(samples, quad)
    fv = _vectorize(f)
    deriv = _du_norm if z == "u" else _dw_norm

    def integrand(sec, rows):
        return fv(deriv(sec))

    study = _study(samples, quad, None, integrand)
    return _result(study, samples, quad, "I1")


def functional_I2(samples: CurveSamples, f: Callable, g: Callable, quad: QuadratureSpec = None) -> EnergyValue:
    """Double integral of ``f(|d_u phi|) / g(chord**2)``; needs arc-length samples."""
    _require_arclength(samples, "I2")
    quad = _graded(quad or QuadratureSpec())
    samples = _prepare(samples, quad)
    fv, gv = _vectorize(f), _vectorize(g)

    def integrand(sec, rows):
        return fv(_du_norm(sec)) / gv(sec.chord**2)

    study = _study(samples, quad, None, integrand)
    return _result(study, samples, quad, "I2")


def functional_I3(samples: CurveSamples, g: Callable, quad: QuadratureSpec = None) -> EnergyValue:
    """Double integral of ``g(<t(u), phi>) |d_w phi|`` with ``t`` the unit tangent."""
    quad = _graded(quad or QuadratureSpec())
    samples = _prepare(samples, quad)
    gv = _vectorize(g)

    def integrand(sec, rows):
        t = sec.tan0 / _norm(sec.tan0)[..., None]
        phi = sec.delta / sec.chord[..., None]
        cosang = np.clip(np.sum(t * phi, axis=-1), -1.0, 1.0)
        return gv(cosang) * _dw_norm(sec)

    study = _study(samples, quad, None, integrand)
    return _result(study, samples, quad, "I3")


def wirtinger_check(samples: CurveSamples, shift: float):
    """Both sides of the Wirtinger inequality for a shift snapped to ``j/N``.

    ``lhs = int |gamma(t + shift) - gamma(t)|**2 dt`` and
    ``rhs = (sin(pi shift)/pi)**2 int |gamma'|**2 dt`` on the unit torus.
    """
    N = samples.N
    j = int(round(shift * N)) % N
    if j == 0:
        return 0.0, 0.0
    off = grid_offsets(N, j)
    sec = samples.secants(samples.params, off, base_orig=samples.orig_params)
    lhs = float(np.mean(sec.chord**2))
    w = j / N
    rhs = (math.sin(math.pi * w) / math.pi) ** 2 * float(np.mean(samples.speeds**2))
    return lhs, rhs


def evaluate(
    samples: CurveSamples,
    spec: EnergySpec,
    quad: QuadratureSpec = None,
    f: Callable = None,
    g: Callable = None,
):
    """Evaluate the functional named by ``spec``."""
    quad = quad or QuadratureSpec()
    k = spec.kind
    if k == "TP":
        return tp_energy(samples, spec.p, spec.q, quad)
    if k == "TPClassic":
        return tp_classic(samples, spec.q, quad)
    if k == "G":
        return g_energy(samples, spec.p, spec.q, quad)
    if k == "F":
        return f_energy(samples, spec.p, spec.q, quad)
    if k == "Willmore":
        return willmore_fractional(samples, spec.s, spec.p, quad)
    if k == "GSliceW":
        return g_slice_w(samples, spec.p, spec.q, spec.slice_value)
    if k == "FSliceU":
        return f_slice_u(samples, spec.p, spec.q, int(round(spec.slice_value * samples.N)), quad)
    if k == "I1":
        return functional_I1(samples, f or (lambda x: x), spec.z_variable, quad)
    if k == "I2":
        if f is None or g is None:
            raise ValueError("I2 needs both f and g")
        return functional_I2(samples, f, g, quad)
    if k == "I3":
        return functional_I3(samples, g or (lambda x: np.ones_like(x)), quad)
    raise ValueError(f"unknown kind {k!r}")
