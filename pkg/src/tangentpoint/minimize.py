"""Fixed-length steepest descent over Fourier coefficients.

The objective rescales every candidate curve to the target length before
evaluating the energy, so it is constant along pure rescalings and the
length constraint holds exactly.  Curves that fail the embeddedness scan
get the value ``+inf``, which the line search treats as a rejected step.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field
from functools import partial
from typing import List, Optional

import numpy as np

from .bounds import tp_lower_bound, willmore_lower_bound
from .curves import (
    FourierCurve,
    make_circle,
    make_perturbed_circle,
    is_embedded_check,
    rescale_to_length,
    resample_arclength,
    sample,
)
from .energies import EnergySpec, evaluate
from .quadrature import QuadratureSpec

__all__ = [
    "MinimizeConfig",
    "MinimizeReport",
    "coeffs_to_vector",
    "vector_to_coeffs",
    "energy_of_coeffs",
    "gradient_fd",
    "descend",
    "circle_deviation",
    "bound_for",
    "perturbation_gap",
]

TERMINATIONS = ("grad_norm", "max_iters", "line_search_failure")


@dataclass(frozen=True)
class MinimizeConfig:
    """Settings for :func:`descend`.

    ``initial_step`` is the first trial step of the line search; later
    iterations start from twice the last accepted step, capped at
    ``max_step``.
    """

    spec: EnergySpec = field(default_factory=EnergySpec)
    modes: int = 5
    dims: int = 2
    target_length: float = 1.0
    max_iters: int = 500
    grad_step: float = 1e-5
    initial_step: float = 1e-3
    shrink: float = 0.5
    armijo: float = 1e-4
    max_step: float = 1.0
    max_backtracks: int = 40
    stop_grad_norm: float = 1e-1
    fd_order: int = 2
    embed_tol: float = 1e-3
    jobs: int = 1
    quad: QuadratureSpec = field(
        default_factory=lambda: QuadratureSpec(N_u=32, N_w=32, doubling_rounds=1)
    )

    def __post_init__(self):
        if not 1 <= self.modes <= 8:
            raise ValueError("modes must lie in [1, 8]")
        if self.dims not in (2, 3):
            raise ValueError("dims must be 2 or 3")
        if self.target_length <= 0:
            raise ValueError("target_length must be positive")
        if not 1e-7 <= self.grad_step <= 1e-3:
            raise ValueError("grad_step must lie in [1e-7, 1e-3]")
        if not 0.0 < self.armijo < 0.5:
            raise ValueError("Armijo constant must lie in (0, 0.5)")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink factor must lie in (0, 1)")
        if self.initial_step <= 0 or self.max_step <= 0:
            raise ValueError("step sizes must be positive")
        if self.fd_order not in (2, 4):
            raise ValueError("fd_order must be 2 or 4")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


@dataclass(frozen=True)
class MinimizeReport:
    energies: List[float]
    final_coeffs: FourierCurve
    final_grad_norm: float
    circle_deviation: float
    bound_gap: float
    iterations_used: int
    terminated_by: str
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "energies": list(self.energies),
            "final_coeffs": self.final_coeffs.to_dict(),
            "final_grad_norm": self.final_grad_norm,
            "circle_deviation": self.circle_deviation,
            "bound_gap": self.bound_gap,
            "iterations_used": self.iterations_used,
            "terminated_by": self.terminated_by,
        }

    def energies_csv(self) -> str:
        from .jsonio import write_csv

        rows = [{"iteration": i, "energy": e} for i, e in enumerate(self.energies)]
        return write_csv(rows, ["iteration", "energy"])


def coeffs_to_vector(curve: FourierCurve) -> np.ndarray:
    """Free parameters ``a_k, b_k`` for ``k >= 1``; ``a_0`` only translates."""
    return np.concatenate([curve.a[:, 1:].ravel(), curve.b[:, 1:].ravel()])


def vector_to_coeffs(x, dims: int, modes: int, a0=None) -> FourierCurve:
    x = np.asarray(x, dtype=float)
    n = dims * modes
    a = np.zeros((dims, modes + 1))
    b = np.zeros((dims, modes + 1))
    a[:, 1:] = x[:n].reshape(dims, modes)
    b[:, 1:] = x[n:].reshape(dims, modes)
    if a0 is not None:
        a[:, 0] = a0
    return FourierCurve(a, b)


def _conform(curve: FourierCurve, config: MinimizeConfig) -> FourierCurve:
    if curve.modes > config.modes:
        raise ValueError(f"curve has {curve.modes} modes, config allows {config.modes}")
    return curve.embedded_in(config.dims).padded(config.modes)


def energy_of_coeffs(curve: FourierCurve, config: MinimizeConfig) -> float:
    """Energy of ``curve`` after rescaling to the target length; ``inf`` if not embedded."""
    try:
        scaled = rescale_to_length(curve, config.target_length)
        N = config.quad.N_u
        samples = resample_arclength(scaled, N) if config.spec.requires_arclength else sample(scaled, N)
        if not is_embedded_check(samples, config.embed_tol):
            return math.inf
        value = evaluate(samples, config.spec, config.quad)
    except (ValueError, RuntimeError, FloatingPointError):
        return math.inf
    v = float(value)
    return v if math.isfinite(v) else math.inf


def _energy_at(x, config: MinimizeConfig) -> float:
    return energy_of_coeffs(vector_to_coeffs(x, config.dims, config.modes), config)


def _objective(config: MinimizeConfig):
    return partial(_energy_at, config=config)


def _stencil(x, h, order):
    pts = []
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        pts += [x + e, x - e]
        if order == 4:
            pts += [x + 2 * e, x - 2 * e]
    return pts


def _gradient(f, x, h, order, f0=None, pool=None):
    pts = _stencil(x, h, order)
    vals = list(pool.map(f, pts)) if pool is not None else [f(y) for y in pts]
    k = 4 if order == 4 else 2
    g = np.zeros_like(x)
    for i in range(len(x)):
        fp, fm = vals[k * i], vals[k * i + 1]
        if order == 4:
            fp2, fm2 = vals[k * i + 2], vals[k * i + 3]
            if all(map(math.isfinite, (fp, fm, fp2, fm2))):
                g[i] = (8.0 * (fp - fm) - (fp2 - fm2)) / (12.0 * h)
                continue
        if math.isfinite(fp) and math.isfinite(fm):
            g[i] = (fp - fm) / (2.0 * h)
            continue
        if f0 is None:
            f0 = f(x)
        # barrier inside the stencil: fall back to a one-sided difference
        if math.isfinite(fp):
            g[i] = (fp - f0) / h
        elif math.isfinite(fm):
            g[i] = (f0 - fm) / h
        else:
            g[i] = 0.0
    return g


def _pool(config: MinimizeConfig):
    return ProcessPoolExecutor(config.jobs) if config.jobs > 1 else nullcontext(None)


def gradient_fd(curve: FourierCurve, config: MinimizeConfig, order: Optional[int] = None) -> np.ndarray:
    """Finite-difference gradient with respect to the free coefficients."""
    curve = _conform(curve, config)
    x = coeffs_to_vector(curve)
    with _pool(config) as pool:
        return _gradient(_objective(config), x, config.grad_step, order or config.fd_order, pool=pool)


def circle_deviation(curve: FourierCurve, N: int = 256) -> float:
    """Coefficient of variation of the distance to the length-weighted centroid."""
    s = sample(curve, N)
    wts = s.speeds / s.speeds.sum()
    centre = wts @ s.points
    r = np.linalg.norm(s.points - centre, axis=1)
    mean = wts @ r
    return float(math.sqrt(wts @ (r - mean) ** 2) / mean)


def bound_for(spec: EnergySpec, L: float) -> float:
    """Sharp lower bound at length ``L`` for the energy named by ``spec``, NaN if none applies."""
    try:
        if spec.kind in ("TP", "G", "F"):
            return tp_lower_bound(L, spec.p, spec.q).value
        if spec.kind == "TPClassic":
            return 2.0**spec.q * tp_lower_bound(L, 2.0 * spec.q, spec.q).value
        if spec.kind == "Willmore":
            return willmore_lower_bound(L, spec.s, spec.p).value
    except ValueError:
        pass
    return math.nan


def descend(start: FourierCurve, config: MinimizeConfig) -> MinimizeReport:
    """Steepest descent with Armijo backtracking at fixed length."""
    t0 = time.perf_counter()
    f = _objective(config)
    x = coeffs_to_vector(rescale_to_length(_conform(start, config), config.target_length))
    fx = f(x)
    if not math.isfinite(fx):
        raise ValueError("starting curve is not embedded or its energy is not finite")
    energies = [fx]
    step = config.initial_step
    terminated = "max_iters"
    it = 0
    with _pool(config) as pool:
        g = _gradient(f, x, config.grad_step, config.fd_order, fx, pool)
        gnorm = float(np.linalg.norm(g))
        while True:
            if gnorm <= config.stop_grad_norm:
                terminated = "grad_norm"
                break
            if it >= config.max_iters:
                break
            accepted = False
            alpha = step
            for _ in range(config.max_backtracks):
                cand = x - alpha * g
                fc = f(cand)
                if math.isfinite(fc) and fc <= fx - config.armijo * alpha * gnorm**2 and fc < fx:
                    accepted = True
                    break
                alpha *= config.shrink
            if not accepted:
                terminated = "line_search_failure"
                break
            curve = vector_to_coeffs(cand, config.dims, config.modes)
            x = coeffs_to_vector(rescale_to_length(curve, config.target_length))
            fx = fc
            energies.append(fx)
            step = min(2.0 * alpha, config.max_step)
            it += 1
            g = _gradient(f, x, config.grad_step, config.fd_order, fx, pool)
            gnorm = float(np.linalg.norm(g))
    final = vector_to_coeffs(x, config.dims, config.modes)
    bound = bound_for(config.spec, config.target_length)
    gap = (fx - bound) / bound if math.isfinite(bound) else math.nan
    return MinimizeReport(
        energies=energies,
        final_coeffs=final,
        final_grad_norm=gnorm,
        circle_deviation=circle_deviation(final),
        bound_gap=float(gap),
        iterations_used=it,
        terminated_by=terminated,
        seconds=time.perf_counter() - t0,
    )


def perturbation_gap(
    spec: EnergySpec,
    mode: int,
    eps: float,
    quad: Optional[QuadratureSpec] = None,
    N: int = 256,
) -> float:
    """Energy of the length-one perturbed circle minus that of the length-one circle."""
    quad = quad or QuadratureSpec(N_u=N, N_w=N)

    def energy(curve):
        s = resample_arclength(curve, quad.N_u) if spec.requires_arclength else sample(curve, quad.N_u)
        return float(evaluate(s, spec, quad))

    if eps == 0:
        pert = make_circle(1.0, 2)
    else:
        pert = make_perturbed_circle(1.0, mode, eps)
    return energy(pert) - energy(make_circle(1.0, 2))
