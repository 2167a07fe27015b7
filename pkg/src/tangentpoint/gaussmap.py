"""The Gauss map of secant directions and its path lengths.

For parameter pairs ``(u, w)`` the Gauss map is the unit secant
``phi(u, w) = (gamma(u + w) - gamma(u)) / |gamma(u + w) - gamma(u)|``.
Its partial derivatives have the closed forms

    |d_w phi| = |P_phi gamma'(u + w)| / chord
    |d_u phi| = |P_phi (gamma'(u + w) - gamma'(u))| / chord

with ``P_phi`` the projection orthogonal to ``phi``.  The first one is
evaluated through the normal part of the secant at ``u + w``, which stays
accurate for short secants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import CurveSamples, FourierCurve, Secants, resample_arclength, sample

__all__ = [
    "GaussEval",
    "FenchelReport",
    "project_perp",
    "gauss_from_secants",
    "gauss_eval",
    "gauss_grid",
    "grid_offsets",
    "path_length_u",
    "path_length_w",
    "fenchel_report",
]

DEGENERATE_CHORD_RTOL = 1e-14
# rows * offsets * modes per block of secant evaluations
_BLOCK = 3_000_000


def project_perp(v, x) -> np.ndarray:
    """Component of ``x`` orthogonal to ``v`` (broadcast over leading axes)."""
    v = np.asarray(v, dtype=float)
    x = np.asarray(x, dtype=float)
    vv = np.sum(v * v, axis=-1, keepdims=True)
    if np.any(vv == 0):
        raise ValueError("projection direction must be nonzero")
    return x - v * (np.sum(v * x, axis=-1, keepdims=True) / vv)


@dataclass(frozen=True)
class GaussEval:
    """Gauss map data at one pair or, with array fields, a grid of pairs."""

    phi: np.ndarray
    du_norm: np.ndarray
    dw_norm: np.ndarray
    chord: np.ndarray
    inv_tp_radius: np.ndarray


def _norm(x):
    return np.linalg.norm(x, axis=-1)


def gauss_from_secants(sec: Secants, length: float = None) -> GaussEval:
    chord = sec.chord
    if length is not None and np.any(chord < DEGENERATE_CHORD_RTOL * length):
        raise ValueError("coincident sample points: the curve is not embedded")
    phi = sec.delta / chord[..., None]
    c2 = chord * chord
    dw = _norm(sec.tan1) * _norm(sec.perp1) / c2
    du = _norm(project_perp(phi, sec.dtan)) / chord
    inv_r = 2.0 * _norm(sec.perp0) / c2
    return GaussEval(phi=phi, du_norm=du, dw_norm=dw, chord=chord, inv_tp_radius=inv_r)


def grid_offsets(N: int, j) -> np.ndarray:
    """Signed representative of ``j/N`` closest to zero."""
    j = np.mod(np.asarray(j), N)
    return np.where(2 * j <= N, j, j - N) / N


def gauss_eval(samples: CurveSamples, i: int, j_offset: int) -> GaussEval:
    """Gauss map at the grid pair ``(u_i, u_i + j_offset/N)``."""
    N = samples.N
    if j_offset % N == 0:
        raise ValueError("j_offset must be nonzero mod N")
    i = int(i) % N
    sec = samples.secants(
        samples.params[i], grid_offsets(N, j_offset), base_orig=samples.orig_params[i]
    )
    g = gauss_from_secants(sec, samples.length)
    return GaussEval(
        phi=g.phi,
        du_norm=float(g.du_norm),
        dw_norm=float(g.dw_norm),
        chord=float(g.chord),
        inv_tp_radius=float(g.inv_tp_radius),
    )


def gauss_grid(samples: CurveSamples, offsets, rows=None) -> GaussEval:
    """Gauss map on ``rows`` (default all sample indices) times ``offsets``."""
    rows = np.arange(samples.N) if rows is None else np.asarray(rows)
    offsets = np.asarray(offsets, dtype=float)
    block = max(1, _BLOCK // (len(offsets) * samples.series_modes))
    parts = []
    for start in range(0, len(rows), block):
        r = rows[start : start + block]
        sec = samples.secants(
            samples.params[r][:, None],
            offsets[None, :],
            base_orig=samples.orig_params[r][:, None],
        )
        parts.append(gauss_from_secants(sec, samples.length))
    return GaussEval(
        *(np.concatenate([getattr(g, f) for g in parts]) for f in GaussEval.__dataclass_fields__)
    )


def _snap(samples: CurveSamples, w: float) -> int:
    if not 0.0 < w < 1.0:
        raise ValueError("w must lie in (0, 1)")
    j = int(round(w * samples.N))
    return min(max(j, 1), samples.N - 1)


def path_length_u(samples: CurveSamples, w: float, return_snapped: bool = False):
    """Length of ``u -> phi(u, w)``, with ``w`` snapped to the nearest ``j/N``."""
    j = _snap(samples, w)
    g = gauss_grid(samples, [grid_offsets(samples.N, j)])
    value = float(np.mean(g.du_norm[:, 0]))
    if return_snapped:
        return value, j / samples.N
    return value


def _endpoint_limit(samples: CurveSamples, rows) -> np.ndarray:
    # |d_w phi| -> kappa |gamma'| / 2 at both ends of (0, 1)
    return 0.5 * samples.curvature()[rows] * samples.speeds[rows]


def _path_lengths_w(samples: CurveSamples, rows) -> np.ndarray:
    N = samples.N
    offs = grid_offsets(N, np.arange(1, N))
    g = gauss_grid(samples, offs, rows)
    return (g.dw_norm.sum(axis=1) + _endpoint_limit(samples, rows)) / N


def path_length_w(samples: CurveSamples, i: int) -> float:
    """Length of ``w -> phi(u_i, w)`` over (0, 1).

    Trapezoid rule on the grid ``j/N`` including the finite endpoint limit of
    the integrand, which makes the sum spectrally accurate when the curvature
    does not vanish.
    """
    return float(_path_lengths_w(samples, np.array([int(i) % samples.N]))[0])


@dataclass(frozen=True)
class FenchelReport:
    min_path_u: float
    argmin_w: float
    min_path_v: float
    argmin_u: float
    slack_u: float
    slack_w: float
    N: int

    def to_dict(self) -> dict:
        return {
            "min_path_u": self.min_path_u,
            "argmin_w": self.argmin_w,
            "min_path_v": self.min_path_v,
            "argmin_u": self.argmin_u,
            "slack_u": self.slack_u,
            "slack_w": self.slack_w,
            "N": self.N,
        }

    def to_json(self) -> str:
        from .jsonio import dumps

        return dumps(self.to_dict())


def fenchel_report(curve: FourierCurve, N: int = 256, arclength: bool = True) -> FenchelReport:
    """Minimal path lengths of the Gauss map over grid ``w`` and grid ``u``.

    ``min_path_v`` is the minimum over ``u`` of the length in ``w``; slacks
    are measured against 2 pi and pi.  A negative slack beyond quadrature
    error indicates a numerical problem, not a counterexample.
    """
    samples = resample_arclength(curve, N) if arclength else sample(curve, N)
    offs = grid_offsets(N, np.arange(1, N))
    g = gauss_grid(samples, offs)
    along_u = g.du_norm.mean(axis=0)
    rows = np.arange(N)
    along_w = (g.dw_norm.sum(axis=1) + _endpoint_limit(samples, rows)) / N
    ju = int(np.argmin(along_u))
    iw = int(np.argmin(along_w))
    min_u = float(along_u[ju])
    min_w = float(along_w[iw])
    return FenchelReport(
        min_path_u=min_u,
        argmin_w=(ju + 1) / N,
        min_path_v=min_w,
        argmin_u=iw / N,
        slack_u=min_u - 2.0 * math.pi,
        slack_w=min_w - math.pi,
        N=N,
    )
