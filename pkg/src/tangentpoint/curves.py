"""Closed Fourier curves, their samples, and geometric predicates.

A curve is ``gamma_d(u) = a_0/2 + sum_k a_k cos(2 pi k u) + b_k sin(2 pi k u)``
for ``u`` in the unit torus.  Everything downstream evaluates secants
``gamma(u + w) - gamma(u)``, which are formed with product-to-sum identities
so that short secants keep full relative accuracy; the component normal to
the tangent is formed from the Taylor remainder for the same reason.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "FourierCurve",
    "CurveSamples",
    "ConvexityReport",
    "Secants",
    "make_circle",
    "make_ellipse",
    "make_perturbed_circle",
    "make_trefoil",
    "sample",
    "resample_arclength",
    "is_embedded_check",
    "is_convex_planar",
    "rescale_to_length",
    "regrid",
    "total_length",
    "curve_length",
    "parse_fixture",
]

TWO_PI = 2.0 * math.pi
ARCLENGTH_RTOL = 1e-8
INVERSION_TOL = 1e-12


def _sin_minus_x(h):
    """``sin(h) - h`` without cancellation for small ``h``."""
    h = np.asarray(h, dtype=float)
    out = np.sin(h) - h
    small = np.abs(h) < 0.25
    if np.any(small):
        x = h[small]
        x2 = x * x
        term = -x * x2 / 6.0
        acc = term.copy()
        for n in range(2, 9):
            term = -term * x2 / ((2 * n) * (2 * n + 1))
            acc += term
        out[small] = acc
    return out


@dataclass(frozen=True)
class Secants:
    """Secant data for parameter pairs ``(u, u + w)``.

    All derivatives are with respect to the sampling parameter.

    Attributes
    ----------
    delta : gamma(u + w) - gamma(u)
    perp0 : component of ``delta`` normal to the tangent at ``u``
    perp1 : component of ``delta`` normal to the tangent at ``u + w``
    tan0, tan1 : tangents at ``u`` and ``u + w``
    dtan : tan1 - tan0
    """

    delta: np.ndarray
    perp0: np.ndarray
    perp1: np.ndarray
    tan0: np.ndarray
    tan1: np.ndarray
    dtan: np.ndarray

    @property
    def chord(self) -> np.ndarray:
        return np.linalg.norm(self.delta, axis=-1)


@dataclass(frozen=True, eq=False)
class FourierCurve:
    """Truncated Fourier series of a closed curve in R^2 or R^3.

    ``a`` and ``b`` have shape ``(dims, modes + 1)``; ``b[:, 0]`` is ignored.
    """

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float, copy=True)
        b = np.array(self.b, dtype=float, copy=True)
        if a.ndim != 2 or a.shape != b.shape:
            raise ValueError("coefficient arrays must both have shape (dims, modes + 1)")
        if a.shape[0] not in (2, 3):
            raise ValueError(f"dims must be 2 or 3, got {a.shape[0]}")
        if a.shape[1] < 2:
            raise ValueError("need at least one non-constant mode")
        b[:, 0] = 0.0
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __eq__(self, other):
        if not isinstance(other, FourierCurve):
            return NotImplemented
        return (
            self.a.shape == other.a.shape
            and bool(np.array_equal(self.a, other.a))
            and bool(np.array_equal(self.b, other.b))
        )

    __hash__ = None

    @property
    def dims(self) -> int:
        return self.a.shape[0]

    @property
    def modes(self) -> int:
        return self.a.shape[1] - 1

    @property
    def _k(self) -> np.ndarray:
        return np.arange(1, self.modes + 1, dtype=float)

    @classmethod
    def from_coeffs(cls, coeffs) -> "FourierCurve":
        c = np.asarray(coeffs, dtype=float)
        if c.ndim != 3 or c.shape[2] != 2:
            raise ValueError("coeffs must have shape (dims, modes + 1, 2)")
        return cls(c[..., 0], c[..., 1])

    def coeffs(self) -> np.ndarray:
        return np.stack([self.a, self.b], axis=-1)

    def scaled(self, factor: float) -> "FourierCurve":
        return FourierCurve(self.a * factor, self.b * factor)

    def padded(self, modes: int) -> "FourierCurve":
        if modes < self.modes:
            raise ValueError("cannot truncate by padding")
        a = np.zeros((self.dims, modes + 1))
        b = np.zeros_like(a)
        a[:, : self.modes + 1] = self.a
        b[:, : self.modes + 1] = self.b
        return FourierCurve(a, b)

    def embedded_in(self, dims: int) -> "FourierCurve":
        if dims == self.dims:
            return self
        if dims < self.dims:
            raise ValueError("cannot drop dimensions")
        a = np.zeros((dims, self.modes + 1))
        b = np.zeros_like(a)
        a[: self.dims] = self.a
        b[: self.dims] = self.b
        return FourierCurve(a, b)

    # evaluation --------------------------------------------------------

    def evaluate(self, u, order: int = 0) -> np.ndarray:
        """Derivative of the given order at parameters ``u``; shape ``u.shape + (dims,)``."""
        u = np.asarray(u, dtype=float)
        k = self._k
        theta = TWO_PI * u[..., None] * k
        c, s = np.cos(theta), np.sin(theta)
        w = (TWO_PI * k) ** order
        # d^n/du^n cycles (cos, sin) -> (-sin, cos) -> (-cos, -sin) -> (sin, -cos)
        r = order % 4
        if r == 0:
            out = c @ (self.a[:, 1:] * w).T + s @ (self.b[:, 1:] * w).T
        elif r == 1:
            out = -s @ (self.a[:, 1:] * w).T + c @ (self.b[:, 1:] * w).T
        elif r == 2:
            out = -c @ (self.a[:, 1:] * w).T - s @ (self.b[:, 1:] * w).T
        else:
            out = s @ (self.a[:, 1:] * w).T - c @ (self.b[:, 1:] * w).T
        if order == 0:
            out = out + 0.5 * self.a[:, 0]
        return out

    def difference(self, u, d) -> np.ndarray:
        """``gamma(u + d) - gamma(u)`` without cancellation."""
        u = np.asarray(u, dtype=float)
        d = np.asarray(d, dtype=float)
        k = self._k
        half = np.pi * d[..., None] * k
        mid = TWO_PI * (u + 0.5 * d)[..., None] * k
        f = -2.0 * np.sin(half)
        return (f * np.sin(mid)) @ self.a[:, 1:].T - (f * np.cos(mid)) @ self.b[:, 1:].T

    def derivative_difference(self, u, d) -> np.ndarray:
        """``gamma'(u + d) - gamma'(u)`` without cancellation."""
        u = np.asarray(u, dtype=float)
        d = np.asarray(d, dtype=float)
        k = self._k
        half = np.pi * d[..., None] * k
        mid = TWO_PI * (u + 0.5 * d)[..., None] * k
        f = -2.0 * np.sin(half) * (TWO_PI * k)
        return -(f * np.cos(mid)) @ self.a[:, 1:].T - (f * np.sin(mid)) @ self.b[:, 1:].T

    def remainder(self, u, d) -> np.ndarray:
        """``gamma(u + d) - gamma(u) - d gamma'(u)`` without cancellation."""
        u = np.asarray(u, dtype=float)
        d = np.asarray(d, dtype=float)
        k = self._k
        h = TWO_PI * d[..., None] * k
        theta = TWO_PI * u[..., None] * k
        c, s = np.cos(theta), np.sin(theta)
        cm1 = -2.0 * np.sin(0.5 * h) ** 2
        smh = _sin_minus_x(h)
        ra = c * cm1 - s * smh
        rb = s * cm1 + c * smh
        return ra @ self.a[:, 1:].T + rb @ self.b[:, 1:].T

    # serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "dims": self.dims,
            "modes": self.modes,
            "coeffs": self.coeffs().tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FourierCurve":
        curve = cls.from_coeffs(data["coeffs"])
        if "dims" in data and int(data["dims"]) != curve.dims:
            raise ValueError("dims field disagrees with coefficient array")
        if "modes" in data and int(data["modes"]) != curve.modes:
            raise ValueError("modes field disagrees with coefficient array")
        return curve

    def to_json(self) -> str:
        from .jsonio import dumps

        return dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "FourierCurve":
        return cls.from_dict(json.loads(text))


def _project_out(v, t):
    """Component of ``v`` orthogonal to the (not necessarily unit) vectors ``t``."""
    tt = np.sum(t * t, axis=-1, keepdims=True)
    return v - t * (np.sum(v * t, axis=-1, keepdims=True) / tt)


def _harmonics(theta, m: int):
    """``exp(i k theta)`` for ``k = 1..m`` along a new last axis, by repeated products.

    Products of unit complex numbers keep the imaginary part accurate
    relative to its size, so ``sin(k theta)`` stays accurate for tiny angles.
    """
    z = np.exp(1j * np.asarray(theta, dtype=float))[..., None]
    return np.cumprod(np.broadcast_to(z, z.shape[:-1] + (m,)), axis=-1)


class _Series:
    """Scalar periodic series ``sum_k A_k cos(2 pi k x) + B_k sin(2 pi k x)``."""

    def __init__(self, A, B):
        self.A = np.asarray(A, dtype=float)
        self.B = np.asarray(B, dtype=float)
        self.m = len(self.A)

    @classmethod
    def from_samples(cls, values, rtol: float = 1e-16) -> "_Series":
        n = len(values)
        spec = np.fft.rfft(values) / n
        coef = 2.0 * spec[1 : n // 2]
        keep = np.nonzero(np.abs(coef) > rtol)[0]
        m = int(keep[-1]) + 1 if keep.size else 1
        coef = coef[:m]
        return cls(coef.real, -coef.imag)

    def __call__(self, x):
        h = _harmonics(TWO_PI * np.asarray(x, dtype=float), self.m)
        return h.real @ self.A + h.imag @ self.B

    def diff(self, x, d):
        """``f(x + d) - f(x)`` without cancellation."""
        x = np.asarray(x, dtype=float)
        d = np.asarray(d, dtype=float)
        f = -2.0 * _harmonics(np.pi * d, self.m).imag
        mid = _harmonics(TWO_PI * (x + 0.5 * d), self.m)
        return (f * mid.imag) @ self.A - (f * mid.real) @ self.B

    def antiderivative(self) -> "_Series":
        k = TWO_PI * np.arange(1, self.m + 1)
        return _Series(-self.B / k, self.A / k)


class ArclengthMap:
    """Monotone map between a curve's own parameter and normalized arc length.

    ``s(u) = u + D(u) - D(0)`` where ``D`` is the spectral antiderivative of
    ``|gamma'(u)|/L - 1``.  The inverse is stored as its own periodic series
    ``u(s) = s + E(s)``, built from Newton inversions on a fine grid, so that
    parameter offsets ``u(s + w) - u(s)`` come out in closed form.
    """

    def __init__(self, curve: FourierCurve):
        self.curve = curve
        n = 64
        while True:
            u = np.arange(n) / n
            speed = np.linalg.norm(curve.evaluate(u, 1), axis=-1)
            spec = np.fft.rfft(speed) / n
            L = spec[0].real
            if np.abs(spec[3 * n // 8 :]).max() <= 1e-15 * L or n >= 1 << 14:
                break
            n *= 2
        self.length = float(L)
        self._D = _Series.from_samples(speed / L - 1.0).antiderivative()
        self._D0 = float(self._D(0.0))
        while True:
            s = np.arange(n) / n
            e = self._newton_inverse(s) - s
            spec = np.fft.rfft(e) / n
            if np.abs(spec[3 * n // 8 :]).max() <= 1e-16 or n >= 1 << 14:
                break
            n *= 2
        self._E = _Series.from_samples(e)
        self._E0 = float(e.mean())

    def rel_speed(self, u):
        return np.linalg.norm(self.curve.evaluate(u, 1), axis=-1) / self.length

    def s_of_u(self, u):
        u = np.asarray(u, dtype=float)
        return u + self._D(u) - self._D0

    def _newton_inverse(self, s):
        lo, hi = s - 1.0, s + 1.0
        u = s.copy()
        for _ in range(100):
            r = self.s_of_u(u) - s
            lo = np.where(r < 0, u, lo)
            hi = np.where(r > 0, u, hi)
            if np.all(np.abs(r) <= 2e-16 * (1.0 + np.abs(s))):
                break
            cand = u - r / self.rel_speed(u)
            bad = (cand <= lo) | (cand >= hi) | ~np.isfinite(cand)
            u = np.where(bad, 0.5 * (lo + hi), cand)
        r = self.s_of_u(u) - s
        if np.max(np.abs(r), initial=0.0) > INVERSION_TOL:
            raise RuntimeError("arc-length inversion failed to converge; degenerate parametrization")
        return u

    def u_of_s(self, s):
        """Curve parameter at normalized arc length ``s``; checked to 1e-12."""
        s = np.asarray(s, dtype=float)
        u = s + self._E(s) + self._E0
        r = self.s_of_u(u) - s
        if np.max(np.abs(r), initial=0.0) > INVERSION_TOL:
            raise RuntimeError("arc-length inversion failed to converge; degenerate parametrization")
        return u

    def offset(self, s0, w, u0=None):
        """``u(s0 + w) - u(s0)``, accurate relative to ``w`` for tiny ``w``.

        The series value is polished by one Newton step on
        ``d + D(u0 + d) - D(u0) = w``.
        """
        s0 = np.asarray(s0, dtype=float)
        w = np.asarray(w, dtype=float)
        d = w + self._E.diff(s0, w)
        u0 = self.u_of_s(s0) if u0 is None else np.asarray(u0, dtype=float)
        r = d + self._D.diff(u0, d) - w
        return d - r / self.rel_speed(u0 + d)


@dataclass(frozen=True)
class CurveSamples:
    """Uniform-grid samples of a curve, plus the means to evaluate it off-grid.

    ``params`` are the sampling parameters ``i/N``.  For arc-length samples
    the sampling parameter is normalized arc length and ``tangents`` are
    derivatives with respect to it, so ``speeds`` are all equal to ``length``.
    """

    N: int
    params: np.ndarray
    points: np.ndarray
    tangents: np.ndarray
    speeds: np.ndarray
    length: float
    is_arclength: bool
    curve: FourierCurve
    orig_params: np.ndarray
    arcmap: Optional[ArclengthMap] = field(default=None, repr=False, compare=False)

    @property
    def dims(self) -> int:
        return self.points.shape[1]

    @property
    def series_modes(self) -> int:
        """Largest number of Fourier modes touched by one secant evaluation."""
        m = self.curve.modes
        if self.arcmap is not None:
            m = max(m, self.arcmap._E.m, self.arcmap._D.m)
        return m

    def _orig(self, s):
        if self.arcmap is None:
            return np.asarray(s, dtype=float)
        return self.arcmap.u_of_s(s)

    def _tangent_at(self, u_orig):
        t = self.curve.evaluate(u_orig, 1)
        if self.arcmap is None:
            return t
        return t * (self.length / np.linalg.norm(t, axis=-1, keepdims=True))

    def evaluate(self, s):
        """Points and tangents at arbitrary sampling parameters."""
        u = self._orig(s)
        return self.curve.evaluate(u), self._tangent_at(u)

    def secants(self, base, offsets, base_orig=None) -> Secants:
        """Secant data for all pairs ``(base, base + offset)`` (broadcast).

        ``base`` and ``offsets`` are in the sampling parameter; ``base_orig``
        may supply the curve's own parameter at ``base`` to skip an inversion.
        """
        base = np.asarray(base, dtype=float)
        offsets = np.asarray(offsets, dtype=float)
        u0 = self._orig(base) if base_orig is None else np.asarray(base_orig, dtype=float)
        if self.arcmap is None:
            d = np.broadcast_to(offsets, np.broadcast_shapes(u0.shape, offsets.shape))
        else:
            d = self.arcmap.offset(base, offsets, u0)
        u0 = np.broadcast_to(u0, d.shape)
        u1 = u0 + d
        c = self.curve
        g0 = c.evaluate(u0, 1)
        g1 = c.evaluate(u1, 1)
        delta = c.difference(u0, d)
        perp0 = _project_out(c.remainder(u0, d), g0)
        perp1 = -_project_out(c.remainder(u1, -d), g1)
        if self.arcmap is None:
            tan0, tan1 = g0, g1
            dtan = c.derivative_difference(u0, d)
        else:
            L = self.length
            tan0 = g0 * (L / np.linalg.norm(g0, axis=-1, keepdims=True))
            tan1 = g1 * (L / np.linalg.norm(g1, axis=-1, keepdims=True))
            dtan = tan1 - tan0
        return Secants(delta, perp0, perp1, tan0, tan1, dtan)

    def curvature(self) -> np.ndarray:
        """Geometric curvature at the sample points."""
        u = self.orig_params
        g1 = self.curve.evaluate(u, 1)
        g2 = self.curve.evaluate(u, 2)
        sp = np.linalg.norm(g1, axis=-1)
        return np.linalg.norm(_project_out(g2, g1), axis=-1) / sp**2

    def scaled(self, factor: float) -> "CurveSamples":
        """The same samples of ``factor * gamma``; arc-length structure is preserved."""
        curve = self.curve.scaled(factor)
        arcmap = None
        if self.arcmap is not None:
            arcmap = ArclengthMap.__new__(ArclengthMap)
            arcmap.__dict__.update(self.arcmap.__dict__)
            arcmap.curve = curve
            arcmap.length = self.arcmap.length * factor
        return _build(curve, self.params, self.orig_params, arcmap, self.is_arclength)

    def subsample(self, stride: int) -> "CurveSamples":
        if self.N % stride:
            raise ValueError("stride must divide N")
        sl = slice(None, None, stride)
        return CurveSamples(
            N=self.N // stride,
            params=self.params[sl],
            points=self.points[sl],
            tangents=self.tangents[sl],
            speeds=self.speeds[sl],
            length=self.length,
            is_arclength=self.is_arclength,
            curve=self.curve,
            orig_params=self.orig_params[sl],
            arcmap=self.arcmap,
        )


def _freeze(*arrays):
    for a in arrays:
        a.setflags(write=False)


def _build(curve, params, orig, arcmap, force_arclength=False) -> CurveSamples:
    points = curve.evaluate(orig)
    raw = curve.evaluate(orig, 1)
    raw_speed = np.linalg.norm(raw, axis=-1)
    if np.any(raw_speed <= 1e-14 * max(1.0, float(np.abs(points).max()))):
        raise ValueError("curve is not regular: vanishing speed at a sample point")
    if arcmap is None:
        tangents = raw
        speeds = raw_speed
        length = float(np.mean(speeds))
    else:
        length = arcmap.length
        tangents = raw * (length / raw_speed[:, None])
        speeds = np.full(len(params), length)
    is_arc = bool(force_arclength or np.max(np.abs(speeds - length)) <= ARCLENGTH_RTOL * length)
    params = np.array(params, dtype=float)
    orig = np.array(orig, dtype=float)
    _freeze(params, points, tangents, speeds, orig)
    return CurveSamples(
        N=len(params),
        params=params,
        points=points,
        tangents=tangents,
        speeds=speeds,
        length=length,
        is_arclength=is_arc,
        curve=curve,
        orig_params=orig,
        arcmap=arcmap,
    )


def sample(curve: FourierCurve, N: int = 256) -> CurveSamples:
    """Evaluate ``curve`` and its derivative on the grid ``u_i = i/N``.

    The length is the periodic trapezoid sum of the speeds, which is
    spectrally accurate for trigonometric polynomials.
    """
    if N < 16 or N % 2:
        raise ValueError(f"N must be even and at least 16, got {N}")
    u = np.arange(N) / N
    return _build(curve, u, u, None)


def _is_constant_speed(curve: FourierCurve) -> bool:
    n = max(64, 8 * (curve.modes + 1))
    speed = np.linalg.norm(curve.evaluate(np.arange(n) / n, 1), axis=-1)
    return float(np.ptp(speed)) <= 1e-14 * float(np.mean(speed))


def resample_arclength(curve: FourierCurve, N: int = 256) -> CurveSamples:
    """Samples at equispaced arc length, with unit-period arc-length parameter."""
    if N < 16 or N % 2:
        raise ValueError(f"N must be even and at least 16, got {N}")
    s = np.arange(N) / N
    if _is_constant_speed(curve):
        return _build(curve, s, s, None, force_arclength=True)
    arcmap = ArclengthMap(curve)
    u = arcmap.u_of_s(s)
    return _build(curve, s, u, arcmap)


def regrid(samples: CurveSamples, N: int) -> CurveSamples:
    """The same curve sampled on ``N`` points, keeping the sampling parameter."""
    if N < 16 or N % 2:
        raise ValueError(f"N must be even and at least 16, got {N}")
    if N == samples.N:
        return samples
    s = np.arange(N) / N
    if samples.arcmap is not None:
        return _build(samples.curve, s, samples.arcmap.u_of_s(s), samples.arcmap)
    return _build(samples.curve, s, s, None, force_arclength=samples.is_arclength)


def curve_length(curve: FourierCurve, N: int = 256) -> float:
    u = np.arange(N) / N
    return float(np.mean(np.linalg.norm(curve.evaluate(u, 1), axis=-1)))


def total_length(samples: CurveSamples) -> float:
    return samples.length


def rescale_to_length(curve: FourierCurve, L: float, N: int = 512) -> FourierCurve:
    """Scale all coefficients so that the curve has length ``L``."""
    if L <= 0:
        raise ValueError("target length must be positive")
    current = curve_length(curve, max(N, 16 * (curve.modes + 1)))
    if not current > 0:
        raise ValueError("cannot rescale a curve of zero length")
    return curve.scaled(L / current)


# fixtures ---------------------------------------------------------------


def make_circle(length: float = 1.0, dims: int = 2) -> FourierCurve:
    """Constant-speed circle of circumference ``length`` centred at the origin."""
    if length <= 0:
        raise ValueError("length must be positive")
    if dims not in (2, 3):
        raise ValueError(f"dims must be 2 or 3, got {dims}")
    R = length / TWO_PI
    a = np.zeros((dims, 2))
    b = np.zeros((dims, 2))
    a[0, 1] = R
    b[1, 1] = R
    return FourierCurve(a, b)


def make_ellipse(a: float, b: float) -> FourierCurve:
    if a <= 0 or b <= 0:
        raise ValueError("semi-axes must be positive")
    ca = np.zeros((2, 2))
    cb = np.zeros((2, 2))
    ca[0, 1] = a
    cb[1, 1] = b
    return FourierCurve(ca, cb)


def make_perturbed_circle(length: float, mode: int, eps: float) -> FourierCurve:
    """Polar curve ``r = 1 + eps cos(k theta)`` rescaled to the given length.

    Convex exactly when ``|eps| <= 1/(k**2 - 1)``.
    """
    if abs(eps) >= 1:
        raise ValueError("|eps| must be < 1")
    k = int(mode)
    if k < 2:
        raise ValueError("mode must be >= 2")
    a = np.zeros((2, k + 2))
    b = np.zeros((2, k + 2))
    a[0, 1] = 1.0
    b[1, 1] = 1.0
    # cos(k t) cos t = (cos(k+1)t + cos(k-1)t)/2, cos(k t) sin t = (sin(k+1)t - sin(k-1)t)/2
    a[0, k + 1] += 0.5 * eps
    a[0, k - 1] += 0.5 * eps
    b[1, k + 1] += 0.5 * eps
    b[1, k - 1] -= 0.5 * eps
    return rescale_to_length(FourierCurve(a, b), length)


def make_trefoil(scale: float = 1.0) -> FourierCurve:
    """(2,3) torus knot ``(sin t + 2 sin 2t, cos t - 2 cos 2t, -sin 3t)``."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    a = np.zeros((3, 4))
    b = np.zeros((3, 4))
    b[0, 1], b[0, 2] = 1.0, 2.0
    a[1, 1], a[1, 2] = 1.0, -2.0
    b[2, 3] = -1.0
    return FourierCurve(a * scale, b * scale)


def parse_fixture(name: str) -> FourierCurve:
    """Builtin fixture from ``name[:arg...]``: circle[:L], ellipse:a:b, perturbed:mode:eps, trefoil[:scale]."""
    parts = name.split(":")
    head, args = parts[0], parts[1:]
    try:
        if head == "circle":
            return make_circle(float(args[0]) if args else 1.0, 2)
        if head == "ellipse":
            a, b = (float(x) for x in args) if args else (2.0, 1.0)
            return make_ellipse(a, b)
        if head == "perturbed":
            mode, eps = (int(args[0]), float(args[1])) if args else (3, 0.1)
            return make_perturbed_circle(1.0, mode, eps)
        if head == "trefoil":
            return make_trefoil(float(args[0]) if args else 1.0)
    except (ValueError, IndexError) as exc:
        raise ValueError(f"bad fixture arguments in {name!r}: {exc}") from None
    raise ValueError(f"unknown fixture {name!r}")


# predicates -------------------------------------------------------------


def is_embedded_check(samples: CurveSamples, tol: float = 1e-3) -> bool:
    """Pairwise bi-Lipschitz scan: min chord / torus distance >= tol * L."""
    P = samples.points
    N = samples.N
    best = np.inf
    for j in range(1, N // 2 + 1):
        d = np.linalg.norm(np.roll(P, -j, axis=0) - P, axis=1)
        ratio = float(d.min()) / (j / N)
        best = min(best, ratio)
    return bool(best >= tol * samples.length)


@dataclass(frozen=True)
class ConvexityReport:
    is_planar: bool
    is_convex: bool
    total_turning: float
    min_signed_curvature: float


def is_convex_planar(samples: CurveSamples, curvature_rtol: float = 1e-9, planar_rtol: float = 1e-9) -> ConvexityReport:
    """Planarity from the SVD of the centred points; convexity from tangent turning.

    The turning angle between consecutive sampled tangents must keep one
    sign (up to ``curvature_rtol`` times its largest magnitude) and sum to
    +-2 pi within 1e-3.
    """
    P = samples.points
    centred = P - P.mean(axis=0)
    _, sv, vt = np.linalg.svd(centred, full_matrices=False)
    diameter = float(np.max(np.linalg.norm(centred, axis=1))) * 2.0
    if samples.dims == 2:
        planar = True
        T = samples.tangents
        Q = centred
    else:
        normal = vt[2]
        dist = np.abs(centred @ normal)
        planar = bool(dist.max() <= planar_rtol * diameter)
        T = samples.tangents @ vt[:2].T
        Q = centred @ vt[:2].T
    T_next = np.roll(T, -1, axis=0)
    cross = T[:, 0] * T_next[:, 1] - T[:, 1] * T_next[:, 0]
    dot = np.sum(T * T_next, axis=1)
    turn = np.arctan2(cross, dot)
    total = float(turn.sum())
    orient = 1.0 if total >= 0 else -1.0
    seg = np.linalg.norm(np.roll(Q, -1, axis=0) - Q, axis=1)
    signed_k = orient * turn / seg
    thresh = curvature_rtol * float(np.abs(turn).max())
    one_sign = bool(np.all(orient * turn >= -thresh))
    convex = bool(planar and one_sign and abs(abs(total) - TWO_PI) <= 1e-3)
    return ConvexityReport(
        is_planar=planar,
        is_convex=convex,
        total_turning=total,
        min_signed_curvature=float(signed_k.min()),
    )
