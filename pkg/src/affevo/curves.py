"""Closed plane curve inputs and their derivative tables.

Three input forms are supported, all 2*pi-periodic in the parameter t:

* :class:`Ellipse` ``(a cos t, b sin t)``
* :class:`TrigPolynomial` with per-coordinate harmonics ``(k, cos_coeff, sin_coeff)``
* :class:`SampledClosed` uniformly spaced samples, differentiated spectrally

:func:`sample_curve` turns any of them into a :class:`SampledCurve` holding the
parameter derivatives of orders 0..5 on a uniform power-of-two grid.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .errors import InflexionError, UndersampledError
from .spectral import resample, trailing_spectrum_ratio

MAX_ORDER = 5
INFLEXION_THRESHOLD = 1e-8
SPECTRAL_NOISE_TOL = 1e-8

Harmonic = tuple[int, float, float]


def bracket(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Determinant [u, v] of plane vectors stored in the last axis."""
    u = np.asarray(u)
    v = np.asarray(v)
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


@dataclass(frozen=True)
class Ellipse:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"ellipse semi-axes must be positive, got a={self.a}, b={self.b}")

    def as_trig(self) -> TrigPolynomial:
        return TrigPolynomial(((1, self.a, 0.0),), ((1, 0.0, self.b),))


@dataclass(frozen=True)
class TrigPolynomial:
    """x(t) = sum c cos(kt) + s sin(kt) over ``cx``; likewise y over ``cy``."""

    cx: tuple[Harmonic, ...]
    cy: tuple[Harmonic, ...]

    def __post_init__(self):
        cx = tuple((int(k), float(c), float(s)) for k, c, s in self.cx)
        cy = tuple((int(k), float(c), float(s)) for k, c, s in self.cy)
        object.__setattr__(self, "cx", cx)
        object.__setattr__(self, "cy", cy)
        for name, terms in (("x", cx), ("y", cy)):
            if any(k < 0 for k, _, _ in terms):
                raise ValueError(f"negative harmonic in {name}")
            if not any(k > 0 and (c != 0.0 or s != 0.0) for k, c, s in terms):
                raise ValueError(f"{name} coordinate has no nonzero harmonic")

    @property
    def degree(self) -> int:
        return max(k for k, _, _ in self.cx + self.cy)

    def as_trig(self) -> TrigPolynomial:
        return self


@dataclass(frozen=True)
class SampledClosed:
    """Uniform samples of one period; the first point is not repeated."""

    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must have shape (m, 2)")
        if pts.shape[0] < 16:
            raise ValueError(f"need at least 16 samples, got {pts.shape[0]}")
        if np.allclose(pts[0], pts[-1], rtol=0.0, atol=1e-14 * (1 + np.abs(pts).max())):
            raise ValueError("last sample repeats the first; drop the closing point")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __eq__(self, other):
        return isinstance(other, SampledClosed) and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())


CurveSpec = Union[Ellipse, TrigPolynomial, SampledClosed]


def sigma_curve(phase: float = 1.9) -> TrigPolynomial:
    """(cos 2t - cos(t + phase), sin 2t + sin t), with the phase expanded."""
    return TrigPolynomial(
        ((2, 1.0, 0.0), (1, -math.cos(phase), math.sin(phase))),
        ((2, 0.0, 1.0), (1, 0.0, 1.0)),
    )


def figure_eight() -> TrigPolynomial:
    return TrigPolynomial(((1, 1.0, 0.0),), ((2, 0.0, 1.0),))


def affine_image(spec: CurveSpec, matrix, offset=(0.0, 0.0)) -> CurveSpec:
    """Spec of the curve ``M @ gamma + offset``."""
    m = np.asarray(matrix, dtype=float)
    b = np.asarray(offset, dtype=float)
    if isinstance(spec, SampledClosed):
        return SampledClosed(spec.points @ m.T + b)
    trig = spec.as_trig()
    coeffs: dict[int, np.ndarray] = {}
    for axis, terms in enumerate((trig.cx, trig.cy)):
        for k, c, s in terms:
            entry = coeffs.setdefault(k, np.zeros((2, 2)))
            entry[axis] += (c, s)
    coeffs.setdefault(0, np.zeros((2, 2)))
    out_x, out_y = [], []
    for k in sorted(coeffs):
        cs = m @ coeffs[k]
        if k == 0:
            cs[:, 0] += b
        out_x.append((k, cs[0, 0], cs[0, 1]))
        out_y.append((k, cs[1, 0], cs[1, 1]))
    return TrigPolynomial(tuple(out_x), tuple(out_y))


def _trig_derivatives(terms: tuple[Harmonic, ...], t: np.ndarray) -> np.ndarray:
    out = np.zeros((MAX_ORDER + 1, t.size))
    for k, c, s in terms:
        if k == 0:
            out[0] += c
            continue
        ck, sk = np.cos(k * t), np.sin(k * t)
        # d^m/dt^m cycles through four exact forms; avoids cos(kt + m*pi/2) round-off
        cycle = (c * ck + s * sk, s * ck - c * sk, -(c * ck + s * sk), c * sk - s * ck)
        for m in range(MAX_ORDER + 1):
            out[m] += float(k) ** m * cycle[m % 4]
    return out


@dataclass(frozen=True)
class SampledCurve:
    """Derivatives ``d[k, i] = gamma^(k)(t_i)`` for k = 0..5 on a uniform grid."""

    t: np.ndarray = field(repr=False)
    d: np.ndarray = field(repr=False)
    flipped: bool = False

    @property
    def n(self) -> int:
        return self.t.size

    def reversed(self) -> SampledCurve:
        """Same curve traversed backwards: node j becomes t = -t_j."""
        idx = (-np.arange(self.n)) % self.n
        signs = (-1.0) ** np.arange(MAX_ORDER + 1)
        d = self.d[:, idx, :] * signs[:, None, None]
        return SampledCurve(self.t, d, not self.flipped)


def _check_grid(n: int) -> None:
    if n < 2 or n & (n - 1):
        raise ValueError(f"sample count must be a power of two, got {n}")


def sample_curve(spec: CurveSpec, n: int, noise_tol: float = SPECTRAL_NOISE_TOL) -> SampledCurve:
    """Uniform-grid derivative table of ``spec`` with ``n`` nodes."""
    _check_grid(n)
    t = 2.0 * np.pi * np.arange(n) / n
    if isinstance(spec, SampledClosed):
        pts = spec.points
        if n < pts.shape[0]:
            raise ValueError(f"n={n} is smaller than the {pts.shape[0]} input samples")
        ratio = trailing_spectrum_ratio(pts)
        if ratio > noise_tol:
            raise UndersampledError(
                f"trailing spectrum ratio {ratio:.3g} exceeds {noise_tol:.3g}; "
                "the samples do not resolve the curve"
            )
        d = np.stack([resample(pts, n, order=k) for k in range(MAX_ORDER + 1)])
    else:
        if n < 64:
            raise ValueError(f"analytic curves need n >= 64, got {n}")
        trig = spec.as_trig()
        if 2 * trig.degree >= n // 2:
            raise ValueError(f"n={n} too small for harmonic degree {trig.degree}")
        d = np.stack([_trig_derivatives(trig.cx, t), _trig_derivatives(trig.cy, t)], axis=-1)
    t.setflags(write=False)
    d.setflags(write=False)
    return SampledCurve(t, d)


def check_no_inflexions(curve: SampledCurve) -> float:
    """min |[gamma_t, gamma_tt]| over the grid."""
    return float(np.abs(bracket(curve.d[1], curve.d[2])).min())


def oriented(curve: SampledCurve, threshold: float = INFLEXION_THRESHOLD) -> SampledCurve:
    """Return the curve with kappa > 0, reversing it if kappa < 0 everywhere."""
    kappa = bracket(curve.d[1], curve.d[2])
    min_abs = float(np.abs(kappa).min())
    if min_abs < threshold:
        raise InflexionError(min_abs, threshold)
    if kappa.min() < 0 < kappa.max():
        raise InflexionError(min_abs, threshold, "kappa changes sign")
    return curve.reversed() if kappa[0] < 0 else curve


# --- JSON schema and command-line shorthand ---------------------------------


def spec_from_dict(obj: dict) -> CurveSpec:
    kind = obj.get("type")
    if kind == "ellipse":
        return Ellipse(float(obj["a"]), float(obj["b"]))
    if kind == "circle":
        r = float(obj.get("r", 1.0))
        return Ellipse(r, r)
    if kind == "trigpoly":
        return TrigPolynomial(tuple(map(tuple, obj["x"])), tuple(map(tuple, obj["y"])))
    if kind == "samples":
        return SampledClosed(np.asarray(obj["points"], dtype=float))
    raise ValueError(f"unknown curve type {kind!r}")


def spec_to_dict(spec: CurveSpec) -> dict:
    if isinstance(spec, Ellipse):
        return {"type": "ellipse", "a": spec.a, "b": spec.b}
    if isinstance(spec, TrigPolynomial):
        return {"type": "trigpoly", "x": [list(h) for h in spec.cx], "y": [list(h) for h in spec.cy]}
    return {"type": "samples", "points": spec.points.tolist()}


def parse_curve_arg(text: str) -> CurveSpec:
    """Parse ``ellipse:a,b``, ``circle:r``, ``sigma[:phase]``, ``figure-eight``,
    inline JSON, or ``@path.json``."""
    text = text.strip()
    if text.startswith("@"):
        return spec_from_dict(json.loads(Path(text[1:]).read_text()))
    if text.startswith("{"):
        return spec_from_dict(json.loads(text))
    name, _, args = text.partition(":")
    nums = [float(v) for v in args.split(",")] if args else []
    if name == "ellipse" and len(nums) == 2:
        return Ellipse(*nums)
    if name == "circle" and len(nums) <= 1:
        r = nums[0] if nums else 1.0
        return Ellipse(r, r)
    if name == "sigma" and len(nums) <= 1:
        return sigma_curve(*nums)
    if name == "figure-eight" and not nums:
        return figure_eight()
    raise ValueError(f"cannot parse curve spec {text!r}")
