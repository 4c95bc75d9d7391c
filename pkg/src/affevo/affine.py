"""Equi-affine frame and curvature of a closed plane curve.

With kappa = [g_t, g_tt] the affine arclength satisfies ds/dt = kappa^(1/3),
the affine tangent is g_s = g_t kappa^(-1/3), and the affine normal g_ss is
normalized so that [g_s, g_ss] = 1.  The affine curvature mu is defined by
g_sss = -mu g_s.  Everything is evaluated in the original parameter t and
converted with the chain rule; nothing is resampled onto an s-grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .curves import INFLEXION_THRESHOLD, SampledCurve, bracket, oriented
from .errors import NumericalError
from .spectral import PeriodicInterpolant, periodic_antiderivative, spectral_derivative

# relative amplitude below which Fourier modes count as round-off
ROUNDOFF_CUTOFF = 1e-13


def affine_speed(curve: SampledCurve) -> np.ndarray:
    """kappa = [g_t, g_tt] at every node."""
    return bracket(curve.d[1], curve.d[2])


def affine_arclength(curve: SampledCurve, threshold: float = INFLEXION_THRESHOLD):
    """Affine arclength at the nodes (s[0] = 0) and the total affine length."""
    curve = oriented(curve, threshold)
    return periodic_antiderivative(np.cbrt(affine_speed(curve)))


def affine_normal(curve: SampledCurve, threshold: float = INFLEXION_THRESHOLD) -> np.ndarray:
    """xi = kappa^(-2/3) g_tt - (1/3) kappa_t kappa^(-5/3) g_t."""
    curve = oriented(curve, threshold)
    d = curve.d
    kappa = bracket(d[1], d[2])
    kappa_t = bracket(d[1], d[3])
    c = np.cbrt(kappa)
    return d[2] / c[:, None] ** 2 - (kappa_t / (3.0 * c**5))[:, None] * d[1]


def affine_normal_pointwise(d1, d2, d3) -> np.ndarray:
    """The affine normal from the first three parameter derivatives at one point."""
    kappa = bracket(d1, d2)
    c = np.cbrt(kappa)
    return np.asarray(d2) / c**2 - bracket(d1, d3) / (3.0 * c**5) * np.asarray(d1)


def _curvature_formula(kappa, kappa_t, kappa_tt, b23):
    c = np.cbrt(kappa)
    return (3.0 * kappa * kappa_tt - 5.0 * kappa_t**2 + 9.0 * kappa * b23) / (9.0 * c**8)


def affine_curvature(curve: SampledCurve, threshold: float = INFLEXION_THRESHOLD) -> np.ndarray:
    """mu at every node; kappa_tt comes from spectral differentiation of kappa."""
    curve = oriented(curve, threshold)
    d = curve.d
    kappa = bracket(d[1], d[2])
    kappa_tt = spectral_derivative(kappa, 2, ROUNDOFF_CUTOFF)
    return _curvature_formula(kappa, bracket(d[1], d[3]), kappa_tt, bracket(d[2], d[3]))


def affine_curvature_pointwise(d1, d2, d3, d4) -> np.ndarray:
    """mu from the first four parameter derivatives at a single point.

    Works for open curves (no periodicity): kappa_tt is taken from the exact
    expansion [g_tt, g_ttt] + [g_t, g_tttt].
    """
    kappa = bracket(d1, d2)
    kappa_tt = bracket(d2, d3) + bracket(d1, d4)
    return _curvature_formula(kappa, bracket(d1, d3), kappa_tt, bracket(d2, d3))


@dataclass(frozen=True)
class MongeJet:
    """Graph y = a2 t^2/2 + a3 t^3/6 + a4 t^4/24 + ... near the origin."""

    a2: float
    a3: float
    a4: float

    def __post_init__(self):
        if self.a2 == 0:
            raise ValueError("a2 must be nonzero (euclidean inflexion at the origin)")

    def derivatives_at_origin(self) -> list[np.ndarray]:
        """(g_t, g_tt, g_ttt, g_tttt) at t = 0."""
        return [np.array([1.0, 0.0]), np.array([0.0, self.a2]),
                np.array([0.0, self.a3]), np.array([0.0, self.a4])]


def monge_affine_curvature(jet: MongeJet) -> float:
    """mu(0) = (3 a2 a4 - 5 a3^2) / (9 a2^(8/3))."""
    return (3.0 * jet.a2 * jet.a4 - 5.0 * jet.a3**2) / (9.0 * np.cbrt(jet.a2) ** 8)


@dataclass(frozen=True)
class JetPoint:
    """Affine data at one parameter value."""

    t: float
    s: float
    gamma: np.ndarray
    gamma_s: np.ndarray
    gamma_ss: np.ndarray
    kappa: float
    mu: float
    mu_s: float
    mu_ss: float
    mu_sss: float

    @property
    def s_t(self) -> float:
        return float(np.cbrt(self.kappa))


@dataclass
class AffineJetTable:
    """Per-node affine data of a sampled curve (see :func:`affine_jets`)."""

    curve: SampledCurve = field(repr=False)
    s: np.ndarray = field(repr=False)
    length: float
    gamma: np.ndarray = field(repr=False)
    gamma_s: np.ndarray = field(repr=False)
    gamma_ss: np.ndarray = field(repr=False)
    gamma_sss: np.ndarray = field(repr=False)
    kappa: np.ndarray = field(repr=False)
    kappa_t: np.ndarray = field(repr=False)
    mu: np.ndarray = field(repr=False)
    mu_s: np.ndarray = field(repr=False)
    mu_ss: np.ndarray = field(repr=False)
    mu_sss: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.s.size

    @property
    def t(self) -> np.ndarray:
        return self.curve.t

    @property
    def flipped(self) -> bool:
        return self.curve.flipped

    @cached_property
    def scales(self) -> dict[str, float]:
        """Sup-norms used to turn absolute tolerances into relative ones."""
        return {name: float(np.abs(getattr(self, name)).max())
                for name in ("mu", "mu_s", "mu_ss", "mu_sss")}

    def point(self, i: int) -> JetPoint:
        i = int(i) % self.n
        return JetPoint(float(self.t[i]), float(self.s[i]), self.gamma[i], self.gamma_s[i],
                        self.gamma_ss[i], float(self.kappa[i]), float(self.mu[i]),
                        float(self.mu_s[i]), float(self.mu_ss[i]), float(self.mu_sss[i]))

    @cached_property
    def _interp(self) -> PeriodicInterpolant:
        ramp = self.length * self.t / (2.0 * np.pi)
        cols = np.column_stack([
            self.s - ramp, self.gamma, self.gamma_s, self.gamma_ss,
            self.kappa, self.mu, self.mu_s, self.mu_ss, self.mu_sss,
        ])
        return PeriodicInterpolant(cols)

    def at(self, t: float) -> JetPoint:
        """Trigonometric interpolation of every field at parameter ``t``."""
        v = self._interp(t)
        s = v[0] + self.length * t / (2.0 * np.pi)
        return JetPoint(float(t), float(s), v[1:3], v[3:5], v[5:7], *map(float, v[7:12]))

    def scalars_at(self, t: float) -> np.ndarray:
        """(kappa, mu, mu_s, mu_ss, mu_sss) at ``t``; cheaper than :meth:`at`."""
        return self._interp(t)[7:12]

    def t_of_s(self, s: float) -> float:
        """Inverse of the arclength map (Newton on s(t) = s)."""
        t = 2.0 * np.pi * s / self.length
        for _ in range(50):
            p = self.at(t)
            step = (p.s - s) / p.s_t
            t -= step
            if abs(step) < 1e-15 * (1.0 + abs(t)):
                return t
        raise NumericalError(f"t_of_s failed to converge at s={s}")


def mu_derivatives(jets: AffineJetTable) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(mu_s, mu_ss, mu_sss) by repeated spectral t-derivative times kappa^(-1/3)."""
    inv_st = 1.0 / np.cbrt(jets.kappa)
    mu_s = spectral_derivative(jets.mu, 1, ROUNDOFF_CUTOFF) * inv_st
    mu_ss = spectral_derivative(mu_s, 1, ROUNDOFF_CUTOFF) * inv_st
    mu_sss = spectral_derivative(mu_ss, 1, ROUNDOFF_CUTOFF) * inv_st
    return mu_s, mu_ss, mu_sss


def affine_jets(curve: SampledCurve, threshold: float = INFLEXION_THRESHOLD) -> AffineJetTable:
    """Build the full affine jet table; rejects curves with inflexions.

    A curve with kappa < 0 everywhere is traversed backwards first (see
    ``AffineJetTable.flipped``).
    """
    curve = oriented(curve, threshold)
    d = curve.d
    kappa = bracket(d[1], d[2])
    kappa_t = bracket(d[1], d[3])
    kappa_tt = spectral_derivative(kappa, 2, ROUNDOFF_CUTOFF)
    c = np.cbrt(kappa)
    s, length = periodic_antiderivative(c)

    gamma_s = d[1] / c[:, None]
    gamma_ss = d[2] / c[:, None] ** 2 - (kappa_t / (3.0 * c**5))[:, None] * d[1]
    # one more chain-rule step: d/dt(gamma_ss) / s_t
    coef_t = -kappa_tt / (3.0 * c**5) + 5.0 * kappa_t**2 / (9.0 * c**8)
    gamma_sss = (d[3] / c[:, None] ** 2 - (kappa_t / c**5)[:, None] * d[2]
                 + coef_t[:, None] * d[1]) / c[:, None]

    mu = _curvature_formula(kappa, kappa_t, kappa_tt, bracket(d[2], d[3]))
    jets = AffineJetTable(curve, s, float(length), d[0], gamma_s, gamma_ss, gamma_sss,
                          kappa, kappa_t, mu, mu, mu, mu)
    jets.mu_s, jets.mu_ss, jets.mu_sss = mu_derivatives(jets)
    return jets
