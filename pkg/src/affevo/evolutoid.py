"""Evolutoids: envelopes of the lines through gamma(s) with direction
v = (1 - alpha) g_s + alpha g_ss, for 0 <= alpha <= 1.

The envelope point is X = gamma + alpha / D * v with D = (1-alpha)^2 + mu alpha^2.
It fails to be regular where

    g(s, alpha) = alpha^3 mu_s - (1 - alpha) D = 0,

and such a point is an ordinary cusp (A2) when h = alpha mu_ss - (1-alpha) mu_s
is nonzero there.  When h vanishes too, the point is an A3 (swallowtail)
point provided q = alpha^5 mu_sss - (1-alpha)^3 D is nonzero.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .affine import AffineJetTable, JetPoint
from .curves import bracket
from .errors import NumericalError

log = logging.getLogger(__name__)

D_MIN = 1e-12
TOL_ROOT = 1e-8
TOL_CLASS = 1e-6
ROOT_XTOL_S = 1e-10
# |g| below this (relative) is treated as exactly zero when bracketing
G_DEADBAND = 1e-12


class Kind(str, enum.Enum):
    A2 = "A2"
    A3 = "A3"
    DEGENERATE = "degenerate"


def check_alpha(alpha: float, allow_zero: bool = True) -> float:
    alpha = float(alpha)
    if alpha < 0:
        raise ValueError(f"alpha={alpha}: negative alpha (the other-side evolutoids) is unsupported")
    if alpha > 1:
        raise ValueError(f"alpha={alpha} outside [0, 1]")
    if alpha == 0 and not allow_zero:
        raise ValueError("alpha must be positive here")
    return alpha


# --- the scalar functions and their partials --------------------------------


def denominator(alpha, mu):
    return (1.0 - alpha) ** 2 + mu * alpha**2


def g_value(alpha, mu, mu_s):
    """Cleared-denominator singularity function alpha^3 mu_s - (1-alpha) D."""
    return alpha**3 * mu_s - (1.0 - alpha) * denominator(alpha, mu)


def h_value(alpha, mu_s, mu_ss):
    return alpha * mu_ss - (1.0 - alpha) * mu_s


def q_value(alpha, mu, mu_sss):
    return alpha**5 * mu_sss - (1.0 - alpha) ** 3 * denominator(alpha, mu)


def g_partials(alpha, mu, mu_s, mu_ss, mu_sss):
    """(g_s, g_alpha, h_s, h_alpha); note g_s = alpha^2 h."""
    g_s = alpha**2 * h_value(alpha, mu_s, mu_ss)
    g_a = 3 * alpha**2 * mu_s + 3 * (1 - alpha) ** 2 - (2 * alpha - 3 * alpha**2) * mu
    h_s = alpha * mu_sss - (1 - alpha) * mu_ss
    h_a = mu_ss + mu_s
    return g_s, g_a, h_s, h_a


def _scales(jets: AffineJetTable, alpha: float) -> tuple[float, float, float]:
    sc = jets.scales
    d_sup = denominator(alpha, sc["mu"]) + (1 - alpha) ** 2
    g_sc = 1.0 + alpha**3 * sc["mu_s"] + (1 - alpha) * d_sup
    h_sc = 1.0 + alpha * sc["mu_ss"] + (1 - alpha) * sc["mu_s"]
    q_sc = 1.0 + alpha**5 * sc["mu_sss"] + (1 - alpha) ** 3 * d_sup
    return g_sc, h_sc, q_sc


# --- envelope points ---------------------------------------------------------


@dataclass(frozen=True)
class EvolutoidSample:
    s: float
    alpha: float
    X: np.ndarray
    D: float
    A: float
    v: np.ndarray
    t: float = 0.0


def _jet(jets: AffineJetTable, i, t) -> JetPoint:
    return jets.at(t) if t is not None else jets.point(i)


def _sample_from_jet(p: JetPoint, alpha: float) -> EvolutoidSample:
    D = denominator(alpha, p.mu)
    if D < D_MIN:
        raise NumericalError(f"denominator {D:.3g} below {D_MIN} at s={p.s:.6g}, alpha={alpha}")
    v = (1 - alpha) * p.gamma_s + alpha * p.gamma_ss
    X = p.gamma + (alpha / D) * v
    A = (1 - alpha) / D - alpha**3 * p.mu_s / D**2
    return EvolutoidSample(p.s, alpha, X, D, A, v, p.t)


def evolutoid_point(jets: AffineJetTable, i: int | None, alpha: float, *, t: float | None = None
                    ) -> EvolutoidSample:
    """Envelope point at node ``i`` (or at parameter ``t`` if given)."""
    alpha = check_alpha(alpha)
    return _sample_from_jet(_jet(jets, i, t), alpha)


def regularity_function(jets: AffineJetTable, i: int | None, alpha: float, *, t: float | None = None
                        ) -> float:
    """A with X_s = A v; zero exactly at non-regular envelope points."""
    return evolutoid_point(jets, i, alpha, t=t).A


@dataclass(frozen=True)
class EvolutoidCurve:
    """E_alpha sampled at every node (a closed polyline)."""

    alpha: float
    s: np.ndarray = field(repr=False)
    X: np.ndarray = field(repr=False)
    D: np.ndarray = field(repr=False)
    A: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)

    def __len__(self):
        return self.s.size

    def __getitem__(self, i) -> EvolutoidSample:
        return EvolutoidSample(float(self.s[i]), self.alpha, self.X[i], float(self.D[i]),
                               float(self.A[i]), self.v[i])


def evolutoid_curve(jets: AffineJetTable, alpha: float) -> EvolutoidCurve:
    alpha = check_alpha(alpha)
    D = denominator(alpha, jets.mu)
    if D.min() < D_MIN:
        raise NumericalError(f"denominator {D.min():.3g} below {D_MIN} at alpha={alpha}")
    v = (1 - alpha) * jets.gamma_s + alpha * jets.gamma_ss
    X = jets.gamma + (alpha / D)[:, None] * v
    A = (1 - alpha) / D - alpha**3 * jets.mu_s / D**2
    return EvolutoidCurve(alpha, jets.s, X, D, A, v)


# --- singular points -------------------------------------------------------------


@dataclass
class SingularityRecord:
    s0: float
    alpha0: float
    X0: np.ndarray
    kind: Kind
    g: float
    h: float
    q: float
    t0: float
    resolved: bool = True

    def to_dict(self, with_alpha: bool = False) -> dict:
        out = {"s": self.s0, "t": self.t0, "x": float(self.X0[0]), "y": float(self.X0[1]),
               "kind": self.kind.value, "g": self.g, "h": self.h, "q": self.q}
        if with_alpha:
            out = {"alpha": self.alpha0, **out, "resolved": self.resolved}
        return out


def g_at(jets: AffineJetTable, t: float, alpha: float) -> float:
    _, mu, mu_s, _, _ = jets.scalars_at(t)
    return float(g_value(alpha, mu, mu_s))


def classify_singularity(jets: AffineJetTable, s0: float | None, alpha: float, *,
                         t0: float | None = None, tol_root: float = TOL_ROOT,
                         tol_class: float = TOL_CLASS) -> Kind:
    """A2 / A3 / degenerate classification of a root of g."""
    alpha = check_alpha(alpha, allow_zero=False)
    if t0 is None:
        t0 = jets.t_of_s(s0)
    kappa, mu, mu_s, mu_ss, mu_sss = jets.scalars_at(t0)
    g_sc, h_sc, q_sc = _scales(jets, alpha)
    g = g_value(alpha, mu, mu_s)
    if abs(g) > tol_root * g_sc:
        raise ValueError(f"not a singular point: |g| = {abs(g):.3g} at t={t0:.6g}, alpha={alpha}")
    if abs(mu) <= tol_class * (1.0 + jets.scales["mu"]):
        raise NumericalError(f"affine curvature vanishes at t={t0:.6g}; classification undefined")
    if abs(h_value(alpha, mu_s, mu_ss)) > tol_class * h_sc:
        return Kind.A2
    if abs(q_value(alpha, mu, mu_sss)) > tol_class * q_sc:
        return Kind.A3
    return Kind.DEGENERATE


def _record(jets: AffineJetTable, t0: float, alpha: float, kind: Kind, resolved=True
            ) -> SingularityRecord:
    p = jets.at(t0)
    X0 = _sample_from_jet(p, alpha).X
    return SingularityRecord(p.s, alpha, X0, kind, float(g_value(alpha, p.mu, p.mu_s)),
                             float(h_value(alpha, p.mu_s, p.mu_ss)),
                             float(q_value(alpha, p.mu, p.mu_sss)), t0, resolved)


def _sign_brackets(values: np.ndarray, floor: float) -> list[tuple[int, int]]:
    """Cyclic index pairs (i, j) of consecutive significant values with opposite sign."""
    sig = np.flatnonzero(np.abs(values) > floor)
    if sig.size < 2:
        return []
    out = []
    for a, b in zip(sig, np.roll(sig, -1)):
        if np.sign(values[a]) != np.sign(values[b]):
            out.append((int(a), int(b)))
    return out


def _hidden_brackets(jets: AffineJetTable, alpha: float, G: np.ndarray, floor: float
                     ) -> list[tuple[float, float]]:
    """Brackets for root pairs born between two nodes.

    Near a tangential birth both roots can sit inside one grid cell, so the
    node values never change sign.  Every node extremum that points toward
    zero is refined on the interpolant; if it crosses, the two sides bracket
    one root each.
    """
    prev, nxt = np.roll(G, 1), np.roll(G, -1)
    dt = 2 * np.pi / jets.n
    out = []
    for sign in (1.0, -1.0):
        # sign = 1: negative local maxima; sign = -1: positive local minima
        up, lo_, hi_ = sign * G, sign * prev, sign * nxt
        # prominence above the dead-band keeps round-off ripple out
        strict = (up >= lo_) & (up >= hi_) & ((up - lo_ > floor) | (up - hi_ > floor))
        cand = np.flatnonzero(strict & (up < -floor) & (lo_ < -floor) & (hi_ < -floor))
        for i in cand:
            lo, hi = jets.t[i] - dt, jets.t[i] + dt
            res = minimize_scalar(lambda t: -sign * g_at(jets, t, alpha), bounds=(lo, hi),
                                  method="bounded", options={"xatol": 1e-13})
            if -res.fun > floor:
                out += [(lo, float(res.x)), (float(res.x), hi)]
    return out


def root_parameters(jets: AffineJetTable, alpha: float) -> list[float] | None:
    """Parameters t in [0, 2 pi) of the zeros of g(., alpha), sorted.

    Returns None when g vanishes identically (to round-off) on the grid.
    """
    G = g_value(alpha, jets.mu, jets.mu_s)
    g_sc, _, _ = _scales(jets, alpha)
    floor = G_DEADBAND * g_sc
    if np.abs(G).max() <= floor:
        return None
    xtol = ROOT_XTOL_S / float(np.cbrt(jets.kappa.max()))
    brackets = [(jets.t[i], jets.t[j] if j > i else jets.t[j] + 2 * np.pi)
                for i, j in _sign_brackets(G, floor)]
    brackets += _hidden_brackets(jets, alpha, G, floor)
    roots = []
    for lo, hi in brackets:
        r = brentq(lambda t: g_at(jets, t, alpha), lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)
        roots.append(float(r % (2 * np.pi)))
    roots.sort()
    # brackets are disjoint, so only a root reported twice at a shared end
    # can repeat; distinct roots closer than a grid cell are kept
    same = 100 * xtol
    deduped: list[float] = []
    for r in roots:
        if deduped and r - deduped[-1] < same:
            continue
        deduped.append(r)
    if len(deduped) > 1 and deduped[0] + 2 * np.pi - deduped[-1] < same:
        deduped.pop()
    return deduped


def singular_points(jets: AffineJetTable, alpha: float, *, tol_root: float = TOL_ROOT,
                    tol_class: float = TOL_CLASS) -> list[SingularityRecord]:
    """Non-regular points of E_alpha, sorted by s.

    If g vanishes identically (a conic at alpha = 1, where the evolutoid
    collapses to a point) a single degenerate record at s = 0 is returned.
    """
    alpha = check_alpha(alpha)
    if alpha == 0:
        return []
    roots = root_parameters(jets, alpha)
    if roots is None:
        return [_record(jets, 0.0, alpha, Kind.DEGENERATE)]
    records = []
    for t0 in roots:
        kind = classify_singularity(jets, None, alpha, t0=t0, tol_root=tol_root, tol_class=tol_class)
        records.append(_record(jets, t0, alpha, kind))
    records.sort(key=lambda r: r.s0)
    return records


# --- first alpha with a singular point -------------------------------------------


def newton_gh(jets: AffineJetTable, t: float, alpha: float, max_iter: int = 50
              ) -> tuple[float, float, bool]:
    """Solve g = h = 0 for (t, alpha) by damped Newton with analytic partials."""

    def residual(t, a):
        _, mu, mu_s, mu_ss, _ = jets.scalars_at(t)
        g_sc, h_sc, _ = _scales(jets, a)
        return np.array([g_value(a, mu, mu_s) / g_sc, h_value(a, mu_s, mu_ss) / h_sc])

    r = residual(t, alpha)
    for _ in range(max_iter):
        kappa, mu, mu_s, mu_ss, mu_sss = jets.scalars_at(t)
        s_t = np.cbrt(kappa)
        g_sc, h_sc, _ = _scales(jets, alpha)
        g_s, g_a, h_s, h_a = g_partials(alpha, mu, mu_s, mu_ss, mu_sss)
        jac = np.array([[g_s * s_t / g_sc, g_a / g_sc], [h_s * s_t / h_sc, h_a / h_sc]])
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            return t, alpha, False
        if not np.all(np.isfinite(step)):
            return t, alpha, False
        lam = 1.0
        for _ in range(30):
            t_new, a_new = t + lam * step[0], alpha + lam * step[1]
            r_new = residual(t_new, a_new)
            if np.linalg.norm(r_new) <= np.linalg.norm(r) or np.linalg.norm(r) < 1e-14:
                break
            lam *= 0.5
        t, alpha, r = t_new, a_new, r_new
        if abs(lam * step[0]) < 1e-13 and abs(lam * step[1]) < 1e-13:
            return t % (2 * np.pi), alpha, bool(np.linalg.norm(r) < 1e-9)
    return t % (2 * np.pi), alpha, bool(np.linalg.norm(r) < 1e-9)


@dataclass(frozen=True)
class AlphaBorn:
    alpha: float
    s: float
    t: float
    polished: bool
    bracket: tuple[float, float]

    def __iter__(self):
        return iter((self.alpha, self.s))


def _max_g(jets: AffineJetTable, alpha: float) -> tuple[float, float]:
    """Maximum of g(., alpha) over the period and where it is attained."""
    G = g_value(alpha, jets.mu, jets.mu_s)
    i = int(np.argmax(G))
    dt = 2 * np.pi / jets.n
    res = minimize_scalar(lambda t: -g_at(jets, t, alpha), bounds=(jets.t[i] - dt, jets.t[i] + dt),
                          method="bounded", options={"xatol": 1e-12})
    if -res.fun > G[i]:
        return float(-res.fun), float(res.x % (2 * np.pi))
    return float(G[i]), float(jets.t[i])


def alpha_born(jets: AffineJetTable, alpha_tol: float = 1e-8, n_scan: int = 256) -> AlphaBorn:
    """Smallest alpha in (0, 1] at which E_alpha has a non-regular point.

    The predicate "max_s g(s, alpha) >= 0" is scanned upward from alpha = 0,
    bisected inside the first bracket where it turns true, and the result is
    polished by Newton on the tangential-birth system g = g_s = 0.
    """

    def holds(a):
        g_sc, _, _ = _scales(jets, a)
        return _max_g(jets, a)[0] >= -G_DEADBAND * g_sc

    if not holds(1.0):
        raise NumericalError("max of mu_s is negative; the jet table is corrupt")
    grid = np.linspace(0.0, 1.0, n_scan + 1)
    hi_idx = next(k for k in range(1, n_scan + 1) if holds(grid[k]))
    lo, hi = float(grid[hi_idx - 1]), float(grid[hi_idx])
    while hi - lo > alpha_tol:
        mid = 0.5 * (lo + hi)
        if holds(mid):
            hi = mid
        else:
            lo = mid
    _, t_star = _max_g(jets, hi)
    alpha_star, polished = hi, False
    if hi < 1.0:
        t_new, a_new, ok = newton_gh(jets, t_star, hi)
        # accept the polish only if it stays on the bisected bracket's scale
        if ok and abs(a_new - hi) <= max(10 * alpha_tol, 1e-6):
            t_star, alpha_star, polished = t_new, a_new, True
    s_star = jets.at(t_star).s
    return AlphaBorn(float(alpha_star), float(s_star), float(t_star), polished, (lo, hi))


# --- ordinary-cusp cross-check ------------------------------------------------------


def cusp_third_derivative_check(jets: AffineJetTable, s0: float, alpha: float, step: float = 2e-3
                                ) -> tuple[float, float]:
    """([X_ss, X_sss] by finite differences in s, closed form 2 A_s^2 D).

    At a root of g, A = 0 and A_s = -alpha^2 h / D^2, so the closed form is
    2 alpha^4 h^2 / D^3.  Fourth-order central stencils; steps much below
    1e-3 lose digits to round-off in the third difference.
    """
    alpha = check_alpha(alpha, allow_zero=False)
    if step < 1e-6:
        raise ValueError(f"finite-difference step {step} is below resolvable size")
    x = {k: evolutoid_point(jets, None, alpha, t=jets.t_of_s(s0 + k * step)).X
         for k in range(-3, 4)}
    x_ss = (-x[2] + 16 * x[1] - 30 * x[0] + 16 * x[-1] - x[-2]) / (12 * step**2)
    x_sss = (-x[3] + 8 * x[2] - 13 * x[1] + 13 * x[-1] - 8 * x[-2] + x[-3]) / (8 * step**3)
    numeric = float(bracket(x_ss, x_sss))
    p = jets.at(jets.t_of_s(s0))
    D = denominator(alpha, p.mu)
    h = h_value(alpha, p.mu_s, p.mu_ss)
    return numeric, float(2 * alpha**4 * h**2 / D**3)
