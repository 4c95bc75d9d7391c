"""Discriminant surface of the three-parameter family

    F(x, y, alpha, s) = [X - gamma(s), (1 - alpha) g_s + alpha g_ss],

i.e. the union over alpha of the evolutoids, viewed in (x, y, alpha)-space.
Its cuspidal edges are the curves {g = 0} traced across alpha-slices; its
swallowtail points are where two cusps of a level set merge (g = h = 0).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .affine import AffineJetTable, JetPoint
from .curves import bracket
from .errors import NumericalError
from .evolutoid import (
    TOL_CLASS,
    Kind,
    SingularityRecord,
    _record,
    _scales,
    check_alpha,
    denominator,
    evolutoid_curve,
    evolutoid_point,
    h_value,
    newton_gh,
    q_value,
    root_parameters,
)
from .parallel import parallel_map

log = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


def _cyclic_dist(a, b):
    d = np.abs(np.asarray(a) - np.asarray(b)) % TWO_PI
    return np.minimum(d, TWO_PI - d)


def _frame(p: JetPoint, alpha: float):
    """v and its first three s-derivatives, using g_sss = -mu g_s."""
    a, mu, mu_s, mu_ss = alpha, p.mu, p.mu_s, p.mu_ss
    T, N = p.gamma_s, p.gamma_ss
    v = (1 - a) * T + a * N
    v_s = (1 - a) * N - a * mu * T
    v_ss = -((1 - a) * mu + a * mu_s) * T - a * mu * N
    v_sss = -((1 - a) * mu_s + a * mu_ss - a * mu**2) * T - ((1 - a) * mu + 2 * a * mu_s) * N
    return v, v_s, v_ss, v_sss


def family_value(jets: AffineJetTable, i: int | None, X, alpha: float, *, t: float | None = None
                 ) -> tuple[float, float, float, float]:
    """(F, F_s, F_ss, F_sss) at node ``i`` (or parameter ``t``) for a fixed point X."""
    p = jets.at(t) if t is not None else jets.point(i)
    T, N = p.gamma_s, p.gamma_ss
    v, v_s, v_ss, v_sss = _frame(p, alpha)
    Y = np.asarray(X, dtype=float) - p.gamma
    F = bracket(Y, v)
    F_s = -bracket(T, v) + bracket(Y, v_s)
    F_ss = -bracket(N, v) - 2 * bracket(T, v_s) + bracket(Y, v_ss)
    F_sss = p.mu * bracket(T, v) - 3 * bracket(N, v_s) - 3 * bracket(T, v_ss) + bracket(Y, v_sss)
    return float(F), float(F_s), float(F_ss), float(F_sss)


# --- versality ----------------------------------------------------------------


@dataclass(frozen=True)
class VersalityDiagnostics:
    """Determinants of the versality matrices at an envelope point.

    ``detJbar`` is None for alpha in {0, 1}, where its closed form is undefined.
    ``kernel`` is the numerically computed null vector of the first two rows
    of J, scaled to share the closed-form tangent's third component.
    """

    alpha: float
    mu: float
    detJ1: float
    detJbar: float | None
    cusp_tangent: np.ndarray
    kernel: np.ndarray

    @property
    def detJ1_closed(self) -> float:
        return float(denominator(self.alpha, self.mu))

    @property
    def alpha_detJbar_closed(self) -> float:
        return float(self.alpha**2 * self.mu + 3 * (1 - self.alpha) ** 2)


def _versality_rows(p: JetPoint, alpha: float) -> np.ndarray:
    T, N = p.gamma_s, p.gamma_ss
    v, v_s, v_ss, _ = _frame(p, alpha)
    D = denominator(alpha, p.mu)
    Y = (alpha / D) * v
    w = N - T
    w_s = -p.mu * T - N
    w_ss = (p.mu - p.mu_s) * T - p.mu * N
    F_a = bracket(Y, w)
    F_as = -bracket(T, w) + bracket(Y, w_s)
    F_ass = -bracket(N, w) - 2 * bracket(T, w_s) + bracket(Y, w_ss)
    return np.array([
        [v[1], -v[0], F_a],
        [v_s[1], -v_s[0], F_as],
        [v_ss[1], -v_ss[0], F_ass],
    ])


def versality_diagnostics(jets: AffineJetTable, i: int | None, alpha: float, *,
                          t: float | None = None) -> VersalityDiagnostics:
    alpha = check_alpha(alpha)
    p = jets.at(t) if t is not None else jets.point(i)
    rows = _versality_rows(p, alpha)
    det_j1 = float(np.linalg.det(rows[:2, :2]))
    det_jbar = float(np.linalg.det(rows)) if 0 < alpha < 1 else None
    D = denominator(alpha, p.mu)
    T, N = p.gamma_s, p.gamma_ss
    planar = 2 * alpha * (alpha - 1) * N + (alpha**2 * p.mu - (1 - alpha) ** 2) * T
    tangent = np.array([planar[0], planar[1], -D**2])
    kernel = np.cross(rows[0], rows[1])
    kernel = kernel * (-D**2 / kernel[2])
    return VersalityDiagnostics(alpha, p.mu, det_j1, det_jbar, tangent, kernel)


def jbar_determinant(jets: AffineJetTable, i: int | None, alpha: float, *, t: float | None = None
                     ) -> float:
    alpha = check_alpha(alpha)
    if not 0 < alpha < 1:
        raise ValueError("det Jbar needs 0 < alpha < 1")
    return versality_diagnostics(jets, i, alpha, t=t).detJbar


# --- cuspidal edges -------------------------------------------------------------


@dataclass
class CuspEdge:
    """A branch of cusps continued across consecutive alpha-slices."""

    t: list[float] = field(default_factory=list)
    alpha: list[float] = field(default_factory=list)
    slices: list[int] = field(default_factory=list)
    points: list[np.ndarray] = field(default_factory=list)

    def __len__(self):
        return len(self.t)

    @property
    def xyz(self) -> np.ndarray:
        return np.array([[*p, a] for p, a in zip(self.points, self.alpha)]).reshape(-1, 3)


def _slice_roots(jets: AffineJetTable, alphas: np.ndarray) -> list[list[float]]:
    def roots(a):
        if a <= 0.0:
            return []
        r = root_parameters(jets, float(a))
        return [] if r is None else r

    return parallel_map(roots, alphas)


def _match(prev: list[float], curr: list[float]) -> dict[int, int]:
    """Greedy nearest matching prev index -> curr index within half the mean spacing."""
    if not prev or not curr:
        return {}
    limit = 0.5 * TWO_PI / max(len(prev), len(curr))
    dist = _cyclic_dist(np.asarray(prev)[:, None], np.asarray(curr)[None, :])
    pairs = sorted((dist[i, j], i, j) for i in range(len(prev)) for j in range(len(curr)))
    out: dict[int, int] = {}
    used: set[int] = set()
    for d, i, j in pairs:
        if d > limit:
            break
        if i in out or j in used:
            continue
        out[i] = j
        used.add(j)
    return out


def trace_cuspidal_edges(jets: AffineJetTable, alphas) -> list[CuspEdge]:
    """Continue roots of g(., alpha) from slice to slice by nearest matching."""
    alphas = np.asarray(alphas, dtype=float)
    per_slice = _slice_roots(jets, alphas)
    edges: list[CuspEdge] = []
    open_edges: dict[int, CuspEdge] = {}  # index into previous slice's roots -> edge
    prev: list[float] = []
    for j, (a, curr) in enumerate(zip(alphas, per_slice)):
        match = _match(prev, curr)
        nxt: dict[int, CuspEdge] = {}
        for ip, ic in match.items():
            nxt[ic] = open_edges[ip]
        for ic in range(len(curr)):
            if ic not in nxt:
                nxt[ic] = CuspEdge()
                edges.append(nxt[ic])
        for ic, edge in nxt.items():
            t0 = curr[ic]
            edge.t.append(t0)
            edge.alpha.append(float(a))
            edge.slices.append(j)
            edge.points.append(evolutoid_point(jets, None, a, t=t0).X)
        open_edges, prev = nxt, curr
    return edges


def cusp_line_verticality_check(jets: AffineJetTable, edge: CuspEdge | None) -> float | None:
    """min |D^2| along the edge, the size of the tangent's alpha-component.

    Returns None for an empty edge.
    """
    if edge is None or len(edge) == 0:
        return None
    vals = [denominator(a, jets.scalars_at(t)[1]) ** 2 for t, a in zip(edge.t, edge.alpha)]
    return float(min(vals))


# --- swallowtails -----------------------------------------------------------------


def _h_at(jets: AffineJetTable, t: float, alpha: float) -> float:
    _, _, mu_s, mu_ss, _ = jets.scalars_at(t)
    return float(h_value(alpha, mu_s, mu_ss))


def _candidates(jets: AffineJetTable, edges: list[CuspEdge], alphas: np.ndarray):
    """Initial (t, alpha) guesses for g = h = 0 from the traced edges."""
    last = len(alphas) - 1
    births: dict[int, list[CuspEdge]] = {}
    deaths: dict[int, list[CuspEdge]] = {}
    for e in edges:
        if e.slices[0] > 0 and alphas[e.slices[0] - 1] > 0:
            births.setdefault(e.slices[0], []).append(e)
        if e.slices[-1] < last:
            deaths.setdefault(e.slices[-1], []).append(e)
    out = []
    for group, end, other in ((births, 0, -1), (deaths, -1, 1)):
        for j, members in group.items():
            a_mid = 0.5 * (alphas[j] + alphas[j + other])
            used: set[int] = set()
            for k, e in enumerate(members):
                if k in used:
                    continue
                best, best_d = None, np.inf
                for m, f in enumerate(members):
                    if m == k or m in used:
                        continue
                    d = _cyclic_dist(e.t[end], f.t[end])
                    if d < best_d:
                        best, best_d = m, d
                if best is None:
                    continue
                f = members[best]
                h1 = _h_at(jets, e.t[end], e.alpha[end])
                h2 = _h_at(jets, f.t[end], f.alpha[end])
                if np.sign(h1) == np.sign(h2):
                    continue
                used.update((k, best))
                t1, t2 = e.t[end], f.t[end]
                if abs(t1 - t2) > np.pi:
                    t2 += TWO_PI if t2 < t1 else -TWO_PI
                out.append((0.5 * (t1 + t2) % TWO_PI, float(a_mid)))
    for e in edges:
        hs = [_h_at(jets, t, a) for t, a in zip(e.t, e.alpha)]
        for k in range(len(hs) - 1):
            if np.sign(hs[k]) != np.sign(hs[k + 1]):
                out.append((e.t[k], 0.5 * (e.alpha[k] + e.alpha[k + 1])))
    return out


def swallowtail_points(jets: AffineJetTable, alpha_grid, edges: list[CuspEdge] | None = None,
                       tol_class: float = TOL_CLASS) -> list[SingularityRecord]:
    """A3 points: births and deaths of cusp pairs, refined by Newton on g = h = 0.

    Unconverged refinements are returned with ``resolved=False`` at the guess.
    """
    alphas = np.asarray(alpha_grid, dtype=float)
    if edges is None:
        edges = trace_cuspidal_edges(jets, alphas)
    lo, hi = float(alphas.min()), float(alphas.max())
    records: list[SingularityRecord] = []
    for t0, a0 in _candidates(jets, edges, alphas):
        t, a, ok = newton_gh(jets, t0, a0)
        if ok and not (lo <= a <= hi and 0 < a <= 1):
            log.info("swallowtail refinement left the alpha range (%.6g); dropped", a)
            continue
        if not ok:
            log.warning("swallowtail Newton did not converge near t=%.6g alpha=%.6g", t0, a0)
            t, a = t0, a0
        if any(_cyclic_dist(r.t0, t) < 1e-6 and abs(r.alpha0 - a) < 1e-6 for r in records):
            continue
        p = jets.at(t)
        _, _, q_sc = _scales(jets, a)
        q = q_value(a, p.mu, p.mu_sss)
        kind = Kind.A3
        if ok and abs(q) <= tol_class * q_sc:
            kind = Kind.DEGENERATE
        if ok and 0 < a < 1:
            detjbar = jbar_determinant(jets, None, a, t=t)
            if abs(detjbar) < 1e-12:
                raise NumericalError(
                    f"det Jbar vanishes at alpha={a:.6g}: mu = -3(1-alpha)^2/alpha^2, "
                    "impossible for a closed non-inflexional curve")
        records.append(_record(jets, t, a, kind, resolved=ok))
    records.sort(key=lambda r: (r.alpha0, r.s0))
    return records


# --- the mesh -----------------------------------------------------------------------


@dataclass
class DiscriminantMesh:
    """Structured (n_s x n_alpha) grid of evolutoid points with alpha as z.

    ``vertices[i, j]`` is the evolutoid point at node i for ``alphas[j]``;
    row ``vertices[:, j]`` is therefore the level set alpha = alphas[j].
    """

    alphas: np.ndarray = field(repr=False)
    vertices: np.ndarray = field(repr=False)
    cuspidal_edges: list[CuspEdge] = field(repr=False)
    swallowtails: list[SingularityRecord]

    @property
    def shape(self) -> tuple[int, int]:
        return self.vertices.shape[:2]

    @property
    def flat_vertices(self) -> np.ndarray:
        return self.vertices.reshape(-1, 3)

    @property
    def triangles(self) -> np.ndarray:
        n_s, n_a = self.shape
        i = np.arange(n_s)[:, None]
        j = np.arange(n_a - 1)[None, :]
        v00 = i * n_a + j
        v10 = ((i + 1) % n_s) * n_a + j
        v01, v11 = v00 + 1, v10 + 1
        tri = np.stack([np.stack([v00, v10, v11], -1), np.stack([v00, v11, v01], -1)], axis=2)
        return tri.reshape(-1, 3)


def build_discriminant_mesh(jets: AffineJetTable, alpha_min: float, alpha_max: float,
                            n_alpha: int) -> DiscriminantMesh:
    check_alpha(alpha_min)
    check_alpha(alpha_max)
    if not alpha_max > alpha_min:
        raise ValueError(f"degenerate alpha range [{alpha_min}, {alpha_max}]")
    if n_alpha < 2:
        raise ValueError("n_alpha must be at least 2")
    alphas = np.linspace(alpha_min, alpha_max, n_alpha)
    levels = parallel_map(lambda a: evolutoid_curve(jets, a).X, alphas)
    vertices = np.empty((jets.n, n_alpha, 3))
    for j, (a, X) in enumerate(zip(alphas, levels)):
        vertices[:, j, :2] = X
        vertices[:, j, 2] = a
    edges = trace_cuspidal_edges(jets, alphas)
    swallowtails = swallowtail_points(jets, alphas, edges)
    return DiscriminantMesh(alphas, vertices, edges, swallowtails)
