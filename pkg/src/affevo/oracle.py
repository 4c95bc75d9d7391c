"""Brute-force cross-checks kept apart from the main pipeline.

Nothing in the library imports this module; tests and the CLI ``--verify``
flag do.  Each check recomputes a quantity by an unrelated route:
envelopes by intersecting nearby lines, derivatives by finite differences,
singular sets by sign scans on dense (s, alpha) grids.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .affine import AffineJetTable
from .curves import bracket
from .spectral import resample


@dataclass(frozen=True)
class LineSample:
    """The line through ``base`` with direction ``dir``."""

    base: np.ndarray
    dir: np.ndarray
    s: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        if np.hypot(*self.dir) < 1e-12:
            raise ValueError("line direction vanishes")


class ParallelLinesError(ValueError):
    pass


def line_sample(jets: AffineJetTable, s: float, alpha: float) -> LineSample:
    p = jets.at(jets.t_of_s(s))
    return LineSample(p.gamma, (1 - alpha) * p.gamma_s + alpha * p.gamma_ss, s, alpha)


def intersect_consecutive_lines(l1: LineSample, l2: LineSample) -> np.ndarray:
    cross = bracket(l1.dir, l2.dir)
    if abs(cross) < 1e-14:
        raise ParallelLinesError(f"lines are parallel (cross = {cross:.3g})")
    a = bracket(l2.base - l1.base, l2.dir) / cross
    return l1.base + a * l1.dir


def envelope_by_intersection(jets: AffineJetTable, alpha: float, ds: float,
                             nodes=None) -> np.ndarray:
    """Intersections of L(s_i) and L(s_i + ds) for the given node indices."""
    nodes = range(jets.n) if nodes is None else nodes
    out = []
    for i in nodes:
        s = float(jets.s[i])
        l1 = LineSample(jets.gamma[i], (1 - alpha) * jets.gamma_s[i] + alpha * jets.gamma_ss[i],
                        s, alpha)
        out.append(intersect_consecutive_lines(l1, line_sample(jets, s + ds, alpha)))
    return np.array(out)


_STENCILS = {
    1: ({-2: 1, -1: -8, 1: 8, 2: -1}, 12.0),
    2: ({-2: -1, -1: 16, 0: -30, 1: 16, 2: -1}, 12.0),
    3: ({-3: 1, -2: -8, -1: 13, 1: -13, 2: 8, 3: -1}, 8.0),
}


def fd_derivative(samples, order: int, step: float) -> np.ndarray:
    """Fourth-order central differences of periodic samples along axis 0."""
    if order not in _STENCILS:
        raise ValueError(f"order must be 1, 2 or 3, got {order}")
    samples = np.asarray(samples, dtype=float)
    weights, denom = _STENCILS[order]
    width = 2 * max(weights) + 1
    if samples.shape[0] < width:
        raise ValueError(f"need at least {width} samples for order {order}")
    acc = np.zeros_like(samples)
    for shift, w in weights.items():
        acc += w * np.roll(samples, -shift, axis=0)
    return acc / (denom * step**order)


# --- dense scans ---------------------------------------------------------------------


def _on_grid(values: np.ndarray, n_s: int) -> np.ndarray:
    n = values.shape[0]
    if n_s == n:
        return values
    if n_s > n and n_s % n == 0:
        return resample(values, n_s)
    if n % n_s == 0:
        return values[:: n // n_s]
    raise ValueError(f"n_s={n_s} incompatible with table size {n}")


def _g_grid(jets: AffineJetTable, n_s: int, alphas: np.ndarray):
    mu = _on_grid(jets.mu, n_s)[None, :]
    mu_s = _on_grid(jets.mu_s, n_s)[None, :]
    mu_ss = _on_grid(jets.mu_ss, n_s)[None, :]
    a = alphas[:, None]
    D = (1 - a) ** 2 + mu * a**2
    return a**3 * mu_s - (1 - a) * D, a * mu_ss - (1 - a) * mu_s


def _periodic_label(mask: np.ndarray) -> tuple[np.ndarray, int]:
    """8-connected components with the s-axis (axis 1) wrapping around."""
    labels, count = ndimage.label(mask, structure=np.ones((3, 3), dtype=int))
    parent = list(range(count + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    rows = mask.shape[0]
    for r in range(rows):
        for dr in (-1, 0, 1):
            rr = r + dr
            if not 0 <= rr < rows:
                continue
            a, b = labels[r, -1], labels[rr, 0]
            if a and b:
                parent[find(a)] = find(b)
    roots = sorted({find(x) for x in range(1, count + 1)})
    remap = np.zeros(count + 1, dtype=int)
    for x in range(1, count + 1):
        remap[x] = roots.index(find(x)) + 1
    return remap[labels], len(roots)


@dataclass
class GScan:
    alphas: np.ndarray = field(repr=False)
    sign_change: np.ndarray = field(repr=False)  # [j, i]: g flips between node i and i+1
    births: list[float]                           # lowest alpha of each {g > 0} component

    @property
    def components(self) -> int:
        return len(self.births)

    def birth_bracket(self, alpha: float) -> tuple[float, float]:
        """The alpha-cell (alpha_{j-1}, alpha_j] containing ``alpha``."""
        j = int(np.searchsorted(self.alphas, alpha))
        return float(self.alphas[max(j - 1, 0)]), float(self.alphas[min(j, len(self.alphas) - 1)])


def dense_scan_g(jets: AffineJetTable, n_s: int, n_alpha: int, alpha_min: float = 0.0,
                 alpha_max: float = 1.0) -> GScan:
    """Sign-change map of g over an (alpha, s) grid.

    Components are the connected regions where g > 0 (periodic in s); each
    appears at its lowest alpha row, bounded by a pair of cuspidal edges.
    Values within round-off of zero count as neither sign, so a conic's
    identically vanishing alpha = 1 row contributes nothing.
    """
    if n_s < 256 or n_alpha < 256:
        raise ValueError("dense scans need at least 256 cells per axis")
    alphas = np.linspace(alpha_min, alpha_max, n_alpha)
    G, _ = _g_grid(jets, n_s, alphas)
    scale = 1.0 + np.abs(G).max()
    sgn = np.where(np.abs(G) <= 1e-12 * scale, 0.0, np.sign(G))
    flips = (sgn * np.roll(sgn, -1, axis=1)) < 0
    labels, count = _periodic_label(sgn > 0)
    births = []
    for k in range(1, count + 1):
        rows = np.flatnonzero((labels == k).any(axis=1))
        births.append(float(alphas[rows.min()]))
    return GScan(alphas, flips, sorted(births))


def dense_scan_gh(jets: AffineJetTable, n_s: int, n_alpha: int, alpha_min: float = 0.0,
                  alpha_max: float = 1.0) -> list[tuple[float, float]]:
    """Approximate (t, alpha) solutions of g = h = 0 from a cell-wise sign test.

    A cell is flagged when both g and h take both signs at its corners;
    adjacent flagged cells are merged and reported by their centroid.
    """
    alphas = np.linspace(alpha_min, alpha_max, n_alpha)
    G, H = _g_grid(jets, n_s, alphas)

    def straddles(V):
        corners = np.stack([V[:-1], np.roll(V, -1, 1)[:-1], V[1:], np.roll(V, -1, 1)[1:]])
        return (corners.min(axis=0) < 0) & (corners.max(axis=0) > 0)

    mask = straddles(G) & straddles(H)
    labels, count = _periodic_label(mask)
    dt = 2 * np.pi / n_s
    out = []
    for k in range(1, count + 1):
        rows, cols = np.nonzero(labels == k)
        ang = (cols + 0.5) * dt
        t = float(np.angle(np.exp(1j * ang).mean()) % (2 * np.pi))
        a = float(alphas[rows].mean() + 0.5 * (alphas[1] - alphas[0]))
        out.append((t, a))
    return sorted(out, key=lambda p: p[1])


def sign_change_count(jets: AffineJetTable, alpha: float, n_s: int = 4096) -> int:
    """Number of sign changes of g(., alpha) around a dense resampled grid.

    Zeros within round-off are skipped rather than counted; an identically
    vanishing row therefore reports 0.
    """
    G, _ = _g_grid(jets, n_s, np.array([float(alpha)]))
    row = G[0]
    row = row[np.abs(row) > 1e-12 * (1.0 + np.abs(row).max())]
    if row.size < 2:
        return 0
    return int(np.count_nonzero(np.sign(row) != np.sign(np.roll(row, -1))))


def count_change_across(jets: AffineJetTable, alpha: float, delta: float = 1e-3,
                        n_s: int = 4096) -> int:
    """|#cusps(alpha + delta) - #cusps(alpha - delta)| from dense sign counts."""
    lo = max(alpha - delta, 0.0)
    hi = min(alpha + delta, 1.0)
    return abs(sign_change_count(jets, hi, n_s) - sign_change_count(jets, lo, n_s))
