import sys

import numpy as np
import pytest

from affevo.affine import affine_jets
from affevo.curves import Ellipse, TrigPolynomial, check_no_inflexions, sample_curve, sigma_curve

N = 1024


def perturbed_ellipse() -> TrigPolynomial:
    """((2 + 0.05 cos 3t) cos t, 3 sin t), expanded into harmonics."""
    return TrigPolynomial(((1, 2.0, 0.0), (2, 0.025, 0.0), (4, 0.025, 0.0)), ((1, 0.0, 3.0),))


def random_trig_curve(rng: np.random.Generator, max_harmonic: int = 4) -> TrigPolynomial:
    """An ellipse with small higher harmonics, redrawn until it is inflexion-free."""
    while True:
        a, b = rng.uniform(0.5, 3.0, size=2)
        cx, cy = [(1, a, 0.0)], [(1, 0.0, b)]
        scale = 0.15 * min(a, b)
        for k in range(2, max_harmonic + 1):
            c = rng.normal(scale=scale / k**2, size=4)
            cx.append((k, c[0], c[1]))
            cy.append((k, c[2], c[3]))
        cx.append((0, *rng.normal(size=1), 0.0))
        spec = TrigPolynomial(tuple(cx), tuple(cy))
        curve = sample_curve(spec, 256)
        kappa = curve.d[1, :, 0] * curve.d[2, :, 1] - curve.d[1, :, 1] * curve.d[2, :, 0]
        if kappa.min() > 0.05 * a * b and check_no_inflexions(curve) > 1e-3:
            return spec


def random_unimodular(rng: np.random.Generator) -> np.ndarray:
    """det-1 matrix with moderate condition number."""
    while True:
        m = rng.normal(size=(2, 2))
        det = np.linalg.det(m)
        if abs(det) < 0.2:
            continue
        if det < 0:
            m[:, 0] *= -1
            det = -det
        m /= np.sqrt(det)
        if np.linalg.cond(m) < 10:
            return m


@pytest.fixture(scope="session")
def ellipse23_jets():
    return affine_jets(sample_curve(Ellipse(2.0, 3.0), N))


@pytest.fixture(scope="session")
def sigma_jets():
    return affine_jets(sample_curve(sigma_curve(1.9), N))


@pytest.fixture(scope="session")
def perturbed_jets():
    return affine_jets(sample_curve(perturbed_ellipse(), N))


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
