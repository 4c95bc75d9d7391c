import numpy as np
import pytest
from numpy.polynomial import Polynomial as P

import frozen_values as fv
from affevo.affine import (
    MongeJet,
    affine_arclength,
    affine_curvature,
    affine_curvature_pointwise,
    affine_jets,
    affine_normal,
    affine_normal_pointwise,
    affine_speed,
    monge_affine_curvature,
    mu_derivatives,
)
from affevo.curves import Ellipse, SampledClosed, bracket, figure_eight, sample_curve, sigma_curve
from affevo.errors import InflexionError

ELLIPSES = [(2, 3), (1, 1), (0.7, 4.2), (5, 0.3)]


@pytest.mark.parametrize("a,b", ELLIPSES)
def test_ellipse_speed_and_length(a, b):
    c = sample_curve(Ellipse(a, b), 256)
    np.testing.assert_allclose(affine_speed(c), a * b, rtol=1e-14)
    s, L = affine_arclength(c)
    assert L == pytest.approx(2 * np.pi * np.cbrt(a * b), rel=1e-14)
    np.testing.assert_allclose(s, np.cbrt(a * b) * c.t, atol=1e-13)


def test_ellipse23_length_value():
    _, L = affine_arclength(sample_curve(Ellipse(2, 3), 256))
    assert L == pytest.approx(2 * np.pi * 6 ** (1 / 3), rel=1e-14)
    # the commonly quoted 11.4174 is 11.41731 rounded up
    assert L == pytest.approx(11.4174, abs=1e-4)


def test_circle_length_is_two_pi():
    _, L = affine_arclength(sample_curve(Ellipse(1, 1), 64))
    assert L == pytest.approx(2 * np.pi, rel=1e-15)


def test_sigma_kappa_at_zero():
    c = sample_curve(sigma_curve(1.9), 512)
    assert affine_speed(c)[0] == pytest.approx(fv.SIGMA_KAPPA[0], rel=1e-13)


def test_arclength_monotone_from_zero(sigma_jets):
    assert sigma_jets.s[0] == 0.0
    assert np.all(np.diff(sigma_jets.s) > 0)
    assert sigma_jets.s[-1] < sigma_jets.length


@pytest.mark.parametrize("a,b", ELLIPSES)
def test_ellipse_normal_points_to_center(a, b):
    c = sample_curve(Ellipse(a, b), 128)
    np.testing.assert_allclose(affine_normal(c), -(a * b) ** (-2 / 3) * c.d[0], atol=1e-13)


def test_ellipse23_normal_at_zero():
    xi = affine_normal(sample_curve(Ellipse(2, 3), 256))[0]
    np.testing.assert_allclose(xi, [-2 * 6 ** (-2 / 3), 0], atol=1e-15)
    assert xi[0] == pytest.approx(-0.605707, abs=5e-7)


def test_parabola_jet_normal():
    d1, d2, d3, _ = MongeJet(1, 0, 0).derivatives_at_origin()
    np.testing.assert_allclose(affine_normal_pointwise(d1, d2, d3), [0, 1])


def test_normal_formula_equals_chain_rule(sigma_jets):
    xi = affine_normal(sample_curve(sigma_curve(1.9), 1024))
    assert np.abs(xi - sigma_jets.gamma_ss).max() <= 1e-8


@pytest.mark.parametrize("a,b", ELLIPSES)
def test_conic_curvature_constant(a, b):
    jets = affine_jets(sample_curve(Ellipse(a, b), 1024))
    np.testing.assert_allclose(jets.mu, (a * b) ** (-2 / 3), rtol=1e-12)
    for name in ("mu_s", "mu_ss", "mu_sss"):
        assert np.abs(getattr(jets, name)).max() <= 1e-8


def test_ellipse23_and_circle_curvature():
    assert affine_curvature(sample_curve(Ellipse(2, 3), 256))[0] == pytest.approx(0.3028534, abs=1e-7)
    np.testing.assert_allclose(affine_curvature(sample_curve(Ellipse(1, 1), 64)), 1.0, rtol=1e-13)


def test_sigma_against_symbolic_oracle(sigma_jets):
    for k, t in enumerate(fv.SIGMA_T):
        kappa, mu, mu_s, mu_ss, mu_sss = sigma_jets.scalars_at(t)
        assert kappa == pytest.approx(fv.SIGMA_KAPPA[k], rel=1e-11)
        assert mu == pytest.approx(fv.SIGMA_MU[k], rel=1e-10)
        assert mu_s == pytest.approx(fv.SIGMA_MU_S[k], abs=1e-8 * (1 + abs(fv.SIGMA_MU_S[k])))
        assert mu_ss == pytest.approx(fv.SIGMA_MU_SS[k], abs=1e-7 * (1 + abs(fv.SIGMA_MU_SS[k])))
        assert mu_sss == pytest.approx(fv.SIGMA_MU_SSS[k], abs=1e-6 * (1 + abs(fv.SIGMA_MU_SSS[k])))


def test_sigma_mu_s_has_six_zeros(sigma_jets):
    sgn = np.sign(sigma_jets.mu_s)
    changes = np.flatnonzero(sgn != np.roll(sgn, -1))
    assert changes.size == 6
    # each bracket contains one of the symbolically located vertices
    t = sigma_jets.t
    for i, t_exact in zip(changes, fv.SIGMA_VERTEX_T):
        assert t[i] <= t_exact <= t[i] + 2 * np.pi / sigma_jets.n


def test_curvature_equals_bracket_of_frame(sigma_jets):
    mu_alt = bracket(sigma_jets.gamma_ss, sigma_jets.gamma_sss)
    assert np.abs(mu_alt - sigma_jets.mu).max() <= 1e-7


def test_mu_derivatives_recomputed(sigma_jets):
    for a, b in zip(mu_derivatives(sigma_jets), (sigma_jets.mu_s, sigma_jets.mu_ss, sigma_jets.mu_sss)):
        np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("jet,expected", [((1, 0, 0), 0.0), ((1, 0, 3), 1.0), ((1, 1, 0), -5 / 9)])
def test_monge_examples(jet, expected):
    assert monge_affine_curvature(MongeJet(*jet)) == pytest.approx(expected, abs=1e-15)


def test_monge_rejects_zero_a2():
    with pytest.raises(ValueError):
        MongeJet(0, 1, 1)


def _reparametrized_jet(a2, a3, a4, c1, c2):
    """Derivatives at u=0 of x = u + c1 u^2 + c2 u^3, y = Monge graph over x."""
    x = P([0, 1, c1, c2])
    y = a2 * x**2 / 2 + a3 * x**3 / 6 + a4 * x**4 / 24
    return [np.array([x.deriv(k)(0.0), y.deriv(k)(0.0)]) for k in range(1, 5)]


def test_monge_formula_is_parameter_free(rng):
    for _ in range(20):
        a2 = rng.choice([-1, 1]) * rng.uniform(0.5, 3)
        a3, a4 = rng.normal(size=2)
        mu0 = monge_affine_curvature(MongeJet(a2, a3, a4))
        c1, c2 = rng.normal(size=2)
        d = _reparametrized_jet(a2, a3, a4, c1, c2)
        if a2 < 0:  # kappa < 0: traverse backwards, which flips odd derivatives
            d = [(-1) ** (k + 1) * v for k, v in enumerate(d)]
        assert affine_curvature_pointwise(*d) == pytest.approx(mu0, rel=1e-10, abs=1e-12)


def test_jets_reject_figure_eight():
    with pytest.raises(InflexionError):
        affine_jets(sample_curve(figure_eight(), 256))


def test_clockwise_input_gives_same_invariants():
    ccw = affine_jets(sample_curve(sigma_curve(1.9), 512))
    pts = sample_curve(sigma_curve(1.9), 512).d[0][(-np.arange(512)) % 512]
    cw = affine_jets(sample_curve(SampledClosed(pts), 512))
    assert cw.flipped and not ccw.flipped
    np.testing.assert_allclose(cw.mu, ccw.mu, atol=1e-9)
    assert cw.length == pytest.approx(ccw.length, rel=1e-12)


def test_point_at_and_t_of_s(sigma_jets):
    p = sigma_jets.point(17)
    q = sigma_jets.at(float(sigma_jets.t[17]))
    np.testing.assert_allclose(q.gamma_ss, p.gamma_ss, atol=1e-11)
    assert q.s == pytest.approx(p.s, abs=1e-12)
    assert sigma_jets.t_of_s(p.s) == pytest.approx(p.t, abs=1e-12)
    assert sigma_jets.point(17 + sigma_jets.n).t == p.t
