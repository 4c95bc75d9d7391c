import numpy as np
import pytest

import frozen_values as fv
from affevo.discriminant import (
    CuspEdge,
    build_discriminant_mesh,
    cusp_line_verticality_check,
    family_value,
    jbar_determinant,
    swallowtail_points,
    trace_cuspidal_edges,
    versality_diagnostics,
)
from affevo.evolutoid import (
    Kind,
    denominator,
    evolutoid_point,
    g_at,
    singular_points,
)
from affevo.oracle import dense_scan_gh, fd_derivative


@pytest.fixture(scope="module")
def sigma_mesh(sigma_jets):
    return build_discriminant_mesh(sigma_jets, 0.0, 1.0, 101)


@pytest.fixture(scope="module")
def ellipse_mesh(ellipse23_jets):
    return build_discriminant_mesh(ellipse23_jets, 0.0, 1.0, 51)


# --- the family F ----------------------------------------------------------------


def test_point_on_line_gives_zero(sigma_jets):
    p = sigma_jets.point(100)
    v = 0.7 * p.gamma_s + 0.3 * p.gamma_ss
    F, *_ = family_value(sigma_jets, 100, p.gamma + 2.5 * v, 0.3)
    assert abs(F) < 1e-13


def test_envelope_point_solves_f_and_fs(sigma_jets):
    for i in range(0, sigma_jets.n, 64):
        for a in (0.2, 0.6, 1.0):
            X = evolutoid_point(sigma_jets, i, a).X
            F, F_s, _, _ = family_value(sigma_jets, i, X, a)
            assert abs(F) <= 1e-9 and abs(F_s) <= 1e-9


def test_family_derivatives_match_finite_differences(sigma_jets):
    X, a = np.array([0.3, -0.2]), 0.6
    F = np.array([family_value(sigma_jets, i, X, a) for i in range(sigma_jets.n)])
    s_t = np.cbrt(sigma_jets.kappa)
    dt = 2 * np.pi / sigma_jets.n
    for k in range(3):
        num = fd_derivative(F[:, k], 1, dt) / s_t
        assert np.abs(num - F[:, k + 1]).max() <= 1e-6 * (1 + np.abs(F[:, k + 1]).max())


def test_fss_vanishes_at_singular_points(sigma_jets):
    for a in (0.9, 1.0):
        for r in singular_points(sigma_jets, a):
            _, F_s, F_ss, F_sss = family_value(sigma_jets, None, r.X0, a, t=r.t0)
            assert abs(F_s) <= 1e-9
            assert abs(F_ss) <= 1e-7
            assert abs(F_sss) > 1e-3


# --- versality ------------------------------------------------------------------


def test_det_j1_ellipse_example(ellipse23_jets):
    d = versality_diagnostics(ellipse23_jets, 0, 0.75)
    assert d.detJ1 == pytest.approx(0.2328550, abs=1e-7)
    assert d.detJ1 == pytest.approx(fv.ELLIPSE23_D_075, rel=1e-12)


def test_det_j1_alpha_one_is_mu(sigma_jets):
    for i in (0, 333, 700):
        d = versality_diagnostics(sigma_jets, i, 1.0)
        assert d.detJ1 == pytest.approx(sigma_jets.mu[i], rel=1e-12)
        assert d.detJbar is None


def test_det_jbar_closed_form_at_singular_points(sigma_jets):
    for a in (0.5, 0.7, 0.9):
        for r in singular_points(sigma_jets, a):
            d = versality_diagnostics(sigma_jets, None, a, t=r.t0)
            assert a * d.detJbar == pytest.approx(d.alpha_detJbar_closed, rel=1e-6)


def test_cusp_tangent_is_kernel_of_first_rows(sigma_jets):
    for r in singular_points(sigma_jets, 0.9):
        d = versality_diagnostics(sigma_jets, None, 0.9, t=r.t0)
        D = denominator(0.9, sigma_jets.scalars_at(r.t0)[1])
        assert d.cusp_tangent[2] == pytest.approx(-D**2, rel=1e-14)
        np.testing.assert_allclose(d.kernel, d.cusp_tangent, rtol=1e-7, atol=1e-9)


def test_jbar_undefined_at_endpoints(sigma_jets):
    for a in (0.0, 1.0):
        with pytest.raises(ValueError):
            jbar_determinant(sigma_jets, 0, a)


# --- mesh -----------------------------------------------------------------------


def test_ellipse_mesh_is_smooth(ellipse_mesh):
    assert ellipse_mesh.cuspidal_edges == []
    assert ellipse_mesh.swallowtails == []
    top = ellipse_mesh.vertices[:, -1, :2]
    assert np.abs(top).max() <= 1e-8


def test_mesh_layout(sigma_mesh, sigma_jets):
    n_s, n_a = sigma_mesh.shape
    assert (n_s, n_a) == (sigma_jets.n, 101)
    assert np.all(np.diff(sigma_mesh.alphas) > 0)
    tri = sigma_mesh.triangles
    assert tri.shape == (2 * n_s * (n_a - 1), 3)
    assert tri.min() == 0 and tri.max() == n_s * n_a - 1
    for i, j in ((0, 0), (17, 40), (1023, 100)):
        np.testing.assert_array_equal(
            sigma_mesh.vertices[i, j, :2], evolutoid_point(sigma_jets, i, sigma_mesh.alphas[j]).X)
        np.testing.assert_array_equal(sigma_mesh.flat_vertices[i * n_a + j], sigma_mesh.vertices[i, j])


def test_sigma_edges(sigma_mesh, sigma_jets):
    edges = sigma_mesh.cuspidal_edges
    assert len(edges) == 6
    ends = sorted(e.t[-1] for e in edges)
    assert all(e.alpha[-1] == 1.0 for e in edges)
    np.testing.assert_allclose(ends, fv.SIGMA_VERTEX_T, atol=1e-8)
    for e in edges:
        for t, a in zip(e.t, e.alpha):
            assert abs(g_at(sigma_jets, t, a)) <= 1e-8


def test_edges_are_never_horizontal(sigma_mesh, sigma_jets):
    for e in sigma_mesh.cuspidal_edges:
        assert cusp_line_verticality_check(sigma_jets, e) > 1e-6
        mu_end = sigma_jets.scalars_at(e.t[-1])[1]
        D2 = denominator(e.alpha[-1], mu_end) ** 2
        assert D2 == pytest.approx(mu_end**2)
    assert cusp_line_verticality_check(sigma_jets, None) is None
    assert cusp_line_verticality_check(sigma_jets, CuspEdge()) is None


def test_degenerate_ranges_rejected(sigma_jets):
    with pytest.raises(ValueError):
        build_discriminant_mesh(sigma_jets, 0.0, 0.0, 10)
    with pytest.raises(ValueError):
        build_discriminant_mesh(sigma_jets, 0.5, 0.2, 10)
    with pytest.raises(ValueError):
        build_discriminant_mesh(sigma_jets, 0.0, 1.0, 1)
    with pytest.raises(ValueError):
        build_discriminant_mesh(sigma_jets, -0.2, 1.0, 10)


# --- swallowtails ---------------------------------------------------------------


def test_sigma_swallowtails(sigma_mesh, sigma_jets):
    tails = sigma_mesh.swallowtails
    assert len(tails) == 3
    for r, (t_exact, a_exact) in zip(tails, fv.SIGMA_SWALLOWTAILS):
        assert r.kind is Kind.A3 and r.resolved
        assert r.alpha0 == pytest.approx(a_exact, abs=1e-10)
        assert r.t0 == pytest.approx(t_exact, abs=1e-8)
        assert abs(r.g) <= 1e-8 and abs(r.h) <= 1e-6
    np.testing.assert_allclose([r.q for r in tails], fv.SIGMA_Q_AT_SWALLOWTAILS, rtol=1e-6)


def test_cusp_count_changes_by_two(sigma_mesh, sigma_jets):
    for r in sigma_mesh.swallowtails:
        below = len(singular_points(sigma_jets, r.alpha0 - 1e-3))
        above = len(singular_points(sigma_jets, r.alpha0 + 1e-3))
        assert abs(above - below) == 2


def test_conic_has_no_swallowtails(ellipse23_jets):
    assert swallowtail_points(ellipse23_jets, np.linspace(0, 1, 41)) == []


def test_perturbed_ellipse_against_dense_scan(perturbed_jets):
    alphas = np.linspace(0.0, 0.85, 171)
    tails = swallowtail_points(perturbed_jets, alphas)
    assert [r.kind for r in tails] == [Kind.A3] * 5
    for r, (t_exact, a_exact) in zip(tails, fv.PERTURBED_SWALLOWTAILS):
        assert r.alpha0 == pytest.approx(a_exact, abs=1e-9)
        assert r.t0 == pytest.approx(t_exact, abs=1e-7)
    scan = dense_scan_gh(perturbed_jets, 2048, 512, 0.0, 0.85)
    assert len(scan) == len(tails)
    d_alpha, d_t = 0.85 / 511, 2 * np.pi / 2048
    for r, (t_scan, a_scan) in zip(tails, scan):
        assert abs(r.alpha0 - a_scan) <= 2 * d_alpha
        assert abs(np.angle(np.exp(1j * (r.t0 - t_scan)))) <= 4 * d_t


def test_edges_can_be_traced_on_partial_range(sigma_jets):
    edges = trace_cuspidal_edges(sigma_jets, np.linspace(0.85, 1.0, 16))
    assert len(edges) == 6
    assert all(len(e) == 16 for e in edges)
