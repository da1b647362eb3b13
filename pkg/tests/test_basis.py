import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from oracles import spherical, spline
from wick_cutkosky.basis import (
    BasisSpec,
    KnotVector,
    OutsideValidityRegion,
    angular_knots,
    angular_matrix,
    asymptotic_exponents,
    boundary_exponents,
    bspline,
    bspline_matrix,
    chebyshev_points,
    gegenbauer,
    make_knots,
    radial_basis,
    radial_matrix,
    spherical_fn,
    spherical_norm,
)

FROZEN_KNOTS_NP4 = [-1.50660576, -0.67817864, -0.20891237, 0.0, 0.20891237, 0.67817864, 1.50660576, 5.03733949]


def test_spec_defaults_and_layout():
    spec = BasisSpec(n_p=5, n_theta=3, ell=1)
    assert spec.size == 15
    assert spec.k_max == 3
    assert list(spec.k_values) == [1, 2, 3]
    assert spec.index(1, 1) == 0
    assert spec.index(5, 1) == 4
    assert spec.index(1, 2) == 5
    assert spec.index(5, 3) == 14


@pytest.mark.parametrize(
    "kwargs", [dict(n_p=3), dict(n_theta=0), dict(c_prime=0.0), dict(a=-1.0), dict(script_n=2), dict(ell=-1)]
)
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        BasisSpec(**kwargs)


def test_chebyshev_points():
    x = chebyshev_points(4)
    assert np.all(np.diff(x) > 0)
    assert np.allclose(x, -x[::-1])
    assert np.allclose(special.eval_chebyt(4, x), 0, atol=1e-14)
    with pytest.raises(ValueError):
        chebyshev_points(0)


def test_momentum_knots_frozen():
    knots = make_knots(BasisSpec(n_p=4, n_theta=2))
    assert np.allclose(knots.t_p, FROZEN_KNOTS_NP4, atol=1e-8)
    assert knots.n_splines == 4


@pytest.mark.parametrize("n_p", [4, 5, 10, 20, 30])
def test_momentum_knot_structure(n_p):
    t = make_knots(BasisSpec(n_p=n_p)).t_p
    assert len(t) == n_p + 4
    assert t[3] == 0.0
    assert np.allclose(t[:3], -t[4:7][::-1])
    assert np.all(np.diff(t) > 0)


def test_angular_knots():
    tz = angular_knots(BasisSpec(n_theta=3))
    assert len(tz) == 3 + 4
    assert tz[0] == -1 and tz[-1] == 1
    assert np.all(np.diff(tz) > 0)


def test_knot_vector_validation():
    with pytest.raises(ValueError):
        KnotVector(np.array([0.0, 1.0, 1.0, 2.0, 3.0]))
    with pytest.raises(ValueError):
        KnotVector(np.array([0.0, 1.0, np.inf]))
    with pytest.raises(ValueError):
        KnotVector(np.arange(6.0), np.array([-1.0, 0.5]))
    kv = KnotVector(np.arange(8.0))
    with pytest.raises(ValueError):
        kv.t_p[0] = 5.0


@pytest.mark.parametrize("n_p", [4, 10, 20])
def test_splines_match_scipy(n_p):
    knots = make_knots(BasisSpec(n_p=n_p))
    t = knots.t_p
    p = np.linspace(t[0], t[-1], 997)[:-1]
    mat = bspline_matrix(p, t)
    for n in range(1, n_p + 1):
        ref = np.nan_to_num(spline(t, n)(p))
        assert np.allclose(mat[:, n - 1], ref, atol=1e-13)


def test_bspline_index_range():
    knots = make_knots(BasisSpec(n_p=5))
    with pytest.raises(IndexError):
        bspline(0, 0.5, knots)
    with pytest.raises(IndexError):
        bspline(6, 0.5, knots)
    assert isinstance(bspline(2, 0.5, knots), float)


def test_splines_vanish_outside_support():
    knots = make_knots(BasisSpec(n_p=10))
    t = knots.t_p
    for n in range(1, 11):
        outside = np.array([t[n - 1] - 0.1, t[n + 3], t[n + 3] + 1.0, t[-1], t[-1] + 2])
        assert np.all(bspline(n, outside, knots) == 0.0)


@settings(max_examples=60)
@given(st.integers(4, 30), st.floats(0.0, 1.0, exclude_max=True))
def test_partition_of_unity(n_p, frac):
    # full sum equals one on the interior span [t_3, t_{N+1}) where four splines overlap
    t = np.linspace(0.0, 1.0, n_p + 4) ** 1.7
    x = t[3] + frac * (t[n_p] - t[3])
    assert abs(bspline_matrix(x, t).sum() - 1.0) <= 1e-12


def test_partition_of_unity_on_momentum_knots():
    t = make_knots(BasisSpec(n_p=20)).t_p
    x = np.linspace(t[3], t[20], 5001, endpoint=False)
    assert np.max(np.abs(bspline_matrix(x, t).sum(axis=1) - 1.0)) <= 1e-12


def test_splines_c2_at_interior_knots():
    knots = make_knots(BasisSpec(n_p=8))
    t = knots.t_p
    h = 1e-6
    for n in range(1, 9):
        for knot in t[n : n + 3]:
            f = lambda x: bspline(n, x, knots)  # noqa: E731
            left = (f(knot - 2 * h) - 2 * f(knot - h) + f(knot)) / h**2
            right = (f(knot) - 2 * f(knot + h) + f(knot + 2 * h)) / h**2
            scale = max(1.0, abs(left))
            assert abs(left - right) <= 1e-2 * scale * (1 + 1 / (t[n + 3] - t[n - 1]) ** 2)
            assert abs(f(knot - h) - f(knot + h)) < 1e-5


def test_radial_basis_behaviour():
    spec = BasisSpec(n_p=10, ell=1)
    knots = make_knots(spec)
    p = np.array([0.0, 0.1, 1.0, 3.0])
    mat = radial_matrix(p, spec, knots)
    assert mat.shape == (4, 10)
    assert np.all(mat[0] == 0.0)  # p^l factor
    g = p**1 / (1 + p**7)
    for n in (1, 5, 10):
        assert np.allclose(radial_basis(n, p, spec, knots), g * bspline(n, p, knots))


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.0])
@pytest.mark.parametrize("k", [0, 1, 2, 5, 12])
def test_gegenbauer_matches_scipy(k, alpha):
    z = np.linspace(-1, 1, 41)
    assert np.allclose(gegenbauer(k, alpha, z), special.eval_gegenbauer(k, alpha, z), rtol=1e-12, atol=1e-12)


def test_gegenbauer_negative_degree():
    with pytest.raises(ValueError):
        gegenbauer(-1, 1.0, 0.0)


@pytest.mark.parametrize("ell", [0, 1, 2, 3])
def test_spherical_matches_chebyu_derivative(ell):
    z = np.linspace(-0.99, 0.99, 31)
    for k in range(ell, ell + 8):
        assert np.allclose(spherical_fn(k, ell, z), spherical(k, ell, z), rtol=1e-10, atol=1e-10)


def test_spherical_examples():
    assert spherical_fn(0, 0, 0.3) == 1.0
    assert spherical_fn(1, 0, 0.3) == pytest.approx(0.6)
    assert spherical_fn(1, 1, 0.6) == pytest.approx(2 * 0.8)
    with pytest.raises(ValueError):
        spherical_fn(1, 2, 0.0)


@pytest.mark.parametrize("ell", [0, 1, 2])
def test_spherical_orthogonality(ell):
    for k in range(ell, ell + 6):
        for kp in range(ell, ell + 6):
            val = integrate.quad(
                lambda z: spherical_fn(k, ell, z) * spherical_fn(kp, ell, z),
                -1,
                1,
                weight="alg",
                wvar=(0.5, 0.5),
            )[0]
            norm = spherical_norm(k, ell)
            if k == kp:
                assert abs(val - norm) <= 1e-8 * norm
            else:
                assert abs(val) <= 1e-8 * spherical_norm(max(k, kp), ell)


def test_spherical_norm_closed_form():
    assert spherical_norm(0, 0) == pytest.approx(math.pi / 2)
    assert spherical_norm(2, 1) == pytest.approx(math.pi * math.factorial(4) / (6 * 1))


def test_angular_matrix_shape():
    spec = BasisSpec(n_theta=4, ell=2)
    mat = angular_matrix(np.linspace(-1, 1, 9), spec)
    assert mat.shape == (9, 4)
    assert np.allclose(mat[:, 0], spherical_fn(2, 2, np.linspace(-1, 1, 9)))


def test_asymptotic_exponents_branches():
    ex = asymptotic_exponents(3, 0, 6, 0)
    assert (ex.small_branch, ex.i0, ex.large_branch, ex.i_inf) == ("IA", 0, "IIA", 2)
    ex = asymptotic_exponents(3, -2.5, 6, 0)
    assert ex.small_branch == "IB" and ex.i0 == pytest.approx(-0.5)
    ex = asymptotic_exponents(3, 0, 3, 0)
    assert ex.large_branch == "IIB" and ex.i_inf == 1
    with pytest.raises(OutsideValidityRegion):
        asymptotic_exponents(3, -5, 6, 0)
    with pytest.raises(OutsideValidityRegion):
        asymptotic_exponents(3, 0, 1, 0)


@pytest.mark.parametrize("k", [0, 1, 2, 5])
def test_boundary_exponents(k):
    ex = boundary_exponents(k)
    assert ex.g0 == k
    assert ex.g_inf == k + 6
    assert ex.i_inf == ex.g_inf - 4
