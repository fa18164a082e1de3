import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kempfness.errors import ConnectFailure, DegenerateFiltration, SpectrumMismatch
from kempfness.matcore import GroupElement, dagger, frob, mat_exp
from kempfness.symspace import (
    BoundaryPoint,
    LieAlgebra,
    _mp_log_ray,
    boundary_action,
    boundary_action_limit,
    boundary_action_oracle,
    connect_geodesic,
    distance,
    distance_pd,
    filtration_test,
    geodesically_connected,
    opposed,
    parabolic_contains,
    rational_rank,
    torus_dim,
)

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(2, 4)


def spectrum(s):
    return np.linalg.eigvalsh(1j * s)


# Lie algebras -------------------------------------------------------------


@pytest.mark.parametrize("alg,dim", [(LieAlgebra.u(3), 9), (LieAlgebra.su(2), 3),
                                     (LieAlgebra.su(3), 8), (LieAlgebra.torus(2), 2)])
def test_basis_is_orthonormal(alg, dim):
    assert alg.dim == dim
    G = np.array([[np.real(np.trace(a @ dagger(b))) for b in alg.basis] for a in alg.basis])
    assert np.allclose(G, np.eye(dim), atol=1e-14)


@given(seeds)
def test_coords_round_trip(seed):
    rng = np.random.default_rng(seed)
    alg = LieAlgebra.su(3)
    u = alg.random_element(rng)
    assert alg.contains(u)
    assert frob(alg.element(alg.coords(u)) - u) <= 1e-12
    assert not alg.contains(1j * np.eye(3))


def test_same_orbit_by_spectrum(rng):
    alg = LieAlgebra.u(3)
    u = alg.random_element(rng)
    k = alg.haar(rng)
    assert alg.same_orbit(u, k @ u @ dagger(k))
    assert not alg.same_orbit(u, 2 * u)


# distance -----------------------------------------------------------------


@given(seeds, dims)
def test_distance_matches_generalized_eigenvalue_form(seed, n):
    rng = np.random.default_rng(seed)
    alg = LieAlgebra.u(n)
    g, h = alg.random_group(rng), alg.random_group(rng)
    assert distance(g, h) == pytest.approx(distance_pd(g, h), rel=1e-9, abs=1e-12)


def test_distance_along_geodesic(rng):
    s = LieAlgebra.u(3).random_unit(rng)
    assert distance(GroupElement.identity(3), GroupElement.exp_i(s, 2.5)) == pytest.approx(2.5)
    k = GroupElement(LieAlgebra.u(3).haar(rng))
    assert distance(GroupElement.identity(3), k) == pytest.approx(0, abs=1e-12)


# boundary action ----------------------------------------------------------


def test_boundary_action_of_unitary_is_conjugation(rng):
    alg = LieAlgebra.u(3)
    s, k = alg.random_unit(rng), alg.haar(rng)
    assert frob(boundary_action(s, k) - dagger(k) @ s @ k) <= 1e-10


def test_boundary_action_of_parabolic_element_fixes_s(rng):
    s = -1j * np.diag([-1.0, 0.0, 2.0])
    g = np.triu(rng.standard_normal((3, 3))) + 3 * np.eye(3)
    assert parabolic_contains(s, g)
    assert frob(boundary_action(s, g) - s) <= 1e-10


@given(seeds, dims)
def test_spectrum_preserved_and_right_action(seed, n):
    rng = np.random.default_rng(seed)
    alg = LieAlgebra.u(n)
    s = alg.random_unit(rng)
    g, h = alg.random_group(rng), alg.random_group(rng)
    sg = boundary_action(s, g)
    assert np.max(np.abs(spectrum(sg) - spectrum(s))) <= 1e-8
    assert frob(boundary_action(sg, h) - boundary_action(s, g @ h)) <= 1e-6


def test_degenerate_filtration_reported(rng):
    # a rank cut above every singular value makes each intersection the whole space
    from kempfness.config import DEFAULT

    alg = LieAlgebra.u(3)
    s, g = alg.random_unit(rng), alg.random_group(rng)
    with pytest.raises(DegenerateFiltration):
        boundary_action(s, g, DEFAULT.updated(rank_rel=1.5))


def test_double_precision_limit_agrees_at_moderate_tau(rng):
    alg = LieAlgebra.u(2)
    s, g = alg.random_unit(rng), alg.random_group(rng)
    exact = boundary_action(s, g)
    errs = [frob(boundary_action_limit(s, g, tau) - exact) for tau in (1.0, 2.0, 4.0)]
    assert errs[0] > errs[1] > errs[2]


def test_unitary_k_limit_at_tau_50_in_extended_precision(rng):
    # for g = k in K the finite-tau value already equals k* s k up to O(1/tau)
    alg = LieAlgebra.u(3)
    s, k = alg.random_unit(rng), alg.haar(rng)
    approx = _mp_log_ray(s, k, 50.0, dps=80)
    assert frob(approx - dagger(k) @ s @ k) <= 0.1


@pytest.mark.parametrize("n", [2, 3])
def test_matches_extrapolated_oracle(n):
    rng = np.random.default_rng(100 + n)
    alg = LieAlgebra.u(n)
    for _ in range(3):
        s, g = alg.random_unit(rng), alg.random_group(rng)
        assert frob(boundary_action(s, g) - boundary_action_oracle(s, g)) <= 1e-3


def test_boundary_point_requires_unit_norm():
    with pytest.raises(ValueError):
        BoundaryPoint(np.diag([2j, 0]))
    b = BoundaryPoint.normalized(np.diag([2j, 0]))
    assert frob(b.s) == pytest.approx(1.0)


# parabolics and opposedness -----------------------------------------------


def test_parabolic_block_triangular():
    s = -1j * np.diag([0.0, 1.0])
    assert parabolic_contains(s, np.array([[1, 5], [0, 1]]))
    assert not parabolic_contains(s, np.array([[1, 0], [5, 1]]))
    assert parabolic_contains(s, mat_exp(1j * s))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_u_and_minus_u_are_opposed(n, rng):
    alg = LieAlgebra.u(n)
    for _ in range(5):
        u = alg.random_element(rng)
        ok, cert = opposed(u, -u, True, alg)
        assert ok
        assert cert.total == n * n and cert.rank == n * n


def test_opposedness_needs_matching_orbit(rng):
    alg = LieAlgebra.u(3)
    u = alg.random_element(rng)
    assert not opposed(u, u, True, alg)[0]
    assert not opposed(u, -2 * u, True, alg)[0]


def test_aligned_flags_are_not_opposed():
    # v = -u conjugated by a permutation that keeps the top eigenline fixed
    u = -1j * np.diag([0.0, 1.0, 2.0])
    v = 1j * np.diag([1.0, 0.0, 2.0])
    assert not filtration_test(u, v)[0]


@given(seeds, dims)
def test_opposedness_is_symmetric(seed, n):
    rng = np.random.default_rng(seed)
    alg = LieAlgebra.u(n)
    u = alg.random_element(rng)
    k = alg.haar(rng)
    v = -(k @ u @ dagger(k))
    assert opposed(u, v, True, alg)[0] == opposed(v, u, True, alg)[0]


def test_generic_conjugates_are_opposed():
    rng = np.random.default_rng(7)
    alg = LieAlgebra.u(3)
    passed = 0
    for _ in range(200):
        u = alg.random_element(rng)
        k = alg.haar(rng)
        passed += opposed(u, -(k @ u @ dagger(k)), True, alg)[0]
    assert passed >= 190


def test_defining_and_adjoint_tests_agree_on_regular_elements(rng):
    alg = LieAlgebra.u(3)
    u = alg.random_element(rng)
    k = alg.haar(rng)
    v = -(k @ u @ dagger(k))
    assert opposed(u, v, True, alg)[0] == opposed(u, v, False)[0]


# geodesic connection ------------------------------------------------------


@pytest.mark.parametrize("alg", [LieAlgebra.su(2), LieAlgebra.u(3)], ids=["su2", "u3"])
def test_connect_geodesic_contract(alg, rng):
    for _ in range(5):
        u = alg.random_unit(rng)
        k = alg.haar(rng)
        v = -(k @ u @ dagger(k))
        h = connect_geodesic(u, v, alg)
        assert parabolic_contains(u, h, 1e-8)
        assert frob(boundary_action(v, h) + u) <= 1e-8
        if alg.kind == "su":
            assert abs(np.linalg.det(h.matrix) - 1) <= 1e-10


def test_connect_minus_u_gives_identity(rng):
    alg = LieAlgebra.u(3)
    u = alg.random_unit(rng)
    h = connect_geodesic(u, -u, alg)
    assert frob(h.matrix - np.eye(3)) <= 1e-10


def test_connect_refuses_unconnected_points():
    u = -1j * np.diag([0.0, 1.0])
    assert not geodesically_connected(u, u)
    with pytest.raises(ConnectFailure):
        connect_geodesic(u, u)


# tori ---------------------------------------------------------------------


def test_rational_rank():
    assert rational_rank([1, 2, 3]) == 1
    assert rational_rank([[1, 0], [0, 1], [1, 1]]) == 2
    assert rational_rank([0]) == 0


def test_torus_dimension_examples():
    assert torus_dim(-1j * np.diag([1.0, 2.0]), [1, 1]) == 1
    assert torus_dim(-1j * np.diag([0.5, 1 / 3]), [3, 2]) == 1
    assert torus_dim(-1j * np.diag([0.0, 1.0]), [1, 1]) == 1
    with pytest.raises(SpectrumMismatch):
        torus_dim(-1j * np.diag([1.0, np.sqrt(2)]), [1, 1])
    with pytest.raises(SpectrumMismatch):
        torus_dim(-1j * np.diag([1.0, 2.0]), [1])
