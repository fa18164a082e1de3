import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kempfness.errors import BoundViolated, ValidationError
from kempfness.matcore import GroupElement, dagger, frob
from kempfness.scenes import (
    FlatScene,
    ProjectiveScene,
    Representation,
    SphereTupleScene,
    check_growth_bounds,
    from_spinor,
    kabsch,
    make_scene,
    spinor,
    su2_to_so3,
    torus_scene,
)
from kempfness.symspace import LieAlgebra

seeds = st.integers(0, 2**32 - 1)


def scene_cases():
    return [
        ("projective-spin4", ProjectiveScene(Representation.spin(4))),
        ("projective-u3", ProjectiveScene(Representation.defining(LieAlgebra.u(3)))),
        ("projective-torus", torus_scene([[1, 0], [0, 1], [-1, -1]])),
        ("flat-spin3", FlatScene(Representation.spin(3))),
        ("flat-torus", torus_scene([[1], [-2]], flat=True)),
        ("sphere3", SphereTupleScene(3)),
    ]


CASES = scene_cases()
IDS = [c[0] for c in CASES]
SCENES = [c[1] for c in CASES]


def random_g(alg, rng):
    g = alg.random_group(rng).matrix
    if alg.kind == "su":
        g = g / np.linalg.det(g) ** (1.0 / alg.n)
    return GroupElement(g)


def close(scene, x, y):
    return scene.point_distance(x, y)


# representations ----------------------------------------------------------


@pytest.mark.parametrize("dim", [2, 3, 4, 5])
def test_spin_representations_are_valid(dim):
    rep = Representation.spin(dim)
    rep.validate()
    assert rep.N == dim


def test_spin2_is_the_defining_representation():
    rep = Representation.spin(2)
    alg = LieAlgebra.su(2)
    for b, A in zip(alg.basis, rep.images):
        assert frob(A - b) <= 1e-14


def test_non_skew_generator_is_named():
    alg = LieAlgebra.su(2)
    images = alg.basis.copy()
    images[1] = np.array([[0, 1], [1, 0]], dtype=complex)
    with pytest.raises(ValidationError, match="generator 1 is not skew-Hermitian"):
        Representation(alg, images).validate()


def test_bracket_violation_is_reported():
    alg = LieAlgebra.su(2)
    images = alg.basis.copy()
    images[2] = -images[2]
    with pytest.raises(ValidationError, match="bracket"):
        Representation(alg, images).validate()


def test_torus_weights_must_be_integers():
    with pytest.raises(ValidationError):
        Representation.torus([[0.5]])


def test_torus_generator_is_diagonal_weight_pairing():
    rep = Representation.torus([[1, 0], [2, -1]])
    s = -1j * np.diag([0.3, 0.7])
    assert np.allclose(rep.hermitian_generator(s), np.diag([0.3, 0.6 - 0.7]))


# geometry -----------------------------------------------------------------


@pytest.mark.parametrize("scene", SCENES, ids=IDS)
def test_gradient_identity(scene, rng):
    # d/dt mu_s(exp(i t s) x) = |xi_s(exp(i t s) x)|^2, checked by central differences
    for _ in range(3):
        x = scene.random_point(rng)
        s = scene.algebra.random_element(rng)
        t, h = 0.3, 1e-5
        f = [scene.mu_pair(scene.act(GroupElement.exp_i(s, t + d), x), s) for d in (-h, h)]
        deriv = (f[1] - f[0]) / (2 * h)
        y = scene.act(GroupElement.exp_i(s, t), x)
        assert deriv == pytest.approx(scene.inf_action(s, y).norm ** 2, rel=1e-6, abs=1e-8)


@pytest.mark.parametrize("scene", SCENES, ids=IDS)
def test_complex_structure_intertwines_i(scene, rng):
    x = scene.random_point(rng)
    s = scene.algebra.random_element(rng)
    a = scene.tangent(1j * s, x)
    b = scene.complex_structure(x, scene.tangent(s, x))
    assert np.max(np.abs(a - b)) <= 1e-10


@pytest.mark.parametrize("scene", SCENES, ids=IDS)
def test_tangent_matches_finite_difference(scene, rng):
    x = scene.random_point(rng)
    s = scene.algebra.random_element(rng)
    h = 1e-6
    fwd = scene.act(GroupElement.exp_i(s, h), x)
    bwd = scene.act(GroupElement.exp_i(s, -h), x)
    fd = (fwd - bwd) / (2 * h)
    v = scene.tangent(1j * s, x)
    if scene.kind == "projective":
        # compare up to the phase of the representative
        fd = fd - x * np.vdot(x, fd)
        v = v - x * np.vdot(x, v)
        fd, v = fd - 1j * x * np.imag(np.vdot(x, fd)), v - 1j * x * np.imag(np.vdot(x, v))
    assert np.max(np.abs(fd - v)) <= 1e-6


@pytest.mark.parametrize("scene", SCENES, ids=IDS)
def test_group_law(scene, rng):
    for _ in range(3):
        x = scene.random_point(rng)
        g, h = random_g(scene.algebra, rng), random_g(scene.algebra, rng)
        lhs = scene.act(g, scene.act(h, x))
        rhs = scene.act(g @ h, x)
        scale = 1 + (np.linalg.norm(lhs) if scene.kind == "flat" else 0)
        assert close(scene, lhs, rhs) <= 1e-8 * scale


@pytest.mark.parametrize("scene", SCENES, ids=IDS)
def test_moment_map_is_equivariant(scene, rng):
    x = scene.random_point(rng)
    k = scene.algebra.haar(rng)
    lhs = scene.moment(scene.act(GroupElement(k), x))
    rhs = scene.algebra.project(k @ scene.moment(x) @ dagger(k))
    assert frob(lhs - rhs) <= 1e-10


@pytest.mark.parametrize("scene", SCENES, ids=IDS)
def test_growth_bounds_hold(scene):
    report = check_growth_bounds(scene, samples=100, rng=np.random.default_rng(3))
    assert report.worst_action_ratio <= report.C
    assert report.worst_moment_ratio <= report.C


def test_growth_bound_violation_has_witness():
    scene = ProjectiveScene(Representation.spin(3))
    with pytest.raises(BoundViolated) as info:
        check_growth_bounds(scene, samples=20, C=1e-6)
    assert set(info.value.witness) >= {"x", "s", "xi", "mu", "d"}


def test_projective_distance_formula():
    P = ProjectiveScene(Representation.spin(2))
    e0, e1 = np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    assert P.point_distance(e0, 1j * e0) == pytest.approx(0, abs=1e-15)
    # orthogonal lines are at Fubini-Study angle pi/2, scaled by the metric normalisation
    assert P.point_distance(e0, e1) == pytest.approx(math.sqrt(2) * math.pi / 2)
    eps = 1e-9
    y = np.array([1, eps], dtype=complex)
    assert P.point_distance(e0, y) == pytest.approx(math.sqrt(2) * eps, rel=1e-6)


# maximal weights in closed form ---------------------------------------------


def test_projective_max_weight_is_top_eigenvalue_on_support():
    P = torus_scene([[1], [-1], [3]])
    s = -1j * np.eye(1)
    assert P.max_weight(np.array([1, 1, 0], dtype=complex), s) == pytest.approx(1.0)
    assert P.max_weight(np.array([0, 1, 1], dtype=complex), s) == pytest.approx(3.0)
    assert P.max_weight(np.array([0, 1, 0], dtype=complex), s) == pytest.approx(-1.0)


def test_flat_max_weight_is_zero_or_infinite():
    F = torus_scene([[1], [-1]], flat=True)
    s = -1j * np.eye(1)
    assert F.max_weight(np.array([1, 0], dtype=complex), s) == math.inf
    assert F.max_weight(np.array([0, 1], dtype=complex), s) == 0.0
    assert F.max_weight(np.zeros(2, dtype=complex), s) == 0.0


def test_sphere_max_weight_counts_antipodal_points():
    S = SphereTupleScene(4)
    up = np.array([0.0, 0.0, 1.0])
    x = np.array([up, up, -up, [1.0, 0.0, 0.0]])
    s = S.element(up)
    # one point at -up is counted against the three others
    assert S.max_weight(x, s) == pytest.approx((3 - 1) / 4)
    assert S.max_weight(x, -s) == pytest.approx((2 - 2) / 4)


def test_sphere_flow_direction():
    S = SphereTupleScene(1)
    c = np.array([0.0, 0.0, 1.0])
    x = np.array([[1.0, 0.0, 0.0]])
    y = S.act(GroupElement.exp_i(S.element(c), 5.0), x)
    assert y[0] @ c > 0.99


def test_projective_orbit_keeps_exact_eigenvector():
    # a point on one eigenline stays there however long the ray
    P = ProjectiveScene(Representation.spin(3))
    s = P.algebra.basis[2]
    A = P.rep.hermitian_generator(s)
    w, Q = np.linalg.eigh(A)
    x = Q[:, 0]
    y = P.act(GroupElement.exp_i(s, 60.0), x)
    assert abs(abs(np.vdot(x, y)) - 1) <= 1e-12


# sphere helpers -----------------------------------------------------------


@given(seeds)
def test_spinor_round_trip(seed):
    rng = np.random.default_rng(seed)
    p = rng.standard_normal(3)
    p /= np.linalg.norm(p)
    assert np.allclose(from_spinor(spinor(p)), p, atol=1e-12)


def test_so3_image_and_kabsch(rng):
    k = LieAlgebra.su(2).haar(rng)
    R = su2_to_so3(k)
    assert np.allclose(R @ R.T, np.eye(3), atol=1e-12)
    assert np.linalg.det(R) == pytest.approx(1.0)
    S = SphereTupleScene(5)
    x = S.random_point(rng)
    assert np.allclose(S.rotate(k, x), S.act(GroupElement(k), x), atol=1e-10)
    assert np.allclose(kabsch(x, S.rotate(k, x)), R, atol=1e-10)


def test_stabilizer_dimension():
    S = SphereTupleScene(3)
    up = np.array([0.0, 0.0, 1.0])
    assert S.stabilizer_dim(np.array([up, up, -up])) == 1
    assert S.stabilizer_dim(np.array([up, [1.0, 0, 0], [0, 1.0, 0]])) == 0


def test_validation_of_points():
    S = SphereTupleScene(2)
    with pytest.raises(ValidationError):
        S.validate_point(np.zeros((2, 3)))
    with pytest.raises(ValidationError):
        S.validate_point(np.ones((3, 3)) / math.sqrt(3))
    P = torus_scene([[1], [2]])
    with pytest.raises(ValidationError):
        P.validate_point([0, 0])
    assert np.linalg.norm(P.validate_point([3, 4])) == pytest.approx(1.0)


def test_scene_round_trip_through_dict():
    S = make_scene("sphere", m=3)
    assert S.to_dict()["m"] == 3
    P = torus_scene([[1, 0], [0, 1]])
    assert P.to_dict()["weights"] == [[1, 0], [0, 1]]
    F = FlatScene(Representation.spin(2))
    assert len(F.to_dict()["generators"]) == 3
