"""Built-in invariant suites behind ``kempfness selftest``.

``quick`` covers the linear-algebra kernel, the boundary action, opposedness,
the exact torus classifier and weight-curve monotonicity; ``full`` adds the
cocycle identity, equivariance of maximal weights, geodesic connection and
flow/classifier consistency on the shipped sphere example.
"""
from __future__ import annotations

import json
import time
from importlib import resources

import numpy as np

from .config import DEFAULT, Tolerances
from .matcore import (
    GroupElement,
    Subspace,
    dagger,
    frob,
    herm_eig,
    mat_exp,
    polar_cartan,
    random_skew_hermitian,
    subspace_complement,
    subspace_intersect,
)
from .scenes import ProjectiveScene, Representation, SphereTupleScene
from .symspace import (
    LieAlgebra,
    boundary_action,
    boundary_action_oracle,
    connect_geodesic,
    opposed,
    parabolic_contains,
)
from .weights import kn_integral, max_weight, weight_curve


def _random_g(alg: LieAlgebra, rng) -> GroupElement:
    g = alg.random_group(rng).matrix
    if alg.kind == "su":
        g = g / np.linalg.det(g) ** (1.0 / alg.n)
    return GroupElement(g)


def _sphere_example():
    doc = json.loads((resources.files("kempfness") / "data" / "sphere4.json").read_text())
    pts = {k: np.asarray(v, dtype=float) for k, v in doc["points"].items()}
    return SphereTupleScene(doc["m"]), pts


def suite_tolerances(rng, tol):
    bad = tol.invalid_fields()
    return not bad, f"non-positive tolerances: {bad}" if bad else "all tolerances positive"


def suite_eig(rng, tol):
    worst = 0.0
    for _ in range(10):
        n = int(rng.integers(2, 7))
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        H = A + dagger(A)
        worst = max(worst, frob(herm_eig(H, tol=tol).reconstruct() - H) / frob(H))
    return worst <= 1e-10, f"worst relative reconstruction error {worst:.2e}"


def suite_polar(rng, tol):
    worst = 0.0
    for _ in range(10):
        alg = LieAlgebra.u(int(rng.integers(2, 6)))
        g = alg.random_group(rng).matrix
        cp = polar_cartan(g, tol)
        worst = max(worst, frob(cp.k @ mat_exp(1j * cp.u) - g) / frob(g))
    return worst <= 1e-9, f"worst round-trip error {worst:.2e}"


def suite_subspaces(rng, tol):
    worst = 0.0
    for _ in range(10):
        n = 6
        U = Subspace(np.linalg.qr(rng.standard_normal((n, 4)) + 0j)[0])
        V = Subspace(np.linalg.qr(rng.standard_normal((n, 4)) + 0j)[0])
        worst = max(worst, frob(subspace_complement(subspace_complement(U)).projector() - U.projector()))
        a, b = subspace_intersect(U, V), subspace_intersect(V, U)
        worst = max(worst, frob(a.projector() - b.projector()))
        if a.dim != 2:
            return False, f"generic intersection has dimension {a.dim}"
    return worst <= 1e-8, f"worst projector mismatch {worst:.2e}"


def suite_boundary_action(rng, tol):
    worst_spec = worst_right = 0.0
    for _ in range(10):
        alg = LieAlgebra.u(int(rng.integers(2, 5)))
        s = alg.random_unit(rng)
        g, h = alg.random_group(rng), alg.random_group(rng)
        sg = boundary_action(s, g, tol)
        a = np.linalg.eigvalsh(1j * s)
        b = np.linalg.eigvalsh(1j * sg)
        worst_spec = max(worst_spec, float(np.max(np.abs(a - b))))
        worst_right = max(worst_right, frob(boundary_action(sg, h, tol) - boundary_action(s, g @ h, tol)))
    ok = worst_spec <= 1e-8 and worst_right <= 1e-6
    return ok, f"spectrum drift {worst_spec:.2e}, right-action defect {worst_right:.2e}"


def suite_boundary_oracle(rng, tol):
    worst = 0.0
    for _ in range(3):
        alg = LieAlgebra.u(int(rng.integers(2, 4)))
        s, g = alg.random_unit(rng), alg.random_group(rng)
        worst = max(worst, frob(boundary_action(s, g, tol) - boundary_action_oracle(s, g)))
    return worst <= 1e-3, f"worst deviation from the extrapolated limit {worst:.2e}"


def suite_opposed(rng, tol):
    for n in (2, 3, 4):
        alg = LieAlgebra.u(n)
        for _ in range(5):
            u = alg.random_element(rng)
            if not opposed(u, -u, True, alg, tol)[0]:
                return False, f"u and -u not opposed (n = {n})"
            k = alg.haar(rng)
            v = -(k @ u @ dagger(k))
            if opposed(u, v, True, alg, tol)[0] != opposed(v, u, True, alg, tol)[0]:
                return False, f"opposedness not symmetric (n = {n})"
    return True, "u, -u opposed and symmetry holds for n = 2, 3, 4"


def suite_torus(rng, tol):
    from .stability import classify_torus_projective

    got = (classify_torus_projective([[1], [-1]]).tag, classify_torus_projective([[1], [2]]).tag,
           classify_torus_projective([[0]]).tag)
    want = ("Stable", "Unstable", "Polystable")
    return got == want, f"verdicts {got}"


def suite_monotone(rng, tol):
    S, pts = _sphere_example()
    worst = 0.0
    cases = [(S, pts["x"]), (S, pts["x_prime"])]
    P = ProjectiveScene(Representation.spin(4))
    cases += [(P, P.random_point(rng)) for _ in range(2)]
    for scene, x in cases:
        s = scene.algebra.random_unit(rng)
        c = weight_curve(scene, x, s, np.linspace(0, 20, 81))
        worst = max(worst, c.worst_decrease())
    return worst <= tol.eps_mono and tol.eps_mono > 0, \
        f"worst per-step decrease {worst:.2e} against eps_mono = {tol.eps_mono:g}"


def suite_cocycle(rng, tol):
    S, pts = _sphere_example()
    P = ProjectiveScene(Representation.spin(3))
    worst = 0.0
    for scene, x in [(S, pts["x"]), (P, P.random_point(rng))]:
        for _ in range(5):
            g, h = _random_g(scene.algebra, rng), _random_g(scene.algebra, rng)
            a = kn_integral(scene, x, g, tol=tol).value
            b = kn_integral(scene, scene.act(g, x), h, tol=tol).value
            c = kn_integral(scene, x, h @ g, tol=tol).value
            worst = max(worst, abs(a + b - c) / (2 * tol.eps_quad * (1 + abs(c))))
    return worst <= 1.0, f"worst defect {worst:.2e} in units of 2 eps_quad (1 + |Psi|)"


def suite_equivariance(rng, tol):
    P = ProjectiveScene(Representation.spin(3))
    worst = 0.0
    for _ in range(10):
        x = P.random_point(rng)
        s = P.algebra.random_unit(rng)
        g = _random_g(P.algebra, rng)
        lhs = max_weight(P, P.act(g, x), s)
        rhs = max_weight(P, x, boundary_action(s, g, tol))
        worst = max(worst, abs(lhs - rhs))
    return worst <= 1e-5, f"worst |lambda_gx(e_s) - lambda_x(e_(s.g))| = {worst:.2e}"


def suite_connect(rng, tol):
    worst = 0.0
    for alg in (LieAlgebra.su(2), LieAlgebra.u(3)):
        for _ in range(5):
            u = alg.random_unit(rng)
            k = alg.haar(rng)
            v = -(k @ u @ dagger(k))
            h = connect_geodesic(u, v, alg, tol)
            if not parabolic_contains(u, h, tol.eps_boundary):
                return False, "connector not in the parabolic of u"
            worst = max(worst, frob(boundary_action(v, h, tol) + u))
    return worst <= 1e-8, f"worst |v.h + u| = {worst:.2e}"


def suite_flow(rng, tol):
    from .stability import classify_sampling, kempf_ness_flow

    S, pts = _sphere_example()
    out = {}
    for name in ("x", "x_prime", "x_double_prime"):
        tag = classify_sampling(S, pts[name], seed=int(rng.integers(1 << 30)), tol=tol).tag
        outcome = kempf_ness_flow(S, pts[name], tol=tol).outcome
        out[name] = (tag, outcome)
    ok = (out["x"] == ("Stable", "ConvergedInOrbit")
          and out["x_double_prime"] == ("Polystable", "ConvergedInOrbit")
          and out["x_prime"][0] == "NonnegativeNotPolystable"
          and out["x_prime"][1] in ("ConvergedDegenerate", "Diverged"))
    return ok, f"(verdict, flow outcome) per point: {out}"


QUICK = [suite_tolerances, suite_eig, suite_polar, suite_subspaces, suite_boundary_action,
         suite_boundary_oracle, suite_opposed, suite_torus, suite_monotone]
FULL = QUICK + [suite_cocycle, suite_equivariance, suite_connect, suite_flow]


def run_selftest(level: str = "quick", seed: int = 0, tol: Tolerances = DEFAULT) -> list[dict]:
    suites = QUICK if level == "quick" else FULL
    results = []
    for i, suite in enumerate(suites):
        suite_seed = seed * 1000 + i
        rng = np.random.default_rng(suite_seed)
        t0 = time.perf_counter()
        try:
            ok, detail = suite(rng, tol)
        except Exception as exc:  # a crashing suite is a failed suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append({"name": suite.__name__.removeprefix("suite_"), "passed": bool(ok),
                        "detail": detail, "seed": suite_seed,
                        "seconds": round(time.perf_counter() - t0, 3)})
    return results
