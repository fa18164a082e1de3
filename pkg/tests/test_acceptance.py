"""Acceptance criteria, one test each; every test records a PASS/FAIL line."""
import numpy as np

from kempfness.matcore import GroupElement, dagger, frob
from kempfness.scenes import FlatScene, ProjectiveScene, Representation, torus_scene
from kempfness.stability import (
    CONVERGED,
    DEGENERATE,
    DIVERGED,
    NONNEGATIVE,
    POLYSTABLE,
    STABLE,
    classify_sampling,
    classify_torus_scene,
    kempf_ness_flow,
    korbit_distance,
)
from kempfness.symspace import (
    LieAlgebra,
    boundary_action,
    boundary_action_oracle,
    connect_geodesic,
    opposed,
    parabolic_contains,
)
from kempfness.weights import kn_integral, max_weight, weight_curve

SEED = 20240611


def random_g(alg, rng):
    g = alg.random_group(rng).matrix
    if alg.kind == "su":
        g = g / np.linalg.det(g) ** (1.0 / alg.n)
    return GroupElement(g)


def test_criterion_01_sphere_example(sphere_example, acceptance):
    S, pts = sphere_example
    want = {"x": STABLE, "x_prime": NONNEGATIVE, "x_double_prime": POLYSTABLE}
    got = {name: classify_sampling(S, pts[name]) for name in want}
    tags_ok = all(got[n].tag == want[n] for n in want)
    x = pts["x_double_prime"]
    target = {tuple(np.round(-x[0], 8)), tuple(np.round(-x[2], 8))}
    pair_ok = False
    if got["x_double_prime"].tag == POLYSTABLE:
        for p in got["x_double_prime"].certificate["pairs"]:
            if {tuple(np.round(p["s"], 8)), tuple(np.round(p["u"], 8))} == target:
                ok, cert = opposed(S.element(p["s"]), S.element(p["u"]), True, S.algebra)
                pair_ok = ok and cert.total == cert.rank == S.algebra.dim
    detail = ", ".join(f"{n} -> {got[n].tag}" for n in want)
    acceptance(1, "sphere example", tags_ok and pair_ok,
               f"{detail}; zero pair (-x1, -x2) certified: {pair_ok}")


def test_criterion_02_boundary_action_limit(acceptance):
    rng = np.random.default_rng(SEED + 2)
    worst_lim = worst_spec = 0.0
    for i in range(50):
        alg = LieAlgebra.u(2 + i % 3)
        s, g = alg.random_unit(rng), alg.random_group(rng)
        assert np.linalg.cond(g.matrix) <= 1e3 * (1 + 1e-9)
        sg = boundary_action(s, g)
        worst_lim = max(worst_lim, frob(sg - boundary_action_oracle(s, g)))
        spec_s = np.linalg.eigvalsh(1j * s)
        spec_sg = np.linalg.eigvalsh(1j * sg)
        worst_spec = max(worst_spec, float(np.max(np.abs(spec_s - spec_sg))))
    ok = worst_lim <= 1e-3 and worst_spec <= 1e-8
    acceptance(2, "boundary action vs extrapolated limit", ok,
               f"50 cases, worst |rho_g(s) - limit| = {worst_lim:.2e} (<= 1e-3), "
               f"worst spectrum drift {worst_spec:.2e} (<= 1e-8)")


def test_criterion_03_cocycle(sphere_example, acceptance):
    S, _ = sphere_example
    scenes = {
        "sphere4": S,
        "projective-spin3": ProjectiveScene(Representation.spin(3)),
        "projective-u3": ProjectiveScene(Representation.defining(LieAlgebra.u(3))),
        "flat-spin2": FlatScene(Representation.spin(2)),
    }
    rng = np.random.default_rng(SEED + 3)
    worst = {}
    for name, scene in scenes.items():
        w = 0.0
        for _ in range(50):
            x = scene.random_point(rng)
            g, h = random_g(scene.algebra, rng), random_g(scene.algebra, rng)
            a = kn_integral(scene, x, g).value
            b = kn_integral(scene, scene.act(g, x), h).value
            c = kn_integral(scene, x, h @ g).value
            # defect in units of the allowed 2 eps_quad, eps_quad = 1e-8 (1 + |Psi|)
            w = max(w, abs(a + b - c) / (2e-8 * (1 + abs(c))))
        worst[name] = w
    ok = all(v <= 1.0 for v in worst.values())
    detail = ", ".join(f"{k} {v:.2e}" for k, v in worst.items())
    acceptance(3, "cocycle identity", ok, f"50 triples per scene, worst defect / bound: {detail}")


def test_criterion_04_equivariance(acceptance):
    scenes = [ProjectiveScene(Representation.spin(3)), ProjectiveScene(Representation.spin(4)),
              ProjectiveScene(Representation.defining(LieAlgebra.u(3)))]
    rng = np.random.default_rng(SEED + 4)
    worst = 0.0
    count = 0
    while count < 30:
        P = scenes[count % len(scenes)]
        x = P.random_point(rng)
        s = P.algebra.random_unit(rng)
        g = random_g(P.algebra, rng)
        lhs = max_weight(P, P.act(g, x), s)
        rhs = max_weight(P, x, boundary_action(s, g))
        if not (np.isfinite(lhs) and np.isfinite(rhs)):
            continue
        worst = max(worst, abs(lhs - rhs))
        count += 1
    acceptance(4, "equivariance of maximal weights", worst <= 1e-5,
               f"30 cases, worst |lambda_gx(e_s) - lambda_x(e_(s.g))| = {worst:.2e} (<= 1e-5)")


def test_criterion_05_monotonicity(sphere_example, acceptance):
    S, pts = sphere_example
    rng = np.random.default_rng(SEED + 5)
    times = np.linspace(0, 40, 161)
    cases = []
    for name, x in pts.items():
        for p in x:
            cases.append((S, x, S.element(-p)))
        cases += [(S, x, S.algebra.random_unit(rng)) for _ in range(5)]
    for P in (ProjectiveScene(Representation.spin(4)), torus_scene([[1, 0], [0, 1], [-1, -1]]),
              ProjectiveScene(Representation.defining(LieAlgebra.u(3)))):
        cases += [(P, P.random_point(rng), P.algebra.random_unit(rng)) for _ in range(10)]
    worst = max(weight_curve(sc, x, s, times).worst_decrease() for sc, x, s in cases)
    acceptance(5, "monotonicity of weight curves", worst <= 1e-9,
               f"{len(cases)} curves of {len(times)} samples, worst per-step decrease "
               f"{worst:.2e} (<= 1e-9)")


def test_criterion_06_flow_consistency(sphere_example, acceptance):
    S, pts = sphere_example
    tr = {name: kempf_ness_flow(S, pts[name]) for name in pts}
    ok_x = tr["x"].outcome == CONVERGED and tr["x"].mu_norms[-1] <= 1e-8
    ok_xpp = (tr["x_double_prime"].outcome == CONVERGED
              and tr["x_double_prime"].mu_norms[-1] <= 1e-8)
    ok_xp = tr["x_prime"].outcome in (DEGENERATE, DIVERGED)
    detail = "; ".join(f"{n}: {t.outcome}, |mu| = {t.mu_norms[-1]:.1e}, t = {t.times[-1]:.1f}"
                       for n, t in tr.items())
    acceptance(6, "flow consistent with the verdicts", ok_x and ok_xp and ok_xpp, detail)


def test_criterion_07_unique_k_orbit(sphere_example, acceptance):
    S, pts = sphere_example
    rng = np.random.default_rng(SEED + 7)
    limits = []
    outcomes = []
    for _ in range(5):
        g = random_g(S.algebra, rng)
        tr = kempf_ness_flow(S, S.act(g, pts["x_double_prime"]))
        outcomes.append(tr.outcome)
        limits.append(tr.final_point)
    worst = max(korbit_distance(S, limits[i], limits[j]).distance
                for i in range(5) for j in range(i + 1, 5))
    ok = worst <= 1e-6 and all(o == CONVERGED for o in outcomes)
    acceptance(7, "unique K-orbit of flow limits", ok,
               f"5 representatives, outcomes {sorted(set(outcomes))}, worst pairwise K-orbit "
               f"distance {worst:.2e} (<= 1e-6)")


def test_criterion_08_torus_oracle(acceptance):
    rng = np.random.default_rng(SEED + 8)
    mismatches = []
    seen = {}
    for i in range(30):
        d = int(rng.integers(1, 4))
        N = int(rng.integers(2, 7))
        W = rng.integers(-2, 3, size=(N, d))
        if i % 2:
            # weights closed under negation put 0 inside the hull: Stable or Polystable
            W = np.vstack([W[: max(1, N // 2)], -W[: max(1, N // 2)]])
            N = len(W)
        P = torus_scene(W)
        z = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        z[rng.random(N) < 0.3] = 0
        if not np.any(z):
            z[0] = 1
        z /= np.linalg.norm(z)
        exact = classify_torus_scene(P, z).tag
        sampled = classify_sampling(P, z, budget=256, seed=i).tag
        seen[exact] = seen.get(exact, 0) + 1
        if exact != sampled:
            mismatches.append((i, exact, sampled))
    acceptance(8, "exact and sampled torus verdicts agree", not mismatches,
               f"30 scenes, verdict counts {dict(sorted(seen.items()))}, mismatches {mismatches}")


def test_criterion_09_opposedness(acceptance):
    rng = np.random.default_rng(SEED + 9)
    minus_ok = sym_ok = True
    for n in (2, 3, 4):
        alg = LieAlgebra.u(n)
        for _ in range(20):
            u = alg.random_element(rng)
            a, b = opposed(u, -u, True, alg)[0], opposed(-u, u, True, alg)[0]
            minus_ok &= a
            sym_ok &= a == b
    dense = 0
    for i in range(200):
        alg = LieAlgebra.u(2 + i % 3)
        u = alg.random_element(rng)
        k = alg.haar(rng)
        v = -(k @ u @ dagger(k))
        a, b = opposed(u, v, True, alg)[0], opposed(v, u, True, alg)[0]
        sym_ok &= a == b
        dense += a
    ok = minus_ok and sym_ok and dense >= 190
    acceptance(9, "opposedness baseline", ok,
               f"u vs -u opposed for 60/60: {minus_ok}, symmetric on all pairs: {sym_ok}, "
               f"generic conjugates opposed {dense}/200 (>= 190)")


def test_criterion_10_connect_geodesic(acceptance):
    rng = np.random.default_rng(SEED + 10)
    worst = 0.0
    parab = True
    for alg in (LieAlgebra.su(2), LieAlgebra.u(3)):
        made = 0
        while made < 20:
            u = alg.random_unit(rng)
            k = alg.haar(rng)
            v = -(k @ u @ dagger(k))
            if not opposed(u, v, True, alg)[0]:
                continue
            h = connect_geodesic(u, v, alg)
            parab &= parabolic_contains(u, h, 1e-8)
            worst = max(worst, frob(boundary_action(v, h) + u))
            made += 1
    acceptance(10, "connect_geodesic contract", parab and worst <= 1e-8,
               f"20 pairs each in su(2), u(3); h in P_u: {parab}; worst |v.h + u| = {worst:.2e} (<= 1e-8)")
