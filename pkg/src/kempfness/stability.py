"""Stability verdicts, the Kempf-Ness flow and comparison of K-orbits.

Verdicts follow the maximal-weight trichotomy: Unstable if some weight is
negative, Stable if all are positive, and otherwise Polystable exactly when
every zero direction s has a zero partner u opposed to it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.optimize
import scipy.stats

from .config import DEFAULT, Tolerances
from .errors import NotATorusScene, StepFailure
from .matcore import GroupElement, dagger, frob, mat_exp, polar_cartan
from .scenes import Scene, SphereTupleScene, kabsch
from .symspace import connect_geodesic, geodesically_connected, opposed, rational_rank
from .weights import lambda_t, max_weight

STABLE = "Stable"
POLYSTABLE = "Polystable"
NONNEGATIVE = "NonnegativeNotPolystable"
UNSTABLE = "Unstable"
TAGS = (STABLE, POLYSTABLE, NONNEGATIVE, UNSTABLE)


@dataclass
class StabilityVerdict:
    tag: str
    certificate: dict = field(default_factory=dict)
    band: float = DEFAULT.delta
    method: str = "sampling"

    def as_dict(self) -> dict:
        return {"tag": self.tag, "method": self.method, "band": self.band,
                "certificate": _jsonable(self.certificate)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return _jsonable(np.stack([obj.real, obj.imag], axis=-1).tolist())
        return obj.tolist()
    if isinstance(obj, (np.floating, float)):
        return "+inf" if obj == math.inf else float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if hasattr(obj, "as_dict"):
        return _jsonable(obj.as_dict())
    return obj


# ---------------------------------------------------------------------------
# exact rational linear feasibility


def _feasible(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """A point x >= 0 with A x = b, or None.  Phase-one simplex, Bland's rule."""
    rows = len(A)
    if rows == 0:
        return []
    cols = len(A[0])
    T = []
    for i in range(rows):
        sign = -1 if b[i] < 0 else 1
        T.append([sign * a for a in A[i]] + [Fraction(int(i == j)) for j in range(rows)] + [sign * b[i]])
    basis = [cols + i for i in range(rows)]
    width = cols + rows
    # objective: minimise the sum of artificials, written as reduced costs
    obj = [Fraction(0)] * (width + 1)
    for i in range(rows):
        for j in range(width + 1):
            obj[j] -= T[i][j]
    for i in range(rows):
        obj[cols + i] += 1
    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(rows):
            if T[i][enter] > 0:
                ratio = T[i][-1] / T[i][enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # unbounded; cannot happen for phase one
            break
        i = best[1]
        piv = T[i][enter]
        T[i] = [v / piv for v in T[i]]
        for r in range(rows):
            if r != i and T[r][enter] != 0:
                f = T[r][enter]
                T[r] = [a - f * c for a, c in zip(T[r], T[i])]
        f = obj[enter]
        obj = [a - f * c for a, c in zip(obj, T[i])]
        basis[i] = enter
    if -obj[-1] != 0:
        return None
    x = [Fraction(0)] * width
    for i, j in enumerate(basis):
        x[j] = T[i][-1]
    if any(x[cols + i] != 0 for i in range(rows)):
        return None
    return x[:cols]


def _nullspace(rows: list[list[Fraction]], d: int) -> list[list[Fraction]]:
    """Rational basis of {theta : <r, theta> = 0 for all rows r}."""
    M = [list(r) for r in rows]
    pivots = []
    rank = 0
    for col in range(d):
        p = next((i for i in range(rank, len(M)) if M[i][col] != 0), None)
        if p is None:
            continue
        M[rank], M[p] = M[p], M[rank]
        pv = M[rank][col]
        M[rank] = [v / pv for v in M[rank]]
        for i in range(len(M)):
            if i != rank and M[i][col] != 0:
                f = M[i][col]
                M[i] = [a - f * c for a, c in zip(M[i], M[rank])]
        pivots.append(col)
        rank += 1
    free = [c for c in range(d) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * d
        v[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -M[i][fcol]
        basis.append(v)
    return basis


def _direction(theta) -> np.ndarray:
    v = np.array([float(t) for t in theta])
    return v / np.linalg.norm(v)


def classify_torus_projective(weights, support=None) -> StabilityVerdict:
    """Exact verdict for [z] in P(C^N) under a torus with integer weights.

    ``support`` lists the indices j with z_j != 0 (all of them by default).
    Directions are reported as theta in R^d, standing for s = -i diag(theta).
    """
    W = np.atleast_2d(np.asarray(weights))
    if not np.all(W == np.round(W)):
        raise NotATorusScene("torus weights must be integers")
    W = W.astype(int)
    d = W.shape[1]
    supp = list(range(W.shape[0])) if support is None else sorted(int(j) for j in support)
    if not supp:
        raise ValueError("support must be nonempty")
    pts = [[Fraction(int(v)) for v in W[j]] for j in supp]
    N = len(pts)

    # 0 in conv: alpha >= 0, sum alpha = 1, sum alpha_j w_j = 0
    A = [[pts[j][k] for j in range(N)] for k in range(d)] + [[Fraction(1)] * N]
    b = [Fraction(0)] * d + [Fraction(1)]
    if _feasible(A, b) is None:
        # Farkas: theta with <w_j, theta> <= -1 for every j (theta = p - q)
        A2 = [[-v for v in pts[j]] + list(pts[j]) + [Fraction(-int(i == j)) for i in range(N)]
              for j in range(N)]
        sol = _feasible(A2, [Fraction(1)] * N)
        theta = [sol[k] - sol[d + k] for k in range(d)]
        value = max(sum(pts[j][k] * theta[k] for k in range(d)) for j in range(N))
        norm = math.sqrt(sum(float(t) ** 2 for t in theta))
        return StabilityVerdict(UNSTABLE, {
            "witness": _direction(theta), "witness_exact": theta,
            "weight": float(value) / norm}, band=0.0, method="exact")

    # which alpha_j can be positive: cone version with beta_j = 1
    never = []
    for j in range(N):
        Aj = [[pts[i][k] for i in range(N)] for k in range(d)] + [[Fraction(int(i == j)) for i in range(N)]]
        if _feasible(Aj, [Fraction(0)] * d + [Fraction(1)]) is None:
            never.append(j)
    if never:
        j0 = never[0]
        # zero direction: <w_i, theta> <= 0 for all i and <w_j0, theta> <= -1
        A3 = []
        rhs = []
        for i in range(N):
            row = list(pts[i]) + [-v for v in pts[i]] + [Fraction(int(i == r)) for r in range(N)]
            A3.append(row)
            rhs.append(Fraction(-1) if i == j0 else Fraction(0))
        sol = _feasible(A3, rhs)
        theta = [sol[k] - sol[d + k] for k in range(d)]
        return StabilityVerdict(NONNEGATIVE, {
            "zero_direction": _direction(theta), "zero_direction_exact": theta,
            "boundary_support": [supp[j] for j in never]}, band=0.0, method="exact")

    rank = rational_rank([p for p in pts])
    if rank == d:
        return StabilityVerdict(STABLE, {"rank": rank}, band=0.0, method="exact")
    null = _nullspace(pts, d)
    pairs = []
    for theta in null:
        s = _direction(theta)
        pairs.append({"s": s, "u": -s, "exact": theta})
    return StabilityVerdict(POLYSTABLE, {"rank": rank, "pairs": pairs}, band=0.0, method="exact")


def torus_support(scene: Scene, x, tol: Tolerances = DEFAULT) -> list[int]:
    z = np.asarray(x)
    return [j for j in range(len(z)) if abs(z[j]) > tol.supp_tol * max(1.0, np.linalg.norm(z))]


def classify_torus_scene(scene: Scene, x, tol: Tolerances = DEFAULT) -> StabilityVerdict:
    if scene.kind != "projective" or getattr(scene, "weights", None) is None:
        raise NotATorusScene(f"{scene.kind} scene has no torus weights")
    return classify_torus_projective(scene.weights, torus_support(scene, x, tol))


# ---------------------------------------------------------------------------
# sampling classifier


def sphere_samples(d: int, count: int, seed: int) -> np.ndarray:
    """Low-discrepancy points on the unit sphere of R^d (scrambled Sobol)."""
    m = max(1, math.ceil(math.log2(max(count, 2))))
    pts = scipy.stats.qmc.Sobol(d, scramble=True, seed=seed).random_base2(m)[:count]
    pts = np.clip(pts, 1e-12, 1 - 1e-12)
    g = scipy.stats.norm.ppf(pts)
    return g / np.linalg.norm(g, axis=1)[:, None]


def _unit(c):
    c = np.asarray(c, dtype=float)
    return c / np.linalg.norm(c)


class _WeightOracle:
    """Caches exact maximal weights on the unit sphere of k (coordinates)."""

    def __init__(self, scene: Scene, x):
        self.scene, self.x = scene, x
        self.evals = 0

    def __call__(self, c) -> float:
        self.evals += 1
        return self.scene.max_weight(self.x, self.scene.algebra.element(_unit(c)))

    def smooth(self, c, T: float) -> float:
        self.evals += 1
        return lambda_t(self.scene, self.x, self.scene.algebra.element(_unit(c)), T)


def _torus_polish(weights, c0):
    """Local minimum of max_j <w_j, theta> on the unit sphere (epigraph form)."""
    W = np.asarray(weights, dtype=float)
    d = W.shape[1]
    z0 = np.append(_unit(c0), np.max(W @ _unit(c0)))
    cons = [
        {"type": "ineq", "fun": lambda z: z[-1] - W @ z[:d], "jac": lambda z: np.hstack([-W, np.ones((len(W), 1))])},
        {"type": "eq", "fun": lambda z: np.array([z[:d] @ z[:d] - 1.0]),
         "jac": lambda z: np.append(2 * z[:d], 0.0)[None, :]},
    ]
    res = scipy.optimize.minimize(lambda z: z[-1], z0, jac=lambda z: np.eye(d + 1)[-1],
                                  constraints=cons, method="SLSQP",
                                  options={"ftol": 1e-14, "maxiter": 200})
    return _unit(res.x[:d])


def _torus_zero_cone(weights) -> list[np.ndarray]:
    """Directions theta with <w_i, theta> <= 0 for all i and one strictly negative."""
    W = np.asarray(weights, dtype=float)
    d = W.shape[1]
    out = []
    for j in range(len(W)):
        res = scipy.optimize.linprog(W[j], A_ub=W, b_ub=np.zeros(len(W)),
                                     bounds=[(-1, 1)] * d, method="highs")
        if res.status == 0 and res.fun < -1e-9:
            out.append(_unit(res.x))
    return out


def _surrogate_polish(oracle: _WeightOracle, c0, T: float):
    res = scipy.optimize.minimize(lambda c: oracle.smooth(c, T), _unit(c0), method="Nelder-Mead",
                                  options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 400})
    return _unit(res.x)


def classify_sampling(scene: Scene, x, budget: int = 256, seed: int = 0,
                      tol: Tolerances = DEFAULT) -> StabilityVerdict:
    """Banded verdict from sampled maximal weights on the unit sphere of k.

    Starts are a scrambled Sobol sample plus the scene's special directions;
    the best starts are polished locally (linear programming pieces for torus
    scenes, a smooth finite-t surrogate otherwise) and every candidate is
    scored with the exact maximal weight.  The result is numerical evidence,
    not a proof, for nonabelian K.
    """
    alg = scene.algebra
    d = alg.dim
    delta = tol.delta
    oracle = _WeightOracle(scene, x)
    rng = np.random.default_rng(seed)
    weights = getattr(scene, "weights", None) if scene.kind == "projective" else None
    supp_w = None
    if weights is not None:
        supp_w = np.asarray(weights)[torus_support(scene, x, tol)]

    cands = list(sphere_samples(d, budget, seed))
    cands += [_unit(alg.coords(s)) for s in scene.special_directions(x)]
    cands += [np.eye(d)[i] * sgn for i in range(d) for sgn in (1, -1)]
    scored = [(oracle(c), i, c) for i, c in enumerate(cands)]
    scored.sort(key=lambda t: (t[0], t[1]))
    polished = []
    for val, _, c in scored[: min(8, len(scored))]:
        if supp_w is not None:
            p = _torus_polish(supp_w, c)
        elif scene.kind == "sphere":
            continue  # exact weights are piecewise constant: specials are the minima
        else:
            p = _surrogate_polish(oracle, c, 8.0)
        polished.append(p)
    zero_cone = _torus_zero_cone(supp_w) if supp_w is not None else []
    for c in polished + zero_cone:
        scored.append((oracle(c), len(scored), c))
    scored.sort(key=lambda t: (t[0], t[1]))
    best_val, _, best_c = scored[0]
    diag = {"samples": len(scored), "weight_evaluations": oracle.evals, "min_weight": best_val,
            "argmin": best_c}
    if best_val < -delta:
        return StabilityVerdict(UNSTABLE, {"witness": best_c, "weight": best_val, **diag}, delta)
    if best_val > delta:
        return StabilityVerdict(STABLE, diag, delta)

    zeros = []
    for val, _, c in scored:
        if abs(val) <= delta and all(np.linalg.norm(c - z) > 1e-6 for z in zeros):
            zeros.append(c)
    pairs = []
    for z in zeros:
        partner = _find_partner(scene, x, z, zeros, oracle, rng, budget, tol)
        if partner is None:
            return StabilityVerdict(NONNEGATIVE, {"zero_direction": z, "zero_directions": zeros,
                                                  "partner_pool_exhausted": True, **diag}, delta)
        pairs.append(partner)
    return StabilityVerdict(POLYSTABLE, {"pairs": pairs, **diag}, delta)


def _find_partner(scene, x, z, zeros, oracle, rng, budget, tol):
    alg = scene.algebra
    s = alg.element(z)
    pool = [-z] + [w for w in zeros if np.linalg.norm(w - z) > 1e-6]
    pool += [_unit(alg.coords(t)) for t in scene.special_directions(x)]
    for _ in range(max(8, budget // 8)):
        k = alg.haar(rng)
        pool.append(_unit(alg.coords(-(k @ s @ dagger(k)))))
    for c in pool:
        if abs(oracle(c)) > tol.delta:
            continue
        u = alg.element(c)
        if not alg.same_orbit(u, -s):
            continue
        ok, cert = opposed(s, u, True, alg, tol)
        if ok:
            return {"s": z, "u": c, "weights": (oracle(z), oracle(c)), "opposedness": cert}
    return None


def verify_verdict(scene: Scene, x, verdict: StabilityVerdict, tol: Tolerances = DEFAULT) -> bool:
    """Replay a verdict's certificate against max_weight and opposed."""
    alg = scene.algebra
    cert = verdict.certificate
    lam = lambda c: scene.max_weight(x, alg.element(_unit(c)))
    if verdict.tag == UNSTABLE:
        return lam(cert["witness"]) < 0
    if verdict.tag == POLYSTABLE:
        for p in cert.get("pairs", []):
            s, u = alg.element(_unit(p["s"])), alg.element(_unit(p["u"]))
            if abs(lam(p["s"])) > tol.delta or abs(lam(p["u"])) > tol.delta:
                return False
            if not opposed(s, u, True, alg, tol)[0]:
                return False
        return True
    if verdict.tag == NONNEGATIVE:
        return abs(lam(cert["zero_direction"])) <= tol.delta
    if verdict.tag == STABLE:
        return verdict.method == "exact" or cert["min_weight"] > tol.delta
    return False


@dataclass(frozen=True)
class WitnessCheck:
    ok: bool
    reason: str
    connector: GroupElement | None = None


def polystable_witness_check(scene: Scene, x, s, u, tol: Tolerances = DEFAULT,
                             want_connector: bool = False) -> WitnessCheck:
    """lambda(x; s) = lambda(x; u) = 0 and e_s, e_u geodesically connected."""
    alg = scene.algebra
    s, u = np.asarray(s), np.asarray(u)
    s, u = s / frob(s), u / frob(u)
    if abs(max_weight(scene, x, s)) > tol.delta:
        return WitnessCheck(False, "first condition failed: lambda(x; s) is not zero")
    if abs(max_weight(scene, x, u)) > tol.delta:
        return WitnessCheck(False, "second condition failed: lambda(x; u) is not zero")
    if not geodesically_connected(s, u, alg, tol):
        return WitnessCheck(False, "third condition failed: e_s and e_u are not geodesically connected")
    h = connect_geodesic(s, u, alg, tol) if want_connector else None
    return WitnessCheck(True, "all conditions hold", h)


# ---------------------------------------------------------------------------
# Kempf-Ness flow

CONVERGED = "ConvergedInOrbit"
DEGENERATE = "ConvergedDegenerate"
DIVERGED = "Diverged"
EXHAUSTED = "BudgetExhausted"

# Dormand-Prince 5(4)
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


@dataclass(frozen=True)
class FlowParams:
    rtol: float = 1e-10
    h0: float = 0.05
    h_min: float = 1e-12
    h_max: float = 5.0
    max_steps: int = 20000
    t_max: float = 1e4


@dataclass
class FlowTrace:
    times: list
    mu_norms: list
    distances: list
    final_point: object
    final_g: np.ndarray
    outcome: str
    steps: int
    rejected: int
    notes: str = ""

    def to_csv(self) -> str:
        lines = ["t,mu_norm,distance"]
        lines += [f"{t!r},{m!r},{d!r}" for t, m, d in zip(self.times, self.mu_norms, self.distances)]
        return "\n".join(lines) + "\n"

    def worst_increase(self) -> float:
        m = np.asarray(self.mu_norms)
        return float(max(0.0, np.max(np.diff(m)))) if m.size > 1 else 0.0

    def as_dict(self) -> dict:
        return {"outcome": self.outcome, "steps": self.steps, "rejected": self.rejected,
                "final_time": self.times[-1], "final_mu_norm": self.mu_norms[-1],
                "final_distance": self.distances[-1], "notes": self.notes}


def _log_distance(G: np.ndarray) -> float:
    """|log g| for the accumulated flow element (distance from [1] to [g])."""
    S = np.linalg.svd(G, compute_uv=False)
    if G.shape[0] == 2:
        # determinant is preserved, which keeps the small singular value exact
        S = np.array([S[0], abs(np.linalg.det(G)) / S[0]])
    return float(np.linalg.norm(np.log(S)))


def _merge_monitor(scene: Scene, x0):
    """Pairs of initially distinct points of a sphere tuple."""
    if not isinstance(scene, SphereTupleScene):
        return []
    P = np.asarray(x0)
    return [(i, j, float(np.linalg.norm(P[i] - P[j])))
            for i in range(len(P)) for j in range(i + 1, len(P))
            if np.linalg.norm(P[i] - P[j]) > 1e-9]


def kempf_ness_flow(scene: Scene, x, params: FlowParams = FlowParams(),
                    tol: Tolerances = DEFAULT) -> FlowTrace:
    """Integrate g' = -i M(g x) g from g = 1, M the moment element.

    Each step solves the flow of the step's own group element Phi from the
    current point (Phi starts at 1, so it stays well conditioned), moves
    the point by Phi and accumulates g <- Phi g.  Steps that increase |mu|
    are rejected.
    """
    n = scene.algebra.n
    y = x
    G = np.eye(n, dtype=complex)
    t = 0.0
    mu = frob(scene.moment(y))
    times, mus, dists = [0.0], [mu], [0.0]
    pairs = _merge_monitor(scene, x)
    h = params.h0
    steps = rejected = 0
    outcome, notes = None, ""

    def F(Phi, base):
        yy = scene.act(GroupElement(Phi), base)
        return -1j * scene.moment(yy) @ Phi

    while outcome is None:
        if mu <= tol.eps_zero:
            outcome = CONVERGED if dists[-1] <= tol.distance_cap else DEGENERATE
            break
        if pairs:
            P = np.asarray(y)
            shrink = min(np.linalg.norm(P[i] - P[j]) / g0 for i, j, g0 in pairs)
            if shrink < tol.merge_tol:
                outcome = DEGENERATE
                notes = f"initially distinct points merging (gap shrunk to {shrink:.3e} of its start)"
                break
        if dists[-1] > tol.distance_cap:
            outcome = DIVERGED if mu >= tol.eps_div else DEGENERATE
            break
        if steps >= params.max_steps or t >= params.t_max:
            outcome = EXHAUSTED
            break
        # one Dormand-Prince step for Phi
        I = np.eye(n, dtype=complex)
        K = []
        for i in range(7):
            Phi_i = I + h * sum(a * k for a, k in zip(_A[i], K)) if i else I
            K.append(F(Phi_i, y))
        Phi5 = I + h * sum(b * k for b, k in zip(_B5, K))
        Phi4 = I + h * sum(b * k for b, k in zip(_B4, K))
        err = frob(Phi5 - Phi4) / (1.0 + frob(Phi5))
        if not np.isfinite(err):
            err = np.inf
        y_new = None
        accept = err <= params.rtol
        if accept:
            y_new = scene.act(GroupElement(Phi5), y)
            mu_new = frob(scene.moment(y_new))
            accept = mu_new <= mu * (1 + 1e-12) + 1e-15
        if accept:
            t += h
            y, mu = y_new, mu_new
            G = Phi5 @ G
            times.append(t)
            mus.append(mu)
            dists.append(_log_distance(G))
            steps += 1
            fac = 0.9 * (params.rtol / max(err, 1e-300)) ** 0.2
            h = min(params.h_max, h * min(5.0, max(0.2, fac)))
        else:
            rejected += 1
            fac = 0.9 * (params.rtol / err) ** 0.2 if np.isfinite(err) and err > 0 else 0.5
            h = h * min(0.5, max(0.1, fac))
            if h < params.h_min:
                raise StepFailure(f"step size fell below {params.h_min} at t = {t}")
    return FlowTrace(times, mus, dists, y, G, outcome, steps, rejected, notes)


# ---------------------------------------------------------------------------
# K-orbit comparison


@dataclass(frozen=True)
class OrbitComparison:
    distance: float
    method: str  # "kabsch" (exact minimiser) or "multistart" (local search, may miss)


def korbit_distance(scene: Scene, x1, x2, starts: int = 12, seed: int = 0) -> OrbitComparison:
    """min over k in K of d(k x1, x2)."""
    if isinstance(scene, SphereTupleScene):
        R = kabsch(np.asarray(x1), np.asarray(x2))
        y = np.asarray(x1) @ R.T
        y = y / np.linalg.norm(y, axis=1)[:, None]
        return OrbitComparison(scene.point_distance(y, x2), "kabsch")
    alg = scene.algebra
    rng = np.random.default_rng(seed)

    def f(c):
        k = mat_exp(alg.element(c))
        return scene.point_distance(scene.act(GroupElement(k), x1), x2)

    best = math.inf
    for i in range(starts):
        c0 = np.zeros(alg.dim) if i == 0 else rng.uniform(-math.pi, math.pi, alg.dim)
        res = scipy.optimize.minimize(f, c0, method="Nelder-Mead",
                                      options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
        best = min(best, float(res.fun))
    return OrbitComparison(best, "multistart")


def korbit_equal(scene: Scene, x1, x2, tol: float = 1e-6) -> bool:
    return korbit_distance(scene, x1, x2).distance <= tol
