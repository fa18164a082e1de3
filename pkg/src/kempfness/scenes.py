"""Concrete Kähler G-manifolds with a Hamiltonian K-action.

Three models share one interface:

* ``ProjectiveScene``: P(C^N) with a unitary representation of K, the
  Fubini-Study metric scaled so that d/dt mu_s(exp(i t s) x) = |xi_s|^2 holds
  exactly, and mu_s([z]) = z* (i drho(s)) z / z* z.
* ``FlatScene``: C^N with the flat metric and mu_s(z) = z* (i drho(s)) z / 2.
* ``SphereTupleScene``: (S^2)^m with K = SU(2) acting diagonally by
  rotations, G = SL(2, C) by Möbius maps, and mu = centre of mass.

Points are plain numpy arrays: a complex unit vector (projective), a complex
vector (flat) or an (m, 3) array of unit vectors (sphere tuple).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import BoundViolated, Overflow, ValidationError
from .matcore import (
    GroupElement,
    as_group,
    dagger,
    frob,
    herm_eig,
    inner,
    polar_cartan,
    random_unitary,
    skew_part,
    unitary_log,
)
from .symspace import PAULI, LieAlgebra

# ---------------------------------------------------------------------------
# representations


_SNAP = 16 * np.finfo(float).eps


def _exp_herm_apply(A: np.ndarray, Z: np.ndarray, shift: bool) -> tuple[np.ndarray, np.ndarray]:
    """exp(A) Z for Hermitian A, optionally rescaled per column.

    Returns ``(Y, log_scale)`` with exp(A) Z[:, j] = exp(log_scale[j]) Y[:, j].
    The rescaling keeps the dominant component of order one, so that
    exp(t A) for huge t is still usable projectively.
    """
    w, Q = np.linalg.eigh((A + dagger(A)) / 2)
    C = dagger(Q) @ Z
    if not shift:
        with np.errstate(over="ignore", invalid="ignore"):
            Y = Q @ (np.exp(w)[:, None] * C)
        if not np.all(np.isfinite(Y)):
            raise Overflow("exponential action overflowed")
        return Y, np.zeros(Z.shape[1])
    absC = np.abs(C)
    # components at roundoff level relative to the vector are exact zeros:
    # a point stored in floating point at a repelling fixed point must stay
    # there instead of being pushed away by exp(t A) amplifying its noise
    absC = np.where(absC <= _SNAP * np.linalg.norm(C, axis=0)[None, :], 0.0, absC)
    with np.errstate(divide="ignore"):
        logs = np.where(absC > 0, np.log(np.where(absC > 0, absC, 1.0)) + w[:, None], -np.inf)
    top = np.max(logs, axis=0)
    top = np.where(np.isfinite(top), top, 0.0)
    phase = np.where(absC > 0, C / np.where(absC > 0, absC, 1.0), 0.0)
    with np.errstate(under="ignore"):
        Y = Q @ (np.exp(logs - top[None, :]) * phase)
    return Y, top


@dataclass(frozen=True, eq=False)
class Representation:
    """Unitary representation of K on C^N, given on the basis of k."""

    algebra: LieAlgebra
    images: np.ndarray  # (d, N, N), drho(b_k)
    weights: np.ndarray | None = None  # (N, d) integer weights for torus scenes
    name: str = "custom"

    @property
    def N(self) -> int:
        return self.images.shape[1]

    @classmethod
    def defining(cls, algebra: LieAlgebra) -> "Representation":
        return cls(algebra, algebra.basis.copy(), name="defining")

    @classmethod
    def torus(cls, weights) -> "Representation":
        """Diagonal action of T^d with integer weights w_j (rows of ``weights``).

        For s = -i diag(theta) the operator i drho(s) is diag(<w_j, theta>).
        """
        W = np.atleast_2d(np.asarray(weights))
        if W.ndim != 2:
            raise ValidationError("weights must be a list of integer vectors")
        if not np.all(W == np.round(W)):
            raise ValidationError("torus weights must be integers")
        W = W.astype(int)
        N, d = W.shape
        images = np.array([np.diag(-1j * W[:, k].astype(complex)) for k in range(d)])
        return cls(LieAlgebra.torus(d), images, weights=W, name="torus")

    @classmethod
    def spin(cls, dim: int) -> "Representation":
        """SU(2) acting on binary forms of degree dim - 1 (spin (dim-1)/2).

        With the basis -i sigma_k / sqrt(2) of su(2), drho(b_k) = -i sqrt(2) J_k.
        """
        j = (dim - 1) / 2
        m = j - np.arange(dim)
        Jz = np.diag(m).astype(complex)
        Jp = np.zeros((dim, dim), dtype=complex)
        for a in range(1, dim):
            Jp[a - 1, a] = math.sqrt(j * (j + 1) - m[a] * (m[a] + 1))
        Jx = (Jp + dagger(Jp)) / 2
        Jy = (Jp - dagger(Jp)) / 2j
        images = np.array([-1j * math.sqrt(2) * J for J in (Jx, Jy, Jz)])
        return cls(LieAlgebra.su(2), images, name=f"spin{dim}")

    def d_rho(self, X) -> np.ndarray:
        """Complex-linear extension of drho to g = k (x) C."""
        return np.tensordot(self.algebra.complex_coords(X), self.images, axes=1)

    def hermitian_generator(self, s) -> np.ndarray:
        """i drho(s), Hermitian for s in k."""
        A = 1j * self.d_rho(s)
        return (A + dagger(A)) / 2

    def validate(self, tol: Tolerances = DEFAULT) -> None:
        for k, A in enumerate(self.images):
            if frob(A + dagger(A)) > tol.eps_sym * (1 + frob(A)):
                raise ValidationError(f"generator {k} is not skew-Hermitian")
        B = self.algebra.basis
        for i in range(len(B)):
            for j in range(i + 1, len(B)):
                lhs = self.d_rho(B[i] @ B[j] - B[j] @ B[i])
                Ai, Aj = self.images[i], self.images[j]
                err = frob(lhs - (Ai @ Aj - Aj @ Ai))
                if err > tol.eps_rep * (1 + frob(Ai) * frob(Aj)):
                    raise ValidationError(
                        f"generators {i}, {j} violate the bracket relation (error {err:.2e})"
                    )

    def op_norm_bound(self) -> float:
        """c with |drho(s)|_op <= c |s| for s in k."""
        return float(math.sqrt(sum(np.linalg.norm(A, 2) ** 2 for A in self.images)))

    def group_apply(self, g, Z: np.ndarray, shift: bool = True, tol: Tolerances = DEFAULT):
        """rho(g) Z for g = k exp(i u): rho(k) exp(i drho(u)) Z.

        rho(k) is exp(drho(log k)).  Returns ``(Y, log_scale)`` as
        ``_exp_herm_apply`` does.
        """
        g = as_group(g)
        cp = polar_cartan(g, tol)
        Z = np.asarray(Z, dtype=complex)
        vec = Z.ndim == 1
        if vec:
            Z = Z[:, None]
        Y, ls = _exp_herm_apply(self.hermitian_generator(cp.u), Z, shift)
        if frob(cp.k - np.eye(cp.k.shape[0])) > 0:
            L = unitary_log(cp.k)
            B = self.d_rho(L)
            w, Q = np.linalg.eigh(-1j * skew_part(B))
            Y = (Q * np.exp(1j * w)) @ (dagger(Q) @ Y)
        if vec:
            return Y[:, 0], ls[0]
        return Y, ls


# ---------------------------------------------------------------------------
# scenes


@dataclass(frozen=True)
class TangentData:
    vector: np.ndarray
    norm: float


@dataclass(frozen=True)
class GrowthReport:
    C: float
    samples: int
    worst_action_ratio: float
    worst_moment_ratio: float

    def as_dict(self) -> dict:
        return {
            "C": self.C,
            "samples": self.samples,
            "worst_action_ratio": self.worst_action_ratio,
            "worst_moment_ratio": self.worst_moment_ratio,
        }


class Scene:
    """Common interface; subclasses fill in the geometry."""

    kind: str = "abstract"
    algebra: LieAlgebra
    tol: Tolerances = DEFAULT

    @property
    def n(self) -> int:
        return self.algebra.n

    # group side -------------------------------------------------------
    def act(self, g, x):
        raise NotImplementedError

    def tangent(self, X, x) -> np.ndarray:
        """d/dt|0 exp(t X) x for X in g (complex)."""
        raise NotImplementedError

    def complex_structure(self, x, v) -> np.ndarray:
        raise NotImplementedError

    def metric_norm(self, x, v) -> float:
        raise NotImplementedError

    def point_distance(self, x, y) -> float:
        raise NotImplementedError

    def base_point(self):
        raise NotImplementedError

    def random_point(self, rng: np.random.Generator):
        raise NotImplementedError

    def validate_point(self, x):
        raise NotImplementedError

    # moment side ------------------------------------------------------
    def mu_pair(self, x, s) -> float:
        raise NotImplementedError

    def moment(self, x) -> np.ndarray:
        """The element M of k with <M, s> = mu_s(x)."""
        c = np.array([self.mu_pair(x, b) for b in self.algebra.basis])
        return self.algebra.element(c)

    def max_weight(self, x, s) -> float:
        raise NotImplementedError

    def special_directions(self, x) -> list[np.ndarray]:
        """Directions where max_weight is non-smooth (used by the samplers)."""
        return []

    # derived ----------------------------------------------------------
    def inf_action(self, s, x) -> TangentData:
        v = self.tangent(s, x)
        return TangentData(v, self.metric_norm(x, v))

    def stabilizer_dim(self, x, rank_tol: float = 1e-8) -> int:
        """Dimension of {s in k : xi_s(x) = 0}."""
        cols = [np.ravel(self.tangent(b, x)) for b in self.algebra.basis]
        M = np.array(cols).T
        M = np.vstack([M.real, M.imag])
        sv = np.linalg.svd(M, compute_uv=False)
        rank = int(np.sum(sv > rank_tol * max(1.0, sv[0] if sv.size else 1.0)))
        return self.algebra.dim - rank

    def growth_constant(self) -> float:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


def check_growth_bounds(scene: Scene, samples: int = 200, C: float | None = None,
                        rng: np.random.Generator | None = None) -> GrowthReport:
    """Sample (x, s) and check |xi_s| <= C|s|(1+d) and |mu| <= C(1+d^2)."""
    rng = rng or np.random.default_rng(0)
    C = scene.growth_constant() if C is None else C
    x0 = scene.base_point()
    worst_a = worst_m = 0.0
    for i in range(samples):
        x = scene.random_point(rng)
        if scene.kind == "flat":
            x = x * rng.uniform(0, 10)
        s = scene.algebra.random_element(rng)
        d = scene.point_distance(x, x0)
        xi = scene.inf_action(s, x).norm
        mu = frob(scene.moment(x))
        ra = xi / (frob(s) * (1 + d))
        rm = mu / (1 + d * d)
        worst_a, worst_m = max(worst_a, ra), max(worst_m, rm)
        if xi > C * frob(s) * (1 + d) * (1 + 1e-12) or mu > C * (1 + d * d) * (1 + 1e-12):
            raise BoundViolated(
                f"growth bound fails at sample {i} with C = {C}",
                witness={"x": x, "s": s, "xi": xi, "mu": mu, "d": d},
            )
    return GrowthReport(C, samples, worst_a, worst_m)


# ---------------------------------------------------------------------------
# linear models


class _LinearScene(Scene):
    def __init__(self, rep: Representation, tol: Tolerances = DEFAULT, validate: bool = True):
        if validate:
            rep.validate(tol)
        self.rep = rep
        self.algebra = rep.algebra
        self.tol = tol

    @property
    def N(self) -> int:
        return self.rep.N

    @property
    def weights(self):
        return self.rep.weights

    def tangent(self, X, x) -> np.ndarray:
        return self.rep.d_rho(X) @ x

    def complex_structure(self, x, v) -> np.ndarray:
        return 1j * v

    def _support_spectrum(self, x, s):
        A = self.rep.hermitian_generator(s)
        spec = herm_eig(A, tol=self.tol)
        c = dagger(spec.basis) @ x
        o = spec.offsets()
        present = [np.linalg.norm(c[o[j]:o[j + 1]]) > self.tol.supp_tol * max(1.0, np.linalg.norm(x))
                   for j in range(spec.r)]
        return spec, present

    def to_dict(self) -> dict:
        d = {"format": "kempfness-scene", "version": 1, "kind": self.kind}
        if self.rep.weights is not None:
            d["weights"] = self.rep.weights.tolist()
        else:
            d["algebra"] = {"kind": self.algebra.kind, "n": self.algebra.n}
            d["generators"] = [[[[z.real, z.imag] for z in row] for row in A] for A in self.rep.images]
        return d


class ProjectiveScene(_LinearScene):
    kind = "projective"

    def validate_point(self, x):
        z = np.asarray(x, dtype=complex).ravel()
        if z.shape != (self.N,) or not np.all(np.isfinite(z)):
            raise ValidationError(f"projective point must be a finite vector of length {self.N}")
        nz = np.linalg.norm(z)
        if nz == 0:
            raise ValidationError("projective point must be nonzero")
        return z / nz

    def base_point(self):
        z = np.zeros(self.N, dtype=complex)
        z[0] = 1
        return z

    def random_point(self, rng):
        z = rng.standard_normal(self.N) + 1j * rng.standard_normal(self.N)
        return z / np.linalg.norm(z)

    def act(self, g, x):
        y, _ = self.rep.group_apply(g, x, shift=True, tol=self.tol)
        ny = np.linalg.norm(y)
        if not np.isfinite(ny) or ny == 0:
            raise Overflow("projective action lost the representative")
        return y / ny

    def tangent(self, X, x):
        v = self.rep.d_rho(X) @ x
        return v - x * np.vdot(x, v)

    def metric_norm(self, x, v) -> float:
        # twice the round Fubini-Study metric on horizontal vectors
        h = v - x * np.vdot(x, v)
        return float(math.sqrt(2.0) * np.linalg.norm(h))

    def point_distance(self, x, y) -> float:
        x = np.asarray(x) / np.linalg.norm(x)
        y = np.asarray(y) / np.linalg.norm(y)
        ip = np.vdot(x, y)
        phase = ip / abs(ip) if abs(ip) > 0 else 1.0
        chord = float(np.linalg.norm(y - phase * x))
        return float(math.sqrt(2.0) * 2.0 * math.asin(min(1.0, chord / 2.0)))

    def mu_pair(self, x, s) -> float:
        A = self.rep.hermitian_generator(s)
        return float(np.real(np.vdot(x, A @ x)) / np.real(np.vdot(x, x)))

    def max_weight(self, x, s) -> float:
        spec, present = self._support_spectrum(x, s)
        return float(max(a for a, p in zip(spec.values, present) if p))

    def growth_constant(self) -> float:
        c = self.rep.op_norm_bound()
        return 1.0 + math.sqrt(2.0) * c


class FlatScene(_LinearScene):
    kind = "flat"

    def validate_point(self, x):
        z = np.asarray(x, dtype=complex).ravel()
        if z.shape != (self.N,) or not np.all(np.isfinite(z)):
            raise ValidationError(f"flat point must be a finite vector of length {self.N}")
        return z

    def base_point(self):
        return np.zeros(self.N, dtype=complex)

    def random_point(self, rng):
        return rng.standard_normal(self.N) + 1j * rng.standard_normal(self.N)

    def act(self, g, x):
        y, _ = self.rep.group_apply(g, x, shift=False, tol=self.tol)
        return y

    def metric_norm(self, x, v) -> float:
        return float(np.linalg.norm(v))

    def point_distance(self, x, y) -> float:
        return float(np.linalg.norm(np.asarray(x) - np.asarray(y)))

    def mu_pair(self, x, s) -> float:
        A = self.rep.hermitian_generator(s)
        return 0.5 * float(np.real(np.vdot(x, A @ x)))

    def max_weight(self, x, s) -> float:
        spec, present = self._support_spectrum(x, s)
        ctol = self.tol.cluster_rel * (1 + float(np.max(np.abs(spec.values))))
        if any(p and a > ctol for a, p in zip(spec.values, present)):
            return math.inf
        return 0.0

    def growth_constant(self) -> float:
        c = self.rep.op_norm_bound()
        return max(c, c * c + frob(self.moment(self.base_point())), 1e-300)


# ---------------------------------------------------------------------------
# tuples of points on the sphere


def spinor(p: np.ndarray) -> np.ndarray:
    """Unit spinor psi with psi^* sigma psi = p (choice of phase is arbitrary)."""
    x1, x2, x3 = p
    if x3 >= 0:
        psi = np.array([1 + x3, x1 + 1j * x2])
    else:
        psi = np.array([x1 - 1j * x2, 1 - x3])
    return psi / np.linalg.norm(psi)


def from_spinor(psi: np.ndarray) -> np.ndarray:
    psi = psi / np.linalg.norm(psi)
    a, b = psi
    ab = np.conj(a) * b
    return np.array([2 * ab.real, 2 * ab.imag, abs(a) ** 2 - abs(b) ** 2])


def su2_to_so3(k: np.ndarray) -> np.ndarray:
    """Rotation R with k (p . sigma) k^* = (R p) . sigma."""
    R = np.empty((3, 3))
    for j in range(3):
        M = k @ PAULI[j] @ dagger(k)
        for i in range(3):
            R[i, j] = 0.5 * np.real(np.trace(PAULI[i] @ M))
    return R


class SphereTupleScene(Scene):
    """(S^2)^m with the diagonal SU(2) action; moment map = centre of mass.

    su(2) is identified with R^3 through the basis b_k = -i sigma_k / sqrt(2):
    s = sum c_k b_k has <mu(x), s> = c . (mean of the x_i), generates the
    rotation with angular velocity sqrt(2) c, and exp(i t s) pushes every
    point not at -c towards +c.  The round metric is scaled by
    1 / (sqrt(2) m) so that d/dt mu_s(exp(i t s) x) = |xi_s|^2.
    """

    kind = "sphere"

    def __init__(self, m: int, tol: Tolerances = DEFAULT):
        if m < 1:
            raise ValidationError("sphere tuple needs at least one point")
        self.m = int(m)
        self.algebra = LieAlgebra.su(2)
        self.tol = tol

    @property
    def metric_scale(self) -> float:
        return 1.0 / (math.sqrt(2.0) * self.m)

    def vec(self, s) -> np.ndarray:
        """Coordinates c of s in R^3 (|c| = |s| for s in su(2))."""
        return self.algebra.coords(s)

    def element(self, c) -> np.ndarray:
        return self.algebra.element(np.asarray(c, dtype=float))

    def validate_point(self, x):
        P = np.asarray(x, dtype=float)
        if P.shape != (self.m, 3) or not np.all(np.isfinite(P)):
            raise ValidationError(f"sphere point must be an array of {self.m} 3-vectors")
        nrm = np.linalg.norm(P, axis=1)
        if np.any(np.abs(nrm - 1) > 1e-8):
            raise ValidationError("sphere points must be unit vectors")
        return P / nrm[:, None]

    def base_point(self):
        P = np.zeros((self.m, 3))
        P[:, 2] = 1
        return P

    def random_point(self, rng):
        P = rng.standard_normal((self.m, 3))
        return P / np.linalg.norm(P, axis=1)[:, None]

    def act(self, g, x):
        g = as_group(g)
        cp = polar_cartan(g, self.tol)
        Psi = np.array([spinor(p) for p in x]).T  # 2 x m
        Y, _ = _exp_herm_apply(1j * cp.u, Psi, shift=True)
        Y = cp.k @ Y
        return np.array([from_spinor(Y[:, i]) for i in range(self.m)])

    def tangent(self, X, x):
        X = np.asarray(X, dtype=complex)
        out = np.empty((self.m, 3))
        for i, p in enumerate(x):
            psi = spinor(p)
            Xp = X @ psi
            for k in range(3):
                out[i, k] = 2 * np.real(np.vdot(PAULI[k] @ psi, Xp))
            out[i] -= p * 2 * np.real(np.vdot(psi, Xp))
        return out

    def complex_structure(self, x, v):
        return np.cross(x, v)

    def metric_norm(self, x, v) -> float:
        return float(math.sqrt(self.metric_scale * np.sum(np.asarray(v) ** 2)))

    def point_distance(self, x, y) -> float:
        chord = np.linalg.norm(np.asarray(x) - np.asarray(y), axis=1)
        ang = 2.0 * np.arcsin(np.minimum(1.0, chord / 2.0))
        return float(math.sqrt(self.metric_scale * np.sum(ang ** 2)))

    def center_of_mass(self, x) -> np.ndarray:
        return np.mean(np.asarray(x), axis=0)

    def mu_pair(self, x, s) -> float:
        return float(self.center_of_mass(x) @ self.vec(s))

    def moment(self, x) -> np.ndarray:
        return self.element(self.center_of_mass(x))

    def max_weight(self, x, s) -> float:
        c = self.vec(s)
        r = float(np.linalg.norm(c))
        if r == 0:
            return 0.0
        down = -c / r
        at = np.linalg.norm(np.asarray(x) - down[None, :], axis=1) <= self.tol.angle_tol
        k = int(np.sum(at))
        return r * ((self.m - k) - k) / self.m

    def special_directions(self, x) -> list[np.ndarray]:
        return [self.element(-p) for p in np.asarray(x)]

    def growth_constant(self) -> float:
        c = float(math.sqrt(sum(np.linalg.norm(b, 2) ** 2 for b in self.algebra.basis)))
        return 1.0 + math.sqrt(2.0) * c

    def rotate(self, k, x):
        """Rigid rotation of the tuple by the image of k in SO(3)."""
        return np.asarray(x) @ su2_to_so3(np.asarray(k)).T

    def to_dict(self) -> dict:
        return {"format": "kempfness-scene", "version": 1, "kind": "sphere", "m": self.m}


def make_scene(kind: str, **kw) -> Scene:
    if kind == "sphere":
        return SphereTupleScene(kw["m"])
    rep = kw["rep"]
    return ProjectiveScene(rep) if kind == "projective" else FlatScene(rep)


def torus_scene(weights, flat: bool = False) -> Scene:
    rep = Representation.torus(weights)
    return FlatScene(rep) if flat else ProjectiveScene(rep)


def random_k(scene: Scene, rng: np.random.Generator) -> np.ndarray:
    return scene.algebra.haar(rng)


def kabsch(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Rotation R in SO(3) minimising sum |R p_i - q_i|^2."""
    H = np.asarray(P).T @ np.asarray(Q)
    U, _, Vt = np.linalg.svd(H)
    d = np.sign(np.linalg.det(Vt.T @ U.T))
    D = np.diag([1.0, 1.0, d if d != 0 else 1.0])
    return Vt.T @ D @ U.T
