"""The symmetric space K\\G and its boundary at infinity.

K is realised inside U(n) (the full unitary group, SU(n), or a diagonal
torus) and G is its complexification inside GL(n, C).  A boundary point is
a unit skew-Hermitian ``s``, standing for the class of the geodesic ray
``t -> [exp(i t s)]``.  G acts on the right on boundary points; for matrix
groups the action is computed from eigenvalue filtrations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import mpmath
import numpy as np

from .config import DEFAULT, Tolerances
from .errors import ConnectFailure, DegenerateFiltration, SpectrumMismatch
from .matcore import (
    GroupElement,
    SpectralData,
    Subspace,
    as_group,
    as_skew_hermitian,
    cartan_log,
    dagger,
    frob,
    herm_eig,
    inner,
    mat_exp,
    orthonormalize,
    random_unitary,
    skew_part,
    subspace_complement,
    subspace_image,
    subspace_intersect,
)

# ---------------------------------------------------------------------------
# compact Lie algebras inside u(n)

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """A real subalgebra k of u(n) with a Frobenius-orthonormal basis.

    The basis is also a complex orthonormal basis of g = k (x) C, which is
    what the adjoint representation is written in.
    """

    kind: str  # "u", "su" or "torus"
    n: int
    basis: np.ndarray  # (d, n, n)

    @classmethod
    def u(cls, n: int) -> "LieAlgebra":
        mats = []
        for j in range(n):
            E = np.zeros((n, n), dtype=complex)
            E[j, j] = 1j
            mats.append(E)
        for j in range(n):
            for k in range(j + 1, n):
                A = np.zeros((n, n), dtype=complex)
                A[j, k], A[k, j] = 1, -1
                mats.append(A / np.sqrt(2))
                B = np.zeros((n, n), dtype=complex)
                B[j, k], B[k, j] = 1j, 1j
                mats.append(B / np.sqrt(2))
        return cls("u", n, np.array(mats))

    @classmethod
    def su(cls, n: int) -> "LieAlgebra":
        if n == 2:
            # -i sigma_k / sqrt(2): generates the rotation about the k-th axis
            return cls("su", 2, np.array([-1j * P / np.sqrt(2) for P in PAULI]))
        full = LieAlgebra.u(n).basis
        traceless = [A for A in full[n:]]
        for j in range(1, n):
            D = np.zeros((n, n), dtype=complex)
            D[:j, :j] = np.eye(j)
            D[j, j] = -j
            traceless.append(1j * D / np.linalg.norm(D))
        return cls("su", n, np.array(traceless))

    @classmethod
    def torus(cls, d: int) -> "LieAlgebra":
        """Diagonal torus; basis element k is -i E_kk so that i b_k = E_kk."""
        mats = []
        for j in range(d):
            E = np.zeros((d, d), dtype=complex)
            E[j, j] = -1j
            mats.append(E)
        return cls("torus", d, np.array(mats))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def abelian(self) -> bool:
        return self.kind == "torus" or (self.kind == "u" and self.n == 1)

    def coords(self, A) -> np.ndarray:
        """Real coordinates of the orthogonal projection of A onto k."""
        A = skew_part(np.asarray(A, dtype=complex))
        return np.array([inner(A, b) for b in self.basis])

    def complex_coords(self, X) -> np.ndarray:
        """Complex coordinates of X in g = k (x) C (tr(b^* X) per basis element)."""
        X = np.asarray(X, dtype=complex)
        return np.einsum("kij,ij->k", self.basis.conj(), X)

    def element(self, c) -> np.ndarray:
        return np.tensordot(np.asarray(c), self.basis, axes=1)

    def project(self, A) -> np.ndarray:
        return self.element(self.coords(A))

    def contains(self, A, atol: float = 1e-9) -> bool:
        A = np.asarray(A, dtype=complex)
        return frob(A - self.element(self.complex_coords(A))) <= atol * (1 + frob(A))

    def ad_matrix(self, u) -> np.ndarray:
        """Matrix of ad(u) on g in the basis of k; skew-Hermitian."""
        u = np.asarray(u, dtype=complex)
        cols = [self.complex_coords(u @ b - b @ u) for b in self.basis]
        return np.array(cols).T

    def same_orbit(self, a, b, atol: float = 1e-8) -> bool:
        """Whether b lies in the adjoint K-orbit of a."""
        if self.abelian:
            return frob(np.asarray(a) - np.asarray(b)) <= atol
        sa = np.linalg.eigvalsh(1j * np.asarray(a))
        sb = np.linalg.eigvalsh(1j * np.asarray(b))
        return bool(np.all(np.abs(sa - sb) <= atol * (1 + np.max(np.abs(sa)))))

    def random_element(self, rng: np.random.Generator, unit: bool = False) -> np.ndarray:
        c = rng.standard_normal(self.dim)
        if unit:
            c /= np.linalg.norm(c)
        return self.element(c)

    def random_unit(self, rng: np.random.Generator) -> np.ndarray:
        return self.random_element(rng, unit=True)

    def haar(self, rng: np.random.Generator) -> np.ndarray:
        """Haar-random element of K."""
        if self.kind == "torus":
            return np.diag(np.exp(1j * rng.uniform(-np.pi, np.pi, self.n)))
        k = random_unitary(self.n, rng)
        if self.kind == "su":
            k = k / np.linalg.det(k) ** (1.0 / self.n)
        return k

    def random_group(self, rng: np.random.Generator, max_log_cond: float = math.log(1e3)) -> GroupElement:
        """Random element k exp(i u) of G with cond <= exp(max_log_cond)."""
        k = self.haar(rng)
        u = self.random_element(rng)
        w = np.linalg.eigvalsh(1j * u)
        # bounding 2 max|w| as well keeps the central part from blowing up
        scale = max(float(w[-1] - w[0]), 2 * float(np.max(np.abs(w))))
        target = rng.uniform(0.2, 1.0) * max_log_cond
        if scale > 0:
            u = u * (target / scale)
        return GroupElement(k @ mat_exp(1j * u))


def algebra_for(n: int, kind: str = "u") -> LieAlgebra:
    return {"u": LieAlgebra.u, "su": LieAlgebra.su, "torus": LieAlgebra.torus}[kind](n)


# ---------------------------------------------------------------------------
# points of K\G and of the boundary


@dataclass(frozen=True)
class BoundaryPoint:
    """Unit skew-Hermitian ``s`` standing for the boundary point e_s."""

    s: np.ndarray

    def __post_init__(self):
        s = as_skew_hermitian(self.s)
        if abs(frob(s) - 1.0) > 1e-12:
            raise ValueError(f"boundary point needs unit norm, got {frob(s)!r}")
        object.__setattr__(self, "s", s)

    @classmethod
    def normalized(cls, s) -> "BoundaryPoint":
        s = np.asarray(s, dtype=complex)
        return cls(s / frob(s))


@dataclass(frozen=True)
class GeodesicRay:
    direction: np.ndarray
    base: GroupElement

    def at(self, t: float) -> GroupElement:
        return GroupElement.exp_i(self.direction, t) @ self.base


@dataclass(frozen=True)
class Filtration:
    """Ascending chain W^0 < ... < W^r = C^n with eigenvalue labels."""

    steps: tuple[Subspace, ...]
    labels: np.ndarray

    @classmethod
    def ascending(cls, spec: SpectralData) -> "Filtration":
        steps = tuple(Subspace(spec.flag_basis(j)) for j in range(spec.r))
        return cls(steps, spec.values)


def distance(g, h, tol: Tolerances = DEFAULT) -> float:
    """Invariant distance between [g] and [h] in K\\G.

    Uses right invariance: d([g], [h]) = d([1], [h g^-1]) = |log(h g^-1)|.
    """
    g, h = as_group(g), as_group(h)
    if g.known_cartan is not None and not np.any(g.known_cartan.u):
        # g is in K, so [g] = [1]
        return frob(cartan_log(h, tol))
    return frob(cartan_log(h @ g.inv(), tol))


def distance_pd(g, h) -> float:
    """Same distance written with P = g*g, Q = h*h: |log(P^-1/2 Q P^-1/2)| / 2."""
    import scipy.linalg

    G, H = as_group(g).matrix, as_group(h).matrix
    P, Q = dagger(G) @ G, dagger(H) @ H
    w = scipy.linalg.eigh(Q, P, eigvals_only=True)
    return 0.5 * float(np.linalg.norm(np.log(w)))


# ---------------------------------------------------------------------------
# the boundary action


def _spectrum(s, tol: Tolerances) -> SpectralData:
    return herm_eig(1j * np.asarray(s, dtype=complex), tol=tol)


def boundary_action(s, g, tol: Tolerances = DEFAULT) -> np.ndarray:
    """The skew-Hermitian ``s . g`` with e_s . g = e_{s.g}.

    With V^j the sum of the eigenspaces of ``i s`` for its j smallest
    eigenvalues, the pieces (g^-1 V^{j-1})^perp ∩ g^-1 V^j are mutually
    orthogonal, and ``s . g`` acts on the j-th one as -i lambda_j.
    """
    s = as_skew_hermitian(s, tol)
    g = as_group(g)
    spec = _spectrum(s, tol)
    ginv = g.inv()
    flags = [Subspace.zero(spec.n)] + [
        subspace_image(ginv, Subspace(spec.flag_basis(j))) for j in range(spec.r)
    ]
    rho = np.zeros_like(s)
    pieces = []
    for j in range(spec.r):
        piece = subspace_intersect(subspace_complement(flags[j]), flags[j + 1],
                                   rank_rel=tol.rank_rel)
        if piece.dim != spec.multiplicities[j]:
            raise DegenerateFiltration(
                f"piece {j} has dimension {piece.dim}, expected {spec.multiplicities[j]}"
            )
        pieces.append(piece.basis)
        rho = rho - 1j * spec.values[j] * piece.projector()
    B = np.hstack(pieces)
    if frob(dagger(B) @ B - np.eye(spec.n)) > 1e-8:
        raise DegenerateFiltration("pieces are not mutually orthogonal")
    return skew_part(rho)


def boundary_action_limit(s, g, tau: float, tol: Tolerances = DEFAULT) -> np.ndarray:
    """tau^-1 log(exp(i tau s) g) in double precision (Cartan logarithm)."""
    s = as_skew_hermitian(s, tol)
    h = GroupElement(mat_exp(1j * tau * s)) @ as_group(g)
    return cartan_log(h, tol) / tau


def _mp_log_ray(s, g, tau: float, dps: int) -> np.ndarray:
    with mpmath.workdps(dps):
        H = mpmath.matrix((1j * np.asarray(s)).tolist())
        H = (H + H.H) / 2
        w, Q = mpmath.eighe(H)
        n = H.rows
        E = Q * mpmath.diag([mpmath.exp(tau * w[i]) for i in range(n)]) * Q.H
        h = E * mpmath.matrix(as_group(g).matrix.tolist())
        P = h.H * h
        P = (P + P.H) / 2
        pw, pq = mpmath.eighe(P)
        L = pq * mpmath.diag([mpmath.log(pw[i]) / 2 for i in range(n)]) * pq.H
        # log(g) = u with i u = log(g* g) / 2
        out = np.array([[complex(-1j * complex(L[i, j])) for j in range(n)] for i in range(n)])
    return out / tau


def boundary_action_oracle(s, g, taus=(25.0, 50.0, 100.0)) -> np.ndarray:
    """Richardson-extrapolated tau^-1 log(exp(i tau s) g) on a doubling ladder.

    Evaluated in extended precision, because exp(i tau s) g is far too
    ill-conditioned for double precision at these tau.  The finite-tau error
    is c / tau up to exponentially small terms; two Richardson levels are
    applied.
    """
    s = as_skew_hermitian(s)
    w = np.linalg.eigvalsh(1j * s)
    G = as_group(g).matrix
    sv = np.linalg.svd(G, compute_uv=False)
    log10_cond = math.log10(sv[0] / sv[-1])
    vals = []
    for tau in taus:
        dps = int(40 + 2 * tau * (w[-1] - w[0]) / math.log(10) + 4 * log10_cond)
        vals.append(_mp_log_ray(s, G, tau, dps))
    r1 = [2 * vals[i + 1] - vals[i] for i in range(len(vals) - 1)]
    if len(r1) == 1:
        return skew_part(r1[0])
    r2 = (4 * r1[1] - r1[0]) / 3
    return skew_part(r2)


# ---------------------------------------------------------------------------
# parabolics, opposedness, geodesic connectedness


def parabolic_contains(s, g, tol: float = 1e-10) -> bool:
    """Whether exp(i t s) g exp(-i t s) stays bounded as t -> infinity.

    Equivalently, in the ascending eigenbasis of ``i s`` every block g_jk with
    lambda_j > lambda_k vanishes (g preserves the ascending flag).
    """
    spec = _spectrum(s, DEFAULT)
    G = as_group(g).matrix
    M = dagger(spec.basis) @ G @ spec.basis
    o = spec.offsets()
    scale = frob(G)
    for j in range(spec.r):
        for k in range(j):
            if frob(M[o[j]:o[j + 1], o[k]:o[k + 1]]) > tol * scale:
                return False
    return True


@dataclass(frozen=True)
class OpposednessCertificate:
    spectrum: np.ndarray            # lambda_0 < ... < lambda_r
    pieces: tuple[Subspace, ...]    # E_p = W_a^p ∩ W_b^{r-p}
    dims: tuple[int, ...]
    rank: int

    @property
    def total(self) -> int:
        return int(sum(self.dims))

    def as_dict(self) -> dict:
        return {
            "spectrum": [float(x) for x in self.spectrum],
            "dims": list(self.dims),
            "rank": self.rank,
        }


def filtration_test(a, b, tol: Tolerances = DEFAULT, rank_tol: float | None = None):
    """Opposedness of two skew-Hermitian endomorphisms of the same space.

    ``i a`` and ``-i b`` must share a spectrum lambda_0 < ... < lambda_r, and
    the ascending filtrations W_a, W_b must satisfy
    V = sum_p W_a^p ∩ W_b^{r-p} as a direct sum.
    Returns ``(ok, certificate or None)``.
    """
    sa = herm_eig(1j * np.asarray(a), tol=tol)
    sb = herm_eig(-1j * np.asarray(b), tol=tol)
    scale = 1.0 + max(np.max(np.abs(sa.values)), np.max(np.abs(sb.values)))
    if not sa.same_spectrum(sb, 1e-8 * scale):
        return False, None
    r = sa.r - 1
    N = sa.n
    pieces = []
    for p in range(r + 1):
        Wa = Subspace(sa.flag_basis(p))
        # W_b^{r-p} = eigenvalues of -i b that are >= lambda_p
        Wb = Subspace(sb.basis[:, sb.offsets()[p]:])
        pieces.append(subspace_intersect(Wa, Wb, rank_tol, tol.rank_rel))
    dims = tuple(P.dim for P in pieces)
    B = np.hstack([P.basis for P in pieces])
    rank = orthonormalize(B).shape[1] if B.shape[1] else 0
    cert = OpposednessCertificate(sa.values, tuple(pieces), dims, rank)
    return (sum(dims) == N and rank == N), cert


def opposed(u, v, use_adjoint: bool = True, algebra: LieAlgebra | None = None,
            tol: Tolerances = DEFAULT):
    """Opposedness of u, v in k.

    With ``use_adjoint`` (the definition for elements of k): -v must lie in
    the adjoint orbit of u and ad(u), ad(v) must be opposed endomorphisms of
    g.  Otherwise the filtration test is applied in the defining
    representation.
    """
    u = as_skew_hermitian(u, tol)
    v = as_skew_hermitian(v, tol)
    if u.shape != v.shape:
        raise ValueError("dimension mismatch")
    if not use_adjoint:
        return filtration_test(u, v, tol)
    alg = algebra or LieAlgebra.u(u.shape[0])
    if not alg.same_orbit(u, -v):
        return False, None
    return filtration_test(alg.ad_matrix(u), alg.ad_matrix(v), tol)


def geodesically_connected(u, v, algebra: LieAlgebra | None = None,
                           tol: Tolerances = DEFAULT) -> bool:
    u = u.s if isinstance(u, BoundaryPoint) else u
    v = v.s if isinstance(v, BoundaryPoint) else v
    return opposed(u, v, True, algebra, tol)[0]


def connect_geodesic(u, v, algebra: LieAlgebra | None = None,
                     tol: Tolerances = DEFAULT) -> GroupElement:
    """An h in P_u with v . h = -u.

    Then t -> [exp(i t u) h^-1] runs from e_v (t -> -inf) to e_u (t -> inf).
    h maps each eigenspace U_p of ``i u`` onto E_p = W_u^p ∩ W_v^{r-p},
    with the basis of E_p aligned to U_p so that h = 1 when v = -u.
    """
    u = u.s if isinstance(u, BoundaryPoint) else as_skew_hermitian(u, tol)
    v = v.s if isinstance(v, BoundaryPoint) else as_skew_hermitian(v, tol)
    if not geodesically_connected(u, v, algebra, tol):
        raise ConnectFailure("boundary points are not geodesically connected")
    ok, cert = filtration_test(u, v, tol)
    if not ok:
        raise ConnectFailure("no adapted basis in the defining representation")
    spec = _spectrum(u, tol)
    n = spec.n
    h = np.zeros((n, n), dtype=complex)
    for p in range(spec.r):
        Up = spec.cluster_basis(p)
        Ep = cert.pieces[p].basis
        if Ep.shape[1] != Up.shape[1]:
            raise ConnectFailure(f"piece {p} has dimension {Ep.shape[1]}, expected {Up.shape[1]}")
        W, _, Vh = np.linalg.svd(dagger(Ep) @ Up)
        h += (Ep @ (W @ Vh)) @ dagger(Up)
    if algebra is not None and algebra.kind == "su":
        h = h / np.linalg.det(h) ** (1.0 / n)
    h_el = GroupElement(h)
    if not parabolic_contains(u, h_el, tol.eps_boundary):
        raise ConnectFailure("constructed h is not in the parabolic of u")
    err = frob(boundary_action(v, h_el, tol) + u)
    if err > tol.eps_boundary * (1 + frob(u)):
        raise ConnectFailure(f"v . h differs from -u by {err:.2e}")
    return h_el


# ---------------------------------------------------------------------------
# tori


def rational_rank(values) -> int:
    """Dimension of the Q-span of a list of rational vectors (or rationals)."""
    rows = [[Fraction(x)] if not isinstance(x, (list, tuple)) else [Fraction(y) for y in x]
            for x in values]
    rank = 0
    if not rows:
        return 0
    ncols = len(rows[0])
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def torus_dim(s, denominators, tol: Tolerances = DEFAULT) -> int:
    """dim of the closure of {exp(t s)}: the Q-rank of the spectrum of i s.

    ``denominators[j]`` is the exact denominator of the j-th smallest
    distinct eigenvalue; numerators are recovered by rounding and must match
    the numeric spectrum within the clustering tolerance.
    """
    spec = _spectrum(s, tol)
    if len(denominators) != spec.r:
        raise SpectrumMismatch(f"{spec.r} distinct eigenvalues, {len(denominators)} denominators")
    exact = []
    ctol = tol.cluster_rel * (1 + float(np.max(np.abs(spec.values))))
    for lam, q in zip(spec.values, denominators):
        p = round(lam * q)
        if abs(lam - p / q) > ctol:
            raise SpectrumMismatch(f"eigenvalue {lam!r} is not a multiple of 1/{q}")
        exact.append(Fraction(p, q))
    return rational_rank(exact)
