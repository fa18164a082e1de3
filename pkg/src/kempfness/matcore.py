"""Dense complex linear algebra kernel.

Eigendecompositions with eigenvalue clustering, matrix exponentials, the
Cartan (polar) decomposition ``g = k exp(i u)`` of GL(n, C), and
tolerance-aware subspace arithmetic.  Everything here is a pure function of
its inputs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .config import DEFAULT, Tolerances
from .errors import EigFailure, NotHermitian, Overflow, Singular

# ---------------------------------------------------------------------------
# basic helpers


def dagger(A: np.ndarray) -> np.ndarray:
    return A.conj().T


def frob(A: np.ndarray) -> float:
    return float(np.linalg.norm(A))


def inner(A: np.ndarray, B: np.ndarray) -> float:
    """Real Frobenius pairing Re tr(A B*)."""
    return float(np.real(np.vdot(B, A)))


def hermitian_part(A):
    return 0.5 * (A + dagger(A))


def skew_part(A):
    return 0.5 * (A - dagger(A))


def is_hermitian(H, tol: Tolerances = DEFAULT) -> bool:
    return frob(H - dagger(H)) <= tol.eps_sym * (1.0 + frob(H))


def is_skew_hermitian(A, tol: Tolerances = DEFAULT) -> bool:
    return frob(A + dagger(A)) <= tol.eps_sym * (1.0 + frob(A))


def as_skew_hermitian(A, tol: Tolerances = DEFAULT) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not is_skew_hermitian(A, tol):
        raise NotHermitian("matrix is not skew-Hermitian")
    return skew_part(A)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian with phase fix."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_skew_hermitian(n: int, rng: np.random.Generator, unit: bool = False) -> np.ndarray:
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    A = skew_part(Z)
    return A / frob(A) if unit else A


# ---------------------------------------------------------------------------
# spectra


@dataclass(frozen=True)
class SpectralData:
    """Clustered spectrum of a Hermitian matrix.

    ``values`` are the cluster centres in ascending order, ``basis`` is a
    unitary matrix whose columns are grouped cluster by cluster.
    """

    values: np.ndarray
    multiplicities: tuple[int, ...]
    basis: np.ndarray
    raw: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def r(self) -> int:
        return len(self.values)

    def offsets(self) -> list[int]:
        return list(np.cumsum((0,) + self.multiplicities))

    def cluster_basis(self, j: int) -> np.ndarray:
        o = self.offsets()
        return self.basis[:, o[j]:o[j + 1]]

    def flag_basis(self, j: int) -> np.ndarray:
        """Orthonormal basis of the sum of clusters 0..j."""
        return self.basis[:, : self.offsets()[j + 1]]

    def projector(self, j: int) -> np.ndarray:
        B = self.cluster_basis(j)
        return B @ dagger(B)

    def reconstruct(self) -> np.ndarray:
        return (self.basis * self.raw) @ dagger(self.basis)

    def same_spectrum(self, other: "SpectralData", atol: float) -> bool:
        return (self.multiplicities == other.multiplicities
                and bool(np.all(np.abs(self.values - other.values) <= atol)))


def default_cluster_tol(w: np.ndarray) -> float:
    return DEFAULT.cluster_rel * (1.0 + float(np.max(np.abs(w), initial=0.0)))


def herm_eig(H, cluster_tol: float | None = None, tol: Tolerances = DEFAULT) -> SpectralData:
    """Eigendecomposition of a Hermitian matrix with clustered eigenvalues.

    Consecutive eigenvalues closer than ``cluster_tol`` are merged into one
    cluster, whose value is their mean.
    """
    H = np.asarray(H, dtype=complex)
    if not is_hermitian(H, tol):
        raise NotHermitian("matrix is not Hermitian")
    try:
        w, Q = np.linalg.eigh(hermitian_part(H))
    except np.linalg.LinAlgError as exc:
        raise EigFailure(str(exc)) from exc
    if cluster_tol is None:
        cluster_tol = tol.cluster_rel * (1.0 + float(np.max(np.abs(w), initial=0.0)))
    groups: list[list[int]] = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] > cluster_tol:
            groups.append([i])
        else:
            groups[-1].append(i)
    values = np.array([w[g].mean() for g in groups])
    mult = tuple(len(g) for g in groups)
    return SpectralData(values=values, multiplicities=mult, basis=Q, raw=w)


# ---------------------------------------------------------------------------
# exponential and Cartan decomposition


def mat_exp(A) -> np.ndarray:
    """Matrix exponential.

    Hermitian and skew-Hermitian inputs go through the spectral theorem,
    anything else through scipy's scaling-and-squaring Pade.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("mat_exp needs a square matrix")
    scale = 1.0 + frob(A)
    if frob(A - dagger(A)) <= 1e-13 * scale:
        w, Q = np.linalg.eigh(hermitian_part(A))
        E = (Q * np.exp(w)) @ dagger(Q)
    elif frob(A + dagger(A)) <= 1e-13 * scale:
        w, Q = np.linalg.eigh(-1j * skew_part(A))
        E = (Q * np.exp(1j * w)) @ dagger(Q)
    else:
        E = scipy.linalg.expm(A)
    if not np.all(np.isfinite(E)):
        raise Overflow("matrix exponential overflowed")
    return E


def unitary_log(k) -> np.ndarray:
    """Principal logarithm of a unitary matrix, returned skew-Hermitian."""
    T, Z = scipy.linalg.schur(np.asarray(k, dtype=complex), output="complex")
    theta = np.angle(np.diag(T))
    return skew_part((Z * (1j * theta)) @ dagger(Z))


@dataclass(frozen=True)
class CartanPair:
    """``g = k exp(i u)`` with ``k`` unitary and ``u`` skew-Hermitian."""

    k: np.ndarray
    u: np.ndarray

    def matrix(self) -> np.ndarray:
        return self.k @ mat_exp(1j * self.u)


class GroupElement:
    """An invertible matrix, optionally carrying a known Cartan factorisation.

    Elements such as ``exp(i t s)`` for large ``t`` are far beyond any sane
    condition number, but their Cartan factors are known exactly; carrying
    them lets scenes act stably without ever forming the matrix.
    """

    __slots__ = ("_matrix", "_cartan")

    def __init__(self, matrix=None, cartan: CartanPair | None = None):
        if matrix is None and cartan is None:
            raise ValueError("GroupElement needs a matrix or a Cartan pair")
        self._matrix = None if matrix is None else np.asarray(matrix, dtype=complex)
        self._cartan = cartan

    @classmethod
    def identity(cls, n: int) -> "GroupElement":
        return cls(cartan=CartanPair(np.eye(n, dtype=complex), np.zeros((n, n), dtype=complex)))

    @classmethod
    def exp_i(cls, s, t: float = 1.0) -> "GroupElement":
        """The element exp(i t s) for skew-Hermitian s."""
        s = np.asarray(s, dtype=complex)
        n = s.shape[0]
        return cls(cartan=CartanPair(np.eye(n, dtype=complex), t * s))

    @classmethod
    def from_cartan(cls, k, u) -> "GroupElement":
        return cls(cartan=CartanPair(np.asarray(k, dtype=complex), np.asarray(u, dtype=complex)))

    @property
    def n(self) -> int:
        return (self._matrix if self._matrix is not None else self._cartan.k).shape[0]

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            self._matrix = self._cartan.matrix()
        return self._matrix

    @property
    def known_cartan(self) -> CartanPair | None:
        return self._cartan

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.matrix @ as_group(other).matrix)

    def inv(self) -> "GroupElement":
        if self._cartan is not None:
            # (k e^{iu})^{-1} = e^{-iu} k^* = k^* e^{-i Ad(k) u}
            k, u = self._cartan.k, self._cartan.u
            return GroupElement.from_cartan(dagger(k), -(k @ u @ dagger(k)))
        return GroupElement(np.linalg.inv(self._matrix))

    def __repr__(self) -> str:
        return f"GroupElement(n={self.n}, cartan={'yes' if self._cartan is not None else 'no'})"


def as_group(g) -> GroupElement:
    return g if isinstance(g, GroupElement) else GroupElement(g)


def condition_number(g) -> float:
    sv = np.linalg.svd(as_group(g).matrix, compute_uv=False)
    return float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf


def polar_cartan(g, tol: Tolerances = DEFAULT) -> CartanPair:
    """Cartan decomposition ``g = k exp(i u)``.

    Computed from the SVD ``g = W S V*``: ``i u = V log(S) V*`` (this is
    ``log(g* g) / 2``) and ``k = W V*``.
    """
    g = as_group(g)
    if g.known_cartan is not None:
        return g.known_cartan
    W, S, Vh = np.linalg.svd(g.matrix)
    if S[-1] <= 0 or S[0] / S[-1] > tol.cond_max:
        raise Singular(f"condition number {S[0] / S[-1] if S[-1] > 0 else np.inf:.3e} exceeds cond_max")
    V = dagger(Vh)
    iu = (V * np.log(S)) @ Vh
    u = skew_part(-1j * iu)
    return CartanPair(k=W @ Vh, u=u)


def cartan_log(g, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Group logarithm: the ``u`` of the Cartan decomposition."""
    return polar_cartan(g, tol).u


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True)
class Subspace:
    """Subspace of C^n given by an orthonormal basis (n x d)."""

    basis: np.ndarray

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def span(cls, vectors, rank_tol: float | None = None) -> "Subspace":
        return cls(orthonormalize(np.asarray(vectors, dtype=complex), rank_tol))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(np.zeros((n, 0), dtype=complex))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(np.eye(n, dtype=complex))

    def projector(self) -> np.ndarray:
        return self.basis @ dagger(self.basis)

    def same_as(self, other: "Subspace", atol: float = 1e-8) -> bool:
        return self.dim == other.dim and frob(self.projector() - other.projector()) <= atol


def _rank_cut(S: np.ndarray, rank_tol: float | None) -> int:
    if S.size == 0:
        return 0
    cut = DEFAULT.rank_rel * S[0] if rank_tol is None else rank_tol
    return int(np.sum(S > cut))


def orthonormalize(B: np.ndarray, rank_tol: float | None = None) -> np.ndarray:
    """Orthonormal basis for the column span of B, rank decided by SVD."""
    n = B.shape[0]
    if B.shape[1] == 0 or not np.any(B):
        return np.zeros((n, 0), dtype=complex)
    U, S, _ = np.linalg.svd(B, full_matrices=False)
    return U[:, :_rank_cut(S, rank_tol)]


def subspace_intersect(U: Subspace, V: Subspace, rank_tol: float | None = None,
                       rank_rel: float | None = None) -> Subspace:
    """U ∩ V as the common null space of the stacked complementary projectors."""
    if U.n != V.n:
        raise ValueError("ambient dimensions differ")
    n = U.n
    I = np.eye(n)
    stacked = np.vstack([I - U.projector(), I - V.projector()])
    _, S, Vh = np.linalg.svd(stacked)
    # singular values of the stacked matrix lie in [0, sqrt(2)]
    rel = DEFAULT.rank_rel if rank_rel is None else rank_rel
    cut = rel * max(S[0], 1.0) if rank_tol is None else rank_tol
    null = Vh[S <= cut].conj().T
    return Subspace(null if null.size else np.zeros((n, 0), dtype=complex))


def subspace_complement(U: Subspace) -> Subspace:
    n = U.n
    if U.dim == 0:
        return Subspace.full(n)
    Q, _ = np.linalg.qr(U.basis, mode="complete")
    return Subspace(Q[:, U.dim:])


def subspace_image(g, U: Subspace, rank_tol: float | None = None) -> Subspace:
    B = as_group(g).matrix @ U.basis
    out = orthonormalize(B, rank_tol)
    if out.shape[1] != U.dim:
        raise Singular("image lost rank; group element is singular at this tolerance")
    return Subspace(out)


def subspace_sum(U: Subspace, V: Subspace, rank_tol: float | None = None) -> Subspace:
    return Subspace(orthonormalize(np.hstack([U.basis, V.basis]), rank_tol))
