"""Tolerance configuration.

Every numerical threshold used by the library lives here so that reports
can echo the exact values a result was produced with.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    eps_sym: float = 1e-10        # skew/Hermitian symmetry check, relative
    cluster_rel: float = 1e-8     # eigenvalue clustering, times (1 + spectral radius)
    rank_rel: float = 1e-10       # subspace rank decisions, times largest singular value
    cond_max: float = 1e12
    eps_rep: float = 1e-9         # representation homomorphism check
    supp_tol: float = 1e-10       # spectral support of a point
    angle_tol: float = 1e-8       # sphere-tuple coincidence, radians
    eps_mono: float = 1e-9        # monotonicity slack per step
    eps_quad: float = 1e-8        # quadrature, times (1 + |value|)
    eps_bw: float = 1e-5          # analytic vs ray-mode boundary weight
    div_cap: float = 1e6          # ray-mode divergence cap
    delta: float = 1e-6           # zero band for maximal weights
    eps_fix: float = 1e-8         # fixed-point test on the infinitesimal action
    eps_zero: float = 1e-8        # flow convergence on |mu|
    eps_div: float = 1e-3         # flow divergence floor on |mu|
    distance_cap: float = 40.0
    merge_tol: float = 0.1        # sphere-tuple monitor: gap shrink factor
    eps_boundary: float = 1e-8    # boundary action / geodesic certificates

    def as_dict(self) -> dict:
        return asdict(self)

    def updated(self, **overrides) -> "Tolerances":
        return replace(self, **overrides)

    def invalid_fields(self) -> list[str]:
        """Names of fields that are not strictly positive."""
        return [f.name for f in fields(self) if not getattr(self, f.name) > 0]


DEFAULT = Tolerances()
