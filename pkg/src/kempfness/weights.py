"""Maximal weights, weight curves and the integral of the moment map.

Extended reals are plain floats: ``math.inf`` stands for +infinity, which
keeps the ordering and arithmetic of the standard library.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate

from .config import DEFAULT, Tolerances
from .errors import Inconclusive, Overflow, PreconditionUnmet, QuadratureFailure
from .matcore import (
    GroupElement,
    as_group,
    dagger,
    frob,
    hermitian_part,
    polar_cartan,
    skew_part,
    unitary_log,
)
from .scenes import Scene

RAY_LADDER = (10.0, 20.0, 40.0)


def is_finite(value: float) -> bool:
    return not math.isinf(value)


def format_extended(value: float):
    """JSON-friendly form of an extended real."""
    return "+inf" if value == math.inf else float(value)


# ---------------------------------------------------------------------------
# weight curves


def lambda_t(scene: Scene, x, s, t: float) -> float:
    """mu_s(exp(i t s) x)."""
    return scene.mu_pair(scene.act(GroupElement.exp_i(s, t), x), s)


@dataclass(frozen=True)
class WeightCurve:
    times: np.ndarray
    values: np.ndarray
    slopes: np.ndarray

    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    def worst_decrease(self) -> float:
        inc = self.increments()
        return float(max(0.0, -inc.min())) if inc.size else 0.0

    def is_monotone(self, eps_mono: float) -> bool:
        return self.worst_decrease() <= eps_mono

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "lambda_t", "slope"])
        for t, v, d in zip(self.times, self.values, self.slopes):
            w.writerow([repr(float(t)), repr(float(v)), repr(float(d))])
        return buf.getvalue()


def weight_curve(scene: Scene, x, s, times) -> WeightCurve:
    """lambda_t on a grid; the slope is |xi_s|^2 at exp(i t s) x."""
    times = np.asarray(times, dtype=float)
    vals, slopes = [], []
    for t in times:
        y = scene.act(GroupElement.exp_i(s, t), x)
        vals.append(scene.mu_pair(y, s))
        slopes.append(scene.inf_action(s, y).norm ** 2)
    return WeightCurve(times, np.array(vals), np.array(slopes))


# ---------------------------------------------------------------------------
# maximal weights


def max_weight(scene: Scene, x, s) -> float:
    """lim_{t -> inf} lambda_t(x; s), from the scene's closed form."""
    if frob(s) == 0:
        raise ValueError("maximal weight needs a nonzero direction")
    return scene.max_weight(x, s)


@dataclass(frozen=True)
class NumericWeight:
    value: float
    error: float
    ladder: tuple[float, ...]
    samples: tuple[float, ...]


def max_weight_numeric(scene: Scene, x, s, ladder=RAY_LADDER,
                       tol: Tolerances = DEFAULT) -> NumericWeight:
    """lambda_t on a t-ladder; reports the last value and its last increment.

    Convergence is monotone and, for finite weights, exponential in t, so
    the final rung is the estimate and the increment bounds its error.
    A ladder still growing past the divergence cap means +infinity.
    """
    samples = []
    for t in ladder:
        try:
            samples.append(lambda_t(scene, x, s, t))
        except Overflow:
            samples.append(math.inf)
    last = samples[-1]
    if math.isinf(last) or (last > tol.div_cap and last > samples[-2]):
        return NumericWeight(math.inf, 0.0, tuple(ladder), tuple(samples))
    return NumericWeight(last, abs(last - samples[-2]), tuple(ladder), tuple(samples))


# ---------------------------------------------------------------------------
# integral of the moment map

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _gl(f, a: float, b: float) -> float:
    h = 0.5 * (b - a)
    m = 0.5 * (b + a)
    return h * sum(w * f(m + h * z) for z, w in zip(_GL_NODES, _GL_WEIGHTS))


def adaptive_gauss_legendre(f, a: float, b: float, eps: float, max_panels: int = 4096):
    """Composite 16-point Gauss-Legendre with bisection refinement.

    A panel is accepted when its one-panel and two-half-panel values agree
    to eps * (1 + |running total|) scaled by the panel's share of [a, b].
    Returns ``(value, error_estimate, panels)``.
    """
    if b == a:
        return 0.0, 0.0, 0
    total_len = b - a
    coarse = _gl(f, a, b)
    stack = [(a, b, coarse)]
    value = err = 0.0
    panels = 0
    scale = 1.0 + abs(coarse)
    while stack:
        lo, hi, whole = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = _gl(f, lo, mid), _gl(f, mid, hi)
        diff = abs(left + right - whole)
        if diff <= eps * scale * (hi - lo) / total_len or (hi - lo) < 1e-12 * total_len:
            value += left + right
            err += diff
            panels += 2
        else:
            if len(stack) + panels > max_panels:
                raise QuadratureFailure(f"more than {max_panels} panels needed on [{a}, {b}]")
            stack.append((mid, hi, right))
            stack.append((lo, mid, left))
        scale = max(scale, 1.0 + abs(value))
    return value, err, panels


@dataclass(frozen=True)
class IntegralValue:
    value: float
    error: float
    panels: int
    path: str = "cartan"

    def as_dict(self) -> dict:
        return {"value": self.value, "error": self.error, "panels": self.panels, "path": self.path}


def sigma(scene: Scene, x, gamma: GroupElement, velocity: np.ndarray) -> float:
    """sigma_x(gamma)(gamma') with velocity = gamma' gamma^-1.

    Pairs mu(gamma x) with -i times the projection of the velocity onto ik.
    """
    direction = scene.algebra.project(-1j * hermitian_part(velocity))
    return scene.mu_pair(scene.act(gamma, x), direction)


def kn_integral(scene: Scene, x, g, path: str = "cartan", tol: Tolerances = DEFAULT,
                max_panels: int = 4096) -> IntegralValue:
    """Psi_x(g): integral of sigma_x along a path from 1 to g.

    ``path="cartan"``: g = k exp(i u); 1 -> k inside K (sigma vanishes there),
    then k exp(i nu u) for nu in [0, 1].
    ``path="polar-left"``: g = exp(i u') k'; first exp(i nu u'), then
    exp(i u') exp(nu a') with k' = exp(a').  Exactness of sigma_x makes the
    two agree.
    """
    g = as_group(g)
    eps = 0.1 * tol.eps_quad
    if path == "cartan":
        cp = polar_cartan(g, tol)
        k, u = cp.k, cp.u
        V = k @ (1j * u) @ dagger(k)

        def f(nu):
            return sigma(scene, x, GroupElement.from_cartan(k, nu * u), V)

        val, err, panels = adaptive_gauss_legendre(f, 0.0, 1.0, eps, max_panels)
        return IntegralValue(val, err, panels, path)
    if path == "polar-left":
        W, S, Vh = np.linalg.svd(g.matrix)
        if S[0] / S[-1] > tol.cond_max:
            raise QuadratureFailure("group element too ill-conditioned for the left polar path")
        u1 = skew_part(-1j * (W * np.log(S)) @ dagger(W))
        k1 = W @ Vh
        a1 = unitary_log(k1)
        P = GroupElement.exp_i(u1)
        Pm = P.matrix

        def f1(nu):
            return sigma(scene, x, GroupElement.exp_i(u1, nu), 1j * u1)

        def f2(nu):
            E = Pm @ _exp_skew(nu * a1)
            return sigma(scene, x, GroupElement(E), Pm @ a1 @ np.linalg.inv(Pm))

        v1, e1, p1 = adaptive_gauss_legendre(f1, 0.0, 1.0, eps, max_panels)
        v2, e2, p2 = adaptive_gauss_legendre(f2, 0.0, 1.0, eps, max_panels)
        return IntegralValue(v1 + v2, e1 + e2, p1 + p2, path)
    raise ValueError(f"unknown path {path!r}")


def _exp_skew(a: np.ndarray) -> np.ndarray:
    w, Q = np.linalg.eigh(-1j * skew_part(a))
    return (Q * np.exp(1j * w)) @ dagger(Q)


def ray_integral(scene: Scene, x, s, t: float, eps: float = 1e-10) -> float:
    """int_0^t lambda_tau(x; s) dtau by scipy's adaptive quadrature."""
    val, _ = scipy.integrate.quad(lambda tau: lambda_t(scene, x, s, tau), 0.0, t,
                                  epsabs=eps, epsrel=eps, limit=500)
    return float(val)


# ---------------------------------------------------------------------------
# boundary weights


@dataclass(frozen=True)
class RayEstimate:
    value: float
    ladder: tuple[float, ...]
    ratios: tuple[float, ...]


def ray_weight(scene: Scene, x, s, ladder=RAY_LADDER, tol: Tolerances = DEFAULT) -> RayEstimate:
    """lim Psi_x(exp(i t s)) / t, Richardson-extrapolated over the ladder.

    For unit s the distance from [exp(i t s)] to the base point is t.
    Psi / t = lambda - c / t + (exponentially small), so 2 f(2t) - f(t)
    on the last two rungs removes the 1/t term.
    """
    ratios = []
    for t in ladder:
        try:
            psi = kn_integral(scene, x, GroupElement.exp_i(s, t), tol=tol).value
        except (Overflow, QuadratureFailure, FloatingPointError):
            psi = math.inf
        ratios.append(psi / t if math.isfinite(psi) else math.inf)
    if math.isinf(ratios[-1]):
        return RayEstimate(math.inf, tuple(ladder), tuple(ratios))
    slack = 1e-7 * (1 + max(abs(r) for r in ratios))
    if any(b < a - slack for a, b in zip(ratios, ratios[1:])):
        raise Inconclusive(f"ray sequence is not monotone: {ratios}")
    if ratios[-1] > tol.div_cap and ratios[-1] > ratios[-2]:
        return RayEstimate(math.inf, tuple(ladder), tuple(ratios))
    t1, t2 = ladder[-2], ladder[-1]
    est = (t2 * ratios[-1] - t1 * ratios[-2]) / (t2 - t1)
    return RayEstimate(float(est), tuple(ladder), tuple(ratios))


def boundary_weight(scene: Scene, x, s, mode: str = "analytic", tol: Tolerances = DEFAULT) -> float:
    """lambda_x(e_s) for unit s: analytic maximal weight or ray extrapolation."""
    s = np.asarray(s.s if hasattr(s, "s") else s)
    if abs(frob(s) - 1) > 1e-9:
        raise ValueError("boundary weights need a unit direction")
    if mode == "analytic":
        return max_weight(scene, x, s)
    if mode == "ray":
        return ray_weight(scene, x, s, tol=tol).value
    raise ValueError(f"unknown mode {mode!r}")


def weight_zero_implies_fixed(scene: Scene, x, s, tol: Tolerances = DEFAULT) -> bool:
    """If lambda(x; s) = lambda(x; -s) = 0, check that xi_s(x) vanishes."""
    a, b = max_weight(scene, x, s), max_weight(scene, x, -np.asarray(s))
    if not (abs(a) <= tol.delta and abs(b) <= tol.delta):
        raise PreconditionUnmet(f"weights are {a!r} and {b!r}, not both zero")
    return scene.inf_action(s, x).norm <= tol.eps_fix
