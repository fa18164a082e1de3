"""Command-line front end.

Scene files and reports are JSON documents with ``format`` and ``version``
fields.  Complex numbers are written as ``[re, im]`` pairs and matrices as
row-major nested arrays.  Exit status: 0 success, 1 job failure, 2 usage or
parse error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import traceback
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .config import DEFAULT, Tolerances
from .errors import KempfNessError, ParseError, ValidationError
from .matcore import GroupElement, frob
from .scenes import (
    FlatScene,
    ProjectiveScene,
    Representation,
    Scene,
    SphereTupleScene,
)
from .symspace import LieAlgebra, algebra_for, boundary_action, connect_geodesic, opposed
from .weights import (
    boundary_weight,
    format_extended,
    kn_integral,
    max_weight,
    max_weight_numeric,
    weight_curve,
)

SCENE_FORMAT = "kempfness-scene"
REPORT_FORMAT = "kempfness-report"
VERSION = 1
COMMANDS = ("weight", "curve", "classify", "flow", "boundary-act", "opposed", "connect",
            "integral", "selftest", "batch")


# ---------------------------------------------------------------------------
# JSON helpers


def to_json(obj) -> object:
    """Plain JSON value; complex arrays become [re, im] pairs."""
    if isinstance(obj, dict):
        return {str(k): to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_json(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return to_json(np.stack([obj.real, obj.imag], axis=-1))
        return to_json(obj.tolist())
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        if math.isinf(obj):
            return "+inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if hasattr(obj, "as_dict"):
        return to_json(obj.as_dict())
    return obj


def dumps(obj) -> str:
    """Indented JSON with numeric arrays kept on one line (diff-friendly)."""

    def leaf(v):
        return isinstance(v, list) and all(not isinstance(e, (list, dict)) for e in v)

    def fmt(v, ind):
        pad = "  " * ind
        if isinstance(v, dict):
            if not v:
                return "{}"
            items = [f'{pad}  {json.dumps(k)}: {fmt(val, ind + 1)}' for k, val in v.items()]
            return "{\n" + ",\n".join(items) + "\n" + pad + "}"
        if isinstance(v, list):
            if leaf(v) or all(leaf(e) and all(not isinstance(x, list) for x in e) and len(e) <= 2 for e in v):
                return json.dumps(v)
            items = [pad + "  " + fmt(e, ind + 1) for e in v]
            return "[\n" + ",\n".join(items) + "\n" + pad + "]"
        return json.dumps(v)

    return fmt(to_json(obj), 0) + "\n"


def _complex_array(value, where: str) -> np.ndarray:
    """Nested lists whose leaves are reals or [re, im] pairs."""
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: not a numeric array ({exc})") from None
    return arr


def parse_matrix(value, n: int | None = None, where: str = "matrix") -> np.ndarray:
    arr = _complex_array(value, where)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        M = arr[..., 0] + 1j * arr[..., 1]
    elif arr.ndim == 2:
        M = arr.astype(complex)
    else:
        raise ParseError(f"{where}: expected a square matrix of reals or [re, im] pairs")
    if M.shape[0] != M.shape[1] or (n is not None and M.shape[0] != n):
        raise ParseError(f"{where}: expected a {n or 'square'} x {n or 'square'} matrix, got {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ParseError(f"{where}: non-finite entries")
    return M


def parse_vector(value, where: str = "vector") -> np.ndarray:
    arr = _complex_array(value, where)
    if arr.ndim == 2 and arr.shape[-1] == 2:
        return arr[:, 0] + 1j * arr[:, 1]
    if arr.ndim == 1:
        return arr.astype(complex)
    raise ParseError(f"{where}: expected a vector of reals or [re, im] pairs")


# ---------------------------------------------------------------------------
# scene files


class SceneFile:
    def __init__(self, scene: Scene, points: dict, meta: dict):
        self.scene, self.points, self.meta = scene, points, meta


def _load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")
    return doc


def shipped_scene_path(name: str) -> Path:
    return Path(str(resources.files("kempfness") / "data" / f"{name}.json"))


def resolve_scene_path(ref: str) -> Path:
    p = Path(ref)
    if p.exists():
        return p
    shipped = shipped_scene_path(ref)
    if shipped.exists():
        return shipped
    raise ParseError(f"{ref}: no such scene file or shipped scene")


def scene_from_dict(doc: dict, where: str = "scene", tol: Tolerances = DEFAULT) -> SceneFile:
    if doc.get("format") != SCENE_FORMAT:
        raise ParseError(f"{where}: field 'format' must be {SCENE_FORMAT!r}")
    if doc.get("version") != VERSION:
        raise ParseError(f"{where}: unsupported version {doc.get('version')!r}")
    kind = doc.get("kind")
    raw_points = doc.get("points", {})
    if not isinstance(raw_points, dict):
        raise ParseError(f"{where}: field 'points' must be an object")
    if kind == "sphere":
        m = doc.get("m")
        if not isinstance(m, int) or m < 1:
            raise ParseError(f"{where}: field 'm' must be a positive integer")
        scene = SphereTupleScene(m, tol)
        points = {}
        for name, val in raw_points.items():
            arr = _complex_array(val, f"{where}: points.{name}")
            try:
                points[name] = scene.validate_point(arr)
            except ValidationError as exc:
                raise ValidationError(f"{where}: points.{name}: {exc}") from None
        return SceneFile(scene, points, doc)
    if kind not in ("projective", "flat"):
        raise ParseError(f"{where}: field 'kind' must be 'sphere', 'projective' or 'flat'")
    if "weights" in doc:
        try:
            rep = Representation.torus(doc["weights"])
        except (ValueError, TypeError) as exc:
            raise ParseError(f"{where}: field 'weights': {exc}") from None
    else:
        alg_doc = doc.get("algebra")
        if not isinstance(alg_doc, dict) or alg_doc.get("kind") not in ("u", "su", "torus"):
            raise ParseError(f"{where}: field 'algebra' must name kind u, su or torus and n")
        alg = algebra_for(int(alg_doc.get("n", 0)), alg_doc["kind"])
        gens = doc.get("generators")
        if not isinstance(gens, list) or len(gens) != alg.dim:
            raise ParseError(f"{where}: field 'generators' needs {alg.dim} matrices")
        images = np.array([parse_matrix(g, where=f"{where}: generators[{i}]") for i, g in enumerate(gens)])
        rep = Representation(alg, images)
    cls = ProjectiveScene if kind == "projective" else FlatScene
    try:
        scene = cls(rep, tol)
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None
    points = {}
    for name, val in raw_points.items():
        try:
            points[name] = scene.validate_point(parse_vector(val, f"{where}: points.{name}"))
        except ValidationError as exc:
            raise ValidationError(f"{where}: points.{name}: {exc}") from None
    return SceneFile(scene, points, doc)


def parse_scene(path, tol: Tolerances = DEFAULT) -> SceneFile:
    p = resolve_scene_path(str(path))
    return scene_from_dict(_load_json(p), str(p), tol)


# ---------------------------------------------------------------------------
# argument helpers


def parse_direction(scene: Scene, text: str) -> np.ndarray:
    """A direction in k: real coordinates in the basis of k, or a matrix."""
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"--dir: {exc.msg}") from None
    arr = _complex_array(value, "--dir")
    if arr.ndim == 1:
        if arr.shape[0] != scene.algebra.dim:
            raise ParseError(f"--dir: expected {scene.algebra.dim} coordinates")
        return scene.algebra.element(arr)
    return scene.algebra.project(parse_matrix(value, scene.algebra.n, "--dir"))


def parse_json_arg(text: str, flag: str):
    path = Path(text)
    if not text.lstrip().startswith(("[", "{")) and path.exists():
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{flag}: {exc.msg}") from None


def pick_point(sf: SceneFile, name: str | None):
    if name is None:
        if len(sf.points) != 1:
            raise ParseError(f"--point is required; scene has points {sorted(sf.points)}")
        name = next(iter(sf.points))
    if name not in sf.points:
        raise ParseError(f"--point: scene has no point {name!r} (have {sorted(sf.points)})")
    return name, sf.points[name]


def split_tolerance_flags(argv: list[str]) -> tuple[list[str], dict]:
    """Pull ``--tol.NAME VALUE`` / ``--tol.NAME=VALUE`` out of argv."""
    rest, tols = [], {}
    i = 0
    names = set(DEFAULT.as_dict())
    while i < len(argv):
        a = argv[i]
        if a.startswith("--tol."):
            key, _, val = a[6:].partition("=")
            if not val:
                if i + 1 >= len(argv):
                    raise ParseError(f"{a}: missing value")
                val = argv[i + 1]
                i += 1
            if key not in names:
                raise ParseError(f"unknown tolerance {key!r}")
            try:
                tols[key] = float(val)
            except ValueError:
                raise ParseError(f"{a}: not a number: {val!r}") from None
        else:
            rest.append(a)
        i += 1
    return rest, tols


# ---------------------------------------------------------------------------
# commands


def _cmd_weight(args, tol):
    sf = parse_scene(args.scene, tol)
    name, x = pick_point(sf, args.point)
    s = parse_direction(sf.scene, args.dir)
    res = {"point": name, "direction": s}
    if args.mode == "analytic":
        res["weight"] = format_extended(max_weight(sf.scene, x, s))
        num = max_weight_numeric(sf.scene, x, s, tol=tol)
        res["numeric_limit"] = {"value": format_extended(num.value), "error": num.error,
                                "ladder": num.ladder}
        res["provenance"] = "analytic"
    else:
        s = s / frob(s)
        res["weight"] = format_extended(boundary_weight(sf.scene, x, s, "ray", tol))
        res["provenance"] = "ray"
    return res, []


def _cmd_curve(args, tol):
    sf = parse_scene(args.scene, tol)
    name, x = pick_point(sf, args.point)
    s = parse_direction(sf.scene, args.dir)
    times = np.linspace(0.0, args.t_max, args.samples)
    curve = weight_curve(sf.scene, x, s, times)
    warnings = []
    if not curve.is_monotone(tol.eps_mono):
        warnings.append(f"curve decreases by {curve.worst_decrease():.3e} > eps_mono")
    if args.csv:
        Path(args.csv).write_text(curve.to_csv())
    res = {"point": name, "direction": s, "terminal_value": float(curve.values[-1]),
           "worst_decrease": curve.worst_decrease(), "monotone": curve.is_monotone(tol.eps_mono),
           "samples": len(times), "csv": args.csv}
    return res, warnings


def _cmd_classify(args, tol):
    from .stability import classify_sampling, classify_torus_scene

    sf = parse_scene(args.scene, tol)
    names = [args.point] if args.point else list(sf.points)
    out = {}
    for name in names:
        _, x = pick_point(sf, name)
        entry = {"sampling": classify_sampling(sf.scene, x, args.budget, args.seed, tol).as_dict()}
        if sf.scene.kind == "projective" and getattr(sf.scene, "weights", None) is not None:
            entry["exact"] = classify_torus_scene(sf.scene, x, tol).as_dict()
        out[name] = entry
    return {"verdicts": out}, []


def _cmd_flow(args, tol):
    from .stability import FlowParams, kempf_ness_flow

    sf = parse_scene(args.scene, tol)
    name, x = pick_point(sf, args.point)
    params = FlowParams(max_steps=args.budget) if args.budget else FlowParams()
    trace = kempf_ness_flow(sf.scene, x, params, tol)
    if args.csv:
        Path(args.csv).write_text(trace.to_csv())
    res = {"point": name, **trace.as_dict(), "final_point": trace.final_point,
           "stabilizer_dim": sf.scene.stabilizer_dim(trace.final_point), "csv": args.csv}
    warnings = []
    if trace.worst_increase() > 0:
        warnings.append(f"|mu| increased by {trace.worst_increase():.3e}")
    return res, warnings


def _cmd_boundary_act(args, tol):
    s = parse_matrix(parse_json_arg(args.s, "--s"), where="--s")
    g = parse_matrix(parse_json_arg(args.g, "--g"), s.shape[0], "--g")
    s = s / frob(s)
    out = boundary_action(s, GroupElement(g), tol)
    return {"s": s, "g": g, "s_dot_g": out, "changed": bool(frob(out - s) > tol.eps_boundary)}, []


def _algebra_arg(args, n: int) -> LieAlgebra:
    return algebra_for(n, args.algebra)


def _cmd_opposed(args, tol):
    u = parse_matrix(parse_json_arg(args.u, "--u"), where="--u")
    v = parse_matrix(parse_json_arg(args.v, "--v"), u.shape[0], "--v")
    ok, cert = opposed(u, v, not args.defining, _algebra_arg(args, u.shape[0]), tol)
    return {"opposed": bool(ok), "certificate": cert, "use_adjoint": not args.defining}, []


def _cmd_connect(args, tol):
    u = parse_matrix(parse_json_arg(args.u, "--u"), where="--u")
    v = parse_matrix(parse_json_arg(args.v, "--v"), u.shape[0], "--v")
    u, v = u / frob(u), v / frob(v)
    h = connect_geodesic(u, v, _algebra_arg(args, u.shape[0]), tol)
    return {"h": h.matrix, "check": frob(boundary_action(v, h, tol) + u)}, []


def _cmd_integral(args, tol):
    sf = parse_scene(args.scene, tol)
    name, x = pick_point(sf, args.point)
    g = parse_matrix(parse_json_arg(args.g, "--g"), sf.scene.n, "--g")
    val = kn_integral(sf.scene, x, GroupElement(g), tol=tol)
    return {"point": name, "g": g, "integral": val}, []


def _cmd_selftest(args, tol):
    from .selftest import run_selftest

    results = run_selftest(args.level, args.seed, tol)
    failed = [r for r in results if not r["passed"]]
    return {"level": args.level, "suites": results, "failed": len(failed)}, \
        [f"suite {r['name']} failed" for r in failed]


HANDLERS = {
    "weight": _cmd_weight,
    "curve": _cmd_curve,
    "classify": _cmd_classify,
    "flow": _cmd_flow,
    "boundary-act": _cmd_boundary_act,
    "opposed": _cmd_opposed,
    "connect": _cmd_connect,
    "integral": _cmd_integral,
    "selftest": _cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kempfness", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, scene=True, point=True):
        if scene:
            sp.add_argument("--scene", required=True, help="scene file or shipped scene name")
        if point:
            sp.add_argument("--point", help="name of a point in the scene file")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        return sp

    sp = common(sub.add_parser("weight", help="maximal weight lambda(x; s)"))
    sp.add_argument("--dir", required=True, help="direction: coordinates in k or a matrix (JSON)")
    sp.add_argument("--mode", choices=("analytic", "ray"), default="analytic")

    sp = common(sub.add_parser("curve", help="lambda_t(x; s) on a grid, CSV t,lambda_t,slope"))
    sp.add_argument("--dir", required=True)
    sp.add_argument("--t-max", type=float, default=20.0)
    sp.add_argument("--samples", type=int, default=201)
    sp.add_argument("--csv")

    sp = common(sub.add_parser("classify", help="stability verdicts"))
    sp.add_argument("--budget", type=int, default=256, help="number of sampled directions")

    sp = common(sub.add_parser("flow", help="Kempf-Ness flow, CSV t,mu_norm,distance"))
    sp.add_argument("--budget", type=int, default=0, help="maximum number of steps")
    sp.add_argument("--csv")

    sp = common(sub.add_parser("boundary-act", help="s . g on the boundary"), scene=False, point=False)
    sp.add_argument("--s", required=True, help="skew-Hermitian matrix (JSON or file)")
    sp.add_argument("--g", required=True, help="invertible matrix (JSON or file)")

    for name, hlp in (("opposed", "opposedness test"), ("connect", "connecting geodesic")):
        sp = common(sub.add_parser(name, help=hlp), scene=False, point=False)
        sp.add_argument("--u", required=True)
        sp.add_argument("--v", required=True)
        sp.add_argument("--algebra", choices=("u", "su", "torus"), default="u")
        if name == "opposed":
            sp.add_argument("--defining", action="store_true",
                            help="filtration test in the defining representation instead of ad")

    sp = common(sub.add_parser("integral", help="integral of the moment map Psi_x(g)"))
    sp.add_argument("--g", required=True)

    sp = common(sub.add_parser("selftest", help="built-in invariant suites"), scene=False, point=False)
    sp.add_argument("--level", choices=("quick", "full"), default="quick")

    sp = sub.add_parser("batch", help="run a JSON list of jobs; failures are isolated")
    sp.add_argument("jobs", help="file with a JSON list of argument lists")
    sp.add_argument("--out")
    return p


def make_report(command: str, inputs: dict, results, warnings, tol: Tolerances, ok: bool,
                error: str | None = None) -> dict:
    rep = {
        "format": REPORT_FORMAT,
        "version": VERSION,
        "package_version": __version__,
        "command": command,
        "inputs": to_json(inputs),
        "status": "ok" if ok else "failed",
        "results": to_json(results),
        "warnings": list(warnings),
        "tolerances": tol.as_dict(),
    }
    if error:
        rep["error"] = error
    return rep


def run(argv: list[str]) -> tuple[int, dict]:
    """Run one job; returns (exit status, report)."""
    try:
        argv, tol_over = split_tolerance_flags(list(argv))
    except ParseError as exc:
        return 2, make_report("?", {"argv": argv}, None, [], DEFAULT, False, str(exc))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        if code == 0:  # --help or --version already printed
            return 0, None
        return code, make_report("?", {"argv": argv}, None, [], DEFAULT, False, "usage error")
    tol = DEFAULT.updated(**tol_over)
    inputs = {k: v for k, v in vars(args).items() if k != "out"}
    if args.command == "batch":
        return _run_batch(args, tol)
    bad = tol.invalid_fields()
    if bad and args.command != "selftest":
        return 2, make_report(args.command, inputs, None, [], tol, False,
                              f"tolerances must be positive: {', '.join(bad)}")
    try:
        results, warnings = HANDLERS[args.command](args, tol)
    except (ParseError, ValidationError) as exc:
        return 2, make_report(args.command, inputs, None, [], tol, False, f"{type(exc).__name__}: {exc}")
    except KempfNessError as exc:
        return 1, make_report(args.command, inputs, None, [], tol, False, f"{type(exc).__name__}: {exc}")
    code = 1 if (args.command == "selftest" and results["failed"]) else 0
    return code, make_report(args.command, inputs, results, warnings, tol, code == 0)


def _run_batch(args, tol) -> tuple[int, dict]:
    jobs = parse_json_arg(args.jobs, "jobs")
    if not isinstance(jobs, list) or not all(isinstance(j, list) for j in jobs):
        return 2, make_report("batch", {"jobs": args.jobs}, None, [], tol, False,
                              "jobs file must be a JSON list of argument lists")
    reports, failures = [], []
    for i, job in enumerate(jobs):
        try:
            code, rep = run([str(a) for a in job])
        except Exception as exc:  # a crashing job must not take the batch down
            code, rep = 1, make_report("?", {"argv": job}, None, [], tol, False,
                                       "".join(traceback.format_exception_only(type(exc), exc)).strip())
        reports.append({"index": i, "exit": code, "report": rep})
        if code:
            failures.append(i)
    res = {"jobs": reports, "failures": failures}
    return (1 if failures else 0), make_report("batch", {"jobs": args.jobs}, res, [], tol, not failures)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, report = run(argv)
    if report is None:
        return code
    text = dumps(report)
    out = None
    if "--out" in argv:
        i = argv.index("--out")
        out = argv[i + 1] if i + 1 < len(argv) else None
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    if report.get("error"):
        print(f"kempfness: {report['error']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
