"""``sepwit`` command-line front end.

Exit codes: 0 success, 1 negative verdict, 2 input error, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .experiments import DEFAULT_X_GRID, deflation_hull_check, perturbation_scan
from .linalg import ConvergenceError, InvalidInputError, eig_hermitian, partial_transpose
from .optimize import OptimizerConfig, sep_min
from .presets import operator_preset, state_preset
from .ranges import DEFAULT_FILL, ProductPair, joint_range, product_cloud, separable_range
from .refine import dominance_certificate, refine_pair, remove_common_eigenvector
from .witness import detect_state, effectiveness_check, ground_state_scan

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_NONCONVERGED = 0, 1, 2, 3
NPT_TOL = 1e-9
PPT_MAX_DIM = 6


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected finite numbers, got {text!r}")
    return vals


def _tangent(text: str) -> tuple[float, float]:
    vals = _float_list(text)
    if len(vals) != 2 or vals == [0.0, 0.0]:
        raise argparse.ArgumentTypeError("--tangent takes k1,k2 with (k1, k2) != (0, 0)")
    return vals[0], vals[1]


def _positive_int(minimum: int):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
        if v < minimum:
            raise argparse.ArgumentTypeError(f"must be at least {minimum}")
        return v
    return parse


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be a positive finite number")
    return v


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--pair", type=Path, help="pair JSON (A1,A2,B1,B2) or two-operator JSON (H1,H2)")
    src.add_argument("--preset", help="built-in operator pair")
    p.add_argument("--angles", type=_positive_int(8), default=720, help="supporting-line directions")
    p.add_argument("--restarts", type=_positive_int(1), default=32)
    p.add_argument("--max-iters", type=_positive_int(1), default=500)
    p.add_argument("--tol", type=_positive_float, default=1e-11, help="seesaw stopping tolerance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("sepwit-out"), help="output directory")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="sepwit", description="Numerical ranges and entanglement witnesses of product pairs.")
    sub = parser.add_subparsers(dest="command", required=True)

    r = sub.add_parser("range", parents=[common], help="joint and separable ranges, CSV + SVG")
    r.add_argument("--tangent", type=_tangent, action="append", default=[], metavar="k1,k2")
    r.add_argument("--cloud", type=_positive_int(0), default=0, help="number of random product-state points")
    r.add_argument("--fill", type=_positive_int(0), default=DEFAULT_FILL, help="interior samples per factor")

    c = sub.add_parser("check-pair", parents=[common], help="common eigenvectors and effectiveness verdict")
    c.add_argument("--scan-k", type=_positive_int(1), default=0, help="ground-state scan over N directions")

    d = sub.add_parser("detect", parents=[common], help="decide a state from the separable range")
    d.add_argument("--state", required=True, help="state JSON file or state preset name")
    d.add_argument("--fill", type=_positive_int(0), default=DEFAULT_FILL)

    sub.add_parser("refine", parents=[common], help="strip common eigenvectors, dominance certificates")

    e = sub.add_parser("experiments", parents=[common], help="deflation hull identity and perturbation scan")
    e.add_argument("--appendix-a", action="store_true", help="convex-hull identity after deflating a common eigenvector")
    e.add_argument("--appendix-b", action="store_true", help="product ground states of H1 + x H2")
    e.add_argument("--x-grid", type=_float_list, default=list(DEFAULT_X_GRID))
    return parser


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(restarts=args.restarts, max_iters=args.max_iters, tol=args.tol, seed=args.seed)


def _load_input(args, default_preset: str | None = None):
    if args.pair is not None:
        return io.load_pair_or_operators(args.pair)
    name = args.preset or default_preset
    if name is None:
        raise InvalidInputError("give --pair FILE or --preset NAME")
    return operator_preset(name)


def _require_pair(obj) -> ProductPair:
    if not isinstance(obj, ProductPair):
        raise InvalidInputError("this command needs a product pair (A1, A2, B1, B2)")
    return obj


def _k_grid(n: int) -> list[tuple[float, float]]:
    # half-step offset keeps every direction off the axes for even n
    grid = []
    for j in range(n):
        t = 2 * math.pi * (j + 0.5) / n
        k1, k2 = math.cos(t), math.sin(t)
        if abs(k1 * k2) < 1e-12:
            t += math.pi / (4 * n)
            k1, k2 = math.cos(t), math.sin(t)
        grid.append((k1, k2))
    return grid


def _emit(args, name: str, payload: dict) -> None:
    path = io.write_json(args.out / name, payload)
    sys.stdout.write(path.read_text(encoding="utf-8"))


def _report_json(rep) -> dict:
    return {
        "side": rep.side, "k1": rep.k1, "k2": rep.k2,
        "sep_extremum": rep.sep_extremum, "global_extremum": rep.global_extremum,
        "is_witness": rep.is_witness, "status": rep.status, "certified": rep.certified,
        "block_positivity_min": rep.block_positivity_min,
        "W": io.matrix_to_json(rep.W),
    }


def _records_json(records) -> list[dict]:
    return [{"vector": r.vector, "a1": r.a1, "a2": r.a2} for r in records]


def cmd_range(args) -> int:
    obj = _load_input(args)
    cfg = _config(args)
    tangents = []
    if isinstance(obj, ProductPair):
        h1, h2 = obj.H1, obj.H2
        joint = joint_range(h1, h2, args.angles)
        sep = separable_range(obj, args.angles, args.fill)
        cloud = product_cloud(obj, args.cloud, args.seed)
        converged = True
        for k1, k2 in args.tangent:
            lo = sep_min(obj, k1, k2, cfg)
            converged &= lo.converged
            tangents.append((k1, k2, lo.value, "min"))
    else:
        h1, h2 = obj
        joint = joint_range(h1, h2, args.angles)
        sep, cloud, converged = None, np.empty((0, 2)), True
        for k1, k2 in args.tangent:
            tangents.append((k1, k2, float(eig_hermitian(k1 * h1 + k2 * h2).eigenvalues[0]), "min"))
    out = args.out
    io.write_text(out / "joint.csv", io.polygon_csv(joint.vertices))
    files = ["joint.csv"]
    if sep is not None:
        io.write_text(out / "separable.csv", io.polygon_csv(sep.vertices))
        files.append("separable.csv")
    if len(cloud):
        io.write_text(out / "cloud.csv", io.polygon_csv(cloud))
        files.append("cloud.csv")
    svg = io.render_svg(joint, sep, cloud if len(cloud) else None, tangents,
                        title=args.preset or (args.pair.name if args.pair else ""))
    io.write_text(out / "range.svg", svg)
    files.append("range.svg")
    _emit(args, "range.json", {
        "command": "range",
        "angles": args.angles,
        "joint": {"vertices": joint.vertices, "area": joint.area, "diameter": joint.diameter},
        "separable": None if sep is None else {"vertices": sep.vertices, "area": sep.area, "diameter": sep.diameter},
        "tangents": [{"k1": k1, "k2": k2, "value": v, "side": s} for k1, k2, v, s in tangents],
        "files": files,
    })
    return EXIT_OK if converged else EXIT_NONCONVERGED


def cmd_check_pair(args) -> int:
    pair = _require_pair(_load_input(args))
    v = effectiveness_check(pair)
    payload = {
        "command": "check-pair",
        "commuting_A": v.commuting_A, "commuting_B": v.commuting_B,
        "common_A": _records_json(v.common_A), "common_B": _records_json(v.common_B),
        "thm1_satisfied": v.thm1_satisfied, "cor1_satisfied": v.cor1_satisfied,
        "guarantees_witness": v.guarantees_witness,
    }
    if args.scan_k:
        rows = ground_state_scan(pair, _k_grid(args.scan_k), _config(args))
        payload["scan"] = [{
            "k1": r.k1, "k2": r.k2, "min_eigenvalue": r.min_eigenvalue, "max_eigenvalue": r.max_eigenvalue,
            "min_verdict": r.min_verdict, "max_verdict": r.max_verdict,
            "side_entangled": r.side_entangled, "flagged": r.flagged,
        } for r in rows]
    _emit(args, "check-pair.json", payload)
    return EXIT_OK


def _load_state_arg(text: str, pair: ProductPair):
    path = Path(text)
    if path.suffix == ".json" or path.exists():
        state = io.load_state(path)
    else:
        state = state_preset(text, pair.dim_a, pair.dim_b)
    return state


def cmd_detect(args) -> int:
    pair = _require_pair(_load_input(args))
    state = _load_state_arg(args.state, pair)
    region = separable_range(pair, args.angles, args.fill)
    res = detect_state(pair, state, region, _config(args))
    payload = {
        "command": "detect",
        "point": list(res.point),
        "classification": res.classification,
        "signed_distance": res.distance,
        "detected": res.detected,
        "direction": None if res.direction is None else [res.direction.k1, res.direction.k2],
        "witness": None if res.witness is None else _report_json(res.witness),
        "witness_value": res.witness_value,
        "consistent": res.consistent,
    }
    if state.dim <= PPT_MAX_DIM:
        pt_min = float(eig_hermitian(partial_transpose(state)).eigenvalues[0])
        payload["partial_transpose_min"] = pt_min
        payload["npt"] = pt_min < -NPT_TOL
    _emit(args, "detect.json", payload)
    if res.witness is not None and not res.witness.certified:
        return EXIT_NONCONVERGED
    return EXIT_OK if res.detected else EXIT_NEGATIVE


def cmd_refine(args) -> int:
    pair = _require_pair(_load_input(args))
    cfg = _config(args)
    ref = refine_pair(pair)
    # certificates are claimed per single removal step, so walk the chain
    steps, current = [], pair
    while True:
        nxt, rec = remove_common_eigenvector(current, "A")
        if rec is None:
            nxt, rec = remove_common_eigenvector(current, "B")
            if rec is None:
                break
            side = "B"
        else:
            side = "A"
        steps.append((side, rec, current, nxt))
        current = nxt
    table = []
    for i, (side, rec, before, after) in enumerate(steps):
        for k1, k2 in _k_grid(8):
            # the dominance statement concerns the A factor; swap a B step into that form
            b, a = (before, after) if side == "A" else (before.swap(), after.swap())
            cert = dominance_certificate(b, a, k1, k2, cfg)
            table.append({"step": i, "side": side, "k1": k1, "k2": k2,
                          "holds": cert.holds, "status": cert.status,
                          "difference_min_eigenvalue": cert.difference_min_eigenvalue,
                          "sep_min_pair": cert.sep_min_pair, "sep_min_refined": cert.sep_min_refined})
    _emit(args, "refine.json", {
        "command": "refine",
        "refined": io.pair_to_json(ref.refined),
        "removed_A": _records_json(ref.removed_A),
        "removed_B": _records_json(ref.removed_B),
        "changed": ref.changed,
        "fully_reducible": ref.fully_reducible,
        "certificates": table,
    })
    if any(row["status"] == "inconclusive" for row in table):
        return EXIT_NONCONVERGED
    return EXIT_OK if all(row["holds"] for row in table) else EXIT_NEGATIVE


def cmd_experiments(args) -> int:
    if not (args.appendix_a or args.appendix_b):
        raise InvalidInputError("choose --appendix-a and/or --appendix-b")
    cfg = _config(args)
    payload = {"command": "experiments"}
    if args.appendix_a:
        obj = _load_input(args, "planted-common")
        a1, a2 = (obj.A1, obj.A2) if isinstance(obj, ProductPair) else obj
        res = deflation_hull_check(a1, a2, args.angles)
        payload["appendix_a"] = {"status": res.status, "hausdorff": res.hausdorff,
                                 "diameter": res.diameter, "p0": res.p0, "reason": res.reason}
    if args.appendix_b:
        rows = []
        names = [None] if (args.pair or args.preset) else ["perturb-local", "perturb-nonlocal"]
        for name in names:
            pair = _require_pair(_load_input(args) if name is None else operator_preset(name))
            label = name or args.preset or str(args.pair)
            try:
                scan = perturbation_scan(pair, args.x_grid, cfg)
            except InvalidInputError as exc:
                rows.append({"input": label, "status": "skipped", "reason": str(exc)})
                continue
            rows.append({
                "input": label, "status": scan.status,
                "local_condition": scan.local_condition, "consistent": scan.consistent,
                "rows": [{"x": r.x, "ground_energy": r.ground_energy, "ground_degenerate": r.ground_degenerate,
                          "separable_ground_exists": r.separable_ground_exists, "verdict": r.verdict}
                         for r in scan.rows],
            })
        payload["appendix_b"] = rows
    _emit(args, "experiments.json", payload)
    return EXIT_OK


COMMANDS = {
    "range": cmd_range,
    "check-pair": cmd_check_pair,
    "detect": cmd_detect,
    "refine": cmd_refine,
    "experiments": cmd_experiments,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except InvalidInputError as exc:
        print(f"sepwit: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"sepwit: no convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED


if __name__ == "__main__":
    sys.exit(main())
