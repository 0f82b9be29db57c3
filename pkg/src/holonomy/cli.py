"""Command-line front end.

    holonomy COMMAND SCENE [flags]

Commands: transport, holonomy, wilson, check-cocycle, check-morphism, gauge,
curvature, small-loop, chern, extract, roundtrip, report.  SCENE is a scene
file path or the name of a shipped preset (e.g. monopole_k1).  Every command
prints one machine-readable JSON record to standard output and exits with 0
on success/pass, 1 on a failed check, 2 on input errors.  Records are
byte-identical across runs for identical scene, seed and flags.

The report command additionally writes a CSV summary and renders matplotlib
figures next to it (see --output).
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

import numpy as np

from .descent import (
    AnchorChoice,
    extract_descent,
    extraction_morphism,
    factor_path,
    reconstruct_transport,
    reconstruction_oracle,
    stencil_points,
    verify_cocycle,
    verify_morphism,
)
from .errors import HolonomyError, SceneError
from .scenes import Scene, dump_json, encode_matrix, load_scene
from .solver import SolverConfig, check_gauge_covariance
from .wilson import chern_number, small_loop_curvature, wilson_line
from .connection import curvature_batch

COMMANDS = (
    "transport",
    "holonomy",
    "wilson",
    "check-cocycle",
    "check-morphism",
    "gauge",
    "curvature",
    "small-loop",
    "chern",
    "extract",
    "roundtrip",
    "report",
)

ROUNDTRIP_TOL = 1e-4


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="holonomy",
        description="Numerical parallel transport over differential cocycles",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("scene", help="scene file or shipped preset name")
    p.add_argument("--path", help="named path from the scene")
    p.add_argument("--samples", type=int, default=200,
                   help="sample count for verification commands")
    p.add_argument("--seed", type=int, default=None,
                   help="override the scene seed")
    p.add_argument("--tol", type=float, default=None,
                   help="override the solver error target")
    p.add_argument("--steps", type=int, default=None,
                   help="override the solver base step count")
    p.add_argument("--max-refine", type=int, default=None,
                   help="override the solver refinement budget")
    p.add_argument("--eps", type=float, default=1e-2,
                   help="edge length for small-loop curvature")
    p.add_argument("--skip-verify", action="store_true",
                   help="skip the cocycle verification gate")
    p.add_argument("--output", help="also write the record (or report) here")
    return p


def _emit(record: dict, output: str | None) -> None:
    text = dump_json(record)
    if output:
        _atomic_write(output, text)
    sys.stdout.write(text)


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-record-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _solver_config(scene: Scene, args) -> SolverConfig:
    return SolverConfig(
        base_steps=args.steps if args.steps is not None else scene.solver.base_steps,
        tol=args.tol if args.tol is not None else scene.solver.tol,
        max_refinements=(
            args.max_refine if args.max_refine is not None
            else scene.solver.max_refinements
        ),
    )


def _need_path(scene: Scene, args):
    if not args.path:
        raise SceneError("this command needs --path NAME")
    return scene.path(args.path)


def _verification_gate(scene: Scene, args, record: dict) -> bool:
    """Scene-level cocycle check; skipped with --skip-verify."""
    if args.skip_verify:
        record["verified"] = "skipped"
        return True
    seed = args.seed if args.seed is not None else scene.seed
    rep = verify_cocycle(scene.cocycle, n_samples=min(args.samples, 200), seed=seed)
    record["verified"] = rep.to_json()
    return rep.passed


def _containing_set(scene: Scene, gamma):
    ts = np.linspace(0.0, 1.0, 128)
    pts = gamma(ts)
    best, best_val = None, 0.0
    for cset in scene.cover.sets:
        m = float(cset.clearance(pts).min())
        if m > best_val:
            best, best_val = cset, m
    if best is None:
        raise SceneError("path is not contained in any single cover set")
    return best


def run(args) -> int:
    scene = load_scene(args.scene)
    cfg = _solver_config(scene, args)
    seed = args.seed if args.seed is not None else scene.seed
    anchors = AnchorChoice.by_clearance(scene.cover)
    record: dict = {"command": args.command, "scene": args.scene, "seed": seed}

    if args.command == "check-cocycle":
        rep = verify_cocycle(scene.cocycle, n_samples=args.samples, seed=seed)
        record.update(rep.to_json())
        _emit(record, args.output)
        return 0 if rep.passed else 1

    if args.command == "check-morphism":
        if scene.morphism is None:
            raise SceneError("scene has no morphism block")
        h, target = scene.morphism
        rep = verify_morphism(h, scene.cocycle, target, n_samples=args.samples,
                              seed=seed)
        record.update(rep.to_json())
        _emit(record, args.output)
        return 0 if rep.passed else 1

    if not _verification_gate(scene, args, record):
        record["error"] = "cocycle verification failed (use --skip-verify to force)"
        _emit(record, args.output)
        return 1

    if args.command in ("transport", "wilson", "holonomy"):
        gamma = _need_path(scene, args)
        if args.command == "holonomy" and not gamma.is_loop():
            raise SceneError(f"path {args.path!r} is not a closed loop")
        res = reconstruct_transport(factor_path(gamma, scene.cocycle, anchors),
                                    scene.cocycle, cfg)
        key = {"transport": "transport", "wilson": "wilson",
               "holonomy": "holonomy"}[args.command]
        record[key] = encode_matrix(res.value.mat)
        record["estimated_error"] = res.estimated_error
        record["steps"] = res.steps_used
        record["anchor"] = anchors(gamma.start)
        record["anchor_end"] = anchors(gamma.end)
        record["tol"] = cfg.tol
        record["path"] = args.path
        _emit(record, args.output)
        return 0

    if args.command == "gauge":
        if scene.gauge is None:
            raise SceneError("scene has no gauge block")
        gamma = _need_path(scene, args)
        cset = _containing_set(scene, gamma)
        dev = check_gauge_covariance(scene.cocycle.form(cset.id), scene.gauge,
                                     gamma, cfg)
        tol = 1e-6
        record.update({"path": args.path, "set": cset.id, "deviation": dev,
                       "tol": tol, "pass": dev <= tol})
        _emit(record, args.output)
        return 0 if dev <= tol else 1

    if args.command == "curvature":
        out = {}
        for cset in scene.cover.sets:
            pts = stencil_points(cset, n=9)
            frame = cset.chart_frame(pts)
            k = curvature_batch(scene.cocycle.form(cset.id), cset, pts,
                                frame[:, 0, :], frame[:, 1, :])
            norms = np.linalg.svd(k, compute_uv=False)[..., 0]
            out[cset.id] = {
                "max_norm": float(norms.max()),
                "mean_norm": float(norms.mean()),
                "n_points": int(len(pts)),
            }
        record["curvature"] = out
        _emit(record, args.output)
        return 0

    if args.command == "small-loop":
        out = {}
        for cset in scene.cover.sets:
            frame = cset.chart_frame(cset.basepoint)
            res = small_loop_curvature(scene.cocycle, cset.id, cset.basepoint,
                                       frame[0], frame[1], args.eps, anchors, cfg)
            out[cset.id] = {"estimate": encode_matrix(res.value.mat),
                            "eps": args.eps}
        record["small_loop"] = out
        _emit(record, args.output)
        return 0

    if args.command == "chern":
        record["chern"] = chern_number(scene.cocycle)
        _emit(record, args.output)
        return 0

    if args.command in ("extract", "roundtrip"):
        ext_cfg = SolverConfig(base_steps=64, tol=1e-8)
        oracle = reconstruction_oracle(scene.cocycle, anchors, ext_cfg)
        ext = extract_descent(oracle, scene.cover, scene.group)
        n = min(args.samples, 12)
        rep = verify_cocycle(ext, n_samples=n, seed=seed,
                             compat_tol=ROUNDTRIP_TOL)
        record["extracted"] = rep.to_json()
        if args.command == "extract":
            _emit(record, args.output)
            return 0 if rep.passed else 1
        h = extraction_morphism(
            reconstruction_oracle(scene.cocycle, anchors, ext_cfg),
            scene.cocycle, anchors,
        )
        mrep = verify_morphism(h, scene.cocycle, ext, n_samples=n, seed=seed,
                               form_tol=ROUNDTRIP_TOL,
                               transition_tol=ROUNDTRIP_TOL)
        record["morphism"] = mrep.to_json()
        ok = rep.passed and mrep.passed
        record["pass"] = ok
        _emit(record, args.output)
        return 0 if ok else 1

    if args.command == "report":
        from .figures import write_report

        files = write_report(scene, args.scene, cfg, seed,
                             args.output or "report.csv")
        record["files"] = files
        _emit(record, None)
        return 0

    raise SceneError(f"unhandled command {args.command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (SceneError, HolonomyError, OSError) as exc:
        _emit({"command": args.command, "scene": args.scene,
               "error": f"{type(exc).__name__}: {exc}"}, args.output)
        return 2


if __name__ == "__main__":
    sys.exit(main())
