#!/usr/bin/env python3
"""
GREM Laboratory - Command Line Runner

One entry point with a subcommand per experiment (phase diagram, exact
moments, ensemble simulation, zeros, fluctuation tests, cascade zeta, CREM,
Laplacian check). Every run is registered in the run store and leaves a
JSON manifest beside its outputs so it can be replayed with `rerun`.
Exit codes: 0 success, 2 validation error, 3 numeric failure, 1 otherwise.
"""

import argparse
import csv
import functools
import json
import logging
import math
import os
import subprocess
import sys
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from cascade import (fullness_condition_number, has_no_atoms, hill_tail_index, sample_cascade,
                     stability_test, zeta_eval, zeta_samples)
from config import (get_boundary_tol, get_leaf_budget, get_log_domain_threshold, get_log_level,
                    get_t_ladder, get_threads, get_zero_tol)
from errors import GremError, InvalidParameter, ModelFileError, NumericFailure, ValidationError
from model import NORMALIZER_KINDS, ComplexTemp, load_model, model_to_dict, normalizer
from moments import pair_correlation, variance_exact, window_correlation
from phase import (area_density_grid, composite_counts_grid, crem_log_partition, grid_axes,
                   labels_from_codes, laplacian_check, level_codes_grid, load_profile,
                   log_partition_grid, phase_census)
from run_store import RunStatus, get_run_store
from simulate import SimConfig, empirical_log_partition, sample_partition, write_ensemble
from stats import LawKind, LimitLaw, fluctuation_test
from zeros import find_zeros_ensemble, write_zeros_csv, zero_statistics

logger = logging.getLogger(__name__)

VERSION = "0.1.0"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


# -- argument parsing helpers ---------------------------------------------

def parse_complex_list(text: str) -> List[complex]:
    """'0.3+0.1i,1.2' -> [0.3+0.1j, 1.2+0j]"""
    return [ComplexTemp.parse(part).beta for part in text.split(",") if part.strip()]


def parse_floats(text: str, count: Optional[int] = None, name: str = "value") -> List[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InvalidParameter(f"{name} must be a comma list of numbers, got {text!r}")
    if count is not None and len(values) != count:
        raise InvalidParameter(f"{name} needs {count} numbers, got {len(values)}")
    return values


def load_betas(text: str) -> List[complex]:
    """A JSON file holding a list of temperatures, or an inline comma list"""
    if text.endswith(".json"):
        try:
            with open(text, "r") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ModelFileError(f"Cannot read beta file {text}: {e}")
        out = []
        for item in raw:
            if isinstance(item, dict):
                out.append(complex(item.get("re", 0.0), item.get("im", 0.0)))
            elif isinstance(item, (list, tuple)):
                out.append(complex(item[0], item[1]))
            elif isinstance(item, str):
                out.append(ComplexTemp.parse(item).beta)
            else:
                out.append(complex(item))
        return out
    return parse_complex_list(text)


def to_jsonable(obj: Any) -> Any:
    """Complex numbers become {"re", "im"}; numpy scalars and arrays become plain Python"""
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set)):
        items = sorted(obj) if isinstance(obj, set) else obj
        return [to_jsonable(x) for x in items]
    return obj


def emit_json(payload: Any, out: Optional[str]) -> List[str]:
    text = json.dumps(to_jsonable(payload), indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
        logger.info(f"Wrote {out}")
        return [out]
    print(text)
    return []


def _model(args):
    if not args.model:
        raise InvalidParameter(f"{args.command} needs --model")
    return load_model(args.model)


# -- subcommands ------------------------------------------------------------

def cmd_phase(args) -> List[str]:
    model = _model(args)
    xmin, xmax, ymin, ymax, nx, ny = parse_floats(args.grid, 6, "--grid")
    rect = (xmin, xmax, ymin, ymax)
    if args.census:
        report = phase_census(model, rect, int(nx), int(ny))
        return emit_json({"words": report.words, "phase_count": report.phase_count,
                          "open_points": report.open_points, "boundary_points": report.boundary_points,
                          "ordered": report.ordered}, args.out)

    S, T = grid_axes(rect, int(nx), int(ny))
    codes = level_codes_grid(model, S, T)
    counts = composite_counts_grid(codes)
    p = log_partition_grid(model, S, T)
    density = area_density_grid(model, S, T)

    header = ["sigma", "tau"] + [f"level_{k}" for k in range(1, model.d + 1)] + \
             ["d1", "d2", "d3", "p", "area_density"]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(fh)
        writer.writerow(header)
        flat_codes = codes.reshape(model.d, -1)
        flat_counts = counts.reshape(3, -1)
        for i, (s, t, pv, dv) in enumerate(zip(S.ravel(), T.ravel(), p.ravel(), density.ravel())):
            writer.writerow([repr(float(s)), repr(float(t))] + labels_from_codes(flat_codes[:, i]) +
                            [int(c) for c in flat_counts[:, i]] + [repr(float(pv)), repr(float(dv))])
    finally:
        if args.out:
            fh.close()
    if args.out:
        logger.info(f"Wrote {S.size} grid rows to {args.out}")
        return [args.out]
    return []


def cmd_moments(args) -> List[str]:
    model = _model(args)
    beta = ComplexTemp.parse(args.beta).beta
    if args.normalizer:
        value = normalizer(model, args.n, args.normalizer, beta,
                           t=ComplexTemp.parse(args.t).beta, level=args.level)
        return emit_json({"kind": args.normalizer, "n": args.n, "beta": beta, "value": value}, args.out)
    if args.window:
        t1, t2 = parse_complex_list(args.window)
        corr = window_correlation(model, args.n, beta, t1, t2, args.scaling)
        return emit_json(corr.__dict__, args.out)
    if args.beta2:
        corr = pair_correlation(model, args.n, beta, ComplexTemp.parse(args.beta2).beta)
        payload = dict(corr.__dict__)
        payload.update({"conj": corr.conj, "plain": corr.plain})
        return emit_json(payload, args.out)
    return emit_json(variance_exact(model, args.n, beta).to_dict(), args.out)


def _sim_config(args, model, betas) -> SimConfig:
    return SimConfig(model=model, n=args.n, seed=args.seed, replicates=args.reps, betas=betas,
                     mode=args.mode, threads=args.threads, leaf_budget=args.leaf_budget)


def cmd_simulate(args) -> List[str]:
    model = _model(args)
    config = _sim_config(args, model, load_betas(args.betas))
    ensemble = sample_partition(config)
    outputs = []
    log_domain = config.log_domain
    if args.out:
        log_domain = write_ensemble(args.out, ensemble.log_values, log_domain)
        outputs.append(args.out)
    summary = empirical_log_partition(ensemble)
    payload = {"n": config.n, "replicates": config.replicates, "log_domain": log_domain,
               "betas": summary.betas, "median_free_energy": summary.median, "iqr_free_energy": summary.iqr,
               "zero_values": summary.zero_counts}
    return outputs + emit_json(payload, args.summary)


def cmd_zeros(args) -> List[str]:
    model = _model(args)
    rect = tuple(parse_floats(args.rect, 4, "--rect"))
    zero_sets = find_zeros_ensemble(model, args.n, args.seed, args.reps, rect, threads=args.threads,
                                    tol_z=args.tol_z, leaf_budget=args.leaf_budget)
    outputs = []
    if args.out:
        write_zeros_csv(args.out, zero_sets)
        outputs.append(args.out)
    bins = tuple(int(b) for b in parse_floats(args.bins, 2, "--bins"))
    stats_ = zero_statistics(zero_sets, model, args.n, bins)
    payload = {"n": args.n, "replicates": args.reps, "total_zeros": stats_.total,
               "pooled_density": stats_.pooled_density,
               "cells": [{"rectangle": c.rectangle, "count": c.count, "empirical": c.empirical,
                          "predicted": c.predicted} for c in stats_.cells]}
    if not args.out:
        payload["zeros"] = [{"replicate": zs.replicate, "zeros": [z.value for z in zs.zeros]} for zs in zero_sets]
    return outputs + emit_json(payload, args.summary)


def cmd_fluct(args) -> List[str]:
    model = _model(args)
    betas = parse_complex_list(args.beta)
    config = _sim_config(args, model, betas)
    law = None
    if args.law != "auto":
        law = LimitLaw(kind=args.law, var=args.var,
                       z=tuple(parse_complex_list(args.z)) if args.z else (),
                       index=args.index if args.index is not None else math.nan,
                       normalization=args.normalization or ("mean_var" if args.law in (
                           LawKind.COMPLEX_NORMAL.value, LawKind.REAL_NORMAL.value) else "exp_cn"))
    return emit_json(fluctuation_test(config, law), args.out)


def cmd_zeta(args) -> List[str]:
    z = parse_complex_list(args.z)
    if len(z) != args.d:
        raise InvalidParameter(f"--z has {len(z)} components for --d {args.d}")
    samples = zeta_samples(args.d, z, args.reps, args.T, args.seed, mode=args.mode, threads=args.threads)
    ladder = get_t_ladder()
    first = zeta_eval(sample_cascade(args.d, args.T, args.seed, 0), z, mode=args.mode, ladder=ladder)
    moduli = np.abs(samples)
    payload: Dict[str, Any] = {
        "d": args.d, "z": z, "T": args.T, "mode": args.mode, "replicates": args.reps,
        "scaled_mean": complex(np.mean(samples)),
        "median_modulus": float(np.median(moduli)),
        "ladder": first.ladder, "cauchy_increments": first.increments,
        "no_atoms": has_no_atoms(samples),
        "fullness_condition_number": fullness_condition_number(samples),
    }
    if np.ptp(moduli) > 0 and args.reps > 20:
        payload["tail_index"] = hill_tail_index(moduli, max(10, args.reps // 100))
        payload["expected_tail_index"] = 1.0 / z[0].real
    if args.stability:
        report = stability_test(args.d, z, args.stability, args.reps, args.T, args.seed, threads=args.threads)
        payload["stability"] = report.__dict__
    return emit_json(payload, args.out)


def cmd_crem(args) -> List[str]:
    profile = load_profile(args.A, args.alpha)
    results = [{"beta": b, **crem_log_partition(profile, b).to_dict()} for b in parse_complex_list(args.beta)]
    return emit_json(results[0] if len(results) == 1 else results, args.out)


def cmd_laplacian(args) -> List[str]:
    model = _model(args)
    rect = tuple(parse_floats(args.rect, 4, "--rect"))
    report = laplacian_check(model, rect, args.h, args.samples)
    payload = {"grid_h": report.grid_h, "interior_points": report.interior_points,
               "interior_max_error": report.interior_max_error, "max_jump_error": report.max_jump_error,
               "passed": report.passed(), "jumps": [j.__dict__ | {"kind": j.kind.value} for j in report.jumps]}
    return emit_json(payload, args.out)


def cmd_runs(args) -> List[str]:
    store = get_run_store()
    if args.stats:
        print(json.dumps(store.get_statistics(), indent=2))
        return []
    status = RunStatus(args.status) if args.status else None
    for run in store.list_runs(args.filter_command, status, args.limit):
        print(f"{run.id}\t{run.created_at.isoformat(timespec='seconds')}\t{run.command}\t"
              f"{run.status.value}\t{run.exit_code if run.exit_code is not None else '-'}\t"
              f"{run.manifest_path or '-'}")
    return []


COMMANDS = {
    "phase": cmd_phase,
    "moments": cmd_moments,
    "simulate": cmd_simulate,
    "zeros": cmd_zeros,
    "fluct": cmd_fluct,
    "zeta": cmd_zeta,
    "crem": cmd_crem,
    "laplacian": cmd_laplacian,
}


def _add_global_flags(parser: argparse.ArgumentParser, suppress: bool = False):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--threads", type=int, default=default, help="worker cap (default: all CPUs)")
    parser.add_argument("--log-level", default=default, help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS if suppress else 0)
    parser.add_argument("--manifest-dir", default=default, help="where manifests go (default: beside outputs)")
    parser.add_argument("--leaf-budget", type=int, default=default)


def build_parser() -> argparse.ArgumentParser:
    """
    Command-line parser

    Global flags are accepted before or after the subcommand; a value given
    after it wins.
    """
    parser = argparse.ArgumentParser(prog="grem", description="GREM complex-temperature laboratory")
    _add_global_flags(parser)
    # SUPPRESS keeps the top-level values unless the flag follows the subcommand
    common = argparse.ArgumentParser(add_help=False)
    _add_global_flags(common, suppress=True)

    sub = parser.add_subparsers(dest="command", required=True)
    add_parser = functools.partial(sub.add_parser, parents=[common])

    p = add_parser("phase", help="phase diagram on a grid")
    p.add_argument("--model", required=True)
    p.add_argument("--grid", default="-3,3,-3,3,200,200")
    p.add_argument("--census", action="store_true")
    p.add_argument("--out")

    p = add_parser("moments", help="exact moments, correlations and normalizers")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--beta2")
    p.add_argument("--window", help="t1,t2 local coordinates around beta")
    p.add_argument("--scaling", choices=("sqrt", "linear"), default="sqrt")
    p.add_argument("--normalizer", choices=NORMALIZER_KINDS)
    p.add_argument("--level", type=int)
    p.add_argument("--t", default="0")
    p.add_argument("--out")

    p = add_parser("simulate", help="sample Z_n on a set of temperatures")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--betas", required=True, help="JSON file or comma list")
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--mode", choices=("leaves", "levels"), default="leaves")
    p.add_argument("--out")
    p.add_argument("--summary")

    p = add_parser("zeros", help="zeros of Z_n in a rectangle")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rect", required=True)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--bins", default="1,1")
    p.add_argument("--tol-z", dest="tol_z", type=float)
    p.add_argument("--out")
    p.add_argument("--summary")

    p = add_parser("fluct", help="fluctuation tests against limit laws")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--reps", type=int, default=2000)
    p.add_argument("--mode", choices=("leaves", "levels"), default="leaves")
    p.add_argument("--law", choices=["auto"] + [k.value for k in LawKind], default="auto")
    p.add_argument("--var", type=float, default=1.0)
    p.add_argument("--z")
    p.add_argument("--index", type=float)
    p.add_argument("--normalization", choices=("mean_var", "exp_cn"))
    p.add_argument("--out")

    p = add_parser("zeta", help="random zeta function of the Poisson cascade")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--T", type=float, default=200.0)
    p.add_argument("--reps", type=int, default=2000)
    p.add_argument("--mode", choices=("domain", "continued"), default="continued")
    p.add_argument("--stability", type=int, help="m for the operator-stability check")
    p.add_argument("--out")

    p = add_parser("crem", help="continuous-hierarchy limit")
    p.add_argument("--A", required=True, help="profile JSON")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--out")

    p = add_parser("laplacian", help="check the Laplacian of p against the zero density")
    p.add_argument("--model", required=True)
    p.add_argument("--rect", default="0.05,3,0.05,3")
    p.add_argument("--h", type=float, default=5e-3)
    p.add_argument("--samples", type=int, default=16)
    p.add_argument("--out")

    p = add_parser("rerun", help="replay a manifest")
    p.add_argument("--manifest", required=True)

    p = add_parser("runs", help="list registered runs")
    p.add_argument("--command", dest="filter_command")
    p.add_argument("--status", choices=[s.value for s in RunStatus])
    p.add_argument("--limit", type=int, default=50)
    p.add_argument("--stats", action="store_true")
    return parser


# -- manifests ------------------------------------------------------------

def version_string() -> str:
    try:
        result = subprocess.run(["git", "describe", "--always", "--dirty"], capture_output=True,
                                text=True, timeout=5, cwd=os.path.dirname(os.path.abspath(__file__)))
        if result.returncode == 0 and result.stdout.strip():
            return result.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return VERSION


def resolved_config(args) -> Dict[str, Any]:
    return {
        "threads": get_threads(args.threads),
        "leaf_budget": get_leaf_budget(args.leaf_budget),
        "boundary_tol": get_boundary_tol(),
        "zero_tol": get_zero_tol(),
        "t_ladder": get_t_ladder(),
        "log_domain_threshold": get_log_domain_threshold(),
    }


def write_manifest(args, argv: Sequence[str], run_id: Optional[int], outputs: List[str]) -> str:
    directory = args.manifest_dir or (os.path.dirname(os.path.abspath(outputs[0])) if outputs else os.getcwd())
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, f"{args.command}-{run_id if run_id is not None else 'local'}.manifest.json")
    manifest = {
        "command": args.command,
        "argv": list(argv),
        "arguments": {k: v for k, v in vars(args).items()},
        "config": resolved_config(args),
        "seed": args.seed,
        "version": version_string(),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "outputs": outputs,
        "run_id": run_id,
    }
    if getattr(args, "model", None):
        manifest["model"] = model_to_dict(load_model(args.model))
    with open(path, "w") as fh:
        json.dump(to_jsonable(manifest), fh, indent=2)
    logger.info(f"Wrote manifest {path}")
    return path


def load_manifest_argv(path: str, threads: Optional[int]) -> List[str]:
    """argv of a recorded run, with --threads replaced when given"""
    try:
        with open(path, "r") as fh:
            manifest = json.load(fh)
        argv = list(manifest["argv"])
    except (OSError, json.JSONDecodeError, KeyError) as e:
        raise ModelFileError(f"Cannot read manifest {path}: {e}")
    if threads is not None:
        cleaned = []
        skip = False
        for item in argv:
            if skip:
                skip = False
                continue
            if item == "--threads":
                skip = True
                continue
            if item.startswith("--threads="):
                continue
            cleaned.append(item)
        argv = ["--threads", str(threads)] + cleaned
    return argv


def run(argv: Sequence[str]) -> int:
    """Parse, dispatch, register and map errors to exit codes"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "rerun":
        replay = load_manifest_argv(args.manifest, args.threads)
        logger.info(f"Replaying {args.manifest}: {' '.join(replay)}")
        return run(replay)
    if args.command == "runs":
        cmd_runs(args)
        return EXIT_OK

    store = get_run_store()
    record = store.create_run(args.command, {k: v for k, v in vars(args).items()}, seed=args.seed)
    try:
        outputs = COMMANDS[args.command](args)
        manifest = write_manifest(args, argv, record.id, outputs)
        store.complete_run(record.id, outputs, manifest)
        return EXIT_OK
    except ValidationError as e:
        logger.error(f"{args.command}: {e}")
        print(f"grem {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        store.fail_run(record.id, EXIT_VALIDATION, str(e))
        return EXIT_VALIDATION
    except NumericFailure as e:
        logger.error(f"{args.command}: {e}")
        print(f"grem {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        store.fail_run(record.id, EXIT_NUMERIC, str(e))
        return EXIT_NUMERIC
    except Exception as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"grem {args.command}: {e}", file=sys.stderr)
        store.fail_run(record.id, EXIT_FAILURE, str(e))
        return EXIT_FAILURE


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        level = get_log_level()
    except GremError:
        level = "INFO"
    for i, item in enumerate(argv):
        if item == "--log-level" and i + 1 < len(argv):
            level = argv[i + 1].upper()
        elif item.startswith("--log-level="):
            level = item.split("=", 1)[1].upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    try:
        return run(argv)
    except GremError as e:
        # failures before a run is registered (bad manifest, bad environment)
        print(f"grem: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_VALIDATION if isinstance(e, ValidationError) else EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
