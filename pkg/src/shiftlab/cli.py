"""Command-line harness.

Subcommands: ``step`` (one shifted step), ``rate-scan`` (trajectory
ensembles / fiber scans / episode search), ``hexagon`` (n = 3 phase
portrait), ``calibrate`` (neighborhood radii), ``verify`` (property
suites).  Exit codes: 0 ok, 1 suite failure, 2 numerical-domain error,
3 parse error, 4 calibration failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from shiftlab import __version__
from shiftlab._core import BACKEND
from shiftlab import emit
from shiftlab.dynamics import phi_star
from shiftlab.errors import (
    AlmostSingular,
    Breakdown,
    CalibrationFailed,
    DuplicateEigenvalue,
    NoConvergence,
    ShiftLabError,
    Singular,
)
from shiftlab.experiments import (
    HEXAGON_COLUMNS,
    TRACE_COLUMNS,
    fiber_scan,
    hexagon_rows,
    quadratic_episode_search,
    run_rate_scan,
    strong_ap_witness_base,
)
from shiftlab.geometry import calibrate_neighborhoods, classify_spectrum
from shiftlab.strategies import Strategy, parse_strategy
from shiftlab.tridiag import SymTridiag

EXIT_OK = 0
EXIT_SUITE_FAILURE = 1
EXIT_DOMAIN_ERROR = 2
EXIT_PARSE_ERROR = 3
EXIT_CALIBRATION_FAILURE = 4

DOMAIN_ERRORS = (AlmostSingular, Singular, NoConvergence, Breakdown, DuplicateEigenvalue)


class ParseError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="shiftlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"shiftlab {__version__} ({BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value file; flags override it")
    common.add_argument("--spectrum", help="comma-separated eigenvalues, e.g. 1,2,4")
    common.add_argument("--strategy", help="rayleigh | wilkinson | mixed:<eps>")
    common.add_argument("--seed", type=int, help="64-bit seed (default 0)")
    common.add_argument("--trials", type=int, help="number of trajectories")
    common.add_argument("--max-steps", type=int, help="step budget per trajectory")
    common.add_argument("--deflate-tol", type=float, help="bottom-entry stopping tolerance")
    common.add_argument("--out", help="output path (CSV or JSON)")

    p_step = sub.add_parser("step", parents=[common], help="apply one shifted step")
    p_step.add_argument("--diag", help="comma-separated diagonal entries")
    p_step.add_argument("--sub", help="comma-separated subdiagonal entries")
    p_step.add_argument("--in", dest="matrix_in", help="matrix JSON file {diag, sub}")
    p_step.add_argument("--shift", type=float, help="explicit shift value")

    p_scan = sub.add_parser("rate-scan", parents=[common], help="trajectory ensemble scan")
    p_scan.add_argument("--fiber-grid", help="comma-separated fiber values for a one-step scan")
    p_scan.add_argument("--component", type=int, help="deflation component for the fiber scan")
    p_scan.add_argument("--base-in", help="matrix JSON file with the fiber-scan base point")
    p_scan.add_argument(
        "--track-double",
        action="store_true",
        default=None,
        help="continue past single deflation until the second subdiagonal deflates",
    )
    p_scan.add_argument(
        "--episode-search",
        action="store_true",
        default=None,
        help="refining search for a strict-quadratic episode (symmetric n=3 spectrum)",
    )

    p_hex = sub.add_parser("hexagon", parents=[common], help="n=3 phase portrait sampling")
    p_hex.add_argument("--grid", type=int, help="interior lattice density (default 12)")
    p_hex.add_argument("--edge-samples", type=int, help="samples per edge (default 9)")

    p_cal = sub.add_parser("calibrate", parents=[common], help="neighborhood calibration")
    p_cal.add_argument("--samples", type=int, help="tube samples per radius (default 200)")

    p_ver = sub.add_parser("verify", parents=[common], help="run the property suites")
    p_ver.add_argument("--tol-scale", type=float, help="tolerance multiplier (1e-4 demonstrates failure)")
    p_ver.add_argument("--json", dest="json_out", help="write a JSON report here")
    return parser


def merge_config(args) -> dict:
    """Config file values with command-line flags taking precedence."""
    merged = {}
    if getattr(args, "config", None):
        merged.update(emit.parse_config_file(args.config))
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        merged[key] = value
    return merged


def _get(cfg, key, cast, default):
    if key not in cfg:
        return default
    value = cfg[key]
    if isinstance(value, str):
        try:
            return cast(value)
        except ValueError as exc:
            raise ParseError(f"bad value for {key}: {value!r}") from exc
    return value


def _get_bool(cfg, key) -> bool:
    value = cfg.get(key)
    if isinstance(value, str):
        return value.strip().lower() in ("1", "true", "yes", "on")
    return bool(value)


def _spectrum_info(cfg):
    if "spectrum" not in cfg:
        raise ParseError("--spectrum is required")
    spectrum = cfg["spectrum"]
    values = emit.parse_reals(spectrum) if isinstance(spectrum, str) else list(spectrum)
    return classify_spectrum(values)


def _strategy(cfg) -> Strategy:
    return parse_strategy(str(cfg.get("strategy", "wilkinson")))


def _sidecar(path) -> str:
    return str(path) + ".meta.json"


def cmd_step(cfg) -> int:
    if "matrix_in" in cfg:
        T = emit.read_matrix_json(cfg["matrix_in"])
    else:
        if "diag" not in cfg or "sub" not in cfg:
            raise ParseError("step needs --diag/--sub or --in")
        try:
            T = SymTridiag(emit.parse_reals(str(cfg["diag"])), emit.parse_reals(str(cfg["sub"])))
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
    if "shift" in cfg:
        shift = _get(cfg, "shift", float, 0.0)
        rule = "explicit"
    else:
        strat = _strategy(cfg)
        shift = strat.shift(T)
        rule = strat.label()
    result = phi_star(T, shift)
    payload = {
        "input": emit.matrix_to_dict(T),
        "shift": shift,
        "shift_rule": rule,
        "result": emit.matrix_to_dict(result.next),
        "ratio_last": result.ratio_last,
        "det_sign": result.det_sign,
    }
    text = json.dumps(emit.jsonable(payload), indent=2, sort_keys=True)
    print(text)
    if "out" in cfg:
        emit.write_json(cfg["out"], payload)
    return EXIT_OK


def cmd_rate_scan(cfg) -> int:
    info = _spectrum_info(cfg)
    strat = _strategy(cfg)
    seed = _get(cfg, "seed", int, 0)
    out = cfg.get("out")

    if "fiber_grid" in cfg or _get_bool(cfg, "episode_search"):
        header = ["scenario", "index", "b", "b_next", "ratio2", "ratio3", "shift_gap"]
        rows = []
        meta = {
            "spectrum": np.asarray(info.lam).tolist(),
            "ap_class": info.ap_class,
            "strategy": strat.label(),
            "seed": seed,
        }
        if "fiber_grid" in cfg:
            grid = emit.parse_reals(str(cfg["fiber_grid"]))
            component = _get(cfg, "component", int, info.n - 1)
            if "base_in" in cfg:
                base = emit.read_matrix_json(cfg["base_in"])
            elif info.ap_class == "strong_ap":
                base = strong_ap_witness_base(info)
            else:
                raise ParseError("--fiber-grid needs --base-in or a symmetric n=3 spectrum")
            scan = fiber_scan(base, component, strat, grid, info)
            for j, b in enumerate(scan.fibers):
                rows.append(["fiber", j, b, scan.b_next[j], scan.ratio2[j], scan.ratio3[j], scan.shift_gap[j]])
            meta["fiber_exponent"] = scan.exponent
            meta["ratio3_growth"] = scan.ratio3_growth()
        if _get_bool(cfg, "episode_search"):
            ep = quadratic_episode_search(info, strat)
            bseq = np.abs(ep.trace.b1_series)
            for j, rec in enumerate(ep.trace.records):
                rows.append(["episode", rec.k, bseq[j], None, rec.ratio2, rec.ratio3, None])
            meta["episode_len"] = ep.episode_len
            meta["episode_start"] = ep.episode_start
            meta["episode_ratio2"] = list(ep.ratio2_values)
            meta["episode_ratio3_growth"] = ep.ratio3_growth
            meta["episode_start_matrix"] = emit.matrix_to_dict(ep.start_matrix)
        if out:
            emit.write_csv(out, header, rows)
            emit.write_json(_sidecar(out), meta)
        else:
            print(emit.render_csv(header, rows), end="")
            print(json.dumps(emit.jsonable(meta), indent=2, sort_keys=True), file=sys.stderr)
        return EXIT_OK

    trials = _get(cfg, "trials", int, 100)
    max_steps = _get(cfg, "max_steps", int, 60)
    deflate_tol = _get(cfg, "deflate_tol", float, 1e-14)
    scan = run_rate_scan(info, strat, trials, max_steps, deflate_tol, seed,
                         track_double=_get_bool(cfg, "track_double"))
    if out:
        emit.write_csv(out, TRACE_COLUMNS, scan.rows)
        emit.write_json(_sidecar(out), scan.metadata)
    else:
        print(emit.render_csv(TRACE_COLUMNS, scan.rows), end="")
        print(json.dumps(emit.jsonable(scan.metadata), indent=2, sort_keys=True), file=sys.stderr)
    return EXIT_OK


def cmd_hexagon(cfg) -> int:
    info = _spectrum_info(cfg)
    if info.n != 3:
        raise ParseError("hexagon needs exactly three eigenvalues")
    density = _get(cfg, "grid", int, 12)
    edge_samples = _get(cfg, "edge_samples", int, 9)
    rows = hexagon_rows(info, density=density, edge_samples=edge_samples)
    meta = {
        "spectrum": np.asarray(info.lam).tolist(),
        "ap_class": info.ap_class,
        "grid": density,
        "edge_samples": edge_samples,
        "columns": list(HEXAGON_COLUMNS),
    }
    out = cfg.get("out")
    if out:
        emit.write_csv(out, HEXAGON_COLUMNS, rows)
        emit.write_json(_sidecar(out), meta)
    else:
        print(emit.render_csv(HEXAGON_COLUMNS, rows), end="")
    return EXIT_OK


def cmd_calibrate(cfg) -> int:
    info = _spectrum_info(cfg)
    strat = _strategy(cfg)
    samples = _get(cfg, "samples", int, 200)
    seed = _get(cfg, "seed", int, 0)
    params = calibrate_neighborhoods(info, strat, samples=samples, seed=seed)
    payload = {
        "spectrum": np.asarray(info.lam).tolist(),
        "ap_class": info.ap_class,
        "gap": info.gap,
        "strategy": strat.label(),
        "samples": samples,
        "seed": seed,
        "params": params.to_dict(),
    }
    print(json.dumps(emit.jsonable(payload), indent=2, sort_keys=True))
    if "out" in cfg:
        emit.write_json(cfg["out"], payload)
    return EXIT_OK


def cmd_verify(cfg) -> int:
    from shiftlab.verify import run_all

    seed = _get(cfg, "seed", int, 0)
    tol_scale = _get(cfg, "tol_scale", float, 1.0)
    results = run_all(seed=seed, tol_scale=tol_scale)
    for res in results:
        print(res.line())
    failed = [res.name for res in results if not res.passed]
    report = {
        "seed": seed,
        "tol_scale": tol_scale,
        "backend": BACKEND,
        "results": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results],
        "failed": failed,
    }
    if "json_out" in cfg:
        emit.write_json(cfg["json_out"], report)
    if failed:
        print(f"FAILED suites: {', '.join(failed)}")
        return EXIT_SUITE_FAILURE
    print(f"all {len(results)} suites passed")
    return EXIT_OK


COMMANDS = {
    "step": cmd_step,
    "rate-scan": cmd_rate_scan,
    "hexagon": cmd_hexagon,
    "calibrate": cmd_calibrate,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = merge_config(args)
        return COMMANDS[args.command](cfg)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except CalibrationFailed as exc:
        print(f"calibration failed: {exc}", file=sys.stderr)
        return EXIT_CALIBRATION_FAILURE
    except DOMAIN_ERRORS as exc:
        print(f"numerical domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN_ERROR
    except ShiftLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN_ERROR


if __name__ == "__main__":
    sys.exit(main())
