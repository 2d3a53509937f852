"""Batch command-line entry point.

Nine subcommands drive the library's samplers and estimators and write one
machine-readable output file (CSV or JSON) plus a run-manifest JSON record
(full resolved configuration, package version, wall time, derived results
such as fitted exponents).

Configuration resolution, lowest to highest precedence: built-in defaults,
a flat ``key=value`` config file given by ``--config``, explicit flags.
Every key is validated before any sampling starts; unknown flags or config
keys are rejected with exit code 2.  Exit codes: 0 success, 2 configuration
error (including unwritable output), 3 numerical failure.

Outputs are byte-identical for identical configurations, independent of
``--workers`` (replicate-parallel work is assigned to fixed chunk streams
and aggregated in replicate order).  The environment variable
``BETA_TAILS_CACHE_DIR`` selects an on-disk cache directory for
weight-field tiles used by the LPP commands.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional

import numpy as np

from . import __version__, lpp, profiles, stats
from .core_rand import make_stream, stream_label
from .ensembles import (
    hermite_batch,
    hermite_scaled_value,
    hermite_spec,
    laguerre_gram_batch,
    laguerre_scaled_value,
    laguerre_spec,
    sample_hermite_modified,
    sample_laguerre_modified,
)
from .tridiag import SymTridiagonal, bidiag_gram, lambda_max

SUBCOMMANDS = (
    "ensemble-sample",
    "tail-fit",
    "qform-check",
    "riccati",
    "lpp-run",
    "lil",
    "dist-equal",
    "tf-scan",
    "rate-fn",
)

_CHUNK = 1024


class CliError(Exception):
    """Configuration problem: reported on stderr, exit code 2."""


class RunError(Exception):
    """Numerical failure during an otherwise valid run: exit code 3."""


# ---------------------------------------------------------------------------
# Value parsers (shared by flags and config-file entries).


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(x) for x in str(text).split(",") if x.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(x) for x in str(text).split(",") if x.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _parse_schedule(text: str) -> list[int]:
    """Preset ``name:param:n_min:n_max`` or an explicit comma list.

    Presets: ``geometric:RHO:MIN:MAX`` (n_k = [rho^k]),
    ``stretched:EPS:MIN:MAX`` (n_k = [exp(k^(1-eps))]),
    ``factorial:EPS:MIN:MAX`` (n_k = [(k!)^((1-eps)^3)]).
    """
    text = str(text)
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 4:
            raise CliError(f"schedule preset needs name:param:n_min:n_max, got {text!r}")
        name, param, n_min, n_max = parts
        try:
            param_f, lo, hi = float(param), int(n_min), int(n_max)
        except ValueError:
            raise CliError(f"malformed schedule preset parameters in {text!r}")
        builders = {
            "geometric": stats.schedule_geometric,
            "stretched": stats.schedule_stretched,
            "factorial": stats.schedule_factorial,
        }
        if name not in builders:
            raise CliError(
                f"unknown schedule preset {name!r} (choose from {sorted(builders)})"
            )
        try:
            sched = builders[name](param_f, lo, hi)
        except ValueError as e:
            raise CliError(f"bad schedule preset {text!r}: {e}")
    else:
        try:
            sched = [int(x) for x in text.split(",") if x.strip() != ""]
        except ValueError:
            raise CliError(f"schedule must be a preset or comma-separated integers: {text!r}")
    if not sched:
        raise CliError(f"schedule {text!r} is empty")
    if sched[0] < 16:
        raise CliError("schedule entries must be >= 16")
    if any(b <= a for a, b in zip(sched, sched[1:])):
        raise CliError("schedule must be strictly increasing")
    return sched


# ---------------------------------------------------------------------------
# Option table.  Each entry: flag dest -> (converter, default, help).
# A default of _REQUIRED marks a key that must come from a flag or the
# config file.

_REQUIRED = object()

_COMMON = {
    "seed": (int, 0, "master seed for all random streams"),
    "workers": (int, 1, "replicate-parallel worker threads"),
    "out": (str, None, "output file path (default: <subcommand>.<ext>)"),
    "config": (str, None, "flat key=value config file supplying defaults"),
    "format": (str, None, "output format: csv or json (commands with a pinned schema accept one)"),
}

_OPTIONS: dict[str, dict[str, tuple]] = {
    "ensemble-sample": {
        "beta": (float, _REQUIRED, "Dyson index beta > 0"),
        "kind": (str, _REQUIRED, "hermite or laguerre"),
        "n": (int, _REQUIRED, "matrix size"),
        "m": (float, None, "Laguerre second parameter (> n-1)"),
        "p": (int, 0, "Gaussian modification depth (0 = unmodified)"),
        "reps": (int, _REQUIRED, "number of replicates"),
    },
    "tail-fit": {
        "beta": (float, None, "Dyson index (required for matrix kinds; lpp is beta = 2)"),
        "kind": (str, _REQUIRED, "hermite, laguerre, or lpp"),
        "n": (int, _REQUIRED, "matrix size / grid size"),
        "m": (float, None, "Laguerre second parameter"),
        "side": (str, _REQUIRED, "right or left"),
        "t_grid": (_float_list, _REQUIRED, "comma list of scaled thresholds t"),
        "reps": (int, _REQUIRED, "replicates per threshold"),
    },
    "qform-check": {
        "beta": (float, _REQUIRED, "Dyson index"),
        "n": (int, _REQUIRED, "matrix size"),
        "t": (float, _REQUIRED, "profile depth parameter"),
        "p": (int, None, "modification depth (default: the profile's support)"),
        "reps": (int, _REQUIRED, "number of replicates"),
    },
    "riccati": {
        "beta": (float, 2.0, "Dyson index"),
        "n": (int, _REQUIRED, "matrix size driving the walk scale"),
        "t_grid": (_float_list, _REQUIRED, "comma list of depths t"),
        "reps": (int, _REQUIRED, "walks per depth"),
    },
    "lpp-run": {
        "n": (int, _REQUIRED, "target index (passage to (n, n) or the matching line)"),
        "reps": (int, _REQUIRED, "number of replicates"),
        "kind": (str, "p2p", "p2p, p2l, l2p, or hs"),
        "convention": (str, lpp.DEFAULT_CONVENTION, "path endpoint convention"),
    },
    "lil": {
        "kind": (str, _REQUIRED, "p2p, p2l, l2p, or hs"),
        "schedule": (str, _REQUIRED, "preset name:param:n_min:n_max or comma list"),
        "convention": (str, lpp.DEFAULT_CONVENTION, "path endpoint convention"),
    },
    "dist-equal": {
        "n": (int, _REQUIRED, "identity size parameter"),
        "reps": (int, _REQUIRED, "draws per side"),
        "variant": (str, "p2p", "identity to test: p2p, p2l, or hs"),
    },
    "tf-scan": {
        "kind": (str, "p2p", "p2p or p2l"),
        "sizes": (_int_list, _REQUIRED, "comma list of sizes n"),
        "fields": (int, _REQUIRED, "independent fields per size (>= 200)"),
    },
    "rate-fn": {
        "eps_grid": (_float_list, [1e-4, 1e-3, 1e-2, 1e-1, 1.0], "comma list of eps > 0"),
        "quad_points": (int, 200, "quadrature subdivision limit"),
    },
}

_DEFAULT_FORMAT = {
    "ensemble-sample": "csv",
    "tail-fit": "csv",
    "qform-check": "json",
    "riccati": "csv",
    "lpp-run": "csv",
    "lil": "csv",
    "dist-equal": "json",
    "tf-scan": "csv",
    "rate-fn": "json",
}

_ALLOWED_FORMATS = {
    "ensemble-sample": ("csv", "json"),
    "tail-fit": ("csv", "json"),
    "qform-check": ("json",),
    "riccati": ("csv", "json"),
    "lpp-run": ("csv", "json"),
    "lil": ("csv", "json"),
    "dist-equal": ("json",),
    "tf-scan": ("csv", "json"),
    "rate-fn": ("json",),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beta-tails",
        description="Monte Carlo experiments on beta-ensemble and last-passage tails",
    )
    parser.add_argument("--version", action="version", version=f"beta-tails {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)
    for cmd in SUBCOMMANDS:
        sp = subs.add_parser(cmd, help=f"{cmd} experiment")
        for dest, (conv, _default, help_text) in {**_OPTIONS[cmd], **_COMMON}.items():
            flag = "--" + dest.replace("_", "-")
            sp.add_argument(flag, dest=dest, type=conv, default=None, help=help_text)
    return parser


def _load_config_file(path: str, allowed: dict[str, tuple]) -> dict:
    if not os.path.exists(path):
        raise CliError(f"config file not found: {path}")
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise CliError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, raw = line.partition("=")
            key = key.strip().replace("-", "_")
            raw = raw.strip()
            if key == "config":
                raise CliError(f"{path}:{lineno}: config files cannot nest")
            if key not in allowed:
                raise CliError(f"{path}:{lineno}: unknown config key {key!r}")
            conv = allowed[key][0]
            try:
                values[key] = conv(raw)
            except (ValueError, argparse.ArgumentTypeError) as e:
                raise CliError(f"{path}:{lineno}: bad value for {key!r}: {e}")
    return values


def _resolve_config(args: argparse.Namespace) -> dict:
    cmd = args.subcommand
    table = {**_OPTIONS[cmd], **_COMMON}
    file_values = {}
    if args.config is not None:
        file_values = _load_config_file(args.config, table)
    resolved = {"subcommand": cmd}
    for dest, (_conv, default, _help) in table.items():
        if dest == "config":
            resolved[dest] = args.config
            continue
        flag_val = getattr(args, dest)
        if flag_val is not None:
            resolved[dest] = flag_val
        elif dest in file_values:
            resolved[dest] = file_values[dest]
        elif default is _REQUIRED:
            raise CliError(f"missing required option --{dest.replace('_', '-')}")
        else:
            resolved[dest] = default
    fmt = resolved["format"] or _DEFAULT_FORMAT[cmd]
    if fmt not in _ALLOWED_FORMATS[cmd]:
        raise CliError(
            f"format {fmt!r} not supported by {cmd} (allowed: {', '.join(_ALLOWED_FORMATS[cmd])})"
        )
    resolved["format"] = fmt
    if resolved["out"] is None:
        resolved["out"] = f"{cmd}.{fmt}"
    return resolved


def _validate(cfg: dict) -> None:
    """Value-level validation; everything here fails before any sampling."""
    cmd = cfg["subcommand"]
    if cfg["seed"] < 0:
        raise CliError("seed must be nonnegative")
    if cfg["workers"] < 1:
        raise CliError("workers must be >= 1")

    def _positive(key):
        if cfg.get(key) is not None and cfg[key] < 1:
            raise CliError(f"{key} must be a positive integer")

    for key in ("n", "reps", "fields", "quad_points", "p"):
        if key == "p":
            if cfg.get("p") is not None and cfg["p"] < 0:
                raise CliError("p must be >= 0")
        else:
            _positive(key)

    if "beta" in cfg and cfg["beta"] is not None and not cfg["beta"] > 0:
        raise CliError("beta must be positive")

    if cmd == "ensemble-sample":
        if cfg["kind"] not in ("hermite", "laguerre"):
            raise CliError(f"kind must be hermite or laguerre, got {cfg['kind']!r}")
        if cfg["kind"] == "laguerre":
            if cfg["m"] is None:
                raise CliError("laguerre requires --m")
            if not cfg["m"] > cfg["n"] - 1:
                raise CliError(f"need m > n - 1, got m={cfg['m']}, n={cfg['n']}")
        if not 0 <= cfg["p"] <= cfg["n"]:
            raise CliError("need 0 <= p <= n")
    elif cmd == "tail-fit":
        if cfg["kind"] not in ("hermite", "laguerre", "lpp"):
            raise CliError(f"kind must be hermite, laguerre, or lpp, got {cfg['kind']!r}")
        if cfg["side"] not in ("right", "left"):
            raise CliError(f"side must be right or left, got {cfg['side']!r}")
        if cfg["kind"] == "lpp":
            if cfg["beta"] is not None and cfg["beta"] != 2.0:
                raise CliError("lpp tails correspond to beta = 2; omit --beta or pass 2")
        else:
            if cfg["beta"] is None:
                raise CliError(f"kind {cfg['kind']} requires --beta")
            if cfg["kind"] == "laguerre":
                if cfg["m"] is None:
                    raise CliError("laguerre requires --m")
                if not cfg["m"] > cfg["n"] - 1:
                    raise CliError(f"need m > n - 1, got m={cfg['m']}, n={cfg['n']}")
        if any(t <= 0 for t in cfg["t_grid"]):
            raise CliError("t_grid entries must be positive")
        if cfg["reps"] < 100:
            raise CliError("reps must be >= 100")
    elif cmd == "qform-check":
        if cfg["t"] <= 0:
            raise CliError("t must be positive")
        if cfg["p"] is not None and cfg["p"] > cfg["n"]:
            raise CliError("need p <= n")
    elif cmd == "riccati":
        if any(t <= 0 for t in cfg["t_grid"]):
            raise CliError("t_grid entries must be positive")
        if math.floor(max(cfg["t_grid"]) * cfg["n"] ** (1.0 / 3.0)) > cfg["n"]:
            raise CliError("largest t walks beyond n steps; increase n or decrease t")
    elif cmd == "lpp-run":
        if cfg["kind"] not in ("p2p", "p2l", "l2p", "hs"):
            raise CliError(f"kind must be p2p, p2l, l2p, or hs, got {cfg['kind']!r}")
        if cfg["convention"] not in lpp.CONVENTIONS:
            raise CliError(f"convention must be one of {sorted(lpp.CONVENTIONS)}")
    elif cmd == "lil":
        if cfg["kind"] not in ("p2p", "p2l", "l2p", "hs"):
            raise CliError(f"kind must be p2p, p2l, l2p, or hs, got {cfg['kind']!r}")
        if cfg["convention"] not in lpp.CONVENTIONS:
            raise CliError(f"convention must be one of {sorted(lpp.CONVENTIONS)}")
        cfg["schedule_list"] = _parse_schedule(cfg["schedule"])
    elif cmd == "dist-equal":
        if cfg["variant"] not in ("p2p", "p2l", "hs"):
            raise CliError(f"variant must be p2p, p2l, or hs, got {cfg['variant']!r}")
        if cfg["n"] < 2:
            raise CliError("need n >= 2")
    elif cmd == "tf-scan":
        if cfg["kind"] not in ("p2p", "p2l"):
            raise CliError(f"kind must be p2p or p2l, got {cfg['kind']!r}")
        if len(cfg["sizes"]) < 3:
            raise CliError("need at least 3 sizes")
        if any(b <= a for a, b in zip(cfg["sizes"], cfg["sizes"][1:])):
            raise CliError("sizes must be strictly increasing")
        if cfg["sizes"][0] < 2:
            raise CliError("sizes must be >= 2")
        if cfg["fields"] < 200:
            raise CliError("need at least 200 fields per size")
    elif cmd == "rate-fn":
        if any(e <= 0 for e in cfg["eps_grid"]):
            raise CliError("eps_grid entries must be positive")

    out_dir = os.path.dirname(os.path.abspath(cfg["out"]))
    if not os.path.isdir(out_dir):
        raise CliError(f"output directory does not exist: {out_dir}")
    if not os.access(out_dir, os.W_OK):
        raise CliError(f"output directory is not writable: {out_dir}")
    if os.path.exists(cfg["out"]) and not os.access(cfg["out"], os.W_OK):
        raise CliError(f"output file is not writable: {cfg['out']}")


# ---------------------------------------------------------------------------
# Output writers.


def _sig17(x) -> str:
    return f"{float(x):.17g}"


def _write_table(path: str, fmt: str, header: list[str], rows: list[list]) -> None:
    def cell(v):
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        return _sig17(v)

    try:
        if fmt == "csv":
            with open(path, "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(header)
                for row in rows:
                    w.writerow([cell(v) for v in row])
        else:
            records = [
                {k: (int(v) if isinstance(v, (int, np.integer)) else float(v))
                 for k, v in zip(header, row)}
                for row in rows
            ]
            _write_json(path, {"rows": records})
    except OSError as e:
        raise CliError(f"cannot write output {path}: {e}")


def _write_json(path: str, obj) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as e:
        raise CliError(f"cannot write output {path}: {e}")


def _write_manifest(cfg: dict, wall_time: float, results: dict) -> None:
    manifest = {
        "subcommand": cfg["subcommand"],
        "version": __version__,
        "config": {
            k: v for k, v in cfg.items() if k not in ("subcommand", "schedule_list")
        },
        "wall_time_s": wall_time,
        "output": cfg["out"],
        "results": results,
    }
    _write_json(cfg["out"] + ".manifest.json", manifest)


def _field_cache_dir() -> Optional[str]:
    return os.environ.get("BETA_TAILS_CACHE_DIR") or None


def _chunked(reps: int, workers: int, fn: Callable[[int], None]) -> None:
    n_chunks = -(-reps // _CHUNK)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(fn, range(n_chunks)))
    else:
        for k in range(n_chunks):
            fn(k)


# ---------------------------------------------------------------------------
# Subcommand drivers.  Each returns (header, rows) or a JSON object, plus a
# results dict for the manifest.


def _run_ensemble_sample(cfg: dict):
    n, reps, seed = cfg["n"], cfg["reps"], cfg["seed"]
    if cfg["kind"] == "hermite":
        spec = hermite_spec(cfg["beta"], n, cfg["p"])
        scale = lambda raw: hermite_scaled_value(n, raw)
    else:
        spec = laguerre_spec(cfg["beta"], n, cfg["m"], cfg["p"])
        scale = lambda raw: laguerre_scaled_value(n, cfg["m"], raw)
    raw = np.empty(reps)

    if cfg["p"] == 0:
        base = laguerre_gram_batch if cfg["kind"] == "laguerre" else hermite_batch

        def chunk(k):
            s = make_stream(seed, stream_label("ens", k))
            take = min(_CHUNK, reps - k * _CHUNK)
            diags, offs = base(spec, s, _CHUNK)
            for i in range(take):
                raw[k * _CHUNK + i] = lambda_max(SymTridiagonal(diags[i], offs[i]))

        _chunked(reps, cfg["workers"], chunk)
    else:

        def chunk(k):
            lo = k * _CHUNK
            for r in range(lo, min(lo + _CHUNK, reps)):
                s = make_stream(seed, stream_label("ens-mod", r))
                if cfg["kind"] == "hermite":
                    T = sample_hermite_modified(spec, s)
                else:
                    T = bidiag_gram(sample_laguerre_modified(spec, s))
                raw[r] = lambda_max(T)

        _chunked(reps, cfg["workers"], chunk)

    rows = [[r, raw[r], scale(raw[r])] for r in range(reps)]
    results = {
        "raw_mean": float(raw.mean()),
        "scaled_mean": float(np.mean([row[2] for row in rows])),
        "scaled_sd": float(np.std([row[2] for row in rows], ddof=1)) if reps > 1 else None,
    }
    return ("table", ["rep", "raw", "scaled"], rows, results)


def _run_tail_fit(cfg: dict):
    if cfg["kind"] == "hermite":
        sampler = hermite_spec(cfg["beta"], cfg["n"])
    elif cfg["kind"] == "laguerre":
        sampler = laguerre_spec(cfg["beta"], cfg["n"], cfg["m"])
    else:
        sampler = stats.LppTailSpec(cfg["n"])
    curve = stats.mc_tail(
        sampler,
        cfg["side"],
        cfg["t_grid"],
        cfg["reps"],
        master_seed=cfg["seed"],
        workers=cfg["workers"],
    )
    rows = [[pt.t, pt.p_hat, pt.wilson_lo, pt.wilson_hi, pt.reps] for pt in curve.points]
    results = {"target_power": curve.target_power, "side": curve.side}
    try:
        fit = stats.fit_exponent(curve)
        results["fit"] = {
            "coefficient": fit.coefficient,
            "power": fit.power,
            "r_squared": fit.r_squared,
            "points_used": fit.points_used,
        }
    except ValueError as e:
        results["fit"] = None
        results["fit_error"] = str(e)
    return ("table", ["t", "p_hat", "wilson_lo", "wilson_hi", "reps"], rows, results)


def _run_qform_check(cfg: dict):
    n, reps, seed = cfg["n"], cfg["reps"], cfg["seed"]
    v = profiles.sech_profile(n, cfg["t"])
    p = cfg["p"] if cfg["p"] is not None else v.support_p
    if v.support_p > p:
        raise RunError(
            f"profile support {v.support_p} exceeds modification depth p={p}"
        )
    mu, sigma2 = profiles.qform_gaussian_stats(n, cfg["beta"], p, v)
    spec = hermite_spec(cfg["beta"], n, p)
    values = np.empty(reps)

    def chunk(k):
        s = make_stream(seed, stream_label("qform", k))
        lo = k * _CHUNK
        hi = min(lo + _CHUNK, reps)
        for r in range(lo, lo + _CHUNK):
            T = sample_hermite_modified(spec, s)
            if r < hi:
                values[r] = profiles.qform(T, v)

    _chunked(reps, cfg["workers"], chunk)
    emp_mean = float(values.mean())
    emp_var = float(values.var(ddof=1))
    se = math.sqrt(sigma2 / reps)
    obj = {
        "n": n,
        "beta": cfg["beta"],
        "t": cfg["t"],
        "p": p,
        "reps": reps,
        "profile_support": v.support_p,
        "mean_empirical": emp_mean,
        "mean_exact": mu,
        "mean_se": se,
        "mean_z": (emp_mean - mu) / se,
        "var_empirical": emp_var,
        "var_exact": sigma2,
        "var_ratio": emp_var / sigma2,
    }
    results = {"mean_z": obj["mean_z"], "var_ratio": obj["var_ratio"]}
    return ("json", obj, results)


def _run_riccati(cfg: dict):
    rows = []
    survival = []
    for idx, t in enumerate(cfg["t_grid"]):
        s = make_stream(cfg["seed"], stream_label("riccati", idx))
        p_hat, (lo, hi) = profiles.corridor_probability(
            cfg["beta"], t, cfg["n"], cfg["reps"], s
        )
        rows.append([t, p_hat, lo, hi, cfg["reps"]])
        survival.append(p_hat)
    results = {"survival": survival}
    return ("table", ["t", "p_hat", "wilson_lo", "wilson_hi", "reps"], rows, results)


def _run_lpp_run(cfg: dict):
    n, reps, seed, kind, conv = (
        cfg["n"], cfg["reps"], cfg["seed"], cfg["kind"], cfg["convention"],
    )
    vals = np.empty(reps)
    if kind == "p2p":
        vals[:] = stats.lpp_value_sample(n + 1, reps, seed, tag="lpp-run", convention=conv)
    else:
        cache = _field_cache_dir()
        for r in range(reps):
            f = lpp.WeightField(
                stream_label("lpp-run-field", seed, r),
                half_space=(kind == "hs"),
                cache_dir=cache,
            )
            if kind == "p2l":
                vals[r], _ = lpp.passage_p2l(f, (0, 0), 2 * n, conv)
            elif kind == "l2p":
                vals[r], _ = lpp.passage_l2p(f, 0, (n, n), conv)
            else:
                vals[r] = lpp.passage_halfspace(f, (0, 0), (n, n), conv)
    denom = 2.0 ** (4.0 / 3.0) * n ** (1.0 / 3.0)
    rows = [[r, vals[r], (vals[r] - 4.0 * n) / denom] for r in range(reps)]
    results = {"mean": float(vals.mean()), "sd": float(vals.std(ddof=1)) if reps > 1 else None}
    return ("table", ["rep", "T", "scaled"], rows, results)


def _run_lil(cfg: dict):
    sched = cfg["schedule_list"]
    field = lpp.WeightField(
        cfg["seed"], half_space=(cfg["kind"] == "hs"), cache_dir=_field_cache_dir()
    )
    traj = stats.lil_track(field, cfg["kind"], sched, cfg["convention"])
    rows = []
    for k, e in enumerate(traj.entries, start=1):
        rows.append([
            k, e.n, e.T, e.norm_plus, e.norm_minus,
            traj.run_max_plus_seq[k - 1], traj.run_min_minus_seq[k - 1],
        ])
    results = {
        "running_max_plus": traj.running_max_plus,
        "running_min_minus": traj.running_min_minus,
        "beta_tag": traj.beta_tag,
        "limsup_target_plus": (3.0 / 4.0) ** (2.0 / 3.0),
        "liminf_target_minus": -(12.0 ** (1.0 / 3.0)),
    }
    header = ["k", "n_k", "T", "norm_plus", "norm_minus", "run_max_plus", "run_min_minus"]
    return ("table", header, rows, results)


def _run_dist_equal(cfg: dict):
    variant = cfg["variant"]
    conventions = ("include_both",) if variant == "p2p" else (
        "include_both", "exclude_initial", "exclude_final",
    )
    per_conv = {}
    for conv in conventions:
        lhs, rhs = stats.distributional_pair_samples(
            cfg["n"], cfg["reps"], cfg["seed"], variant=variant, convention=conv
        )
        d, p = stats.ks_two_sample(lhs, rhs)
        per_conv[conv] = {"ks_statistic": d, "p_value": p}
    default = per_conv["include_both"]
    obj = {
        "variant": variant,
        "n": cfg["n"],
        "reps": cfg["reps"],
        "ks_statistic": default["ks_statistic"],
        "p_value": default["p_value"],
        "conventions": per_conv,
    }
    results = {"p_value": default["p_value"]}
    return ("json", obj, results)


def _run_tf_scan(cfg: dict):
    cache = _field_cache_dir()
    seeds = [stream_label("tf-scan", cfg["seed"], i) for i in range(cfg["fields"])]
    factory = lambda s: lpp.WeightField(s, cache_dir=cache)
    res = stats.tf_scan(seeds, cfg["sizes"], kind=cfg["kind"], field_factory=factory)
    rows = [[n, sd, c] for n, sd, c in zip(res.sizes, res.stds, res.counts)]
    results = {"slope": res.slope, "intercept": res.intercept}
    return ("table", ["n", "std_psi", "count"], rows, results)


def _run_rate_fn(cfg: dict):
    points = []
    for eps in cfg["eps_grid"]:
        j = stats.laguerre_rate_function(eps, quad_points=cfg["quad_points"])
        points.append({"eps": eps, "j_value": j, "j_over_eps32": j / eps**1.5})
    obj = {
        "points": points,
        "asymptote_j_over_eps32": 1.0 / 6.0,
        "quad_points": cfg["quad_points"],
    }
    results = {"j_over_eps32_smallest_eps": points[0]["j_over_eps32"]}
    return ("json", obj, results)


_RUNNERS = {
    "ensemble-sample": _run_ensemble_sample,
    "tail-fit": _run_tail_fit,
    "qform-check": _run_qform_check,
    "riccati": _run_riccati,
    "lpp-run": _run_lpp_run,
    "lil": _run_lil,
    "dist-equal": _run_dist_equal,
    "tf-scan": _run_tf_scan,
    "rate-fn": _run_rate_fn,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        _validate(cfg)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    start = time.perf_counter()
    try:
        outcome = _RUNNERS[cfg["subcommand"]](cfg)
    except RunError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3
    except (ValueError, ArithmeticError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3
    wall = time.perf_counter() - start

    try:
        if outcome[0] == "table":
            _, header, rows, results = outcome
            _write_table(cfg["out"], cfg["format"], header, rows)
        else:
            _, obj, results = outcome
            _write_json(cfg["out"], obj)
        _write_manifest(cfg, wall, results)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    if cfg["subcommand"] == "tail-fit" and results.get("fit") is None:
        print(f"numerical failure: {results.get('fit_error')}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
