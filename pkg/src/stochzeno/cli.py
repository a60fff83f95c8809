"""Command line front end.

Subcommands write plot-ready tables into ``--out``:

``decay``      decay.csv      mu_us,q,P                   (fixed intervals)
``sweep``      sweep.csv      mu2_us,P_g,P_a,ensemble,D,zeno_parameter
``histogram``  histogram.csv, overlay.csv, histogram_meta.json
``analyze``    analyze.json   (schema_version 1)

Exit codes: 0 success, 2 configuration error, 3 numerical degeneracy.
"""

import argparse
import csv
import datetime
import io
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import load_config
from .exceptions import ConfigError, DegenerateLawError, ValidationError
from .intervals import RNG_ID, check_seed, make_bimodal
from .large_deviation import (
    bimodal_law,
    binned_law,
    discretized_gaussian,
    empirical_rate_function,
    exact_pmf,
)
from .montecarlo import run_ensemble
from .quantum import hamiltonian_moments, survival_q
from .statistics import classify_zeno, delta_q_fourth_order, survival_statistics
from .units import s_to_us

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_DEGENERATE = 0, 2, 3


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return repr(float(value))


def _us(seconds):
    return round(s_to_us(seconds), 9)


def _timestamp():
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def write_table(path, columns, rows, fmt, stamp):
    """Write rows as CSV (shortest round-trip floats) or as a JSON table."""
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "columns": columns,
               "rows": [[None if (isinstance(v, float) and math.isnan(v)) else v for v in r]
                        for r in rows]}
        if stamp:
            doc["generated"] = stamp
        path = path.with_suffix(".json")
        path.write_text(json.dumps(doc, indent=2) + "\n")
        return path
    buf = io.StringIO()
    if stamp:
        buf.write(f"# generated {stamp}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    path = path.with_suffix(".csv")
    path.write_text(buf.getvalue())
    return path


def write_json(path, doc, stamp):
    if stamp:
        doc = {**doc, "generated": stamp}
    path.write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n")
    return path


def _require_sweep(cfg, variable):
    if cfg.sweep is None:
        raise ConfigError("this command needs a [sweep] section", "sweep")
    if cfg.sweep.variable not in (None, variable):
        raise ConfigError(f"expected variable = {variable!r}", "sweep.variable")
    return cfg.sweep.grid()


def _require_bimodal(cfg):
    if len(cfg.atoms) != 2:
        raise ConfigError(f"expected exactly 2 atoms, got {len(cfg.atoms)}", "distribution.atoms")
    return cfg.atoms


def decay_rows(cfg):
    grid = _require_sweep(cfg, "mu")
    q = survival_q(cfg.hamiltonian, cfg.initial_state, grid)
    with np.errstate(divide="ignore"):
        P = np.exp(cfg.m * np.log(q))
    return [[_us(mu), float(qi), float(Pi)] for mu, qi, Pi in zip(grid, q, P)]


def sweep_rows(cfg):
    grid = _require_sweep(cfg, "mu2")
    (mu1, p1), _ = _require_bimodal(cfg)
    rows = []
    for mu2 in grid:
        stats = survival_statistics(make_bimodal(mu1, mu2, p1), cfg.hamiltonian,
                                    cfg.initial_state, cfg.m)
        rows.append([_us(mu2), stats.geometric, stats.arithmetic, stats.ensemble,
                     stats.discrepancy, stats.zeno_parameter])
    return rows


def analyze_report(cfg):
    dist = cfg.distribution
    H, psi0 = cfg.hamiltonian, cfg.initial_state
    stats = survival_statistics(dist, H, psi0, cfg.m)
    moments = hamiltonian_moments(H, psi0)
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "analyze",
        "statistics": stats.as_dict(),
        "zeno_regime": classify_zeno(stats.zeno_parameter, cfg.strict, cfg.loose),
        "zeno_thresholds": {"strict": cfg.strict, "loose": cfg.loose},
        "delta_q_exact": stats.delta_q,
        "delta_q_fourth_order": delta_q_fourth_order(moments, dist, cfg.m),
        "hamiltonian_moments": {"mean": moments.mean, "variance": moments.variance,
                                "kurtosis": moments.kurtosis},
        "distribution": {"atoms_us": [[_us(mu), p] for mu, p in dist.atoms],
                         "mean_us": _us(dist.mean), "nu2_s2": dist.nu2, "nu4_s4": dist.nu4},
        "config": cfg.raw,
    }


def histogram_outputs(cfg, threads):
    """Ensemble histogram rows, overlay rows and metadata for one configuration."""
    dist = cfg.distribution
    H, psi0 = cfg.hamiltonian, cfg.initial_state
    if dist.n_atoms > 2:
        raise ConfigError("histogram overlays need at most 2 distinct atoms", "distribution.atoms")
    result = run_ensemble(H, psi0, dist, cfg.m, cfg.n_runs, cfg.seed, threads=threads,
                          bins=cfg.bins, scale=cfg.bin_scale)
    hist = result.histogram
    stats = survival_statistics(dist, H, psi0, cfg.m)

    if dist.n_atoms == 2:
        law = bimodal_law(dist, H, psi0, cfg.m)
        exact_mass, gauss_mass = binned_law(law, hist.edges)
        try:
            gauss = discretized_gaussian(law)
        except DegenerateLawError:
            gauss = np.full(cfg.m + 1, np.nan)
        overlay = [[k, float(P), float(e), float(g)]
                   for k, (P, e, g) in enumerate(zip(law.support(), exact_pmf(law), gauss))]
    else:
        # single interval value: P is the point mass q^m
        point = stats.geometric
        exact_mass = np.histogram([point], bins=hist.edges)[0].astype(float)
        gauss_mass = np.full(exact_mass.shape, np.nan)
        overlay = [[cfg.m, point, 1.0, math.nan]]

    rate = dict(empirical_rate_function(hist, cfg.m))
    rows = []
    for i, (lo, hi) in enumerate(zip(hist.edges[:-1], hist.edges[1:])):
        count = int(hist.counts[i])
        mid = float(hist.midpoints[i])
        rows.append([float(lo), float(hi), count, count / hist.n_samples,
                     float(exact_mass[i]), float(gauss_mass[i]), rate.get(mid)])

    lo, hi = result.sample_mode_bin
    meta = {
        "schema_version": SCHEMA_VERSION,
        "command": "histogram",
        "markers": {"geometric": stats.geometric, "ensemble": stats.ensemble,
                    "arithmetic": stats.arithmetic},
        "sample_mean": result.sample_mean,
        "mode_bin": [lo, hi],
        "m": cfg.m,
        "n_runs": cfg.n_runs,
        "seed": cfg.seed,
        "rng": RNG_ID,
        "fingerprint": result.config_fingerprint,
        "config": cfg.raw,
    }
    return rows, overlay, meta


def build_parser():
    parser = argparse.ArgumentParser(
        prog="stochzeno",
        description="Survival statistics of quantum systems measured at random times.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("decay", "survival q(mu) and q(mu)^m over a grid of fixed intervals"),
        ("sweep", "geometric/arithmetic/ensemble averages while sweeping the second interval"),
        ("histogram", "Monte Carlo histogram of P with exact and Gaussian overlays"),
        ("analyze", "one-shot JSON report of the survival statistics"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, type=Path, help="TOML config or JSON report")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--threads", type=int, default=1, help="worker threads for ensembles")
        p.add_argument("--out", type=Path, help="output directory (default: config or cwd)")
        p.add_argument("--format", choices=("csv", "json"), help="table format")
        p.add_argument("--no-header-timestamp", action="store_true",
                       help="omit the generation timestamp so reruns are byte-identical")
    return parser


def run(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        try:
            seed = check_seed(args.seed)
        except ValidationError as exc:
            raise ConfigError(str(exc), "--seed") from exc
        cfg = replace(cfg, seed=seed, raw={**cfg.raw, "seed": seed})
    if args.threads < 1:
        raise ConfigError("must be >= 1", "--threads")
    out = args.out or Path(cfg.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    fmt = args.format or cfg.out_format
    stamp = None if args.no_header_timestamp else _timestamp()

    written = []
    if args.command == "decay":
        written.append(write_table(out / "decay", ["mu_us", "q", "P"], decay_rows(cfg), fmt, stamp))
    elif args.command == "sweep":
        cols = ["mu2_us", "P_g", "P_a", "ensemble", "D", "zeno_parameter"]
        written.append(write_table(out / "sweep", cols, sweep_rows(cfg), fmt, stamp))
    elif args.command == "histogram":
        rows, overlay, meta = histogram_outputs(cfg, args.threads)
        cols = ["bin_left", "bin_right", "count", "frequency", "exact_mass", "gaussian_mass", "rate_J"]
        written.append(write_table(out / "histogram", cols, rows, fmt, stamp))
        written.append(write_table(out / "overlay", ["k", "P", "exact_prob", "gaussian_prob"],
                                   overlay, fmt, stamp))
        written.append(write_json(out / "histogram_meta.json", meta, stamp))
    else:
        written.append(write_json(out / "analyze.json", analyze_report(cfg), stamp))
    return written


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        written = run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DegenerateLawError, ValidationError) as exc:
        print(f"numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
