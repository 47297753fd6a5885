"""Command-line entry point: ``infoforage {measure,trend,compare,correlate,simulate}``."""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import __version__
from .lexical import Category, EmptySampleError, clean_and_tokenize, measure_sample, truncate_last
from .records import (
    MEASURE_NAMES,
    ManifestError,
    MeasureRecord,
    config_hash,
    measure_config,
    read_jsonl,
    read_manifest,
    read_year_series,
    single_config,
    write_csv,
    write_jsonl,
)
from .simulation import (
    DEFAULT_ENV_RATE,
    DEFAULT_MEAN_ITEM_RATES,
    DEFAULT_MERGED_RATES,
    RNG_NAME,
    DietSweepConfig,
    sweep_point,
    viability_frontier,
)
from .svg import chart
from .trends import (
    anova_oneway,
    annual_aggregate,
    combine_categories,
    kde_scott,
    kpss_level,
    mann_kendall,
    moving_average_ci,
    pearson,
)

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger("infoforage")

THREADS_ENV = "INFOFORAGE_THREADS"
MIN_TREND_YEARS = 10


class CLIError(Exception):
    """A fatal, user-facing error; the message is printed and the exit code is 2."""


def resolve_threads(flag: int | None) -> int:
    if flag is not None:
        return max(1, int(flag))
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise CLIError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return 1


def _pmap(fn, items, threads: int):
    # executor.map yields in input order regardless of completion order
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


# --------------------------------------------------------------------------
# measure


def _measure_row(row, sample_size: int, chash: str):
    try:
        raw = row.path.read_text(encoding="utf-8", errors="replace")
    except OSError as exc:
        return None, f"unreadable: {exc}"
    try:
        sample = clean_and_tokenize(raw, row.profile, year=row.year, category=row.category, source_id=row.source_id)
    except EmptySampleError:
        return None, "empty"
    sample = truncate_last(sample, sample_size)
    if sample is None:
        return None, "too_short"
    if len(set(sample.tokens)) < 2:
        return None, "single_type"
    m = measure_sample(sample)
    rec = MeasureRecord(
        source_id=row.source_id,
        year=row.year,
        category=row.category.value,
        n_tokens=m.n_tokens,
        word_entropy_bits=m.word_entropy_bits,
        type_token_ratio=m.type_token_ratio,
        zipf_exponent=m.zipf_exponent,
        zipf_loglik=m.zipf_loglik,
        tool_version=__version__,
        config_hash=chash,
    )
    return rec, None


def cmd_measure(manifest, out, sample_size: int = 2000, threads: int = 1) -> dict:
    """Clean, truncate and measure every manifest row; write one JSONL record per kept sample.

    Returns a summary with the number written and a list of ``(source_id, reason)`` skips.
    Raises :class:`CLIError` when no record could be written.
    """
    rows = read_manifest(manifest)
    if not rows:
        raise CLIError(f"manifest {manifest} has no rows")
    chash = config_hash(measure_config(sample_size))
    results = _pmap(lambda r: _measure_row(r, sample_size, chash), rows, threads)
    records, skipped = [], []
    for row, (rec, reason) in zip(rows, results):
        if rec is None:
            log.warning("skipped %s (%s): %s", row.source_id, row.path, reason)
            skipped.append((row.source_id, reason))
        else:
            records.append(rec)
    if not records:
        raise CLIError("no records written: every manifest row failed or was skipped")
    write_jsonl(records, out)
    return {"written": len(records), "skipped": skipped, "config_hash": chash}


# --------------------------------------------------------------------------
# trend


def _select_measures(measure: str) -> tuple[str, ...]:
    if measure in (None, "all"):
        return MEASURE_NAMES
    if measure not in MEASURE_NAMES:
        raise CLIError(f"unknown measure {measure!r}; choose from {', '.join(MEASURE_NAMES)} or all")
    return (measure,)


def _load_records(path, categories, start_year=None, end_year=None):
    records = read_jsonl(path)
    chash = single_config(records)
    if categories:
        wanted = {Category.parse(c).value for c in categories}
        records = [r for r in records if r.category in wanted]
    if start_year is not None or end_year is not None:
        lo = -math.inf if start_year is None else start_year
        hi = math.inf if end_year is None else end_year
        records = [r for r in records if r.year is not None and lo <= r.year <= hi]
    return records, chash


def _by_category(records):
    groups: dict[str, list[MeasureRecord]] = {}
    for r in records:
        groups.setdefault(r.category, []).append(r)
    return dict(sorted(groups.items()))


def cmd_trend(measures, out_dir, measure="all", categories=None, start_year=1900, end_year=2009,
              aggregate="median", fmt="csv") -> dict:
    """Per-category annual aggregation, KPSS and Mann-Kendall tests, and smoothed series.

    Writes ``trend_report.json``, ``trend_table.csv`` and ``smoothed.csv``
    (plus ``smoothed_<measure>.svg`` when ``fmt == "svg"``) to ``out_dir``.
    """
    names = _select_measures(measure)
    if aggregate not in ("median", "mean"):
        raise CLIError("aggregate must be median or mean")
    records, chash = _load_records(measures, categories, start_year, end_year)
    groups = _by_category(records)
    if not groups:
        raise CLIError("no records in the selected categories and years")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    results: dict = {}
    table_rows = []
    smooth_rows = []
    for cat, recs in groups.items():
        results[cat] = {}
        row = [cat]
        for name in names:
            pts = [(r.year, getattr(r, name)) for r in recs if r.year is not None and getattr(r, name) is not None]
            years, values = annual_aggregate(pts, aggregate)
            if len(years) < MIN_TREND_YEARS:
                raise CLIError(f"category {cat!r} has only {len(years)} years of {name} data; need {MIN_TREND_YEARS}")
            kp = kpss_level(values)
            mk = mann_kendall(values)
            results[cat][name] = {"n_years": len(years), "kpss": kp.to_dict(), "mann_kendall": mk.to_dict()}
            row += [kp.p_value, mk.p_value]
        table_rows.append(row)

    combined = {}
    for name in names:
        per_cat = []
        for cat, recs in groups.items():
            series = moving_average_ci([(r.year, getattr(r, name)) for r in recs if r.year is not None])
            per_cat.append(series)
            smooth_rows += [[cat, name, p.year, p.mean, p.std_error, p.mean - p.ci_halfwidth, p.mean + p.ci_halfwidth, p.n]
                            for p in series]
        combined[name] = combine_categories(per_cat)
        smooth_rows += [["combined", name, p.year, p.mean, p.std_error, p.mean - p.ci_halfwidth, p.mean + p.ci_halfwidth, p.n]
                        for p in combined[name]]

    report = {
        "tool_version": __version__,
        "config_hash": chash,
        "start_year": start_year,
        "end_year": end_year,
        "aggregate": aggregate,
        "measures": list(names),
        "categories": list(groups),
        "results": results,
        "table": {
            "cell": "(kpss_p, mann_kendall_p)",
            "columns": list(names),
            "rows": [{"category": r[0], **{n: [r[1 + 2 * k], r[2 + 2 * k]] for k, n in enumerate(names)}} for r in table_rows],
        },
    }
    with open(out_dir / "trend_report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=False)
        fh.write("\n")
    cols = ["category"] + [f"{n}_{t}_p" for n in names for t in ("kpss", "mk")]
    write_csv(out_dir / "trend_table.csv", cols, table_rows, config_hash=chash)
    write_csv(out_dir / "smoothed.csv", ["category", "measure", "year", "mean", "std_error", "ci_low", "ci_high", "n"],
              smooth_rows, config_hash=chash)
    if fmt == "svg":
        for name in names:
            series = {}
            for row in smooth_rows:
                if row[1] == name:
                    xs, ys = series.setdefault(row[0], ([], []))
                    xs.append(row[2])
                    ys.append(row[3])
            chart(series, out_dir / f"smoothed_{name}.svg", title=name, xlabel="year", ylabel=name, kind="line")
    return report


# --------------------------------------------------------------------------
# compare


def cmd_compare(measures, out_dir, measure="all", categories=None, start_year=None, end_year=None, fmt="csv") -> dict:
    """One-way ANOVA across categories plus per-category KDE curves and quartiles."""
    names = _select_measures(measure)
    records, chash = _load_records(measures, categories, start_year, end_year)
    groups = _by_category(records)
    if len(groups) < 2:
        raise CLIError(f"need at least 2 categories to compare, found {len(groups)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = {"tool_version": __version__, "config_hash": chash, "categories": list(groups), "anova": {}}
    kde_rows, quart_rows = [], []
    for name in names:
        values = {c: [getattr(r, name) for r in recs] for c, recs in groups.items()}
        try:
            res = anova_oneway(list(values.values()))
        except ValueError as exc:
            raise CLIError(f"ANOVA on {name}: {exc}") from exc
        report["anova"][name] = res.to_dict()
        curves = {}
        for cat, vals in values.items():
            q1, q2, q3 = np.percentile(vals, [25, 50, 75])
            quart_rows.append([cat, name, len(vals), float(q1), float(q2), float(q3)])
            if np.ptp(vals) > 0:
                curve = kde_scott(vals)
                kde_rows += [[cat, name, x, d] for x, d in curve]
                curves[cat] = ([x for x, _ in curve], [d for _, d in curve])
        if fmt == "svg":
            chart(curves, out_dir / f"kde_{name}.svg", title=name, xlabel=name, ylabel="density", kind="line")
    with open(out_dir / "anova_report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    write_csv(out_dir / "kde.csv", ["category", "measure", "x", "density"], kde_rows, config_hash=chash)
    write_csv(out_dir / "quartiles.csv", ["category", "measure", "n", "q1", "median", "q3"], quart_rows, config_hash=chash)
    return report


# --------------------------------------------------------------------------
# correlate


def cmd_correlate(series_a, series_b, out=None) -> dict:
    """Pearson correlation of two ``year,value`` CSVs over their common years."""
    a, b = read_year_series(series_a), read_year_series(series_b)
    years = sorted(set(a) & set(b))
    if len(years) < 3:
        raise CLIError(f"need at least 3 overlapping years, found {len(years)}")
    res = pearson([a[y] for y in years], [b[y] for y in years])
    report = {"tool_version": __version__, "years": years, **res.to_dict()}
    text = json.dumps(report, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    return report


# --------------------------------------------------------------------------
# simulate

SWEEP_KEYS = {f.name for f in fields(DietSweepConfig)}
FRONTIER_KEYS = {"merged_rate_grid", "mean_item_rate_grid", "env_rate"}


def load_config(path) -> dict:
    if path is None:
        return {}
    with open(path, "rb") as fh:
        try:
            return tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise CLIError(f"cannot parse config {path}: {exc}") from exc


def cmd_simulate(kind, out, config=None, seed=None, threads=1, fmt="csv", stderr=None) -> dict:
    """Run ``diet_sweep`` or ``frontier`` and write CSV (and SVG when ``fmt == "svg"``).

    diet_sweep writes ``out`` with columns
    ``grid_index,prevalence,status,utility_rate`` (status is consumed or
    survived_ignored) and ``<out stem>_summary.csv`` with one row per grid
    point. frontier writes ``merged_rate,mean_item_rate,env_rate,u_min``
    where ``u_min`` is ``infeasible`` when no item size suffices.
    """
    stderr = stderr or sys.stderr
    cfg = dict(config or {})
    out = Path(out)
    if kind == "diet_sweep":
        unknown = sorted(set(cfg) - SWEEP_KEYS)
        if unknown:
            raise CLIError(f"unknown diet_sweep config keys: {', '.join(unknown)}")
        if seed is not None:
            cfg["seed"] = seed
        if "seed" not in cfg:
            print("warning: no seed given; using default seed 0", file=stderr)
            cfg["seed"] = 0
        try:
            conf = DietSweepConfig(**cfg)
        except (TypeError, ValueError) as exc:
            raise CLIError(f"invalid diet_sweep config: {exc}") from exc
        chash = config_hash({"kind": kind, **conf.as_dict()})
        points = _pmap(lambda i: sweep_point(conf, i), range(len(conf.prevalence_grid)), threads)
        rows, summary = [], []
        for i, p in enumerate(points):
            rows += [[i, p.prevalence, "consumed", r] for r in p.consumed]
            rows += [[i, p.prevalence, "survived_ignored", r] for r in p.survived_ignored]
            summary.append([i, p.prevalence, len(p.consumed), len(p.survived_ignored), p.mean_consumed,
                            p.diet_min_profitability, p.diet_rate])
        meta = {"kind": kind, "seed": conf.seed, "rng": RNG_NAME.replace(" ", ""), "config_hash": chash}
        write_csv(out, ["grid_index", "prevalence", "status", "utility_rate"], rows, **meta)
        write_csv(out.with_name(out.stem + "_summary.csv"),
                  ["grid_index", "prevalence", "n_consumed", "n_survived_ignored", "mean_consumed",
                   "diet_min_profitability", "diet_rate"], summary, **meta)
        if fmt == "svg":
            series = {
                "consumed": ([r[1] for r in rows if r[2] == "consumed"], [r[3] for r in rows if r[2] == "consumed"]),
                "ignored": ([r[1] for r in rows if r[2] != "consumed"], [r[3] for r in rows if r[2] != "consumed"]),
            }
            chart(series, out.with_suffix(".svg"), title="diet sweep", xlabel="prevalence",
                  ylabel="item utility rate", log_x=True)
        return {"config_hash": chash, "points": len(points), "seed": conf.seed}

    if kind == "frontier":
        unknown = sorted(set(cfg) - FRONTIER_KEYS - {"seed"})
        if unknown:
            raise CLIError(f"unknown frontier config keys: {', '.join(unknown)}")
        params = {
            "merged_rate_grid": list(cfg.get("merged_rate_grid", DEFAULT_MERGED_RATES)),
            "mean_item_rate_grid": list(cfg.get("mean_item_rate_grid", DEFAULT_MEAN_ITEM_RATES)),
            "env_rate": float(cfg.get("env_rate", DEFAULT_ENV_RATE)),
        }
        try:
            fr = viability_frontier(**params)
        except ValueError as exc:
            raise CLIError(f"invalid frontier config: {exc}") from exc
        chash = config_hash({"kind": kind, **params})
        rows = [[lam, rbar, fr.env_rate, "infeasible" if u is None else u] for lam, rbar, u in fr.rows()]
        write_csv(out, ["merged_rate", "mean_item_rate", "env_rate", "u_min"], rows, kind=kind, config_hash=chash)
        if fmt == "svg":
            series = {
                f"r={rbar:g}": (list(fr.merged_rates), fr.u_min[:, j].tolist())
                for j, rbar in enumerate(fr.mean_item_rates)
                if fr.feasible[:, j].any()
            }
            chart(series, out.with_suffix(".svg"), title="minimum item size", xlabel="merged encounter rate",
                  ylabel="u_min", log_x=True, log_y=True, kind="line")
        return {"config_hash": chash, "cells": len(rows)}

    raise CLIError(f"unknown simulation kind {kind!r}")


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (measure, correlate, simulate) or directory (trend, compare)")
    common.add_argument("--seed", type=int, default=None, help="RNG seed for simulations")
    common.add_argument("--threads", type=int, default=None, help=f"worker threads (default: ${THREADS_ENV} or 1)")
    common.add_argument("--format", dest="fmt", choices=("csv", "jsonl", "svg"), default="csv",
                        help="svg additionally writes plots next to the data files")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="infoforage", description=__doc__)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", parents=[common], help="clean corpus files and compute lexical measures (JSONL)")
    p.add_argument("manifest", help="CSV with header path,year,category,profile,source_id")
    p.add_argument("--sample-size", type=int, default=2000)

    p = sub.add_parser("trend", parents=[common], help="KPSS and Mann-Kendall tests per category, smoothed series")
    p.add_argument("measures", help="JSONL written by `measure`")
    p.add_argument("--measure", default="all", help=f"one of {', '.join(MEASURE_NAMES)} or all")
    p.add_argument("--categories", default=None, help="comma-separated category filter")
    p.add_argument("--start-year", type=int, default=1900)
    p.add_argument("--end-year", type=int, default=2009)
    p.add_argument("--aggregate", choices=("median", "mean"), default="median")

    p = sub.add_parser("compare", parents=[common], help="ANOVA across categories, KDE curves and quartiles")
    p.add_argument("measures", help="JSONL written by `measure`")
    p.add_argument("--measure", default="all", help=f"one of {', '.join(MEASURE_NAMES)} or all")
    p.add_argument("--categories", default=None, help="comma-separated category filter (at least two)")
    p.add_argument("--start-year", type=int, default=None)
    p.add_argument("--end-year", type=int, default=None)

    p = sub.add_parser("correlate", parents=[common], help="Pearson correlation of two year,value CSVs")
    p.add_argument("series_a", help="CSV with columns year,value")
    p.add_argument("series_b", help="CSV with columns year,value; joined to series_a on year")

    p = sub.add_parser(
        "simulate", parents=[common], help="diet-selectivity sweep or viability frontier",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description=(
            "CSV columns:\n"
            "  diet_sweep: grid_index,prevalence,status,utility_rate  (+ <out>_summary.csv:\n"
            "              grid_index,prevalence,n_consumed,n_survived_ignored,mean_consumed,\n"
            "              diet_min_profitability,diet_rate)\n"
            "  frontier:   merged_rate,mean_item_rate,env_rate,u_min  (u_min = infeasible when\n"
            "              mean_item_rate <= env_rate)\n"
            "A '#' comment line before the header records tool_version, seed, rng and config_hash."
        ),
    )
    p.add_argument("kind", choices=("diet_sweep", "frontier"))
    p.add_argument("--config", default=None, help="TOML file of key = value settings")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        threads = resolve_threads(args.threads)
        cats = args.categories.split(",") if getattr(args, "categories", None) else None
        if args.command == "measure":
            res = cmd_measure(args.manifest, args.out or "measures.jsonl", args.sample_size, threads)
            print(f"wrote {res['written']} records, skipped {len(res['skipped'])}")
        elif args.command == "trend":
            cmd_trend(args.measures, args.out or "trend_out", args.measure, cats, args.start_year, args.end_year,
                      args.aggregate, args.fmt)
        elif args.command == "compare":
            cmd_compare(args.measures, args.out or "compare_out", args.measure, cats, args.start_year, args.end_year,
                        args.fmt)
        elif args.command == "correlate":
            res = cmd_correlate(args.series_a, args.series_b, args.out)
            if not args.out:
                print(json.dumps(res, indent=2))
        elif args.command == "simulate":
            cmd_simulate(args.kind, args.out or f"{args.kind}.csv", load_config(args.config), args.seed, threads,
                         args.fmt)
    except (CLIError, ManifestError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
