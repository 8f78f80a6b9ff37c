"""Command-line entry point: ``bincp <subcommand> ...``.

Exit codes: 0 success, 1 infeasible or exhausted, 2 timeout, 3 input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

from .bincounts import PROPAGATION, bin_counts
from .flow import BinSpec
from .kernel import STRATEGIES
from .models import InstanceError
from .stats import MultinomialSample, ci_solve, pearson_statistic

EXIT_OK, EXIT_INFEASIBLE, EXIT_TIMEOUT, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    instance: str | None = None
    mode: str = "gac"
    branching: str = "mindom"
    alpha: float | None = None
    seed: int = 0
    time_limit: float | None = None
    out: str | None = None
    fmt: str = "json"

    def __post_init__(self):
        if self.time_limit is not None and self.time_limit <= 0:
            raise InputError("time limit must be positive")
        if self.mode not in PROPAGATION:
            raise InputError(f"mode must be one of {', '.join(PROPAGATION)}")
        if self.branching not in STRATEGIES:
            raise InputError(f"branching must be one of {', '.join(STRATEGIES)}")
        if self.fmt not in ("json", "csv"):
            raise InputError("format must be json or csv")


def bundled(name: str) -> Path:
    return Path(str(resources.files("bincp") / "data" / name))


def int_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise InputError(f"expected a comma-separated integer list, got {text!r}") from None


def seed_range(text: str) -> range:
    """``A:B`` is ``A..B-1``; a single ``N`` is ``0..N-1``."""
    try:
        if ":" in text:
            a, b = text.split(":", 1)
            return range(int(a), int(b))
        return range(int(text))
    except ValueError:
        raise InputError(f"bad seed range {text!r}") from None


def emit(rows: list[dict], cfg: RunConfig, stdout) -> None:
    if cfg.fmt == "json":
        text = json.dumps(rows if len(rows) != 1 else rows[0], indent=2) + "\n"
    else:
        buf = io.StringIO()
        flat_rows = [_expand(r) for r in rows]
        fields = list(dict.fromkeys(k for r in flat_rows for k in r))
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in flat_rows:
            w.writerow({k: _flat(v) for k, v in r.items()})
        text = buf.getvalue()
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        stdout.write(text)


def _expand(row: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, dict):
            out.update(_expand(v, f"{prefix}{k}."))
        else:
            out[prefix + k] = v
    return out


def _flat(v):
    if isinstance(v, (list, tuple)):
        return " ".join(_flat(x) for x in v)
    if isinstance(v, float):
        return f"{v:.6g}"
    return "" if v is None else str(v)


def status_code(status: str) -> int:
    return {"solution": EXIT_OK, "optimal": EXIT_OK, "timeout": EXIT_TIMEOUT}.get(status, EXIT_INFEASIBLE)


# -- subcommands ------------------------------------------------------------

def cmd_bincounts(args, stdout) -> int:
    bins = int_list(args.bins)
    try:
        spec = BinSpec(tuple(bins))
        counts = bin_counts(int_list(args.values), spec, args.hidden)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    stdout.write(" ".join(map(str, counts)) + "\n")
    return EXIT_OK


def cmd_ci(args, stdout) -> int:
    if (args.counts is None) == (args.observations is None):
        raise InputError("give exactly one of --counts or --observations")
    try:
        if args.counts is not None:
            sample = MultinomialSample(tuple(int_list(args.counts)))
        else:
            sample = MultinomialSample.from_observations(int_list(args.observations), args.categories)
        intervals = ci_solve(sample, args.alpha)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    stdout.write("category  count  lower   upper\n")
    for j, (c, (lo, hi)) in enumerate(zip(sample.counts, intervals), 1):
        stdout.write(f"{j:>8}  {c:>5}  {lo:.4f}  {hi:.4f}\n")
    return EXIT_OK


def _single_report(cfg: RunConfig, name: str, res, solution, statistic) -> dict:
    return {
        "instance": name,
        "mode": cfg.mode,
        "status": res.status,
        "nodes": res.stats.nodes,
        "failures": res.stats.failures,
        "time_s": round(res.stats.time_s, 3),
        "solution": solution,
        "statistic": statistic,
    }


def cmd_bacp(args, stdout) -> int:
    from .models.bacp import DEFAULT_ALPHA, build_bacp, check_schedule, load_bacp

    cfg = _config(args, "bacp")
    path = args.instance or bundled("bacp-1.txt")
    try:
        inst = load_bacp(path)
        bins = BinSpec(tuple(int_list(args.bins))) if args.bins else None
        targets = int_list(args.targets) if args.targets else None
        kwargs = {"bins": bins, "alpha": args.alpha if args.alpha is not None else DEFAULT_ALPHA,
                  "propagation": cfg.mode}
        if targets is not None:
            kwargs["targets"] = targets
        model = build_bacp(inst, **kwargs)
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from None
    res = model.solve(cfg.branching, cfg.time_limit)
    solution = statistic = None
    if res.found:
        d = model.decode(res.solution)
        problems = check_schedule(inst, d["semester"], model.bins, model.targets, model.threshold)
        if problems:
            raise RuntimeError("solver returned an invalid schedule: " + "; ".join(problems))
        solution = d
        statistic = round(float(pearson_statistic(d["occurrences"], model.targets)), 4)
    emit([_single_report(cfg, inst.name, res, solution, statistic)], cfg, stdout)
    return status_code(res.status)


def cmd_bnwp(args, stdout) -> int:
    from .models.bnwp import DEFAULT_BINS, DEFAULT_TARGETS, build_bnwp, check_allocation, load_zone

    cfg = _config(args, "bnwp")
    path = args.instance or bundled("2zones0-zone1.txt")
    try:
        zone = load_zone(path)
        model = build_bnwp(zone, int_list(args.bins) if args.bins else DEFAULT_BINS,
                           int_list(args.targets) if args.targets else DEFAULT_TARGETS,
                           cfg.mode, redundant=not args.no_redundant)
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from None
    res = model.solve(cfg.branching, cfg.time_limit)
    solution = statistic = None
    if res.found:
        d = model.decode(res.solution)
        problems = check_allocation(zone, d["slot"], model.bins, model.targets, d["K"])
        if problems:
            raise RuntimeError("solver returned an invalid allocation: " + "; ".join(problems))
        solution = d
        statistic = round(d["K"], 4)
    emit([_single_report(cfg, zone.name, res, solution, statistic)], cfg, stdout)
    return status_code(res.status)


def _compare_one(job):
    from .models.study import RandomStudyConfig, compare_filtering, generate_random, report_rows

    seed, fraction, mode, strategy, modes, time_limit = job
    inst = generate_random(RandomStudyConfig(seed=seed, fraction=fraction, mode=mode))
    reports = compare_filtering(inst, strategy, modes, time_limit, name=f"seed{seed}")
    rows = report_rows(reports)
    for r in rows:
        r["seed"] = seed
        r["fraction"] = fraction
        r["time_s"] = round(r["time_s"], 3)
    return rows


def cmd_compare(args, stdout) -> int:
    cfg = _config(args, "compare")
    seeds = seed_range(args.seeds)
    modes = args.modes.split(",") if args.modes else list(PROPAGATION)
    if any(m not in PROPAGATION for m in modes):
        raise InputError(f"modes must be drawn from {', '.join(PROPAGATION)}")
    if not 0.0 <= args.fraction <= 1.0:
        raise InputError("fraction must lie in [0, 1]")
    jobs = [(seed, args.fraction, "hidden" if args.hidden else "strict", cfg.branching,
             modes, cfg.time_limit) for seed in seeds]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            chunks = list(pool.map(_compare_one, jobs))
    else:
        chunks = [_compare_one(j) for j in jobs]
    rows = [r for chunk in chunks for r in chunk]
    emit(rows, cfg, stdout)
    if any(r["status"] == "timeout" for r in rows):
        return EXIT_TIMEOUT
    return EXIT_OK


def cmd_chi2(args, stdout) -> int:
    from .models.study import build_chi2_demo

    cfg = _config(args, "chi2")
    alpha = 0.95 if args.alpha is None else args.alpha
    if not 0.0 < alpha < 1.0:
        raise InputError("alpha must lie strictly between 0 and 1")
    demo = build_chi2_demo(cfg.seed, alpha, propagation=cfg.mode)
    res = demo.solver.solve(demo.xs, cfg.branching, cfg.time_limit)
    solution = statistic = None
    if res.found:
        counts = [res.solution[c] for c in demo.cs]
        solution = {"values": [res.solution[x] for x in demo.xs], "counts": counts,
                    "targets": list(demo.targets)}
        statistic = round(float(pearson_statistic(counts, demo.targets)), 4)
    emit([_single_report(cfg, f"chi2-seed{cfg.seed}", res, solution, statistic)], cfg, stdout)
    return status_code(res.status)


def _config(args, name: str) -> RunConfig:
    return RunConfig(name, getattr(args, "instance", None), getattr(args, "mode", "gac"),
                     getattr(args, "branching", "mindom"), getattr(args, "alpha", None),
                     getattr(args, "seed", 0), getattr(args, "time_limit", None),
                     getattr(args, "out", None), getattr(args, "format", "json"))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bincp", description="bin_counts constraint toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def solver_flags(sp, default_mode="gac"):
        sp.add_argument("--mode", choices=PROPAGATION, default=default_mode, help="bin_counts propagation")
        sp.add_argument("--branching", choices=STRATEGIES, default="mindom")
        sp.add_argument("--time-limit", type=float, default=None, help="seconds")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", default=None, help="write the report here instead of stdout")

    sp = sub.add_parser("bincounts", help="histogram of a value list")
    sp.add_argument("--values", required=True, help="e.g. 1,1,5,3")
    sp.add_argument("--bins", required=True, help="boundaries, e.g. 1,3,4,6")
    sp.add_argument("--hidden", action="store_true", help="ignore out-of-range values")
    sp.set_defaults(func=cmd_bincounts)

    sp = sub.add_parser("compare", help="Dec vs GAC vs GAC-incremental on random instances")
    sp.add_argument("--seeds", default="50", help="N or A:B")
    sp.add_argument("--fraction", type=float, default=0.8)
    sp.add_argument("--modes", default=None, help="comma-separated subset of dec,gac,gac-inc")
    sp.add_argument("--hidden", action="store_true")
    sp.add_argument("--jobs", type=int, default=1)
    solver_flags(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("bacp", help="curriculum with a load-distribution test")
    sp.add_argument("instance", nargs="?", help="instance file (default: bundled bacp-1)")
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--bins", default=None)
    sp.add_argument("--targets", default=None)
    solver_flags(sp)
    sp.set_defaults(func=cmd_bacp)

    sp = sub.add_parser("bnwp", help="nurse workload balancing (minimise the largest statistic)")
    sp.add_argument("instance", nargs="?", help="zone file (default: bundled 2zones0 zone 1)")
    sp.add_argument("--bins", default=None)
    sp.add_argument("--targets", default=None)
    sp.add_argument("--no-redundant", action="store_true", help="drop the implied per-bin totals")
    solver_flags(sp)
    sp.set_defaults(func=cmd_bnwp)

    sp = sub.add_parser("chi2", help="random values whose histogram must pass a goodness-of-fit test")
    sp.add_argument("--seed", type=int, default=4, help="many seeds are infeasible at small thresholds")
    sp.add_argument("--alpha", type=float, default=None)
    solver_flags(sp)
    sp.set_defaults(func=cmd_chi2)

    sp = sub.add_parser("ci", help="simultaneous multinomial confidence intervals")
    sp.add_argument("--counts", default=None)
    sp.add_argument("--observations", default=None, help="1-based category labels")
    sp.add_argument("--categories", type=int, default=None)
    sp.add_argument("--alpha", type=float, default=0.05)
    sp.set_defaults(func=cmd_ci)
    return p


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args, stdout)
    except (InputError, InstanceError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
