"""Command-line front end: simulate, exact, suite and bench verbs.

All outputs are written atomically (temp file + rename) and depend only on
the configuration and seed, so identical invocations produce byte-identical
files.
"""

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .colors import color_to_json, to_point
from .config import ExperimentConfig, config_from_json, config_to_json, load_config
from .kernels import augment, has_finite_support
from .rngutil import GENERATOR_NAME, replication_rng
from .rrt import branching_to_csv, marginal_color, simulate_branching
from .suites import SUITES, run_suite
from .urn import trajectory_to_csv, urn_exact_law, urn_simulate


def _config_echo(cfg: ExperimentConfig) -> dict:
    # output_dir and threads affect where/how results are produced, never
    # what they are, so they are excluded from the reproducible report body
    obj = config_to_json(cfg)
    obj.pop("output_dir", None)
    obj.pop("threads", None)
    return obj


def _atomic_write(path, data: bytes):
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as f:
        f.write(data)
    os.replace(tmp, path)
    return str(path)


def _atomic_write_json(path, obj):
    return _atomic_write(path, (json.dumps(obj, indent=2) + "\n").encode())


def _replication_outcome(cfg: ExperimentConfig, r: int):
    """Last drawn color of replication r, plus the exportable trajectory
    object when the method materializes one (replication 0 only)."""
    rng = replication_rng(cfg.seed, r)
    record = r == 0
    if cfg.method == "direct":
        traj = urn_simulate(cfg.kernel, cfg.init, cfg.n, rng, record_draws=record)
        return traj.last_draw, (traj if record else None)
    if cfg.method == "branching":
        traj = simulate_branching(augment(cfg.kernel, cfg.init), cfg.n, rng)
        last = traj.values[-1] if traj.values else None
        return last, (traj if record else None)
    if cfg.method == "marginal":
        if cfg.n < 1:
            return None, None
        return marginal_color(augment(cfg.kernel, cfg.init), cfg.n - 1, rng), None
    raise ValueError(f"unexpected method {cfg.method!r}")


def _replication_point(cfg_json: dict, r: int):
    # process-pool entry point: reconstruct config from its JSON form
    cfg = config_from_json(cfg_json)
    color, _ = _replication_outcome(cfg, r)
    return None if color is None else to_point(color)


def _exact_report(cfg: ExperimentConfig):
    law = urn_exact_law(cfg.kernel, cfg.init, cfg.n)
    entries = sorted(
        (
            {"history": [color_to_json(c) for c in seq], "probability": str(p)}
            for seq, p in law.outcomes.items()
        ),
        key=lambda e: json.dumps(e["history"]),
    )
    return {
        "config": _config_echo(cfg),
        "generator": GENERATOR_NAME,
        "n": cfg.n,
        "total_mass": str(law.total()),
        "outcomes": entries,
    }


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run a configured experiment and write its artifacts to output_dir.

    Returns a report dict; report["files"] lists every file written.
    Replication results are always merged in replication order, so the
    outputs are independent of the worker count.
    """
    cfg.validate()
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []

    if cfg.method == "exact":
        report = _exact_report(cfg)
        files.append(_atomic_write_json(out_dir / "exact_law.json", report))
        report["files"] = files
        return report

    if cfg.threads > 1:
        cfg_json = config_to_json(cfg)
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            points = list(pool.map(_replication_point, [cfg_json] * cfg.replications,
                                   range(cfg.replications)))
        # replication 0 is rerun locally to capture its trajectory export
        _, traj0 = _replication_outcome(cfg, 0)
    else:
        points = []
        traj0 = None
        for r in range(cfg.replications):
            color, traj = _replication_outcome(cfg, r)
            points.append(None if color is None else to_point(color))
            if r == 0:
                traj0 = traj

    buf = io.StringIO()
    writer = csv.writer(buf)
    width = len(points[0]) if points and points[0] is not None else 1
    writer.writerow(["replication"] + [f"x{i}" for i in range(width)])
    for r, pt in enumerate(points):
        if pt is not None:
            writer.writerow([r] + [repr(v) for v in pt])
    files.append(_atomic_write(out_dir / "samples.csv", buf.getvalue().encode()))

    if cfg.method == "direct" and traj0 is not None and cfg.n > 0:
        path = out_dir / "trajectory.csv"
        trajectory_to_csv(traj0, path)
        files.append(str(path))
    if cfg.method == "branching" and traj0 is not None and cfg.n > 0:
        path = out_dir / "tree.csv"
        branching_to_csv(traj0, path)
        files.append(str(path))

    report = {
        "config": _config_echo(cfg),
        "generator": GENERATOR_NAME,
        "method": cfg.method,
        "n": cfg.n,
        "replications": cfg.replications,
    }
    files.append(_atomic_write_json(out_dir / "report.json", report))
    report["files"] = files
    return report


def bench(cfg: ExperimentConfig) -> list:
    """Wall-clock timing of each applicable sampler at the configured size.
    Returns rows of (method, n, seconds, per_second)."""
    rows = []
    aug = augment(cfg.kernel, cfg.init)
    if has_finite_support(cfg.kernel):
        rng = replication_rng(cfg.seed, 0)
        urn_simulate(cfg.kernel, cfg.init, min(cfg.n, 1000), rng)  # warm up
        t0 = time.perf_counter()
        urn_simulate(cfg.kernel, cfg.init, cfg.n, replication_rng(cfg.seed, 1))
        dt = time.perf_counter() - t0
        rows.append(("direct", cfg.n, dt, cfg.n / dt))

        t0 = time.perf_counter()
        simulate_branching(aug, cfg.n, replication_rng(cfg.seed, 2))
        dt = time.perf_counter() - t0
        rows.append(("branching", cfg.n, dt, cfg.n / dt))

    reps = max(cfg.replications, 10)
    rng = replication_rng(cfg.seed, 3)
    t0 = time.perf_counter()
    for _ in range(reps):
        marginal_color(aug, max(cfg.n - 1, 1), rng)
    dt = time.perf_counter() - t0
    rows.append(("marginal", cfg.n, dt / reps, reps / dt))
    return rows


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    if args.seed is not None:
        cfg.seed = args.seed
    if args.replications is not None:
        cfg.replications = args.replications
    if args.threads is not None:
        cfg.threads = args.threads
    if args.out is not None:
        cfg.output_dir = args.out
    return cfg


def _add_common(parser, need_config):
    parser.add_argument("--config", required=need_config, help="JSON config file")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--replications", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="urnsim",
        description="Simulate balanced reinforced-draw processes and verify "
                    "their representations and scaling limits.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_sim = sub.add_parser("simulate", help="run a sampling experiment")
    _add_common(p_sim, need_config=True)

    p_exact = sub.add_parser("exact", help="compute an exact finite-horizon law")
    _add_common(p_exact, need_config=True)

    p_suite = sub.add_parser("suite", help="run a named verification suite")
    p_suite.add_argument("name", help=f"one of {sorted(SUITES)} or 'all'")
    _add_common(p_suite, need_config=False)

    p_bench = sub.add_parser("bench", help="time each sampler on a config")
    _add_common(p_bench, need_config=True)

    args = parser.parse_args(argv)

    if args.verb == "suite":
        names = sorted(SUITES) if args.name == "all" else [args.name]
        unknown = [n for n in names if n not in SUITES]
        if unknown:
            print(f"unknown suite {unknown[0]!r}; known: {sorted(SUITES)}",
                  file=sys.stderr)
            return 2
        seed = args.seed if args.seed is not None else 0
        all_reports = []
        for name in names:
            for rep in run_suite(name, seed=seed, out_dir=args.out):
                all_reports.append((name, rep))
                mark = "PASS" if rep.passed else "FAIL"
                print(f"[{mark}] {name}: {rep.test_name} "
                      f"statistic={rep.statistic:.6g} threshold={rep.threshold:.6g}")
        if args.out:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            payload = [dict(suite=name, **rep.to_json()) for name, rep in all_reports]
            _atomic_write_json(Path(args.out) / "suite_report.json", payload)
        return 0 if all(rep.passed for _, rep in all_reports) else 1

    cfg = load_config(args.config)
    cfg = _apply_overrides(cfg, args)

    if args.verb == "exact":
        cfg.method = "exact"
        report = run_experiment(cfg)
        for path in report["files"]:
            print(path)
        return 0

    if args.verb == "simulate":
        report = run_experiment(cfg)
        for path in report["files"]:
            print(path)
        return 0

    if args.verb == "bench":
        rows = bench(cfg)
        print(f"{'method':<12}{'n':>12}{'seconds':>14}{'per_second':>16}")
        for method, n, secs, rate in rows:
            print(f"{method:<12}{n:>12}{secs:>14.6f}{rate:>16.1f}")
        if args.out:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            buf = io.StringIO()
            writer = csv.writer(buf)
            writer.writerow(["method", "n", "seconds", "per_second"])
            writer.writerows(rows)
            _atomic_write(Path(args.out) / "bench.csv", buf.getvalue().encode())
        return 0

    return 2  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
