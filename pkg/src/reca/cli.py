"""Command-line front end.

Commands
--------
``reca run CONFIG``
    Train/evaluate one experiment. Writes into the output directory:
    ``metrics.txt`` (``key = value`` lines), ``metrics.json`` (same content),
    ``predictions.csv`` (``index,truth,prediction,raw...`` for the test split),
    ``w_out.json`` (``{"W_out": [[...]], "decoder": {...}}``) and
    ``resolved.json``, the fully resolved config, which ``reca run`` accepts
    as-is to reproduce the run.
``reca sweep PLAN``
    Run a sweep. Writes ``results.csv`` (one row per cell and trial),
    ``summary.csv`` (mean/std per cell, best first), ``heatmap.csv``
    (``i_p,i_m,mean_value``) and ``resolved.json``.
``reca trace``
    Render an automaton run.
``reca datasets``
    Fixture management (bundled iris copy, synthetic Santa Fe stand-in,
    validation of a user-supplied Santa Fe file).

The output directory is, in priority order: ``--out``, the ``RECA_OUTPUT_DIR``
environment variable, the config's ``[output] dir``.

Trace formats
-------------
Text: one line per row, ``.`` for a 0 cell and ``#`` for a 1 cell. With a
memory rule, the projection rows come first, then a line of ``-`` marks the
phase boundary, then the memory rows (the first memory row, equal to the last
projection row, is not repeated).

PGM: binary ``P5`` with maxval 255, one pixel per cell, one image row per
trace row. A 0 cell is a white pixel (255) and a 1 cell is a black pixel (0);
the phase boundary row is mid-grey (128). Header: ``P5\\n<width> <height>\\n255\\n``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import ca, experiment, tasks
from .config import ConfigError, ExperimentConfig, load_document, load_experiment, plan_to_dict, sweep_from_dict
from .io import atomic_write_bytes, atomic_write_text
from .learner import decoder_to_dict
from .readout import scheme_to_dict
from .sweep import PlanError, aggregate, heatmap_csv, run_sweep

OUTPUT_ENV = "RECA_OUTPUT_DIR"
OFF_PIXEL, ON_PIXEL, BOUNDARY_PIXEL = 255, 0, 128


class UsageError(ValueError):
    pass


def output_dir(flag: str | None, configured: str) -> Path:
    return Path(flag or os.environ.get(OUTPUT_ENV) or configured)


# -- rendering ----------------------------------------------------------------


def render_text(rows: np.ndarray) -> str:
    return "\n".join("".join("#" if c else "." for c in row) for row in rows) + "\n"


def render_pair_text(proj: np.ndarray, mem: np.ndarray) -> str:
    text = render_text(proj)
    if len(mem) > 1:
        text += "-" * proj.shape[1] + "\n" + render_text(mem[1:])
    return text


def pgm_bytes(rows: np.ndarray, boundary_after: int | None = None) -> bytes:
    img = np.where(np.asarray(rows) == 1, ON_PIXEL, OFF_PIXEL).astype(np.uint8)
    if boundary_after is not None:
        img = np.insert(img, boundary_after, BOUNDARY_PIXEL, axis=0)
    h, w = img.shape
    return f"P5\n{w} {h}\n255\n".encode() + img.tobytes()


def read_pgm(data: bytes) -> np.ndarray:
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5" or parts[2] != b"255":
        raise ValueError("not a P5 PGM with maxval 255")
    w, h = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w)


def initial_pattern(pattern: str, width: int | None) -> np.ndarray:
    p = pattern.strip().lower()
    if p == "center" or p.startswith("random"):
        if width is None:
            raise UsageError(f"pattern {pattern!r} needs --width")
        if p == "center":
            x = np.zeros(width, dtype=np.uint8)
            x[width // 2] = 1
            return x
        seed = int(p.split(":", 1)[1]) if ":" in p else 0
        return np.random.default_rng(seed).integers(0, 2, width).astype(np.uint8)
    if not p or set(p) - {"0", "1"}:
        raise UsageError(f"invalid pattern {pattern!r}: use a 0/1 string, 'center' or 'random[:seed]'")
    if width is not None and width != len(p):
        raise UsageError(f"pattern length {len(p)} does not match --width {width}")
    return ca.as_state(p)


# -- commands -----------------------------------------------------------------


def _metrics_text(metrics: dict) -> str:
    return "".join(f"{k} = {v}\n" for k, v in metrics.items())


def cmd_run(args) -> int:
    stage = "config"
    try:
        cfg = load_experiment(args.config)
        stage = "experiment"
        out = experiment.run(cfg.task.name, cfg.reservoir, cfg.readout, cfg.task.seed, cfg.task.params, cfg.encoder, cfg.training)
        stage = "output"
        dest = output_dir(args.out, cfg.output.dir)
        write_run(dest, cfg, out)
    except (ConfigError, ValueError, OSError) as e:
        print(f"reca run: {stage} stage failed: {e}", file=sys.stderr)
        return 2 if stage == "config" else 1
    print(f"{out.metric} = {out.value!r}  ({dest})")
    return 0


def write_run(dest: Path, cfg: ExperimentConfig, out: experiment.Outcome) -> None:
    metrics = {
        "task": cfg.task.name,
        "metric": out.metric,
        "value": out.value,
        "proj_rule": cfg.reservoir.proj_rule,
        "mem_rule": cfg.reservoir.mem_rule,
        "i_p": cfg.reservoir.i_p,
        "i_m": cfg.reservoir.i_m,
        "width": out.config.width,
        "n_test": int(len(out.truth)),
        "seed": cfg.task.seed,
    }
    metrics.update({k: v for k, v in out.meta.items() if isinstance(v, (int, float, str))})
    atomic_write_text(dest / "metrics.txt", _metrics_text(metrics))
    atomic_write_text(dest / "metrics.json", json.dumps(metrics, indent=2) + "\n")
    lines = ["index,truth,prediction," + ",".join(f"raw{j}" for j in range(out.raw.shape[1]))]
    for i, (t, p, r) in enumerate(zip(out.truth, out.predictions, out.raw)):
        lines.append(f"{i},{t!r},{p!r}," + ",".join(repr(float(v)) for v in r))
    atomic_write_text(dest / "predictions.csv", "\n".join(lines) + "\n")
    atomic_write_text(dest / "w_out.json", out.readout.to_json() + "\n")
    atomic_write_text(dest / "resolved.json", json.dumps(cfg.to_dict(), indent=2) + "\n")


def cmd_sweep(args) -> int:
    try:
        doc = load_document(args.plan)
        plan, section, out_section = sweep_from_dict(doc)
    except (ConfigError, PlanError, ValueError) as e:
        print(f"reca sweep: plan error: {e}", file=sys.stderr)
        return 2
    workers = args.workers if args.workers is not None else (section.workers or os.cpu_count() or 1)
    dest = output_dir(args.out, out_section.dir)

    def progress(done, total):
        if args.progress and (done == total or done % max(1, total // 20) == 0):
            print(f"  {done}/{total}", file=sys.stderr)

    result = run_sweep(plan, workers=workers, progress=progress)
    summary = aggregate(result)
    result.write(dest / "results.csv", timing=not args.no_timing)
    summary.write(dest / "summary.csv")
    atomic_write_text(dest / "heatmap.csv", heatmap_csv(result))
    resolved = plan_to_dict(plan, section.workers, out_section)
    atomic_write_text(dest / "resolved.json", json.dumps(resolved, indent=2) + "\n")
    n_err = sum(1 for r in result.records if r.error)
    print(f"{len(result)} records ({n_err} errors), {len(summary)} cells -> {dest}")
    for row in summary.rows[: args.top]:
        print(f"  {row.group}: {row.metric} {row.mean:.4f} +/- {row.std:.4f} (n={row.count})")
    return 0


def cmd_trace(args) -> int:
    try:
        x0 = initial_pattern(args.pattern, args.width)
        edges = ca.parse_edges(args.edges)
        proj = ca.evolve(args.rule, x0, args.iterations, edges).rows
        mem = None
        if args.mem_rule is not None:
            mem = ca.evolve(args.mem_rule, proj[-1], args.mem_iterations, edges).rows
    except (UsageError, ValueError) as e:
        print(f"reca trace: usage error: {e}", file=sys.stderr)
        return 2
    if args.out:
        if mem is None:
            data = pgm_bytes(proj)
        else:
            data = pgm_bytes(np.concatenate([proj, mem[1:]]), boundary_after=len(proj))
        atomic_write_bytes(args.out, data)
    else:
        sys.stdout.write(render_text(proj) if mem is None else render_pair_text(proj, mem))
    return 0


def cmd_datasets(args) -> int:
    try:
        if args.action == "list":
            print(f"iris (bundled): {tasks.bundled_iris_path()}")
            print("santa_fe: user-supplied, one integer in [0, 255] per line; "
                  "a synthetic Mackey-Glass stand-in is used when none is configured")
        elif args.action == "iris":
            atomic_write_text(args.path, tasks.bundled_iris_path().read_text())
            print(f"wrote {args.path}")
        elif args.action == "synthetic-santa-fe":
            values = tasks.synthetic_santa_fe(seed=args.seed)
            atomic_write_text(args.path, "".join(f"{int(v)}\n" for v in values))
            print(f"wrote {args.path} ({len(values)} values, synthetic stand-in)")
        elif args.action == "check-santa-fe":
            seq = tasks.load_santa_fe(args.path)
            print(f"ok: {len(seq)} input/target pairs, split at {seq.split}")
    except (ValueError, OSError) as e:
        print(f"reca datasets: {e}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reca", description="Cellular automaton reservoir computing experiments")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one experiment from a config file")
    r.add_argument("config")
    r.add_argument("--out", help="output directory")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="run a parameter sweep from a plan file")
    s.add_argument("plan")
    s.add_argument("--out", help="output directory")
    s.add_argument("--workers", type=int, default=None, help="worker processes (default: plan or CPU count)")
    s.add_argument("--no-timing", action="store_true", help="write wall_ms as 0 for byte-stable tables")
    s.add_argument("--top", type=int, default=10, help="best cells to print")
    s.add_argument("--progress", action="store_true")
    s.set_defaults(func=cmd_sweep)

    t = sub.add_parser("trace", help="render an automaton trace")
    t.add_argument("--rule", type=int, required=True, help="(projection) rule number")
    t.add_argument("--mem-rule", type=int, default=None, help="optional memory rule for a two-phase render")
    t.add_argument("--mem-iterations", type=int, default=10)
    t.add_argument("--width", type=int, default=None)
    t.add_argument("--iterations", type=int, default=25)
    t.add_argument("--pattern", default="center", help="0/1 string, 'center' or 'random[:seed]'")
    t.add_argument("--edges", default="fixed", choices=["fixed", "cyclic"])
    t.add_argument("--out", help="write a PGM image instead of text")
    t.set_defaults(func=cmd_trace)

    d = sub.add_parser("datasets", help="dataset fixtures")
    d.add_argument("action", choices=["list", "iris", "synthetic-santa-fe", "check-santa-fe"])
    d.add_argument("path", nargs="?")
    d.add_argument("--seed", type=int, default=0)
    d.set_defaults(func=cmd_datasets)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "datasets" and args.action != "list" and not args.path:
        parser.error(f"datasets {args.action} needs a path")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
