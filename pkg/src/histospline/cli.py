"""Command-line surface: generate / estimate / compare workflows.

All interchange is headered CSV (UTF-8, '.' decimal); run summaries are
single-line JSON records.  Exit codes: 0 ok, 1 usage, 2 data error,
3 numeric error.  Option precedence: command-line flags override the
--config file, which overrides built-in defaults; --emit-config prints
the fully resolved configuration and exits without running.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .datagen import ScenarioRanges, flatten_positions, generate_corpus
from .errors import DataError, DisjointSupportsError, NumericError
from .estimator import (
    count_turning_points,
    estimate_from_histogram,
    grid_kl,
    quadrature_normalization,
)
from .histogram import BinRule, Samples, build_histogram, select_bin_count
from .spline import Boundary

__all__ = ["RunConfig", "main", "cmd_generate", "cmd_estimate", "cmd_compare"]


class UsageError(Exception):
    """Bad flags, bad config values, or an invalid flag combination."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved settings of one CLI invocation."""

    command: str
    out_dir: str = "."
    # input source: a CSV column XOR in-process generation
    input: str | None = None
    column: str = "x"
    simulate: bool = False
    # generator settings
    count: int = 1000
    seed: int = 42
    v0_range: tuple[float, float] = (25.0, 35.0)
    t_react_range: tuple[float, float] = (0.8, 1.5)
    decel_range: tuple[float, float] = (3.5, 4.5)
    dt: float = 0.01
    # estimation settings
    rule: str = "knuth"
    bc: str = "not-a-knot"
    grid: int = 1001
    knuth_max: int = 200
    # compare inputs
    curve_a: str | None = None
    curve_b: str | None = None

    def __post_init__(self):
        if self.grid < 2:
            raise UsageError("grid size must be >= 2")
        if self.count < 1:
            raise UsageError("count must be >= 1")
        if self.command == "estimate" and not (bool(self.input) ^ bool(self.simulate)):
            raise UsageError("estimate needs exactly one input source: --input or --simulate")

    def bin_rule(self) -> BinRule:
        try:
            return BinRule.parse(self.rule, knuth_search_max=self.knuth_max)
        except DataError as exc:
            raise UsageError(str(exc)) from exc

    def boundary(self) -> Boundary:
        try:
            return Boundary(self.bc)
        except ValueError as exc:
            raise UsageError(f"unknown boundary condition {self.bc!r}") from exc

    def ranges(self) -> ScenarioRanges:
        try:
            return ScenarioRanges(
                v0=tuple(self.v0_range),
                t_react=tuple(self.t_react_range),
                decel=tuple(self.decel_range),
                dt=self.dt,
            )
        except DataError as exc:
            raise UsageError(str(exc)) from exc


class _Parser(argparse.ArgumentParser):
    # the interface contract reserves exit code 2 for data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_generator_options(sub):
    sub.add_argument("--count", type=int, help="number of series to simulate")
    sub.add_argument("--seed", type=int, help="corpus RNG seed")
    sub.add_argument("--v0-range", nargs=2, type=float, metavar=("LO", "HI"),
                     help="initial speed range, m/s")
    sub.add_argument("--t-react-range", nargs=2, type=float, metavar=("LO", "HI"),
                     help="reaction time range, s")
    sub.add_argument("--decel-range", nargs=2, type=float, metavar=("LO", "HI"),
                     help="deceleration range, m/s^2")
    sub.add_argument("--dt", type=float, help="sample interval, s")


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file (flags take precedence)")
    sub.add_argument("--out-dir", help="directory for output artifacts")
    sub.add_argument("--emit-config", action="store_true",
                     help="print the resolved config as JSON and exit")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="histospline",
                     description="Histogram cubic-spline density estimation toolkit")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("generate", parents=[], help="write a braking corpus CSV")
    _add_generator_options(gen)
    _add_common(gen)

    est = commands.add_parser("estimate", help="estimate a density and export artifacts")
    est.add_argument("--input", help="input CSV file")
    est.add_argument("--column", help="numeric column to estimate (default: x)")
    est.add_argument("--simulate", action="store_const", const=True, default=None,
                     help="estimate from a freshly simulated corpus instead of a file")
    _add_generator_options(est)
    est.add_argument("--rule", help="bin rule: sqrt|sturges|scott|fd|knuth|fixed:K")
    est.add_argument("--bc", choices=[b.value for b in Boundary],
                     help="spline boundary condition")
    est.add_argument("--grid", type=int, help="points in the exported density curve")
    est.add_argument("--knuth-max", type=int, help="upper bound of the Knuth bin scan")
    _add_common(est)

    cmp_ = commands.add_parser("compare", help="KL divergence between two curve CSVs")
    cmp_.add_argument("curve_a", help="first density curve CSV")
    cmp_.add_argument("curve_b", help="second density curve CSV")
    cmp_.add_argument("--grid", type=int, help="common re-interpolation grid size")
    _add_common(cmp_)
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            loaded = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(loaded, dict):
        raise UsageError(f"config file {path} must hold a JSON object")
    return loaded


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge flags over config-file values over defaults into a RunConfig."""
    file_config = _load_config_file(args.config) if getattr(args, "config", None) else {}
    unknown = set(file_config) - {f.name for f in RunConfig.__dataclass_fields__.values()}
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")

    merged = dict(file_config)
    for key, value in vars(args).items():
        if key in ("config", "emit_config", "command") or value is None:
            continue
        merged[key] = value
    merged = {k: tuple(v) if isinstance(v, list) else v for k, v in merged.items()}
    try:
        config = RunConfig(command=args.command, **merged)
    except TypeError as exc:
        raise UsageError(str(exc)) from exc
    # fail fast on unparseable rule/bc values regardless of the command
    config.bin_rule()
    config.boundary()
    config.ranges()
    return config


def _float_str(value: float) -> str:
    return repr(float(value))


def _write_corpus_csv(path: Path, corpus) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["series_id", "t", "x"])
        for series_id, ts in enumerate(corpus):
            for t, x in zip(ts.t, ts.x):
                writer.writerow([series_id, _float_str(t), _float_str(x)])


def _read_column(path: str, column: str) -> np.ndarray:
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise DataError(f"{path}: empty input file")
        if column not in header:
            raise DataError(f"{path}: no column named {column!r} (columns: {', '.join(header)})")
        col = header.index(column)
        out = []
        for row_number, row in enumerate(reader, start=2):
            try:
                out.append(float(row[col]))
            except (ValueError, IndexError) as exc:
                raise DataError(
                    f"{path}: row {row_number}, column {column!r}: bad numeric value"
                ) from exc
    if len(out) < 2:
        raise DataError(f"{path}: need at least 2 data rows, found {len(out)}")
    return np.asarray(out, dtype=float)


def _read_curve(path: str) -> tuple[np.ndarray, np.ndarray]:
    u = _read_column(path, "u")
    pdf = _read_column(path, "pdf")
    if np.any(np.diff(u) <= 0.0):
        raise DataError(f"{path}: curve grid must be strictly increasing")
    return u, pdf


def cmd_generate(config: RunConfig) -> int:
    corpus = generate_corpus(config.count, config.ranges(), seed=config.seed)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "corpus.csv"
    _write_corpus_csv(path, corpus)
    ends = [float(ts.x[-1]) for ts in corpus]
    print(f"wrote {path}")
    print(f"series={len(corpus)} min_x_end={min(ends):.3f} max_x_end={max(ends):.3f}")
    return 0


def _estimate_summary(config: RunConfig, estimate, sample_count: int, source: str) -> dict:
    lo, hi = estimate.support
    min_density = estimate.min_density()
    return {
        "source": source,
        "sample_count": sample_count,
        "rule": estimate.rule.label(),
        "bin_count": estimate.bin_count,
        "boundary": estimate.boundary.value,
        "support": [lo, hi],
        "min_density": min_density,
        "has_negative_density": min_density < 0.0,
        "turning_points": count_turning_points(estimate, max(config.grid, 3)),
        "normalization_analytic": estimate.normalization(),
        "normalization_simpson": quadrature_normalization(estimate),
        "grid_size": config.grid,
    }


def cmd_estimate(config: RunConfig) -> int:
    if config.input:
        values = _read_column(config.input, config.column)
        source = f"{config.input}#{config.column}"
    else:
        corpus = generate_corpus(config.count, config.ranges(), seed=config.seed)
        values = flatten_positions(corpus)
        source = f"simulate(count={config.count}, seed={config.seed})"
    samples = Samples(values)
    rule = config.bin_rule()
    hist = build_histogram(samples, select_bin_count(samples, rule))
    estimate = estimate_from_histogram(hist, rule, config.boundary())

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    with open(out_dir / "histogram.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["bin_left", "bin_right", "height"])
        for left, right, height in zip(hist.edges[:-1], hist.edges[1:], hist.heights):
            writer.writerow([_float_str(left), _float_str(right), _float_str(height)])

    lo, hi = estimate.support
    u = np.linspace(lo, hi, config.grid)
    density = estimate(u)
    with open(out_dir / "curve.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["u", "pdf"])
        for ui, pi in zip(u, density):
            writer.writerow([_float_str(ui), _float_str(pi)])

    summary = _estimate_summary(config, estimate, len(samples), source)
    with open(out_dir / "summary.jsonl", "w", encoding="utf-8") as fh:
        fh.write(json.dumps(summary) + "\n")

    for key, value in summary.items():
        print(f"{key}={value}")
    return 0


def cmd_compare(config: RunConfig) -> int:
    u_a, pdf_a = _read_curve(config.curve_a)
    u_b, pdf_b = _read_curve(config.curve_b)
    lo = max(u_a[0], u_b[0])
    hi = min(u_a[-1], u_b[-1])
    if not lo < hi:
        raise DisjointSupportsError(
            f"curve supports [{u_a[0]}, {u_a[-1]}] and [{u_b[0]}, {u_b[-1]}] do not overlap"
        )
    u = np.linspace(lo, hi, config.grid)
    p = np.interp(u, u_a, pdf_a)
    q = np.interp(u, u_b, pdf_b)
    print(f"kl_ab={grid_kl(u, p, q)!r}")
    print(f"kl_ba={grid_kl(u, q, p)!r}")
    return 0


_COMMANDS = {"generate": cmd_generate, "estimate": cmd_estimate, "compare": cmd_compare}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
        if args.emit_config:
            print(json.dumps(asdict(config), indent=2))
            return 0
        return _COMMANDS[args.command](config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
