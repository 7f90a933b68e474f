"""Command-line pipeline: gen-data, train, arch-search, evaluate, sweep, predict.

Every option can also come from a ``key = value`` config file (``--config``);
keys are the long option names with or without dashes. Flags override the
file, which overrides built-in defaults. The effective settings are echoed to
stderr as ``# key = value`` lines.

Exit codes: 0 success, 1 usage, 2 I/O, 3 numeric failure, 4 schema.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import archsearch, parametric
from .data import DEFAULT_RANGES, FIELD_TO_COLUMN, INPUT_FIELDS, SchemaError, generate_synthetic, load_csv, split
from .estimator import fit_flow_model
from .metrics import reports_to_csv
from .model import FlowModel, ModelFormatError
from .training import TrainConfig

EXIT_USAGE, EXIT_IO, EXIT_NUMERIC, EXIT_SCHEMA = 1, 2, 3, 4

_ALIASES = {**{c: f for f, c in FIELD_TO_COLUMN.items()}, **{f: f for f in INPUT_FIELDS}}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class Opt:
    name: str
    type: Callable[[str], Any]
    default: Any = None
    help: str = ""
    required: bool = False

    @property
    def key(self) -> str:
        return self.name.replace("-", "_")


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise ValueError(f"must be >= 1, got {v}")
    return v


def _range_pair(s: str) -> tuple[float, float]:
    lo, hi = (float(v) for v in s.split(","))
    return lo, hi


_TRAIN_OPTS = [
    Opt("hidden", _positive_int, 7, "hidden-layer nodes"),
    Opt("iterations", _positive_int, 100_000, "training epochs"),
    Opt("lr", float, 0.05, "learning rate"),
    Opt("momentum", float, 0.9, "momentum coefficient in [0, 1)"),
    Opt("seed", int, 0, "seed for initialization and shuffling"),
    Opt("split", float, 0.8, "training fraction"),
    Opt("split-seed", int, None, "seed for the train/validation split (default: --seed)"),
]

COMMANDS: dict[str, tuple[str, list[Opt]]] = {
    "gen-data": ("write a synthetic dataset", [
        Opt("n", _positive_int, 400, "number of samples"),
        Opt("seed", int, 0, "generator seed"),
        Opt("noise", float, 0.0, "relative Gaussian noise level"),
        Opt("out", str, None, "output CSV path", required=True),
        *[Opt(f"range-{f.replace('_', '-')}", _range_pair, None, f"LO,HI for {f} (default {DEFAULT_RANGES[f]})")
          for f in INPUT_FIELDS],
    ]),
    "train": ("train one network and save it", [
        Opt("data", str, None, "input CSV", required=True),
        *_TRAIN_OPTS,
        Opt("model-out", str, None, "model file to write", required=True),
        Opt("history-out", str, None, "optional epoch,mse CSV"),
        Opt("record-every", _positive_int, 100, "history stride in epochs"),
    ]),
    "arch-search": ("select the hidden-layer size", [
        Opt("data", str, None, "input CSV", required=True),
        Opt("min-hidden", _positive_int, 2, "smallest candidate"),
        Opt("max-hidden", _positive_int, 12, "largest candidate"),
        *[o for o in _TRAIN_OPTS if o.name != "hidden"],
        Opt("jobs", _positive_int, 1, "candidates trained in parallel"),
        Opt("csv-out", str, None, "optional report CSV"),
    ]),
    "evaluate": ("report MSE, %Error and relative errors", [
        Opt("model", str, None, "model file", required=True),
        Opt("data", str, None, "CSV to evaluate on", required=True),
        Opt("scatter-out", str, None, "optional actual,predicted CSV"),
        Opt("format", str, "text", "text or csv"),
    ]),
    "sweep": ("vary one input and report the predicted trend", [
        Opt("model", str, None, "model file", required=True),
        Opt("var", str, None, f"one of {', '.join(INPUT_FIELDS)}", required=True),
        Opt("from", float, None, "first grid value", required=True),
        Opt("to", float, None, "last grid value", required=True),
        Opt("steps", _positive_int, 11, "number of grid points"),
        Opt("baseline", str, None, "k=v,... for the other inputs (default: training means)"),
        Opt("out", str, None, "optional output CSV (default: stdout)"),
    ]),
    "predict": ("predict product flow for one operating point", [
        Opt("model", str, None, "model file", required=True),
        Opt("input", str, None, "sf_ratio=..,feed_temp=..,solvent_temp=..,rotation=..", required=True),
    ]),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rdcann", description="Product-flow perceptron for a rotating disc contactor.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for cmd, (help_text, opts) in COMMANDS.items():
        p = sub.add_parser(cmd, help=help_text, description=help_text)
        p.add_argument("--config", help="key = value config file")
        for o in opts:
            p.add_argument(f"--{o.name}", dest=o.key, default=None, help=o.help)
    return parser


def read_config(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            k, v = (s.strip() for s in line.split("=", 1))
            values[k.replace("-", "_")] = v
    return values


def resolve(cmd: str, args: argparse.Namespace) -> dict[str, Any]:
    """Merge flags over config file over defaults, converting and checking every value."""
    opts = COMMANDS[cmd][1]
    file_values = read_config(args.config) if args.config else {}
    unknown = set(file_values) - {o.key for o in opts}
    if unknown:
        raise UsageError(f"{cmd}: unknown config keys: {', '.join(sorted(unknown))}")
    out = {}
    for o in opts:
        raw = getattr(args, o.key)
        if raw is None:
            raw = file_values.get(o.key)
        if raw is None:
            if o.required:
                raise UsageError(f"{cmd}: --{o.name} is required")
            out[o.key] = o.default
            continue
        try:
            out[o.key] = o.type(raw)
        except ValueError as exc:
            raise UsageError(f"{cmd}: invalid --{o.name} {raw!r}: {exc}") from None
    return out


def _echo(settings: dict[str, Any]):
    for k, v in settings.items():
        print(f"# {k} = {v}", file=sys.stderr)


def _train_config(s: dict[str, Any], record_every: int = 100) -> TrainConfig:
    try:
        return TrainConfig(s["lr"], s["momentum"], s["iterations"], s["seed"], True, record_every)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _parse_assignments(text: str, what: str) -> dict[str, float]:
    values = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in part:
            raise UsageError(f"{what}: expected key=value, got {part!r}")
        k, v = (s.strip() for s in part.split("=", 1))
        if k not in _ALIASES:
            raise UsageError(f"{what}: unknown key {k!r}; expected {', '.join(INPUT_FIELDS)}")
        try:
            values[_ALIASES[k]] = float(v)
        except ValueError:
            raise UsageError(f"{what}: {k} is not a number: {v!r}") from None
    return values


def _write(path: str, text: str):
    Path(path).write_text(text, encoding="utf-8")


def cmd_gen_data(s):
    ranges = {f: s[f"range_{f}"] for f in INPUT_FIELDS if s[f"range_{f}"] is not None}
    if s["noise"] < 0 or not math.isfinite(s["noise"]):
        raise UsageError("gen-data: --noise must be >= 0")
    try:
        ds = generate_synthetic(s["n"], s["seed"], s["noise"], ranges)
    except ValueError as exc:
        raise UsageError(f"gen-data: {exc}") from None
    ds.to_csv(s["out"])
    print(f"wrote {len(ds)} samples to {s['out']}", file=sys.stderr)


def _split(s, ds):
    seed = s["seed"] if s["split_seed"] is None else s["split_seed"]
    try:
        return split(ds, s["split"], seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_train(s):
    config = _train_config(s, s["record_every"])
    train_set, validation = _split(s, load_csv(s["data"]))
    model, history = fit_flow_model(train_set, s["hidden"], config)
    model.save(s["model_out"])
    if s["history_out"]:
        history.to_csv(s["history_out"])
    sys.stdout.write(model.evaluate(train_set, "train").to_text())
    sys.stdout.write(model.evaluate(validation, "validation").to_text())
    print(f"wrote model {'-'.join(map(str, model.network.dims))} to {s['model_out']}", file=sys.stderr)


def cmd_arch_search(s):
    if s["min_hidden"] > s["max_hidden"]:
        raise UsageError("arch-search: --min-hidden must not exceed --max-hidden")
    config = _train_config(s)
    ds = load_csv(s["data"])
    split_seed = s["seed"] if s["split_seed"] is None else s["split_seed"]
    try:
        report = archsearch.search(ds, range(s["min_hidden"], s["max_hidden"] + 1), config,
                                   split_seed, s["split"], n_jobs=s["jobs"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sys.stdout.write(report.to_table())
    print(f"selected = {report.selected}")
    if s["csv_out"]:
        _write(s["csv_out"], report.to_csv())


def cmd_evaluate(s):
    if s["format"] not in ("text", "csv"):
        raise UsageError("evaluate: --format must be text or csv")
    model = FlowModel.load(s["model"])
    ds = load_csv(s["data"])
    report = model.evaluate(ds, "")
    sys.stdout.write(report.to_text() if s["format"] == "text" else reports_to_csv([report]))
    if s["scatter_out"]:
        _write(s["scatter_out"], parametric.scatter_csv(parametric.scatter_export(model, ds)))


def cmd_sweep(s):
    model = FlowModel.load(s["model"])
    var = _ALIASES.get(s["var"])
    if var is None:
        raise UsageError(f"sweep: unknown --var {s['var']!r}; expected {', '.join(INPUT_FIELDS)}")
    baseline = dict(model.baseline)
    if s["baseline"]:
        baseline.update(_parse_assignments(s["baseline"], "sweep --baseline"))
    if s["steps"] < 2:
        raise UsageError("sweep: --steps must be >= 2")
    grid = np.linspace(s["from"], s["to"], s["steps"])
    try:
        spec = parametric.SweepSpec(var, tuple(grid), {k: v for k, v in baseline.items() if k != var})
    except ValueError as exc:
        raise UsageError(f"sweep: {exc}") from None
    result = parametric.sweep(model, spec)
    if s["out"]:
        _write(s["out"], result.to_csv())
    else:
        sys.stdout.write(result.to_csv())
    if any(result.extrapolated):
        print("warning: some sweep points lie outside the training range", file=sys.stderr)
    print(f"trend: {result.trend.direction}, violations: {result.trend.violation_count}", file=sys.stderr)


def cmd_predict(s):
    values = _parse_assignments(s["input"], "predict --input")
    missing = [f for f in INPUT_FIELDS if f not in values]
    if missing:
        raise UsageError(f"predict --input: missing {', '.join(missing)} (required: {', '.join(INPUT_FIELDS)})")
    model = FlowModel.load(s["model"])
    print(repr(float(model.predict(np.array([values[f] for f in INPUT_FIELDS])))))


HANDLERS = {
    "gen-data": cmd_gen_data,
    "train": cmd_train,
    "arch-search": cmd_arch_search,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "predict": cmd_predict,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        settings = resolve(args.command, args)
        _echo(settings)
        HANDLERS[args.command](settings)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SchemaError, ModelFormatError) as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as exc:
        name = getattr(exc, "filename", None)
        print(f"I/O error: {exc.strerror or exc}" + (f": {name}" if name else ""), file=sys.stderr)
        return EXIT_IO
    except ArithmeticError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
