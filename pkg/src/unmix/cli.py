"""Command-line interface: gen, ica, sweep, eval.

File formats:
  data CSV     header x1..xd, one sample per row, full-precision floats
  matrix JSON  {"rows": r, "cols": c, "data": [[...], ...]} (row-major)
  model JSON   mean, whitening matrix, eigenvalues, rotation, unmixing,
               mixing estimate (independent components as columns),
               objective_bits, method, warnings
All writes are atomic (temp file then rename). Exit codes: 0 success,
1 usage error, 2 data error, 3 solver degeneracy.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .entropy import multi_information
from .errors import DataError, DegeneracyError, UnmixError
from .evaluate import recovery_report
from .optimize import fit_ica, recover_sources, sweep_2d
from .synth import PRESET_NAMES, SourceSpec, generate, preset
from .whitening import fit_whitening

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DEGENERACY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_csv(path, data: np.ndarray) -> None:
    """Write samples with an x1..xd header at full round-trip precision."""
    data = np.asarray(data, dtype=float)
    header = ",".join(f"x{j + 1}" for j in range(data.shape[1]))
    lines = [header]
    lines.extend(",".join(repr(v) for v in row) for row in data.tolist())
    _atomic_write_text(Path(path), "\n".join(lines) + "\n")


def read_csv(path) -> np.ndarray:
    """Read a samples CSV; the x1..xd header row is optional."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = []
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        cells = line.split(",")
        try:
            row = [float(c) for c in cells]
        except ValueError:
            if lineno == 1:
                continue  # header
            raise DataError(f"{path}:{lineno}: not numeric: {line!r}") from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DataError(f"{path}:{lineno}: expected {width} columns, got {len(row)}")
        rows.append(row)
    if not rows:
        raise DataError(f"{path}: no data rows")
    data = np.array(rows)
    if not np.all(np.isfinite(data)):
        raise DataError(f"{path}: contains non-finite values")
    return data


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=float)
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "data": m.tolist()}


def matrix_from_json(obj, name: str) -> np.ndarray:
    try:
        data = np.array(obj["data"], dtype=float)
        if data.shape != (int(obj["rows"]), int(obj["cols"])):
            raise DataError(
                f"{name}: declared {obj['rows']}x{obj['cols']} but data is {data.shape}"
            )
        return data
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{name}: malformed matrix object: {exc}") from exc


def _write_json(path, obj) -> None:
    _atomic_write_text(Path(path), json.dumps(obj, indent=2) + "\n")


def _read_json(path, name: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read {name} {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{name} {path} is not valid JSON: {exc}") from exc


def _parse_mixing(text: str, d: int) -> np.ndarray:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise DataError(f"--mixing must be comma-separated numbers, got {text!r}") from None
    if len(values) != d * d:
        raise DataError(f"--mixing needs {d * d} entries for d={d}, got {len(values)}")
    return np.array(values).reshape(d, d)


def _parse_dist(text: str) -> SourceSpec:
    dims = []
    for part in text.split(","):
        fields = part.split(":")
        kind = fields[0].strip()
        try:
            params = [float(v) for v in fields[1:]]
        except ValueError:
            raise DataError(f"bad distribution parameters in {part!r}") from None
        dims.append((kind, *params))
    return SourceSpec(tuple(dims))


def _spec_to_json(spec: SourceSpec) -> list:
    return [list(dim) for dim in spec.dimensions]


def _plot_path(flag, output: Path) -> Path | None:
    if flag is None:
        return None
    if flag == "":
        return output.with_suffix(".png")
    return Path(flag)


def cmd_gen(args) -> int:
    spec, mixing = preset(args.preset)
    if args.dist:
        spec = _parse_dist(args.dist)
    if args.mixing:
        mixing = _parse_mixing(args.mixing, spec.d)
    dataset = generate(spec, mixing, n=args.n, seed=args.seed)

    output = Path(args.output)
    truth_path = Path(args.truth) if args.truth else output.with_suffix(".truth.json")
    write_csv(output, dataset.observed)
    _write_json(truth_path, {
        "config": {
            "subcommand": "gen",
            "preset": args.preset,
            "n": args.n,
            "seed": args.seed,
            "mixing_override": args.mixing,
            "dist_override": args.dist,
        },
        "sources": _spec_to_json(spec),
        "mixing": matrix_to_json(dataset.mixing),
    })
    plot = _plot_path(args.plot, output)
    if plot is not None:
        from .reports import save_scatter_plot

        save_scatter_plot(dataset.observed, plot, mixing=dataset.mixing)
    print(f"wrote {output} ({args.n} samples, d={spec.d}) and {truth_path}")
    return EXIT_OK


def cmd_ica(args) -> int:
    data = read_csv(args.data)
    model = fit_ica(
        data, method=args.method, grid_steps=args.grid_steps,
    )
    shat = recover_sources(model, data)
    independence_bits = multi_information(shat, k=args.k).bits
    doc = {
        "config": {
            "subcommand": "ica",
            "data": str(args.data),
            "method": args.method,
            "k": args.k,
            "grid_steps": args.grid_steps,
        },
        "mean": model.whitening.mean.tolist(),
        "eigenvalues": model.whitening.eigen.eigenvalues.tolist(),
        "whitening": matrix_to_json(model.whitening.matrix),
        "rotation": matrix_to_json(model.rotation),
        "unmixing": matrix_to_json(model.unmixing),
        "mixing_estimate": matrix_to_json(model.mixing_estimate),
        "objective_bits": model.objective_bits,
        "independence_bits": independence_bits,
        "method": model.method,
        "converged": model.converged,
        "angle_deg": model.angle_deg,
        "warnings": list(model.warnings),
    }
    _write_json(args.output, doc)
    note = f" warnings: {'; '.join(model.warnings)}" if model.warnings else ""
    print(f"wrote {args.output} (objective {model.objective_bits:.4f} bits){note}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    data = read_csv(args.data)
    _, xw = fit_whitening(data)
    result = sweep_2d(xw, steps=args.steps, with_multi_info=args.multi_info, k=args.k)

    output = Path(args.output)
    header = "angle_deg,objective_bits,multi_info_bits"
    lines = [header]
    for i in range(len(result.angles_deg)):
        mi = repr(float(result.multi_info_bits[i])) if result.multi_info_bits is not None else ""
        lines.append(f"{repr(float(result.angles_deg[i]))},"
                     f"{repr(float(result.objective_bits[i]))},{mi}")
    _atomic_write_text(output, "\n".join(lines) + "\n")

    plot = _plot_path(args.plot, output)
    if plot is not None:
        from .reports import save_sweep_plot

        save_sweep_plot(result, plot)
    print(f"wrote {output} (argmin {result.argmin_deg:.2f} deg)")
    return EXIT_OK


def cmd_eval(args) -> int:
    model_doc = _read_json(args.model, "model")
    truth_doc = _read_json(args.truth, "truth")
    try:
        w_est = matrix_from_json(model_doc["unmixing"], "model unmixing")
        mean = np.array(model_doc["mean"], dtype=float)
        a_true = matrix_from_json(truth_doc["mixing"], "truth mixing")
    except KeyError as exc:
        raise DataError(f"missing field in model/truth JSON: {exc}") from exc

    shat = None
    if args.data:
        data = read_csv(args.data)
        if data.shape[1] != w_est.shape[1]:
            raise DataError(
                f"data dimension {data.shape[1]} does not match model d={w_est.shape[1]}"
            )
        shat = (data - mean) @ w_est.T
    report = recovery_report(a_true, w_est, shat=shat, k=args.k)

    doc = {
        "config": {
            "subcommand": "eval",
            "model": str(args.model),
            "truth": str(args.truth),
            "data": str(args.data) if args.data else None,
            "k": args.k,
        },
        "amari_index": report.amari_index,
        "gain_matrix": matrix_to_json(report.gain_matrix),
        "matched_permutation": list(report.matched_permutation),
        "matched_signs": list(report.matched_signs),
        "multi_info_bits": report.multi_info_bits,
    }
    _write_json(args.output, doc)
    mi = "n/a" if report.multi_info_bits is None else f"{report.multi_info_bits:.4f}"
    print(f"amari_index {report.amari_index:.6f}")
    print(f"multi_info_bits {mi}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="unmix", description="Blind source separation toolkit")
    parser.add_argument("--version", action="version", version=f"unmix {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic mixture dataset")
    gen.add_argument("--preset", required=True, choices=PRESET_NAMES)
    gen.add_argument("--n", type=int, default=20000)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--mixing", help="row-major comma-separated mixing override")
    gen.add_argument("--dist", help="distribution override, e.g. laplacian:1,gaussian:1")
    gen.add_argument("-o", "--output", default="data.csv")
    gen.add_argument("--truth", help="sidecar path (default: output with .truth.json)")
    gen.add_argument("--plot", nargs="?", const="", default=None,
                     help="also render a scatter figure (optional path)")
    gen.set_defaults(func=cmd_gen)

    ica = sub.add_parser("ica", help="fit an unmixing model to a data CSV")
    ica.add_argument("data")
    ica.add_argument("--method", default="givens",
                     choices=("sweep2d", "givens", "fobi", "fobi+givens"))
    ica.add_argument("--k", type=int, default=3)
    ica.add_argument("--grid-steps", type=int, default=90)
    ica.add_argument("-o", "--output", default="model.json")
    ica.set_defaults(func=cmd_ica)

    sweep = sub.add_parser("sweep", help="angle sweep of the objective (d=2)")
    sweep.add_argument("data")
    sweep.add_argument("--steps", type=int, default=180)
    sweep.add_argument("--multi-info", action="store_true")
    sweep.add_argument("--k", type=int, default=3)
    sweep.add_argument("-o", "--output", default="sweep.csv")
    sweep.add_argument("--plot", nargs="?", const="", default=None,
                       help="also render the sweep curve (optional path)")
    sweep.set_defaults(func=cmd_sweep)

    ev = sub.add_parser("eval", help="score a model against generation truth")
    ev.add_argument("data", nargs="?", default=None,
                    help="observed data CSV for the independence check")
    ev.add_argument("--model", required=True)
    ev.add_argument("--truth", required=True)
    ev.add_argument("--k", type=int, default=3)
    ev.add_argument("-o", "--output", default="report.json")
    ev.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegeneracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERACY
    except (UnmixError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
