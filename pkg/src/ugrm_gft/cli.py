"""Command-line front end.

Exit codes: 0 on success, 1 on numerical failure, 2 on usage or input errors.
Every command writes ``manifest.json`` next to its outputs; passing that
file back through ``--manifest`` reruns the command with identical
parameters and reproduces the outputs byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import jsonschema
import numpy as np

from . import __version__
from .data import (
    SignalMatrix,
    knn_graph,
    line_graph,
    load_graph_csv,
    load_signal_csv,
    load_stations_csv,
    normalize,
    save_graph_csv,
    save_signal_csv,
    save_stations_csv,
    synthetic_spatiotemporal,
    synthetic_stations,
)
from .denoise import (
    BASELINE_KINDS,
    GridConfig,
    NoiseConfig,
    add_noise,
    grid_search,
    ugrm_basis,
    baseline_basis,
)
from .gft import bandlimit_reconstruct_I, bandlimit_reconstruct_II, gft_forward
from .graph import UgrmParams, cartesian_product, vec
from .spectral import monotonicity_report

log = logging.getLogger("ugrm_gft")

EXIT_OK, EXIT_NUMERIC, EXIT_INPUT = 0, 1, 2

# parameters that never enter a manifest (they do not change outputs)
_VOLATILE = {"out_dir", "manifest", "command", "handler", "verbose", "n_jobs"}


class InputError(ValueError):
    pass


def load_schema() -> dict:
    text = resources.files("ugrm_gft").joinpath("schema/report.schema.json").read_text("utf-8")
    return json.loads(text)


def _sanitize(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.generic):
        return _sanitize(obj.item())
    return obj


def _write_json(path: Path, payload: dict, schema: Optional[dict] = None) -> None:
    payload = _sanitize(payload)
    if schema is not None:
        jsonschema.validate(payload, schema)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def parse_grid(text: str) -> tuple:
    """``"0:1:0.1"`` (inclusive range) or ``"0,0.5,1"`` (explicit list)."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(p) for p in text.split(":"))
            if step <= 0:
                raise InputError(f"grid step must be positive: {text!r}")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return tuple(round(start + i * step, 12) for i in range(count))
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"cannot parse grid {text!r}") from exc


def parse_int_grid(text: str) -> tuple:
    values = parse_grid(text)
    if any(v != int(v) for v in values):
        raise InputError(f"M grid must contain integers: {text!r}")
    return tuple(int(v) for v in values)


def _fmt_value(x: float) -> str:
    return format(float(x), ".17g")


# --- shared input handling -------------------------------------------------


def _spatial_graph(params: dict, n_expected: Optional[int] = None):
    if params.get("graph"):
        g = load_graph_csv(params["graph"])
    elif params.get("stations"):
        stations = load_stations_csv(params["stations"])
        g = knn_graph(
            stations,
            neighbors=params["neighbors"],
            bandwidth=params["bandwidth"],
            reverse=params["reverse_knn"],
        )
    else:
        raise InputError("need --graph or --stations to build the spatial graph")
    if n_expected is not None and g.n != n_expected:
        raise InputError(f"spatial graph has {g.n} vertices but the signal has {n_expected} rows")
    return g


def _load_problem(params: dict):
    """Signal (N x T), time graph g1 (T vertices) and spatial graph g2 (N vertices)."""
    if not params.get("signal"):
        raise InputError("--signal is required")
    signal = load_signal_csv(params["signal"])
    if params["normalize"]:
        signal = normalize(signal)
    n, t = signal.shape
    return signal, line_graph(t), _spatial_graph(params, n)


def _input_hashes(params: dict) -> dict:
    return {
        key: _sha256(params[key])
        for key in ("signal", "stations", "graph")
        if params.get(key)
    }


def _manifest(command: str, params: dict) -> dict:
    resolved = {k: v for k, v in params.items() if k not in _VOLATILE}
    return {
        "command": command,
        "tool": "ugrm-gft",
        "version": __version__,
        "parameters": resolved,
        "input_sha256": _input_hashes(params),
    }


# --- commands ----------------------------------------------------------------


def cmd_spectrum(params: dict, out: Path) -> dict:
    signal, g1, g2 = _load_problem(params)
    variant = params["variant"]
    if params.get("matrix"):
        basis, table = baseline_basis(g1, g2, params["matrix"], variant)
    else:
        basis, table = ugrm_basis(g1, g2, UgrmParams(params["alpha"], params["k"]), variant)
    x = vec(signal.values)
    spec = gft_forward(basis, x)
    if table is None:
        order, freq = np.arange(basis.n), basis.sigma
        pairs = None
    else:
        order, freq, pairs = table.flat_index, table.mu, table.pairs
    lines = ["index,frequency,i,j,z1,z2"]
    for t, col in enumerate(order):
        i, j = (pairs[t] if pairs is not None else (-1, -1))
        lines.append(
            ",".join(
                [str(t), _fmt_value(freq[t]), str(int(i)), str(int(j)),
                 _fmt_value(spec.z1[col]), _fmt_value(spec.z2[col])]
            )
        )
    (out / "spectrum.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    energy = float(np.dot(spec.z1, spec.z1) + np.dot(spec.z2, spec.z2))
    return {
        "command": "spectrum",
        "variant": variant,
        "n": basis.n,
        "signal_energy": float(np.dot(x, x)),
        "spectrum_energy": energy,
        "files": ["spectrum.csv"],
    }


def _curve_csv(path: Path, m_values, snr, bae) -> None:
    lines = ["M,SNR,BAE"]
    for m, s, e in zip(m_values, snr, bae):
        lines.append(f"{m},{'inf' if math.isinf(s) else _fmt_value(s)},{_fmt_value(e)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


_BASELINE_NAMES = {"L": "Lap", "A": "Adj", "D": "Id", "Q": "SLap"}


def cmd_denoise(params: dict, out: Path) -> dict:
    signal, g1, g2 = _load_problem(params)
    variant = params["variant"]
    grid = GridConfig(
        alpha_values=params["alpha_grid"],
        k_values=params["k_grid"],
        m_values=params["m_grid"],
        objective=params["objective"],
    )
    x_true = signal.values
    files, reports, table_rows = [], [], []
    for sigma in params["sigma"]:
        noise = NoiseConfig(sigma, params["seed"], params["trials"])
        report = grid_search(
            x_true, g1, g2, grid, noise, variant, tuple(params["baselines"]),
            n_jobs=params.get("n_jobs", 1),
        )
        tag = f"sigma_{sigma:g}"
        cdir = out / "curves" / tag
        cdir.mkdir(parents=True, exist_ok=True)
        for ia, a in enumerate(report.alpha_values):
            for ik, k in enumerate(report.k_values):
                name = f"alpha_{a:g}_k_{k:g}.csv"
                _curve_csv(cdir / name, report.m_values, report.snr[ia, ik], report.bae[ia, ik])
                files.append(f"curves/{tag}/{name}")
        for kind, curves in report.baselines.items():
            name = f"baseline_{kind}.csv"
            _curve_csv(cdir / name, report.m_values, curves["snr"], curves["bae"])
            files.append(f"curves/{tag}/{name}")

        best = report.best
        basis, tbl = ugrm_basis(g1, g2, UgrmParams(best.alpha, best.k), variant)
        noisy = add_noise(x_true, noise, 0)
        if tbl is None:
            rec = bandlimit_reconstruct_I(basis, noisy, best.m)
        else:
            rec = bandlimit_reconstruct_II(basis, tbl, noisy, best.m)
        name = f"best_reconstruction_{tag}.csv"
        save_signal_csv(out / name, SignalMatrix(rec, signal.row_labels, signal.col_labels))
        files.append(name)

        payload = report.to_dict()
        reports.append(payload)
        table_rows.append(_table_column(payload, variant))
    return {
        "command": "denoise",
        "variant": variant,
        "normalization": list(signal.normalization) if signal.normalization else None,
        "reports": reports,
        "table": table_rows,
        "files": sorted(files),
    }


def _table_column(payload: dict, variant: str) -> dict:
    """One sigma column of the method comparison table (optimal, ISNR, baselines)."""
    rows = [
        {"method": "optimal", **payload["best"]},
        {"method": "ISNR", "score": payload["isnr"], "exact": payload["isnr_exact"]},
    ]
    for kind in ("L", "A", "D", "Q"):
        if kind in payload["baselines"]:
            b = payload["baselines"][kind]["best"]
            rows.append({"method": f"{_BASELINE_NAMES[kind]}-GFT-{variant}", "m": b["m"],
                         "score": b["score"], "exact": b["exact"]})
    return {"sigma": payload["noise"]["sigma"], "rows": rows}


def cmd_monotonicity(params: dict, out: Path) -> dict:
    g = _spatial_graph(params)
    if params.get("time_steps"):
        g = cartesian_product(line_graph(params["time_steps"]), g)
    reports, total = [], 0
    for k in params["k_grid"]:
        rep = monotonicity_report(g, k, params["alpha_grid"])
        reports.append(rep.to_dict())
        total += len(rep.violations)
        lines = ["alpha," + ",".join(f"nu_{l}" for l in range(g.n))]
        for a, row in zip(rep.alpha_grid, rep.table):
            lines.append(_fmt_value(a) + "," + ",".join(_fmt_value(v) for v in row))
        (out / f"singular_values_k_{k:g}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    summary = {
        "total_violations": total,
        "per_k": [{"k": r["k"], "violations": len(r["violations"])} for r in reports],
        "monotone": total == 0,
    }
    return {"command": "monotonicity", "n": g.n, "reports": reports, "summary": summary}


def cmd_build_graph(params: dict, out: Path) -> dict:
    if params.get("time_steps") and not (params.get("stations") or params.get("graph")):
        g = line_graph(params["time_steps"])
    else:
        g = _spatial_graph(params)
        if params.get("time_steps"):
            g = cartesian_product(line_graph(params["time_steps"]), g)
    save_graph_csv(out / "graph.csv", g)
    return {"command": "build-graph", "n": g.n, "edges": int(np.count_nonzero(g.weights)),
            "files": ["graph.csv"]}


def cmd_synth(params: dict, out: Path) -> dict:
    n, t = params["n"], params["t"]
    signal = synthetic_spatiotemporal(params["seed"], n, t, params["band"], params["neighbors"])
    stations = synthetic_stations(params["seed"], n)
    save_signal_csv(out / "signal.csv", signal)
    save_stations_csv(out / "stations.csv", stations)
    return {"command": "synth", "n": n, "t": t, "band": params["band"],
            "files": ["signal.csv", "stations.csv"]}


COMMANDS = {
    "spectrum": cmd_spectrum,
    "denoise": cmd_denoise,
    "monotonicity": cmd_monotonicity,
    "build-graph": cmd_build_graph,
    "synth": cmd_synth,
}


# --- argument parsing ----------------------------------------------------------


def _add_graph_args(p):
    p.add_argument("--stations", help="stations CSV (label,longitude,latitude)")
    p.add_argument("--graph", help="adjacency CSV (row = target, column = source)")
    p.add_argument("--neighbors", type=int, default=5)
    p.add_argument("--bandwidth", default="auto", help="kernel width or 'auto'")
    p.add_argument("--reverse-knn", action="store_true", help="edges leave the centre vertex")


def _add_signal_args(p):
    p.add_argument("--signal", help="signal CSV, rows = stations, columns = time steps")
    p.add_argument("--no-normalize", dest="normalize", action="store_false",
                   help="skip the global z-score")
    p.add_argument("--variant", choices=("I", "II"), default="I")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ugrm-gft", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out-dir", required=True, type=Path)
        p.add_argument("--manifest", type=Path, help="rerun with parameters from a manifest.json")

    p = sub.add_parser("spectrum", help="export GFT coefficients")
    _add_signal_args(p)
    _add_graph_args(p)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--matrix", choices=BASELINE_KINDS, help="use a fixed matrix instead of the UGRM")
    common(p)

    p = sub.add_parser("denoise", help="grid search over (alpha, k, M)")
    _add_signal_args(p)
    _add_graph_args(p)
    p.add_argument("--alpha-grid", type=parse_grid, default="0:1:0.1")
    p.add_argument("--k-grid", type=parse_grid, default="0:1:0.1")
    p.add_argument("--m-grid", type=parse_int_grid, default=None,
                   help="bandwidths (default 0,5,...,N)")
    p.add_argument("--sigma", type=parse_grid, default="0.1,0.2,0.3,0.4")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--objective", choices=("snr", "bae"), default="snr")
    p.add_argument("--baselines", type=lambda s: tuple(x for x in s.split(",") if x),
                   default=BASELINE_KINDS, help="comma list from L,A,D,Q")
    p.add_argument("--n-jobs", type=int, default=1)
    common(p)

    p = sub.add_parser("monotonicity", help="singular values along the alpha grid")
    _add_graph_args(p)
    p.add_argument("--k-grid", type=parse_grid, default="0,0.25,0.5,0.75,1")
    p.add_argument("--alpha-grid", type=parse_grid, default="0:1:0.1")
    p.add_argument("--time-steps", type=int, help="analyse line_graph(T) x graph instead")
    common(p)

    p = sub.add_parser("build-graph", help="emit an adjacency CSV")
    _add_graph_args(p)
    p.add_argument("--time-steps", type=int, help="line graph length (alone or as product factor)")
    common(p)

    p = sub.add_parser("synth", help="emit a synthetic bandlimited dataset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--t", type=int, default=20)
    p.add_argument("--band", type=int, default=60)
    p.add_argument("--neighbors", type=int, default=5)
    common(p)
    return parser


def _resolve(args: argparse.Namespace) -> dict:
    params = {k: v for k, v in vars(args).items()}
    if args.manifest is not None:
        try:
            manifest = json.loads(Path(args.manifest).read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read manifest {args.manifest}: {exc}") from exc
        if manifest.get("command") != args.command:
            raise InputError(
                f"manifest is for {manifest.get('command')!r}, not {args.command!r}"
            )
        params.update(manifest["parameters"])
    bw = params.get("bandwidth")
    if isinstance(bw, str) and bw != "auto":
        try:
            params["bandwidth"] = float(bw)
        except ValueError as exc:
            raise InputError(f"bandwidth must be a number or 'auto', got {bw!r}") from exc
    for key in ("alpha_grid", "k_grid", "sigma", "baselines"):
        if key in params and params[key] is not None:
            params[key] = list(params[key])
    if params.get("m_grid") is not None:
        params["m_grid"] = list(params["m_grid"])
    return params


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        params = _resolve(args)
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        schema = load_schema()
        result = COMMANDS[args.command](params, out)
        manifest = _manifest(args.command, params)
        result["manifest"] = manifest
        _write_json(out / "manifest.json", manifest)
        name = "report.json" if args.command != "monotonicity" else "monotonicity.json"
        _write_json(out / name, result, schema)
        log.info("wrote %s", out / name)
    except np.linalg.LinAlgError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FloatingPointError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
