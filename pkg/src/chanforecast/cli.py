"""Command-line entry point.

Verbs: ``generate``, ``adf``, ``train``, ``evaluate`` and ``paramcount``.
Exit codes: 0 success, 2 configuration error, 3 numeric failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from .analysis.adf import segment_pvalues
from .analysis.report import MetricsReport, reports_to_csv, reports_to_json
from .channel.config import SCENARIO_IDS
from .channel.dataset import Dataset, build_dataset, read_dataset, window_count, write_dataset
from .config import ConfigError, ExperimentConfig, load_config, parse_flags
from .experiment import METHOD_LABELS, score_method
from .manifest import write_manifest
from .nn.params import ParamStore
from .predictors.lpcnet import KINDS, NEURAL_KINDS, config_for_kind, init_model, parameter_count_formula
from .predictors.model_io import load_model, save_model
from .predictors.training import TrainingError, train
from .numerics import make_rng

log = logging.getLogger("chanforecast")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4
_SCENARIO_NAMES = {v: k for k, v in SCENARIO_IDS.items()}


class DataError(OSError):
    """Unreadable or inconsistent input file."""


def worker_cap() -> int:
    raw = os.environ.get("CHANFORECAST_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"CHANFORECAST_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("CHANFORECAST_THREADS must be >= 1")
    return n


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="experiment config file (key = value with [sections])")
    p.add_argument("--seed", type=int, help="base seed, unsigned 64-bit")
    p.add_argument("--deterministic", action="store_true", help="serial execution and time-free manifests")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--dtype", choices=("f32", "f64"), help="floating-point precision for training and files")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chanforecast", description="Non-stationary channel prediction workbench")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("generate", help="simulate trajectories and write CHPD datasets")
    _common(p)

    p = sub.add_parser("adf", help="ADF p-values over sliding CSI segments")
    _common(p)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--lags", default="1", help="lag order or 'schwert'")
    p.add_argument("--segment-len", type=int, default=100)
    p.add_argument("--stride", type=int, help="segment stride (default: half the segment length)")
    p.add_argument("--antenna", type=int, default=0)

    p = sub.add_parser("train", help="train a neural predictor")
    _common(p)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--kind", choices=NEURAL_KINDS)
    p.add_argument("--flags", help="comma list such as no-diff,no-adjuster")
    p.add_argument("--horizon-ms", type=float, help="prediction horizon (default: first configured)")

    p = sub.add_parser("evaluate", help="score checkpoints and baselines on a dataset")
    _common(p)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--checkpoint", type=Path, action="append", default=[], help="model checkpoint (repeatable)")
    p.add_argument("--methods", default="sh,ar", help="baselines computed on the fly")
    p.add_argument("--horizon-ms", type=float, action="append", help="horizons to score (repeatable)")
    p.add_argument("--part", choices=("train", "test", "all"), default="test")

    p = sub.add_parser("paramcount", help="parameter count against the closed form")
    _common(p)
    p.add_argument("--kind", choices=KINDS)
    return parser


def resolve_config(args) -> ExperimentConfig:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.deterministic:
        overrides["deterministic"] = True
    if args.out is not None:
        overrides["out"] = str(args.out)
    if args.dtype is not None:
        overrides["dtype"] = args.dtype
    if getattr(args, "kind", None) is not None:
        overrides["kind"] = args.kind
    cfg = load_config(args.config, **overrides)
    flags = getattr(args, "flags", None)
    if flags:
        cfg = cfg.with_(model=cfg.model.with_(**parse_flags(flags)))
    return cfg


def _out_dir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataError(f"cannot create output directory {out}: {exc.strerror}") from None
    return out


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}") from None


def _manifest(path: Path, verb: str, cfg: ExperimentConfig, outputs, inputs=(), started=None) -> None:
    clock = None if cfg.deterministic or started is None else time.perf_counter() - started
    write_manifest(path.with_name(path.name + ".manifest.json"), verb, cfg.echo(), cfg.seed,
                   outputs=outputs, inputs=inputs, wall_clock_s=clock)


def _load_dataset(path: Path, cfg: ExperimentConfig) -> Dataset:
    try:
        return read_dataset(path, cfg.split_ratio, cfg.seed)
    except OSError as exc:
        raise DataError(f"cannot read dataset {path}: {exc.strerror}") from None
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None


def speed_label(ds: Dataset) -> str:
    # speeds are stored in mm/s, so round away the quantization
    lo, hi = round(float(np.min(ds.speeds_kmh)), 1), round(float(np.max(ds.speeds_kmh)), 1)
    return f"{lo:g}" if np.isclose(lo, hi) else f"{lo:g}-{hi:g}"


def scenario_label(ds: Dataset) -> str:
    ids = sorted(set(int(i) for i in ds.scenario_ids))
    return "+".join(f"UMA-{_SCENARIO_NAMES.get(i, '?')}" for i in ids)


def cmd_generate(cfg: ExperimentConfig) -> int:
    started = time.perf_counter()
    out = _out_dir(cfg)
    threads = 1 if cfg.deterministic else worker_cap()
    horizons = cfg.horizon_steps()
    for label, scen in cfg.speed_settings():
        try:
            ds = build_dataset(scen, cfg.n_traj, cfg.k, horizons, cfg.split_ratio, seed=cfg.seed, threads=threads)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        path = out / f"dataset_{label}kmh.chpd"
        try:
            write_dataset(ds, path, cfg.np_dtype)
        except OSError as exc:
            raise DataError(f"cannot write {path}: {exc.strerror}") from None
        _manifest(path, "generate", cfg, [path], started=started)
        print(f"{path}: {ds.n_traj} trajectories x {ds.n_snapshots} snapshots, {ds.n_antennas} antennas, speed {label} km/h")
        for h, ms in zip(horizons, cfg.horizons_ms):
            total = ds.n_traj * window_count(ds.n_snapshots, cfg.k, h)
            print(f"  horizon {ms:g} ms: {total} windows "
                  f"(train {ds.window_total(cfg.k, h, 'train')}, test {ds.window_total(cfg.k, h, 'test')})")
    return EXIT_OK


def cmd_adf(cfg: ExperimentConfig, args) -> int:
    started = time.perf_counter()
    ds = _load_dataset(args.data, cfg)
    lags = args.lags if args.lags == "schwert" else _int_arg(args.lags, "--lags")
    stride = args.stride or max(1, args.segment_len // 2)
    if args.segment_len > ds.n_snapshots:
        raise ConfigError(f"segment length {args.segment_len} exceeds trajectory length {ds.n_snapshots}")
    if not 0 <= args.antenna < ds.n_antennas:
        raise ConfigError(f"antenna index {args.antenna} out of range")
    try:
        rows = segment_pvalues(ds.snapshots, args.segment_len, stride, lags, args.antenna)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["trajectory", "segment", "start", "speed_kmh", "scenario", "p", "t"])
    for r in rows:
        w.writerow([r.trajectory, r.segment, r.start, f"{ds.speeds_kmh[r.trajectory]:g}",
                    f"UMA-{_SCENARIO_NAMES[int(ds.scenario_ids[r.trajectory])]}",
                    f"{r.pvalue:.10g}", f"{r.statistic:.10g}"])
    out = _out_dir(cfg)
    path = out / f"adf_{args.data.stem}.csv"
    _write_text(path, buf.getvalue())
    _manifest(path, "adf", cfg, [path], inputs=[args.data], started=started)
    p = np.array([r.pvalue for r in rows])
    print(f"{path}: {len(rows)} segments, median p = {np.median(p):.4f}, share p < 0.05 = {np.mean(p < 0.05):.3f}")
    return EXIT_OK


def _int_arg(text: str, name: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{name} expects an integer or 'schwert', got {text!r}") from None


def _pick_horizon(cfg: ExperimentConfig, horizon_ms) -> tuple[float, int]:
    if horizon_ms is None:
        return cfg.horizons_ms[0], cfg.horizon_steps()[0]
    return horizon_ms, cfg.with_(horizons_ms=(horizon_ms,)).horizon_steps()[0]


def cmd_train(cfg: ExperimentConfig, args) -> int:
    started = time.perf_counter()
    if cfg.kind not in NEURAL_KINDS:
        raise ConfigError(f"{cfg.kind!r} has nothing to train")
    ds = _load_dataset(args.data, cfg)
    ms, h = _pick_horizon(cfg, args.horizon_ms)
    if cfg.k < 2 or window_count(ds.n_snapshots, cfg.k, h) == 0:
        raise ConfigError(f"dataset trajectories ({ds.n_snapshots} snapshots) too short for K={cfg.k}, horizon {ms:g} ms")
    model_cfg = cfg.model.with_(k=cfg.k, n_antennas=ds.n_antennas, horizon=h)
    windows = ds.windows(cfg.k, h, "train")
    if len(windows) == 0:
        raise ConfigError("the dataset has no training trajectories")
    log.info("training %s on %d windows", cfg.kind, len(windows))
    result = train(cfg.kind, windows, model_cfg, seed=cfg.seed, dtype=cfg.np_dtype,
                   progress=lambda e, l: log.info("epoch %d loss %.6g", e, l))
    out = _out_dir(cfg)
    stem = f"{cfg.kind}_{ms:g}ms"
    ckpt = out / f"{stem}.cfmd"
    curve = out / f"{stem}_loss.csv"
    summary = out / f"{stem}_summary.json"
    try:
        save_model(ckpt, cfg.kind, model_cfg, result.params)
    except OSError as exc:
        raise DataError(f"cannot write {ckpt}: {exc.strerror}") from None
    _write_text(curve, "epoch,loss\n" + "".join(f"{i},{v!r}\n" for i, v in enumerate(result.loss_curve)))
    _write_text(summary, json.dumps({
        "kind": cfg.kind, "horizon_ms": ms, "n_windows": len(windows),
        "final_loss": result.final_loss, "epochs": model_cfg.epochs,
    }, indent=2, sort_keys=True) + "\n")
    _manifest(ckpt, "train", cfg, [ckpt, curve, summary], inputs=[args.data], started=started)
    print(f"{ckpt}: {cfg.kind}, {result.params.total_count} parameters, final train loss {result.final_loss:.6g}")
    return EXIT_OK


def cmd_evaluate(cfg: ExperimentConfig, args) -> int:
    started = time.perf_counter()
    ds = _load_dataset(args.data, cfg)
    models = []
    for path in args.checkpoint:
        try:
            models.append(load_model(path))
        except OSError as exc:
            raise DataError(f"cannot read checkpoint {path}: {exc.strerror}") from None
        except (ValueError, KeyError) as exc:
            raise DataError(f"{path}: {exc}") from None
    baselines = [m.strip().lower() for m in args.methods.split(",") if m.strip()]
    for m in baselines:
        if m not in ("sh", "ar"):
            raise ConfigError(f"--methods only takes on-the-fly baselines (sh, ar), got {m!r}")
    if args.horizon_ms:
        steps = cfg.with_(horizons_ms=tuple(args.horizon_ms)).horizon_steps()
        pairs = list(zip(args.horizon_ms, steps))
    else:
        pairs = sorted({(m[1].horizon * cfg.scenario.srs_period * 1e3, m[1].horizon) for m in models}) \
            or list(zip(cfg.horizons_ms, cfg.horizon_steps()))
    reports = []
    for ms, h in pairs:
        if window_count(ds.n_snapshots, cfg.k, h) == 0:
            raise ConfigError(f"horizon {ms:g} ms not available in this dataset")
        part = None if args.part == "all" else args.part
        for kind, mcfg, params in models:
            if mcfg.horizon != h:
                continue
            if mcfg.n_antennas != ds.n_antennas:
                raise ConfigError(f"checkpoint expects {mcfg.n_antennas} antennas, dataset has {ds.n_antennas}")
            reports.append(_report(ds, kind, ms, ds.windows(mcfg.k, h, part), cfg, params, mcfg))
        for m in baselines:
            reports.append(_report(ds, m, ms, ds.windows(cfg.k, h, part), cfg))
    if not reports:
        raise ConfigError("nothing to evaluate: no checkpoint matches the requested horizons")
    out = _out_dir(cfg)
    csv_path, json_path = out / "report.csv", out / "report.json"
    _write_text(csv_path, reports_to_csv(reports))
    meta = {"dataset": args.data.name, "partition": args.part, "checkpoints": [p.name for p in args.checkpoint]}
    _write_text(json_path, reports_to_json(reports, meta))
    _manifest(csv_path, "evaluate", cfg, [csv_path, json_path], inputs=[args.data, *args.checkpoint], started=started)
    print(reports_to_csv(reports), end="")
    return EXIT_OK


def _report(ds: Dataset, kind: str, ms: float, windows, cfg: ExperimentConfig,
            params: ParamStore | None = None, mcfg=None) -> MetricsReport:
    score = score_method(kind, windows, params, mcfg)
    return MetricsReport(
        scenario=scenario_label(ds), speed_kmh=speed_label(ds), horizon_ms=ms,
        method=_method_name(kind, mcfg), nmse=score.mean_nmse, cosine_pct=score.cosine_pct,
        n=score.n, seeds=(cfg.seed,),
    )


def _method_name(kind: str, mcfg) -> str:
    name = METHOD_LABELS[kind]
    if kind == "lpcnet" and mcfg is not None:
        off = [f for f, on in (("C", mcfg.enable_diff), ("J", mcfg.enable_adjuster)) if not on]
        if off:
            name += " without " + " and ".join(off)
    return name


def cmd_paramcount(cfg: ExperimentConfig) -> int:
    if cfg.kind in ("sh", "ar"):
        print("0 0")
        return EXIT_OK
    mcfg = config_for_kind(cfg.kind, cfg.model_config(cfg.model.horizon))
    count = init_model(mcfg, make_rng(cfg.seed, 0)).total_count
    if mcfg.enable_adjuster:
        formula = parameter_count_formula(mcfg.n_antennas, mcfg.hidden, mcfg.n_in, mcfg.weight_hidden,
                                          mcfg.bias_hidden)
    else:
        # static readout: LSTM plus one linear layer
        formula = 10 * mcfg.n_antennas * mcfg.hidden + 4 * mcfg.hidden ** 2 + 4 * mcfg.hidden + 2 * mcfg.n_antennas
    print(f"{count} {formula}")
    return EXIT_OK if count == formula else EXIT_NUMERIC


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        if args.verb == "generate":
            return cmd_generate(cfg)
        if args.verb == "adf":
            return cmd_adf(cfg, args)
        if args.verb == "train":
            return cmd_train(cfg, args)
        if args.verb == "evaluate":
            return cmd_evaluate(cfg, args)
        return cmd_paramcount(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TrainingError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
