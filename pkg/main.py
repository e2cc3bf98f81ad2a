#!/usr/bin/env python3
"""
NUC Denoise - Command Line Entry Point

Subcommands:
- generate      → synthetic noisy / ground-truth dataset
- synth-vacuum  → simulated vacuum frame sequences for calibration
- calibrate     → fit noise parameters from vacuum sequences
- train         → train SCGN on a dataset (presets: desk, paper)
- denoise       → denoise one image (.tensor or .pgm) with SCGN or a Gaussian filter
- trace         → local SD maps, gates and band weights of one SCGN pass
- eval          → PSNR / SSIM / IoU table over a dataset for one or more methods
- localize      → atom centroids and binary mask of a denoised image

Every run writes the fully resolved settings to resolved.json next to its
outputs. Settings come from flags, then --config JSON, then NUC_* variables
(.env is loaded), then built-in defaults.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional


from src.baselines import GaussianFilterSpec, gaussian_filter
from src.data import GenerationConfig, generate_dataset, read_dataset, validation_seed
from src.metrics import DEFAULT_MIN_SIZE, MetricsConfig, format_table, localize
from src.model import ArchConfig, Trace, denoise, load_checkpoint, write_trace
from src.noise import (
    NoiseParams, calibrate_with_report, intensity_ladder, read_sequences, synth_vacuum, write_sequences,
)
from src.tensor import Tensor, load_tensor, save_tensor
from src.training import TrainConfig, evaluate, train
from src.utils import (
    NucError, UsageError, banner, configure_logging, derive_seeds, ensure_dir, fail, format_elapsed, info,
    load_config_file, load_env,
    ok, parse_size, read_pgm, resolve_settings, warn, write_json, write_pgm, write_resolved,
)
from src.utils.constants import BINARIZE_THRESHOLD, Method

logger = logging.getLogger("nuc")

GLOBAL_DEFAULTS = {"seed": 0, "threads": 1, "log_level": "WARNING"}
BUILTIN_NOISE = "builtin-paper"
TRAIN_OVERRIDES = {"epochs": int, "lr": float, "batch_size": int, "checkpoint_every": int, "eval_every": int,
                   "clip_grad_norm": float, "train_pairs": int}


# ============================================================================
# SECTION 1: SETTINGS
# ============================================================================

def resolve(args: argparse.Namespace, defaults: Dict[str, Any]) -> Dict[str, Any]:
    """Merge flags, --config file, NUC_* environment and defaults for one subcommand"""
    defaults = {**GLOBAL_DEFAULTS, **defaults}
    file_config = {k: v for k, v in load_config_file(args.config).items() if k in defaults}
    flags = {k: getattr(args, k, None) for k in defaults}
    settings = resolve_settings(flags, file_config, defaults)
    settings["command"] = args.command
    configure_logging(settings["log_level"])
    return settings


def noise_from_setting(value: Optional[str]) -> NoiseParams:
    if value in (None, "", BUILTIN_NOISE):
        return NoiseParams.builtin()
    if value in ("none", "zero"):
        return NoiseParams.zero()
    return NoiseParams.load(value)


def read_image(path: str) -> Tensor:
    """[1,H,W] image from a tensor container or an 8-bit PGM"""
    if str(path).lower().endswith(".pgm"):
        return Tensor(read_pgm(path)[None])
    image, _ = load_tensor(path)
    if image.ndim == 2:
        image = Tensor(image.data[None])
    return image


def write_image(path: str, image: Tensor) -> Path:
    if str(path).lower().endswith(".pgm"):
        return write_pgm(path, image.data)
    return save_tensor(path, image, Path(path).stem)


def expected_arch(settings: Dict[str, Any], base: Optional[ArchConfig] = None) -> Optional[ArchConfig]:
    """Architecture requested by --variant / --n / --channels / --r, or None when none was given"""
    if all(settings.get(k) is None for k in ("variant", "n", "channels", "r")):
        return None
    base = base or ArchConfig.full()

    def pick(key, fallback):
        return int(settings[key]) if settings.get(key) is not None else fallback

    return ArchConfig.variant(settings.get("variant") or "full", n=pick("n", base.n), C=pick("channels", base.C),
                              r=pick("r", base.r)).validate()


# ============================================================================
# SECTION 2: DATA AND NOISE COMMANDS
# ============================================================================

def cmd_generate(args) -> int:
    s = resolve(args, {"out": None, "count": 10, "size": None, "rmin": None, "preset": "default",
                       "noise_params": BUILTIN_NOISE, "perlin_cell": None, "perlin_threshold": None,
                       "pgm": False, "clamp_export": False, "val_out": None, "val_count": 0})
    if not s["out"]:
        raise UsageError("generate needs --out")
    cfg = GenerationConfig.desk() if s["preset"] == "desk" else GenerationConfig.default()
    if s["size"] is not None:
        cfg.size = parse_size(s["size"])
    if s["rmin"] is not None:
        cfg.r_min = float(s["rmin"])
    if s["perlin_cell"] is not None:
        cfg.perlin_cell = int(s["perlin_cell"])
    if s["perlin_threshold"] is not None:
        cfg.perlin_threshold = float(s["perlin_threshold"])
    cfg.noise = noise_from_setting(s["noise_params"])
    cfg.clamp_export = bool(s["clamp_export"])
    cfg.validate()
    s["generation"] = cfg.to_dict()
    s["noise"] = cfg.noise.to_dict()

    banner("GENERATE DATASET")
    info(f"{s['count']} samples of {cfg.height}x{cfg.width}, r_min {cfg.r_min}, seed {s['seed']}")
    out = generate_dataset(s["out"], cfg, int(s["count"]), int(s["seed"]), threads=int(s["threads"]),
                           pgm=bool(s["pgm"]))
    write_resolved(out, s)
    ok(f"Dataset written to {out}")

    if s["val_out"] and int(s["val_count"]) > 0:
        val_seed = validation_seed(int(s["seed"]))
        val = generate_dataset(s["val_out"], cfg, int(s["val_count"]), val_seed, threads=int(s["threads"]),
                               pgm=bool(s["pgm"]))
        write_resolved(val, {**s, "seed": val_seed, "count": int(s["val_count"])})
        ok(f"Validation set ({s['val_count']} samples, seed {val_seed}) written to {val}")
    return 0


def cmd_synth_vacuum(args) -> int:
    s = resolve(args, {"out": None, "base": 100.0, "levels": 6, "frames": 100, "size": "256x256",
                       "noise_params": BUILTIN_NOISE})
    if not s["out"]:
        raise UsageError("synth-vacuum needs --out")
    h, w = parse_size(s["size"])
    params = noise_from_setting(s["noise_params"]).validate()
    intensities = intensity_ladder(float(s["base"]), int(s["levels"]))
    s["noise"] = params.to_dict()
    s["intensities"] = intensities

    banner("SYNTHESIZE VACUUM SEQUENCES")
    sequences = []
    for intensity, seq_seed in zip(intensities, derive_seeds(int(s["seed"]), len(intensities))):
        sequences.append(synth_vacuum(intensity, params, int(s["frames"]), h, w, seq_seed))
        info(f"intensity {intensity:.1f}: {s['frames']} frames")
    out = write_sequences(s["out"], sequences)
    write_resolved(out, s)
    ok(f"{len(sequences)} sequences written to {out}")
    return 0


def cmd_calibrate(args) -> int:
    s = resolve(args, {"input": None, "out": None})
    if not s["input"] or not s["out"]:
        raise UsageError("calibrate needs --in and --out")
    banner("CALIBRATE NOISE")
    sequences = read_sequences(s["input"])
    info(f"{len(sequences)} sequences read from {s['input']}")
    params, report = calibrate_with_report(sequences)

    out = Path(s["out"])
    params.save(out)
    write_json(out.with_name(out.stem + "_report.json"), report.to_dict())
    s["noise"] = params.to_dict()
    write_resolved(out.parent, s)

    for row in report.rows:
        info(f"I={row.intensity:8.3f}  sigma_p={row.sigma_p:.5f}  sigma_c={row.sigma_c:.5f}  "
             f"residual={row.residual:+.5f}")
    ok(f"slope={params.slope:.6g} intercept={params.intercept:.6g} sigma_c={params.sigma_c:.6g} "
       f"(r={report.r_value:.4f})")
    return 0


# ============================================================================
# SECTION 3: TRAINING AND INFERENCE COMMANDS
# ============================================================================

def cmd_train(args) -> int:
    s = resolve(args, {"dataset": None, "val_dataset": None, "out": None, "preset": "desk", "epochs": None,
                       "lr": None, "batch_size": None, "variant": None, "n": None, "channels": None, "r": None,
                       "checkpoint_every": None, "eval_every": None, "clip_grad_norm": None,
                       "train_pairs": None, "progress": False})
    if not s["dataset"] or not s["out"]:
        raise UsageError("train needs --dataset and --out")
    cfg = TrainConfig.preset(s["preset"])
    for key, cast in TRAIN_OVERRIDES.items():
        if s[key] is not None:
            setattr(cfg, key, cast(s[key]))
    arch = expected_arch(s, cfg.arch)
    if arch is not None:
        cfg.arch = arch
    cfg.replace(dataset=s["dataset"], val_dataset=s["val_dataset"], out_dir=s["out"], seed=int(s["seed"]),
                progress=bool(s["progress"]))
    cfg.validate()
    s["train"] = cfg.to_dict()

    banner("TRAIN SCGN")
    info(f"preset {s['preset']}: n={cfg.arch.n} C={cfg.arch.C}, {cfg.epochs} epochs, lr {cfg.lr}, "
         f"batch {cfg.batch_size}")
    ensure_dir(s["out"])
    write_resolved(s["out"], s)
    _, log = train(cfg)
    if log.epochs:
        first, last = log.epochs[0], log.epochs[-1]
        ok(f"loss {first.loss:.5f} (epoch 1) -> {last.loss:.5f} (epoch {last.epoch}), "
           f"{format_elapsed(sum(e.seconds for e in log.epochs))}")
    else:
        warn("no epochs run, model left at initialisation")
    ok(f"Model written to {Path(s['out']) / 'model'}")
    return 0


def cmd_denoise(args) -> int:
    s = resolve(args, {"input": None, "out": None, "method": Method.SCGN, "checkpoint": None, "sigma": 1.5,
                       "variant": None, "n": None, "channels": None, "r": None})
    if not s["input"] or not s["out"]:
        raise UsageError("denoise needs --in and --out")
    image = read_image(s["input"])
    if s["method"] == Method.GAUSSIAN:
        spec = GaussianFilterSpec.from_sigma(float(s["sigma"]))
        s["gaussian"] = spec.to_dict()
        result = gaussian_filter(image, spec)
    elif s["method"] == Method.SCGN:
        if not s["checkpoint"]:
            raise UsageError("denoise --method scgn needs --checkpoint")
        model, _ = load_checkpoint(s["checkpoint"], expected_arch(s))
        s["arch"] = model.arch.to_dict()
        result = denoise(model, image)
    else:
        raise UsageError(f"denoise supports methods scgn and gaussian, got {s['method']!r}")
    out = write_image(s["out"], result)
    write_resolved(out.parent, s)
    ok(f"{s['method']} output written to {out}")
    return 0


def cmd_trace(args) -> int:
    s = resolve(args, {"input": None, "out": None, "checkpoint": None, "variant": None, "n": None,
                       "channels": None, "r": None})
    if not s["input"] or not s["out"] or not s["checkpoint"]:
        raise UsageError("trace needs --in, --out and --checkpoint")
    model, _ = load_checkpoint(s["checkpoint"], expected_arch(s))
    s["arch"] = model.arch.to_dict()
    trace = Trace()
    result = denoise(model, read_image(s["input"]), trace)
    out = ensure_dir(s["out"])
    write_pgm(out / "denoised.pgm", result.data)
    write_trace(trace, out)
    write_resolved(out, s)
    ok(f"{len(trace.gates)} gates and {len(trace.band_weights)} band weight vectors written to {out}")
    return 0


# ============================================================================
# SECTION 4: EVALUATION COMMANDS
# ============================================================================

def cmd_eval(args) -> int:
    s = resolve(args, {"dataset": None, "method": None, "checkpoint": None, "sigma": 1.5, "out": None,
                       "iou_threshold": BINARIZE_THRESHOLD, "variant": None, "n": None, "channels": None,
                       "r": None})
    if not s["dataset"]:
        raise UsageError("eval needs --dataset")
    methods = s["method"] or ([Method.GAUSSIAN, Method.SCGN] if s["checkpoint"] else [Method.GAUSSIAN])
    if isinstance(methods, str):
        methods = [methods]
    s["method"] = list(methods)
    model = None
    if Method.SCGN in methods:
        if not s["checkpoint"]:
            raise UsageError("eval --method scgn needs --checkpoint")
        model, _ = load_checkpoint(s["checkpoint"], expected_arch(s))
    spec = GaussianFilterSpec.from_sigma(float(s["sigma"]))
    metrics_cfg = MetricsConfig(iou_threshold=float(s["iou_threshold"])).validate()
    ds = read_dataset(s["dataset"])

    banner("EVALUATE")
    info(f"{len(ds)} samples from {s['dataset']} (dataset id {ds.dataset_id})")
    reports = [evaluate(model, ds, metrics_cfg, method=m, gaussian=spec) for m in methods]
    table = format_table(reports)
    print()
    print(table)

    if s["out"]:
        out = ensure_dir(s["out"])
        for report in reports:
            report.save(out / f"report_{report.method}.json")
        write_json(out / "metrics.json", [r.to_dict() for r in reports])
        (out / "table.txt").write_text(table + "\n", encoding="utf-8")
        write_resolved(out, s)
        ok(f"Reports written to {out}")
    return 0


def cmd_localize(args) -> int:
    s = resolve(args, {"input": None, "out": None, "threshold": BINARIZE_THRESHOLD, "min_size": DEFAULT_MIN_SIZE})
    if not s["input"] or not s["out"]:
        raise UsageError("localize needs --in and --out")
    image = read_image(s["input"])
    result = localize(image, float(s["threshold"]), int(s["min_size"]))
    out = ensure_dir(s["out"])
    write_json(out / "centroids.json", result.to_dict())
    write_pgm(out / "mask.pgm", result.mask.data * 255.0)
    write_resolved(out, s)
    ok(f"{result.count} atoms located, written to {out}")
    return 0


# ============================================================================
# SECTION 5: MAIN ENTRY POINT
# ============================================================================

COMMANDS = {
    "generate": cmd_generate,
    "synth-vacuum": cmd_synth_vacuum,
    "calibrate": cmd_calibrate,
    "train": cmd_train,
    "denoise": cmd_denoise,
    "trace": cmd_trace,
    "eval": cmd_eval,
    "localize": cmd_localize,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, help='Random seed (default 0)')
    common.add_argument('--threads', type=int, help='Worker threads for sample generation (default 1)')
    common.add_argument('--config', help='JSON file with settings; flags take precedence')
    common.add_argument('--log-level', dest='log_level', help='DEBUG, INFO, WARNING (default) or ERROR')

    parser = argparse.ArgumentParser(description='NUC denoising toolkit')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('generate', parents=[common], help='Generate a synthetic dataset')
    p.add_argument('--out', help='Dataset directory')
    p.add_argument('--count', type=int, help='Number of samples (default 10)')
    p.add_argument('--size', help='Image size HxW (default 256x256, desk preset 64x64)')
    p.add_argument('--rmin', type=float, help='Minimum atom distance in px (default 4)')
    p.add_argument('--preset', choices=['default', 'desk'], help='Generation preset')
    p.add_argument('--noise-params', dest='noise_params', help=f'{BUILTIN_NOISE}, none, or a params JSON file')
    p.add_argument('--perlin-cell', dest='perlin_cell', type=int, help='Perlin lattice cell in px')
    p.add_argument('--perlin-threshold', dest='perlin_threshold', type=float, help='Perlin mask threshold')
    p.add_argument('--pgm', action='store_true', default=None, help='Also export 8-bit PGM images')
    p.add_argument('--clamp-export', dest='clamp_export', action='store_true', default=None,
                   help='Clamp stored noisy images to [0, 255]')
    p.add_argument('--val-out', dest='val_out', help='Directory for a held-out validation set')
    p.add_argument('--val-count', dest='val_count', type=int, help='Validation samples (default 0)')

    p = sub.add_parser('synth-vacuum', parents=[common], help='Simulate vacuum calibration sequences')
    p.add_argument('--out', help='Sequence directory')
    p.add_argument('--base', type=float, help='Lowest intensity; the ladder spans base..2*base (default 100)')
    p.add_argument('--levels', type=int, help='Number of intensities (default 6)')
    p.add_argument('--frames', type=int, help='Frames per sequence (default 100)')
    p.add_argument('--size', help='Frame size HxW (default 256x256)')
    p.add_argument('--noise-params', dest='noise_params', help=f'{BUILTIN_NOISE} or a params JSON file')

    p = sub.add_parser('calibrate', parents=[common], help='Fit noise parameters from vacuum sequences')
    p.add_argument('--in', dest='input', help='Sequence directory')
    p.add_argument('--out', help='Output params JSON file')

    p = sub.add_parser('train', parents=[common], help='Train SCGN')
    p.add_argument('--dataset', help='Training dataset directory')
    p.add_argument('--val-dataset', dest='val_dataset', help='Validation dataset for --eval-every')
    p.add_argument('--out', help='Run directory (log, checkpoints, final model)')
    p.add_argument('--preset', choices=['desk', 'paper'], help='Training preset (default desk)')
    p.add_argument('--epochs', type=int)
    p.add_argument('--lr', type=float)
    p.add_argument('--batch-size', dest='batch_size', type=int)
    p.add_argument('--variant', choices=['full', 'V1', 'V2', 'V3', 'V4', 'V5'], help='Ablation variant')
    p.add_argument('--n', type=int, help='Block count')
    p.add_argument('--channels', type=int, help='Channel count C')
    p.add_argument('--r', type=int, help='Band classifier reduction ratio')
    p.add_argument('--checkpoint-every', dest='checkpoint_every', type=int)
    p.add_argument('--eval-every', dest='eval_every', type=int)
    p.add_argument('--clip-grad-norm', dest='clip_grad_norm', type=float)
    p.add_argument('--train-pairs', dest='train_pairs', type=int, help='Use at most this many pairs')
    p.add_argument('--progress', action='store_true', default=None, help='Show per-epoch progress bars')

    p = sub.add_parser('denoise', parents=[common], help='Denoise one image')
    p.add_argument('--in', dest='input', help='Input .tensor or .pgm')
    p.add_argument('--out', help='Output .tensor or .pgm')
    p.add_argument('--method', choices=[Method.SCGN, Method.GAUSSIAN])
    p.add_argument('--checkpoint', help='Checkpoint directory for scgn')
    p.add_argument('--sigma', type=float, help='Gaussian sigma in px (default 1.5)')
    p.add_argument('--variant', choices=['full', 'V1', 'V2', 'V3', 'V4', 'V5'], help='Expected architecture')
    p.add_argument('--n', type=int)
    p.add_argument('--channels', type=int)
    p.add_argument('--r', type=int)

    p = sub.add_parser('trace', parents=[common], help='Export SD maps, gates and band weights of one SCGN pass')
    p.add_argument('--in', dest='input', help='Input .tensor or .pgm')
    p.add_argument('--out', help='Output directory')
    p.add_argument('--checkpoint', help='Checkpoint directory')
    p.add_argument('--variant', choices=['full', 'V1', 'V2', 'V3', 'V4', 'V5'], help='Expected architecture')
    p.add_argument('--n', type=int)
    p.add_argument('--channels', type=int)
    p.add_argument('--r', type=int)

    p = sub.add_parser('eval', parents=[common], help='Evaluate methods on a dataset')
    p.add_argument('--dataset', help='Dataset directory with ground truth')
    p.add_argument('--method', action='append', choices=list(Method.ALL), help='Repeat for several rows')
    p.add_argument('--checkpoint', help='Checkpoint directory for scgn')
    p.add_argument('--sigma', type=float, help='Gaussian sigma in px (default 1.5)')
    p.add_argument('--out', help='Directory for report JSON and table')
    p.add_argument('--iou-threshold', dest='iou_threshold', type=float)
    p.add_argument('--variant', choices=['full', 'V1', 'V2', 'V3', 'V4', 'V5'], help='Expected architecture')
    p.add_argument('--n', type=int)
    p.add_argument('--channels', type=int)
    p.add_argument('--r', type=int)

    p = sub.add_parser('localize', parents=[common], help='Locate atoms in a denoised image')
    p.add_argument('--in', dest='input', help='Input .tensor or .pgm')
    p.add_argument('--out', help='Output directory')
    p.add_argument('--threshold', type=float, help='Binarization threshold (default 127.5)')
    p.add_argument('--min-size', dest='min_size', type=int,
                   help=f'Smallest kept component in px (default {DEFAULT_MIN_SIZE}; 2 also drops isolated pixels)')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_env()
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except NucError as e:
        fail(str(e))
        print(json.dumps(e.to_record()), file=sys.stderr)
        return 2
    except OSError as e:
        fail(str(e))
        print(json.dumps({"error": "io", "message": str(e)}), file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        print(json.dumps({"error": "interrupted", "message": "cancelled by user"}), file=sys.stderr)
        return 130
    except Exception as e:
        logger.exception("unexpected error")
        print(json.dumps({"error": "internal", "message": f"{type(e).__name__}: {e}"}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
