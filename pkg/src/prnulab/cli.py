"""Command-line interface.

Subcommands: ``simulate`` (materialize a synthetic dataset), ``fingerprint``
(estimate a camera pattern from a directory), ``identify`` (match one image
against stored patterns), ``attack`` (apply one attack to a file or a
directory, with a JSON manifest), and ``bench`` (the full experiment).

Exit codes: 0 success, 2 invalid arguments, 3 dataset errors, 4 internal
invariant violations.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .attacks import ATTACK_KINDS, AttackSpec, apply_attack, default_params
from .bench import make_split, run_experiment, write_report
from .config import load_config
from .errors import (
    DatasetError,
    ImageTooSmall,
    InvalidSpec,
    PrnuLabError,
    ReportInvariantBroken,
)
from .fingerprint import (
    estimate_fingerprint,
    load_fingerprint,
    pce_scores,
    save_fingerprint,
)
from .imaging import IMAGE_SUFFIXES, discover_dataset, load_image, preprocess, save_png, snr_db
from .simulate import materialize_dataset


def _parse_param(text: str):
    key, sep, raw = text.partition("=")
    if not sep:
        raise InvalidSpec(f"--param expects key=value, got {text!r}")
    try:
        value = int(raw)
    except ValueError:
        try:
            value = float(raw)
        except ValueError:
            raise InvalidSpec(f"parameter {key!r} has non-numeric value {raw!r}")
    return key.strip(), value


def _config_from(args) -> "ToolkitConfig":
    overrides = {}
    if getattr(args, "crop_size", None) is not None:
        overrides["crop_size"] = args.crop_size
    return load_config(args.config, **overrides)


def _cmd_simulate(args) -> int:
    config = _config_from(args)
    dataset = materialize_dataset(
        args.output, args.cameras, args.images, args.size, args.seed, config
    )
    total = sum(len(paths) for _, paths in dataset.cameras)
    print(f"wrote {total} images for {len(dataset.cameras)} cameras under {args.output}")
    return 0


def _cmd_fingerprint(args) -> int:
    config = _config_from(args)
    directory = Path(args.directory)
    paths = sorted(
        (p for p in directory.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES),
        key=lambda p: p.name,
    )
    if not paths:
        raise DatasetError(f"no images found in {directory}")
    images = [preprocess(load_image(p), config.crop_size) for p in paths]
    camera_id = args.camera_id or directory.name
    pattern = estimate_fingerprint(
        images, camera_id,
        sigma0=config.sigma0_extract,
        levels=config.wavelet_levels,
        moments=config.wavelet_moments,
        epsilon=config.estimator_epsilon,
    )
    save_fingerprint(pattern, args.output)
    print(f"estimated {camera_id!r} from {len(images)} images -> {args.output}")
    return 0


def _cmd_identify(args) -> int:
    config = _config_from(args)
    pattern_paths = sorted(Path(args.patterns).glob("*.prnu"), key=lambda p: p.name)
    if not pattern_paths:
        raise DatasetError(f"no .prnu patterns found in {args.patterns}")
    patterns = [load_fingerprint(p) for p in pattern_paths]
    image = preprocess(load_image(args.image), config.crop_size)
    scores = pce_scores(
        image, patterns,
        exclusion=config.pce_exclusion,
        sigma0=config.sigma0_extract,
        levels=config.wavelet_levels,
        moments=config.wavelet_moments,
    )
    best = max(range(len(scores)), key=lambda i: (scores[i].pce, -i))
    for pat, score in zip(patterns, scores):
        marker = "*" if pat is patterns[best] else " "
        print(f"{marker} {pat.camera_id:20s} pce={score.pce:12.2f} peak_shift={score.peak_shift}")
    print(patterns[best].camera_id)
    return 0


def _cmd_attack(args) -> int:
    config = _config_from(args)
    params = dict(default_params(args.kind, config))
    for item in args.param or []:
        key, value = _parse_param(item)
        params[key] = value
    src = Path(args.input)
    out = Path(args.output)
    if src.is_dir():
        inputs = sorted(
            (p for p in src.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES),
            key=lambda p: p.name,
        )
        if not inputs:
            raise DatasetError(f"no images found in {src}")
        out.mkdir(parents=True, exist_ok=True)
        outputs = [out / (p.stem + ".png") for p in inputs]
        manifest_path = out / "manifest.json"
    else:
        if not src.exists():
            raise DatasetError(f"input image {src} not found")
        inputs = [src]
        outputs = [out]
        out.parent.mkdir(parents=True, exist_ok=True)
        manifest_path = out.with_suffix(".manifest.json")
    entries = []
    from .bench import _derived_seed, _TEST_STREAM  # same per-image stream rule as bench

    for index, (ip, op) in enumerate(zip(inputs, outputs)):
        from .imaging import load_gray

        image = load_gray(ip)
        spec = AttackSpec(args.kind, params, _derived_seed(args.seed, _TEST_STREAM, 0, index))
        result = apply_attack(image, spec, config)
        save_png(result, op)
        entries.append({
            "input": str(ip),
            "output": str(op),
            "seed": spec.seed,
            "snr_db": snr_db(image, result),
        })
    manifest = {
        "kind": args.kind,
        "params": params,
        "master_seed": args.seed,
        "images": entries,
    }
    manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    print(f"attacked {len(inputs)} image(s) -> {out} (manifest {manifest_path})")
    return 0


def _cmd_bench(args) -> int:
    config = _config_from(args)
    dataset = discover_dataset(args.dataset)
    make_split(dataset)  # validate early so dataset errors surface before work
    if args.attack == "all":
        kinds: list[str | None] = [None] + list(ATTACK_KINDS)
    elif args.attack == "none":
        kinds = [None]
    elif args.attack in ATTACK_KINDS:
        kinds = [args.attack]
    else:
        raise InvalidSpec(f"unknown attack {args.attack!r}")
    modes = ["clean", "fooled"] if args.mode == "both" else [args.mode]
    from .bench import resolve_dataset

    resolved = resolve_dataset(dataset, config)
    reports = []
    for kind in kinds:
        spec = None if kind is None else AttackSpec(kind, default_params(kind, config), args.seed)
        for mode in modes:
            if kind is None and mode == "fooled":
                continue  # no attack: modes coincide
            report = run_experiment(
                resolved, spec, mode, seed=args.seed, config=config,
                include_timing=args.timing,
            )
            reports.append(report)
            label = kind or "none"
            print(f"{label:30s} mode={mode:6s} error={report.error_rate:.3f} "
                  f"chance={report.chance_error:.3f} successful={report.successful}")
    write_report(reports if len(reports) > 1 else reports[0], args.output)
    print(f"report -> {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prnulab",
        description="Camera-fingerprint extraction, matching, counter-forensic "
                    "attacks, and robustness benchmarking.",
    )
    parser.add_argument("--config", default=None, help="JSON or key=value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="materialize a synthetic camera dataset")
    p.add_argument("--cameras", type=int, default=4)
    p.add_argument("--images", type=int, default=20)
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fingerprint", help="estimate a camera pattern from a directory")
    p.add_argument("directory")
    p.add_argument("-o", "--output", required=True, help="output .prnu path")
    p.add_argument("--camera-id", default=None)
    p.add_argument("--crop-size", type=int, default=None)
    p.set_defaults(func=_cmd_fingerprint)

    p = sub.add_parser("identify", help="match an image against stored patterns")
    p.add_argument("image")
    p.add_argument("--patterns", required=True, help="directory of .prnu files")
    p.add_argument("--crop-size", type=int, default=None)
    p.set_defaults(func=_cmd_identify)

    p = sub.add_parser("attack", help="apply one attack to an image or directory")
    p.add_argument("--kind", required=True, choices=ATTACK_KINDS)
    p.add_argument("--param", action="append", metavar="key=value")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("bench", help="run the identification benchmark")
    p.add_argument("--dataset", required=True)
    p.add_argument("--attack", default="all", help="attack kind, 'all', or 'none'")
    p.add_argument("--mode", choices=("clean", "fooled", "both"), default="both")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--crop-size", type=int, default=None)
    p.add_argument("--timing", action="store_true",
                   help="measure per-image attack wall time (makes reports "
                        "non-reproducible byte-for-byte)")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidSpec as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DatasetError, ImageTooSmall) as exc:
        print(f"dataset error: {exc}", file=sys.stderr)
        return 3
    except ReportInvariantBroken as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 4
    except PrnuLabError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
