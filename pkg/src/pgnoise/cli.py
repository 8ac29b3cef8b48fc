"""Command-line interface: generate, calibrate, validate.

The CLI is a thin shell over the library; every behavior here is reachable
through the public API. Exit codes are part of the contract:

* 0 success
* 1 unexpected internal error
* 2 input problem (missing/unreadable files, malformed or pathological
  bundle, bad flags, failed images)
* 3 calibration failure (no usable scenes, or a channel without data)
* 4 validation failure (variance law violated beyond tolerance)

``--bundle`` falls back to the ``PGNOISE_BUNDLE`` environment variable, so
pipelines can pin one calibrated bundle without repeating the path.
"""

import argparse
import concurrent.futures
import csv
import dataclasses
import os
import sys
import traceback

import numpy as np

from . import streams
from .bundle_io import bundle_digest, load_bundle, save_bundle
from .calibration import (
    INTENSITY_BIN_COUNT,
    ScenePair,
    build_param_bundle,
    calibrate_scene,
)
from .errors import (
    BundleError,
    CalibrationError,
    ImageIOError,
    InvalidInputError,
    PgNoiseError,
    SamplingExhaustedError,
)
from .generator import generate_realization, sample_noise_params
from .histogram import DEFAULT_BIN_COUNT
from .image_io import load_image, save_image, sidecar_path, write_sidecar
from .model import (
    CHANNEL_NAMES,
    ImagePlane,
    RgbImage,
    add_noise_plane,
    predicted_variance,
)

_IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")
_Y_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))
_REL_ERR_FLOOR = 1e-7


@dataclasses.dataclass(frozen=True)
class CliConfig:
    """Resolved options for one subcommand invocation."""

    subcommand: str
    img_dir: str = ""
    out_dir: str = ""
    n_obs: int = 1
    bundle: str = ""
    seed: int = 0
    clip: bool = True
    fixed_params: bool = False
    jobs: int = 1
    bin_count: int = DEFAULT_BIN_COUNT
    estimation_bins: int = INTENSITY_BIN_COUNT
    param_sets: int = 3
    plane: int = 512
    tolerance: float = 0.02


def _fail(message):
    print(f"error: {message}", file=sys.stderr)


def _resolve_bundle_path(config):
    path = config.bundle or os.environ.get("PGNOISE_BUNDLE", "")
    if not path:
        raise InvalidInputError("no bundle given (use --bundle or set PGNOISE_BUNDLE)")
    return path


def _clamped(img):
    planes = [ImagePlane(np.clip(img.plane(n).pixels, 0.0, 1.0)) for n in CHANNEL_NAMES]
    return RgbImage(*planes)


def cmd_generate(config):
    """Write n_obs noisy realizations (plus sidecars) per input image."""
    if config.n_obs < 1:
        _fail(f"--n_obs must be >= 1, got {config.n_obs}")
        return 2
    if not os.path.isdir(config.img_dir):
        _fail(f"--img_dir {config.img_dir!r} is not a directory")
        return 2
    try:
        bundle_path = _resolve_bundle_path(config)
        bundle = load_bundle(bundle_path)
    except (PgNoiseError, OSError) as e:
        _fail(str(e))
        return 2
    digest = bundle_digest(bundle)

    names = sorted(
        n for n in os.listdir(config.img_dir)
        if n.lower().endswith(_IMAGE_SUFFIXES)
        and os.path.isfile(os.path.join(config.img_dir, n))
    )
    if not names:
        _fail(f"no input images in {config.img_dir!r}")
        return 2
    stems = [os.path.splitext(n)[0] for n in names]
    if len(set(stems)) != len(stems):
        _fail("duplicate image stems in --img_dir; outputs would collide")
        return 2
    os.makedirs(config.out_dir, exist_ok=True)

    failures = []
    with concurrent.futures.ThreadPoolExecutor(max_workers=max(config.jobs, 1)) as pool:
        for j, name in enumerate(names):
            src = os.path.join(config.img_dir, name)
            stem = stems[j]
            image_seed = streams.substream(config.seed, j)
            try:
                clean = load_image(src).pixels
                shared = None
                if config.fixed_params:
                    shared = sample_noise_params(
                        bundle, streams.generator(image_seed, 0, streams.PARAMS_STREAM)
                    )
            except (PgNoiseError, OSError) as e:
                failures.append((name, str(e)))
                print(f"{name}: FAILED ({e})")
                continue

            def one(i, clean=clean, shared=shared, image_seed=image_seed, stem=stem):
                noisy, params = generate_realization(
                    clean, bundle, image_seed, i,
                    clip=config.clip, params=shared,
                )
                if not config.clip:
                    # PNG storage saturates regardless; clamp at encode only.
                    noisy = _clamped(noisy)
                out_path = os.path.join(config.out_dir, f"{stem}_noisy_{i}.png")
                save_image(noisy, out_path, bit_depth=8)
                write_sidecar(params, int(config.seed), i, sidecar_path(out_path),
                              bundle=digest)

            futures = [pool.submit(one, i) for i in range(config.n_obs)]
            errors = []
            for fut in futures:
                try:
                    fut.result()
                except (PgNoiseError, OSError) as e:
                    errors.append(str(e))
            if errors:
                failures.append((name, "; ".join(errors)))
                print(f"{name}: FAILED ({errors[0]})")
            else:
                print(f"{name}: wrote {config.n_obs} noisy images to {config.out_dir}")

    if failures:
        _fail(f"{len(failures)} of {len(names)} images failed")
        return 2
    return 0


def _scene_pairs(scene_dir, scene_id):
    """Load <id>_clean.png / <id>_noisy.png pairs from one scene directory."""
    pairs = []
    for name in sorted(os.listdir(scene_dir)):
        if not name.endswith("_clean.png"):
            continue
        pair_id = name[: -len("_clean.png")]
        clean_path = os.path.join(scene_dir, name)
        noisy_path = os.path.join(scene_dir, f"{pair_id}_noisy.png")
        if not os.path.isfile(noisy_path):
            print(f"warning: {clean_path} has no noisy partner, skipped", file=sys.stderr)
            continue
        pairs.append(ScenePair(
            clean=load_image(clean_path).pixels,
            noisy=load_image(noisy_path).pixels,
            scene_id=scene_id,
        ))
    return pairs


def _hist_summary(h):
    weights = h.mass / h.mass.sum()
    mean = float((weights * h.centers).sum())
    return f"n={h.total:g} mean={mean:.6g} min={h.edges[0]:.6g} max={h.edges[-1]:.6g}"


def cmd_calibrate(config):
    """Estimate a bundle from <scene>/<id>_clean.png, <id>_noisy.png pairs."""
    if not os.path.isdir(config.img_dir):
        _fail(f"--img_dir {config.img_dir!r} is not a directory")
        return 2
    scene_ids = sorted(
        n for n in os.listdir(config.img_dir)
        if os.path.isdir(os.path.join(config.img_dir, n))
    )
    if not scene_ids:
        _fail(f"no scene directories in {config.img_dir!r}")
        return 2

    results = []
    calibrated = 0
    for scene_id in scene_ids:
        scene_dir = os.path.join(config.img_dir, scene_id)
        try:
            pairs = _scene_pairs(scene_dir, scene_id)
            if not pairs:
                print(f"scene {scene_id}: no usable pairs, skipped", file=sys.stderr)
                continue
            scene_results = calibrate_scene(pairs, config.estimation_bins)
        except (PgNoiseError, OSError) as e:
            print(f"scene {scene_id}: skipped ({e})", file=sys.stderr)
            continue
        for r in scene_results:
            if not any(a > 0.0 for a in r.a_values):
                print(f"scene {scene_id}: no positive {r.channel} gain estimates",
                      file=sys.stderr)
        results.extend(scene_results)
        calibrated += 1
        print(f"scene {scene_id}: calibrated {len(pairs)} pairs")

    if calibrated == 0:
        _fail("no scene could be calibrated")
        return 3
    if calibrated == 1:
        print("warning: single-scene corpus; histograms hold one sample each",
              file=sys.stderr)

    try:
        bundle = build_param_bundle(results, config.bin_count,
                                    source=f"calibrated from {calibrated} scenes")
    except CalibrationError as e:
        _fail(str(e))
        return 3
    os.makedirs(config.out_dir, exist_ok=True)
    out_path = os.path.join(config.out_dir, "bundle.json")
    save_bundle(bundle, out_path)
    for name in CHANNEL_NAMES:
        ch = bundle.channel(name)
        print(f"{name}: slope {_hist_summary(ch.slope)}")
        print(f"{name}: intercept {_hist_summary(ch.intercept)}")
        print(f"{name}: a {_hist_summary(ch.a)}")
    print(f"bundle written to {out_path}")
    return 0


def _relative_error(predicted, empirical):
    diff = abs(empirical - predicted)
    if diff <= _REL_ERR_FLOOR:
        return 0.0
    if predicted > 0.0:
        return diff / predicted
    return float("inf")


def cmd_validate(config):
    """Monte-Carlo check of the variance law over sampled parameters."""
    if config.param_sets < 1 or config.plane < 2:
        _fail("--param-sets must be >= 1 and --plane >= 2")
        return 2
    try:
        bundle = load_bundle(_resolve_bundle_path(config))
        rows = []
        worst = 0.0
        for k in range(config.param_sets):
            params = sample_noise_params(bundle, streams.generator(config.seed, k))
            for ci, name in enumerate(CHANNEL_NAMES):
                ch = params.channel(name)
                for yi, y in enumerate(_Y_GRID):
                    clean = ImagePlane.constant(config.plane, config.plane, y)
                    noisy = add_noise_plane(
                        clean, ch, streams.generator(config.seed, k, ci, yi), clip=False
                    )
                    empirical = float(np.var(noisy.samples - y, ddof=1))
                    predicted = predicted_variance(y, ch)
                    rel = _relative_error(predicted, empirical)
                    worst = max(worst, rel)
                    rows.append((name, y, ch.a, ch.b, predicted, empirical, rel))
    except (PgNoiseError, OSError) as e:
        _fail(str(e))
        return 2

    os.makedirs(config.out_dir or ".", exist_ok=True)
    report = os.path.join(config.out_dir or ".", "validation.csv")
    with open(report, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["channel", "y", "a", "b", "predicted_var", "empirical_var", "rel_err"])
        for name, y, a, b, predicted, empirical, rel in rows:
            writer.writerow([name, repr(y), repr(a), repr(b), repr(predicted),
                             repr(empirical), repr(rel)])
    bad = sum(1 for row in rows if row[6] > config.tolerance)
    print(f"validation report: {report}")
    print(f"{len(rows)} checks, worst relative error {worst:.4%}, "
          f"{bad} beyond tolerance {config.tolerance:.2%}")
    if bad:
        return 4
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pgnoise",
        description="Poissonian-Gaussian camera-noise synthesis, calibration "
                    "and validation.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_gen = sub.add_parser("generate", help="write noisy realizations of clean images")
    p_gen.add_argument("--img_dir", required=True, help="directory of clean input images")
    p_gen.add_argument("--out_dir", required=True, help="output directory")
    p_gen.add_argument("--n_obs", type=int, default=1,
                       help="noisy realizations per input image (default 1)")
    p_gen.add_argument("--bundle", default="",
                       help="parameter bundle path (default: $PGNOISE_BUNDLE)")
    p_gen.add_argument("--seed", type=int, default=0, help="root seed (default 0)")
    p_gen.add_argument("--no-clip", action="store_true",
                       help="skip model-level clipping; PNGs still clamp at encode")
    p_gen.add_argument("--fixed-params", action="store_true",
                       help="sample one parameter set per image and reuse it")
    p_gen.add_argument("--jobs", type=int, default=1,
                       help="parallel realizations (deterministic output regardless)")

    p_cal = sub.add_parser("calibrate", help="estimate a bundle from clean/noisy pairs")
    p_cal.add_argument("--img_dir", required=True,
                       help="directory of scene subdirectories "
                            "(<scene>/<id>_clean.png + <id>_noisy.png)")
    p_cal.add_argument("--out_dir", required=True, help="where to write bundle.json")
    p_cal.add_argument("--bin-count", type=int, default=DEFAULT_BIN_COUNT,
                       help="histogram bins per parameter (default 64)")
    p_cal.add_argument("--estimation-bins", type=int, default=INTENSITY_BIN_COUNT,
                       help="intensity bins for variance-law fits (default 32)")

    p_val = sub.add_parser("validate", help="check sampled parameters against the variance law")
    p_val.add_argument("--bundle", default="",
                       help="parameter bundle path (default: $PGNOISE_BUNDLE)")
    p_val.add_argument("--out_dir", default=".", help="where to write validation.csv")
    p_val.add_argument("--param-sets", type=int, default=3,
                       help="independent parameter draws to test (default 3)")
    p_val.add_argument("--plane", type=int, default=512,
                       help="test plane side length in pixels (default 512)")
    p_val.add_argument("--tolerance", type=float, default=0.02,
                       help="relative variance tolerance (default 0.02)")
    p_val.add_argument("--seed", type=int, default=0, help="root seed (default 0)")
    return parser


def _config_from_args(args):
    fields = {f.name for f in dataclasses.fields(CliConfig)}
    values = {"subcommand": args.subcommand}
    for key, value in vars(args).items():
        if key == "no_clip":
            values["clip"] = not value
        elif key in fields:
            values[key] = value
    return CliConfig(**values)


def main(argv=None):
    args = build_parser().parse_args(argv)
    config = _config_from_args(args)
    handler = {
        "generate": cmd_generate,
        "calibrate": cmd_calibrate,
        "validate": cmd_validate,
    }[config.subcommand]
    try:
        return handler(config)
    except SamplingExhaustedError as e:
        _fail(str(e))
        return 2
    except (BundleError, ImageIOError, InvalidInputError) as e:
        _fail(str(e))
        return 2
    except CalibrationError as e:
        _fail(str(e))
        return 3
    except PgNoiseError as e:
        _fail(str(e))
        return 1
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
