"""Image file I/O and provenance sidecars.

Files are decoded to normalized float planes via ``value = code / (2^d - 1)``
with d the bit depth (8 or 16), and encoded back with
``code = floor(value * (2^d - 1) + 0.5)``, i.e. rounding with ties away from
zero. Intensities are used exactly as decoded: sRGB values are *not*
linearized before noise synthesis or estimation, since the noise parameters
are themselves defined in the sRGB domain.

Every generated image gets a JSON sidecar (same stem, ``.json``) recording
the exact per-channel (a, b), the seed, the realization index and the bundle
digest, so any output can be traced back to what produced it.
"""

import dataclasses
import json
import os
import warnings

import cv2
import numpy as np

from .errors import ImageIOError, InvalidInputError
from .model import CHANNEL_NAMES, ChannelParams, ImagePlane, NoiseParams, RgbImage

_JPEG_SUFFIXES = (".jpg", ".jpeg")


@dataclasses.dataclass(frozen=True, eq=False)
class ImageRecord:
    """A decoded image with where it came from and its storage depth."""

    pixels: RgbImage
    source_path: str
    bit_depth: int

    def __post_init__(self):
        if self.bit_depth not in (8, 16):
            raise InvalidInputError(f"bit_depth must be 8 or 16, got {self.bit_depth}")


def load_image(path):
    """Decode an image file into normalized [0, 1] RGB planes.

    PNG is the supported interchange format; JPEG input is accepted with a
    warning (compression artifacts contaminate calibration). Alpha channels
    are dropped and grayscale is replicated to three channels, each with a
    warning.

    Raises
    ------
    ImageIOError
        Missing, unreadable or unsupported file; the message carries the path.
    """
    path = os.fspath(path)
    arr = cv2.imread(path, cv2.IMREAD_UNCHANGED)
    if arr is None:
        raise ImageIOError(f"{path}: cannot read image (missing or unsupported file)")
    if arr.dtype == np.uint8:
        bit_depth = 8
    elif arr.dtype == np.uint16:
        bit_depth = 16
    else:
        raise ImageIOError(f"{path}: unsupported sample type {arr.dtype}")
    if path.lower().endswith(_JPEG_SUFFIXES):
        warnings.warn(f"{path}: JPEG input; compression artifacts will leak into statistics")

    if arr.ndim == 2:
        warnings.warn(f"{path}: grayscale input replicated to three channels")
        arr = np.stack([arr, arr, arr], axis=2)
    elif arr.ndim == 3 and arr.shape[2] == 4:
        warnings.warn(f"{path}: alpha channel discarded")
        arr = arr[:, :, :3]
    elif arr.ndim != 3 or arr.shape[2] != 3:
        raise ImageIOError(f"{path}: unsupported channel layout, shape {arr.shape}")

    rgb = arr[:, :, ::-1].astype(np.float64) / float(2 ** bit_depth - 1)
    return ImageRecord(
        pixels=RgbImage.from_array(rgb), source_path=path, bit_depth=bit_depth
    )


def save_image(img, path, bit_depth=8):
    """Encode an RgbImage to PNG at the given bit depth.

    Values must already be in [0, 1]: out-of-range input is an error here,
    because clamping is the model layer's explicit, opt-out job and silent
    re-clipping would mask bugs.
    """
    if not isinstance(img, RgbImage):
        raise InvalidInputError("img must be an RgbImage")
    if bit_depth not in (8, 16):
        raise InvalidInputError(f"bit_depth must be 8 or 16, got {bit_depth}")
    path = os.fspath(path)
    if not path.lower().endswith(".png"):
        raise ImageIOError(f"{path}: output must be a .png file (lossless)")
    rgb = img.to_array()
    if rgb.min() < 0.0 or rgb.max() > 1.0:
        raise InvalidInputError("image values outside [0, 1]; clip before saving")
    maxcode = float(2 ** bit_depth - 1)
    codes = np.floor(rgb * maxcode + 0.5)
    bgr = codes[:, :, ::-1].astype(np.uint8 if bit_depth == 8 else np.uint16)
    if not cv2.imwrite(path, bgr):
        raise ImageIOError(f"{path}: PNG encode failed")


def sidecar_path(image_path):
    """Path of the metadata record for an image (same stem, .json)."""
    stem, _ = os.path.splitext(os.fspath(image_path))
    return stem + ".json"


def write_sidecar(params, seed, realization_index, path, bundle=None):
    """Write the provenance record for one generated image.

    `bundle` is the digest (or any identifier) of the parameter bundle the
    parameters were sampled from; None when not applicable. Floats are
    stored with full round-trip precision.
    """
    if not isinstance(params, NoiseParams):
        raise InvalidInputError("params must be NoiseParams")
    doc = {
        "bundle": None if bundle is None else str(bundle),
        "params": {
            name: {"a": params.channel(name).a, "b": params.channel(name).b}
            for name in CHANNEL_NAMES
        },
        "realization_index": int(realization_index),
        "seed": int(seed),
    }
    text = json.dumps(doc, sort_keys=True, indent=2, allow_nan=False)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def read_sidecar(path):
    """Parse a sidecar back into a dict with a NoiseParams under "params".

    The returned dict has keys "params", "seed", "realization_index" and
    "bundle"; parameter values are exactly the floats that were written.
    """
    path = os.fspath(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ImageIOError(f"{path}: cannot read sidecar: {e}") from e
    try:
        channels = {
            name: ChannelParams(a=float(doc["params"][name]["a"]),
                                b=float(doc["params"][name]["b"]))
            for name in CHANNEL_NAMES
        }
        return {
            "params": NoiseParams(**channels),
            "seed": int(doc["seed"]),
            "realization_index": int(doc["realization_index"]),
            "bundle": doc.get("bundle"),
        }
    except (KeyError, TypeError, ValueError) as e:
        raise ImageIOError(f"{path}: malformed sidecar: {e}") from e
