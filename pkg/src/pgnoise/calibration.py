"""Noise-parameter estimation from paired clean/noisy images.

The pipeline mirrors how the generator's histograms are meant to be built:

1. Per image pair and channel, fit the variance law ``var = a*y + b`` to
   binned (intensity, noise variance) points: :func:`estimate_ab_paired`.
2. Per scene and channel, fit a line ``b = m*a + c`` through that scene's
   (a, b) estimates: :func:`fit_line`. Estimators can return negative a or b
   on real data; the line fit keeps them.
3. Aggregate across scenes into slope, intercept and positive-gain
   histograms: :func:`build_param_bundle`. The intercept histogram is built
   from whole-image noise variances (:func:`estimate_noise_variance`), not
   from fitted c values; negative gains are dropped from the gain histogram
   but their scenes still contribute slopes and intercepts.
"""

import dataclasses
import itertools
import math

import numpy as np

from .errors import (
    CalibrationError,
    DegenerateFitError,
    InsufficientDynamicRangeError,
    InvalidInputError,
)
from .generator import ChannelHistograms, ParamBundle
from .histogram import DEFAULT_BIN_COUNT, build_histogram
from .model import CHANNEL_NAMES, RgbImage

# Equal-width intensity bins over [0, 1] used to pool pixels for per-bin
# variance estimates, and the population below which a bin is too noisy
# to contribute to the fit.
INTENSITY_BIN_COUNT = 32
MIN_BIN_PIXELS = 100


@dataclasses.dataclass(frozen=True)
class AbEstimate:
    """One fitted (a, b) pair for a channel of one image pair.

    Values are finite but may be negative: least squares on noisy variance
    points can undershoot zero, and downstream aggregation handles that.
    """

    a: float
    b: float
    channel: str
    scene_id: str

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise InvalidInputError("estimated a and b must be finite")


@dataclasses.dataclass(frozen=True)
class LineFit:
    """Least-squares line b = m*a + c with its RMS residual."""

    m: float
    c: float
    residual_rms: float

    def __post_init__(self):
        if not all(map(math.isfinite, (self.m, self.c, self.residual_rms))):
            raise InvalidInputError("line fit values must be finite")
        if self.residual_rms < 0:
            raise InvalidInputError("residual_rms must be >= 0")


@dataclasses.dataclass(frozen=True, eq=False)
class ScenePair:
    """A clean image and a noisy capture of the same scene."""

    clean: RgbImage
    noisy: RgbImage
    scene_id: str

    def __post_init__(self):
        if not isinstance(self.clean, RgbImage) or not isinstance(self.noisy, RgbImage):
            raise InvalidInputError("clean and noisy must be RgbImage")
        if (self.clean.height, self.clean.width) != (self.noisy.height, self.noisy.width):
            raise InvalidInputError(
                f"scene {self.scene_id!r}: clean is "
                f"{self.clean.height}x{self.clean.width}, noisy is "
                f"{self.noisy.height}x{self.noisy.width}"
            )


@dataclasses.dataclass(frozen=True)
class ChannelCalibration:
    """Everything one scene contributes to one channel's histograms.

    `slope` is the fitted m for the scene, or None when the scene had too
    few pairs (or no gain spread) to define a line. `intercepts` holds one
    whole-image noise variance per pair; `a_values` the raw per-pair gain
    estimates, negatives included.
    """

    channel: str
    slope: float | None
    intercepts: tuple
    a_values: tuple

    def __post_init__(self):
        if self.channel not in CHANNEL_NAMES:
            raise InvalidInputError(f"unknown channel {self.channel!r}")
        object.__setattr__(self, "intercepts", tuple(float(v) for v in self.intercepts))
        object.__setattr__(self, "a_values", tuple(float(v) for v in self.a_values))


def _channel_difference(pair, channel):
    """Flat (clean samples, noisy - clean) for one channel of a pair."""
    if not isinstance(pair, ScenePair):
        raise InvalidInputError("pair must be a ScenePair")
    y = pair.clean.plane(channel).samples
    z = pair.noisy.plane(channel).samples
    return y, z - y


def estimate_ab_paired(pair, channel, bin_count=INTENSITY_BIN_COUNT):
    """Fit the variance law var = a*y + b to one channel of an image pair.

    Pixels are pooled into `bin_count` equal-width clean-intensity bins over
    [0, 1]; bins with fewer than 100 pixels are discarded. The per-bin
    sample variance of (noisy - clean) is regressed on the per-bin mean
    intensity by least squares weighted with bin populations.

    Returns
    -------
    AbEstimate
        Fitted slope a and intercept b (either may be negative).

    Raises
    ------
    InsufficientDynamicRangeError
        If fewer than two bins are sufficiently populated, e.g. on a nearly
        constant image.
    """
    bin_count = int(bin_count)
    if bin_count < 2:
        raise InvalidInputError(f"bin_count must be >= 2, got {bin_count}")
    y, d = _channel_difference(pair, channel)
    if (y.min() < 0.0) or (y.max() > 1.0):
        raise InvalidInputError("clean intensities must lie in [0, 1]")

    idx = np.minimum((y * bin_count).astype(np.int64), bin_count - 1)
    counts = np.bincount(idx, minlength=bin_count)
    sum_y = np.bincount(idx, weights=y, minlength=bin_count)
    sum_d = np.bincount(idx, weights=d, minlength=bin_count)
    sum_d2 = np.bincount(idx, weights=d * d, minlength=bin_count)

    keep = counts >= MIN_BIN_PIXELS
    if keep.sum() < 2:
        raise InsufficientDynamicRangeError(
            f"only {int(keep.sum())} intensity bins hold >= {MIN_BIN_PIXELS} pixels; "
            "need at least 2 for a variance-law fit"
        )
    n = counts[keep].astype(np.float64)
    ybar = sum_y[keep] / n
    var = (sum_d2[keep] - sum_d[keep] ** 2 / n) / (n - 1.0)

    # Weighted least squares, weights = bin populations.
    w = n
    sw = w.sum()
    sx = (w * ybar).sum()
    sv = (w * var).sum()
    sxx = (w * ybar * ybar).sum()
    sxv = (w * ybar * var).sum()
    den = sw * sxx - sx * sx
    a = (sw * sxv - sx * sv) / den
    b = (sv - a * sx) / sw
    return AbEstimate(a=float(a), b=float(b), channel=channel, scene_id=pair.scene_id)


def estimate_noise_variance(pair, channel):
    """Sample variance of (noisy - clean) over all pixels of a channel."""
    y, d = _channel_difference(pair, channel)
    if d.size < 2:
        raise InvalidInputError("need at least 2 pixels to estimate a variance")
    return float(np.var(d, ddof=1))


def fit_line(estimates):
    """Ordinary least squares of b on a over a scene's estimates.

    Parameters
    ----------
    estimates : sequence of AbEstimate
        At least two, with at least two distinct a values.

    Returns
    -------
    LineFit
        Slope m, intercept c and the root-mean-square residual. Exact for
        collinear inputs and invariant to input order.
    """
    ests = list(estimates)
    if len(ests) < 2:
        raise InvalidInputError(f"need at least 2 estimates to fit a line, got {len(ests)}")
    if not all(isinstance(e, AbEstimate) for e in ests):
        raise InvalidInputError("estimates must be AbEstimate instances")
    a = np.array([e.a for e in ests])
    b = np.array([e.b for e in ests])
    abar = a.mean()
    bbar = b.mean()
    den = ((a - abar) ** 2).sum()
    if den == 0.0:
        raise DegenerateFitError("all gain estimates are identical; slope is undefined")
    m = ((a - abar) * (b - bbar)).sum() / den
    c = bbar - m * abar
    rms = math.sqrt(np.mean((b - (m * a + c)) ** 2))
    return LineFit(m=float(m), c=float(c), residual_rms=rms)


def calibrate_scene(pairs, bin_count=INTENSITY_BIN_COUNT):
    """Calibrate one scene: per-channel estimates, line fit and variances.

    Parameters
    ----------
    pairs : sequence of ScenePair
        All pairs of one scene (same scene_id).
    bin_count : int
        Intensity bins for estimate_ab_paired.

    Returns
    -------
    list of ChannelCalibration
        One entry per channel. The slope is None when the scene has a single
        pair or no spread in its gain estimates; such scenes still contribute
        intercepts and gains.
    """
    pairs = list(pairs)
    if not pairs:
        raise InvalidInputError("scene has no image pairs")
    ids = {p.scene_id for p in pairs}
    if len(ids) != 1:
        raise InvalidInputError(f"pairs mix scene ids: {sorted(ids)}")
    out = []
    for channel in CHANNEL_NAMES:
        ests = [estimate_ab_paired(p, channel, bin_count) for p in pairs]
        slope = None
        if len(ests) >= 2:
            try:
                slope = fit_line(ests).m
            except DegenerateFitError:
                pass
        intercepts = tuple(estimate_noise_variance(p, channel) for p in pairs)
        out.append(ChannelCalibration(
            channel=channel,
            slope=slope,
            intercepts=intercepts,
            a_values=tuple(e.a for e in ests),
        ))
    return out


def calibrate_scenes(pairs, bin_count=INTENSITY_BIN_COUNT):
    """Calibrate every scene in `pairs` (grouped by scene_id, order kept)."""
    pairs = list(pairs)
    if not pairs:
        raise InvalidInputError("no image pairs to calibrate")
    grouped = itertools.groupby(
        sorted(pairs, key=lambda p: p.scene_id), key=lambda p: p.scene_id
    )
    out = []
    for _, scene_pairs in grouped:
        out.extend(calibrate_scene(list(scene_pairs), bin_count))
    return out


def build_param_bundle(results, bin_count=DEFAULT_BIN_COUNT, source="paired calibration"):
    """Aggregate per-scene calibrations into a sampling bundle.

    For each channel, three histograms are built: scene slopes, whole-image
    noise variances, and strictly positive gain estimates (negative gains
    are discarded here and only here).

    Raises
    ------
    CalibrationError
        If a channel has no results, no defined slopes, or no positive gain
        estimate. The error names the channel.
    """
    results = list(results)
    by_channel = {name: [r for r in results if r.channel == name] for name in CHANNEL_NAMES}
    hists = {}
    for name in CHANNEL_NAMES:
        rs = by_channel[name]
        if not rs:
            raise CalibrationError(f"no calibration results for channel {name}", channel=name)
        slopes = [r.slope for r in rs if r.slope is not None]
        if not slopes:
            raise CalibrationError(
                f"no scene produced a slope estimate for channel {name}", channel=name
            )
        intercepts = [v for r in rs for v in r.intercepts]
        if not intercepts:
            raise CalibrationError(f"no noise variances for channel {name}", channel=name)
        gains = [a for r in rs for a in r.a_values if a > 0.0]
        if not gains:
            raise CalibrationError(
                f"no positive gain estimate for channel {name}", channel=name
            )
        hists[name] = ChannelHistograms(
            slope=build_histogram(slopes, bin_count),
            intercept=build_histogram(intercepts, bin_count),
            a=build_histogram(gains, bin_count),
        )
    metadata = {
        "source": str(source),
        "bin_count": int(bin_count),
        "scene_count": sum(1 for r in results if r.channel == CHANNEL_NAMES[0]),
    }
    return ParamBundle(
        red=hists["red"], green=hists["green"], blue=hists["blue"], metadata=metadata
    )
