"""Synthetic fixtures: the shipped example bundle and test corpora.

The package ships one ready-to-use parameter bundle
(``data/example_bundle.json``). Its nine histograms are built from seeded
synthetic draws shaped like plausible smartphone calibration output (mostly
positive slopes, small positive intercepts, gains around 1e-4 to 1e-3); the
numbers are invented, not measured from any camera. The exact source values
are regenerable via :func:`example_source_values`, which is what allows
distribution-level tests to compare bundle samples against the values the
histograms were built from.

The corpus helpers synthesize clean/noisy scene sets with known per-pair
(a, b) ground truth, for calibration round-trip tests and for the
calibrate -> generate -> validate closed loop.
"""

import os

import numpy as np

from . import streams
from .bundle_io import parse_bundle
from .calibration import ScenePair
from .generator import ChannelHistograms, ParamBundle
from .histogram import Histogram, build_histogram
from .image_io import save_image
from .model import (
    CHANNEL_NAMES,
    ChannelParams,
    ImagePlane,
    NoiseParams,
    RgbImage,
    add_noise_rgb,
)

EXAMPLE_SEED = 20240917
EXAMPLE_VALUE_COUNT = 100_000
# 256 bins keeps the uniform-within-bin sampling density close to the
# lognormal source densities; at 64 bins the skewed intercept histograms
# visibly distort the sampled distribution (KS ~ 2x the 1% critical value).
EXAMPLE_BIN_COUNT = 256

# Per-channel shape constants for the synthetic example bundle: slope mean/sd
# (normal), intercept median/log-sd and gain median/log-sd (lognormal).
_SLOPE_LOC = {"red": 3.0, "green": 2.0, "blue": 2.5}
_SLOPE_SCALE = {"red": 1.0, "green": 0.8, "blue": 0.9}
_INTERCEPT_MEDIAN = {"red": 8.0e-4, "green": 3.0e-4, "blue": 5.0e-4}
_INTERCEPT_SIGMA = {"red": 0.35, "green": 0.35, "blue": 0.35}
_A_MEDIAN = {"red": 2.0e-4, "green": 1.0e-4, "blue": 1.2e-4}
_A_SIGMA = {"red": 0.32, "green": 0.30, "blue": 0.33}

_KINDS = ("slope", "intercept", "a")


def example_source_values(count=EXAMPLE_VALUE_COUNT, seed=EXAMPLE_SEED):
    """The seeded draws the example bundle's histograms are built from.

    Returns {channel: {"slope": array, "intercept": array, "a": array}};
    each array has `count` entries and a fixed substream, so the same
    (seed, count) always regenerates identical values.
    """
    out = {}
    for ci, name in enumerate(CHANNEL_NAMES):
        values = {}
        for ki, kind in enumerate(_KINDS):
            gen = streams.generator(seed, ci, ki)
            if kind == "slope":
                values[kind] = _SLOPE_LOC[name] + _SLOPE_SCALE[name] * gen.standard_normal(count)
            elif kind == "intercept":
                values[kind] = gen.lognormal(np.log(_INTERCEPT_MEDIAN[name]),
                                             _INTERCEPT_SIGMA[name], count)
            else:
                values[kind] = gen.lognormal(np.log(_A_MEDIAN[name]), _A_SIGMA[name], count)
        out[name] = values
    return out


def make_example_bundle(count=EXAMPLE_VALUE_COUNT, seed=EXAMPLE_SEED,
                        bin_count=EXAMPLE_BIN_COUNT):
    """Build the example bundle from its seeded source values."""
    source = example_source_values(count, seed)
    channels = {
        name: ChannelHistograms(
            slope=build_histogram(source[name]["slope"], bin_count),
            intercept=build_histogram(source[name]["intercept"], bin_count),
            a=build_histogram(source[name]["a"], bin_count),
        )
        for name in CHANNEL_NAMES
    }
    metadata = {
        "source": "synthetic example (seeded draws, not camera data)",
        "seed": int(seed),
        "values_per_histogram": int(count),
        "bin_count": int(bin_count),
    }
    return ParamBundle(metadata=metadata, **channels)


def example_bundle():
    """The bundle shipped with the package (data/example_bundle.json)."""
    path = os.path.join(os.path.dirname(__file__), "data", "example_bundle.json")
    with open(path, "rb") as fh:
        return parse_bundle(fh.read())


def point_mass_histogram(value):
    """Single-bin histogram concentrated at `value` (width <= |value|*1e-6)."""
    return build_histogram([float(value)], 1)


def uniform_histogram(lo, hi):
    """Single-bin histogram: uniform sampling density over [lo, hi]."""
    return Histogram(np.array([float(lo), float(hi)]), np.array([1.0]))


def _gain_point_mass(value):
    """Point-mass gain histogram; anchored at 0 when centering would dip below.

    Gain supports must be non-negative, so a point mass at (or within half a
    bin width of) zero keeps its width but starts at 0. Sampled gains are then
    vanishing positive values: the emitted parameters stay inside the a > 0
    contract while the synthesized noise is zero at any encodable precision.
    """
    h = point_mass_histogram(value)
    if h.edges[0] < 0.0:
        width = float(h.edges[1] - h.edges[0])
        return Histogram(np.array([0.0, width]), np.array([float(h.mass[0])]))
    return h


def point_mass_bundle(params, metadata=None):
    """Bundle whose sampling reproduces `params` up to point-mass bin width.

    The slope histograms sit at 0 and the intercepts at each channel's b, so
    a sampled b' equals b up to about one part in 1e6 (exact point masses
    are impossible with bins of positive width).
    """
    if not isinstance(params, NoiseParams):
        raise TypeError("params must be NoiseParams")
    channels = {
        name: ChannelHistograms(
            slope=point_mass_histogram(0.0),
            intercept=point_mass_histogram(params.channel(name).b),
            a=_gain_point_mass(params.channel(name).a),
        )
        for name in CHANNEL_NAMES
    }
    return ParamBundle(metadata=dict(metadata or {"source": "point-mass fixture"}),
                       **channels)


def random_bundle(seed, bin_count=32, values=2000):
    """A randomized but healthy bundle for property tests.

    Slopes can go negative and intercept draws cross zero, so the rejection
    loop gets exercised, while enough mass keeps acceptance probable.
    """
    gen = streams.generator(seed)
    channels = {}
    for name in CHANNEL_NAMES:
        slope_loc = gen.uniform(-0.5, 4.0)
        slopes = slope_loc + gen.standard_normal(values) * gen.uniform(0.3, 1.2)
        c_med = gen.uniform(2e-4, 1e-3)
        intercepts = c_med + gen.standard_normal(values) * (c_med * 0.5)
        gains = gen.lognormal(np.log(gen.uniform(5e-5, 4e-4)), gen.uniform(0.2, 0.6), values)
        channels[name] = ChannelHistograms(
            slope=build_histogram(slopes, bin_count),
            intercept=build_histogram(intercepts, bin_count),
            a=build_histogram(gains, bin_count),
        )
    return ParamBundle(metadata={"source": f"randomized fixture seed={int(seed)}"},
                       **channels)


def gradient_plane(height, width, mix, lo=0.12, hi=0.88):
    """Smooth clean plane sweeping [lo, hi]; `mix` tilts the gradient axis."""
    u = np.linspace(0.0, 1.0, height)[:, None]
    v = np.linspace(0.0, 1.0, width)[None, :]
    ramp = mix * u + (1.0 - mix) * v
    return ImagePlane(lo + (hi - lo) * ramp)


def scene_truth(seed, n_scenes, pairs_per_scene):
    """Ground-truth (a, b) per scene/channel/pair for the synthetic corpus.

    Each scene has its own line b = m*a + c per channel; pairs sit at
    distinct gains along it, like captures of one scene at different gains.
    Values keep b/a modest so paired estimation is statistically easy.
    """
    truth = {}
    for s in range(n_scenes):
        scene_id = f"scene{s:03d}"
        per_channel = {}
        for ci, name in enumerate(CHANNEL_NAMES):
            gen = streams.generator(seed, s, ci)
            m = gen.uniform(0.4, 1.2)
            c = gen.uniform(3e-5, 1.2e-4)
            a = np.linspace(2.5e-4, 6.0e-4, pairs_per_scene)
            a = a * gen.uniform(0.92, 1.08, pairs_per_scene)
            per_channel[name] = [(float(ak), float(m * ak + c)) for ak in a]
        truth[scene_id] = per_channel
    return truth


def make_scene_pairs(seed, n_scenes=10, pairs_per_scene=3, height=640, width=640,
                     clip=False):
    """In-memory synthetic calibration corpus.

    Returns (pairs, truth): a list of ScenePair and the scene_truth mapping
    that generated them. Clean images stay within [0.12, 0.88], about three
    noise sigmas from the range ends at the strongest corpus noise levels.
    """
    truth = scene_truth(seed, n_scenes, pairs_per_scene)
    pairs = []
    for s, (scene_id, per_channel) in enumerate(truth.items()):
        mix = 0.3 + 0.4 * (s / max(n_scenes - 1, 1))
        plane = gradient_plane(height, width, mix)
        clean = RgbImage(plane, plane, plane)
        for k in range(pairs_per_scene):
            params = NoiseParams(**{
                name: ChannelParams(a=per_channel[name][k][0], b=per_channel[name][k][1])
                for name in CHANNEL_NAMES
            })
            noisy = add_noise_rgb(clean, params,
                                  streams.generator(seed, 1_000 + s, k), clip=clip)
            pairs.append(ScenePair(clean=clean, noisy=noisy,
                                   scene_id=scene_id))
    return pairs, truth


def write_scene_corpus(out_dir, seed, n_scenes=10, pairs_per_scene=3,
                       height=640, width=640):
    """Write the synthetic corpus as 16-bit PNG scene directories.

    Layout: <out_dir>/<scene>/<pair>_clean.png and <pair>_noisy.png. Noisy
    images are clipped for storage; with cleans in [0.12, 0.88] clipping
    affects a negligible fraction of pixels, so stored noise keeps the
    model statistics. Returns the ground-truth mapping.
    """
    pairs, truth = make_scene_pairs(seed, n_scenes, pairs_per_scene, height, width,
                                    clip=True)
    index = {}
    for pair in pairs:
        k = index.get(pair.scene_id, 0)
        index[pair.scene_id] = k + 1
        scene_dir = os.path.join(os.fspath(out_dir), pair.scene_id)
        os.makedirs(scene_dir, exist_ok=True)
        save_image(pair.clean, os.path.join(scene_dir, f"{k:02d}_clean.png"), bit_depth=16)
        save_image(pair.noisy, os.path.join(scene_dir, f"{k:02d}_noisy.png"), bit_depth=16)
    return truth
