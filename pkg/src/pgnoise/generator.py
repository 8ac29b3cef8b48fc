"""Noise generation from calibrated parameter histograms.

A :class:`ParamBundle` carries nine histograms (slope, intercept and positive
gain per channel). Fresh channel parameters are drawn by sampling a slope
``m``, an intercept ``c`` and a gain ``a`` independently, forming
``b = m*a + c``, and resampling the whole triple whenever ``b`` comes out
negative. The accepted (a, b) distribution is therefore the independent
product conditioned on ``b >= 0``; a cap on attempts turns a pathological
bundle (almost all lines negative over the gain support) into a loud error
instead of an endless loop.
"""

import dataclasses
import types

import numpy as np

from . import streams
from .errors import InvalidInputError, PgNoiseError, SamplingExhaustedError
from .histogram import Histogram, sample_histogram
from .model import CHANNEL_NAMES, ChannelParams, NoiseParams, RgbImage, add_noise_rgb

DEFAULT_MAX_ATTEMPTS = 1000


@dataclasses.dataclass(frozen=True, eq=False)
class ChannelHistograms:
    """The three sampling histograms of one channel."""

    slope: Histogram
    intercept: Histogram
    a: Histogram

    def __post_init__(self):
        for field in ("slope", "intercept", "a"):
            if not isinstance(getattr(self, field), Histogram):
                raise InvalidInputError(f"{field} must be a Histogram")
        a = self.a
        if a.edges[0] < 0.0:
            raise InvalidInputError(
                f"gain histogram support must be non-negative, first edge is {a.edges[0]!r}"
            )
        bad = (a.edges[1:] <= 0.0) & (a.mass > 0.0)
        if bad.any():
            raise InvalidInputError("gain histogram has mass in a non-positive bin")


@dataclasses.dataclass(frozen=True, eq=False)
class ParamBundle:
    """Per-channel sampling histograms plus free-form provenance metadata."""

    red: ChannelHistograms
    green: ChannelHistograms
    blue: ChannelHistograms
    metadata: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        for name in CHANNEL_NAMES:
            if not isinstance(getattr(self, name), ChannelHistograms):
                raise InvalidInputError(f"{name} must be ChannelHistograms")
        meta = dict(self.metadata)
        for key, value in meta.items():
            if not isinstance(key, str):
                raise InvalidInputError(f"metadata keys must be strings, got {key!r}")
            if not isinstance(value, (str, int, float, bool)):
                raise InvalidInputError(
                    f"metadata values must be scalars, got {type(value).__name__} for {key!r}"
                )
        object.__setattr__(self, "metadata", types.MappingProxyType(meta))

    def channel(self, name):
        """Histograms for a channel by name ("red", "green" or "blue")."""
        if name not in CHANNEL_NAMES:
            raise InvalidInputError(f"unknown channel {name!r}")
        return getattr(self, name)


def sample_channel_params(bundle, channel, rng, max_attempts=DEFAULT_MAX_ATTEMPTS):
    """Draw one (a, b) pair for a channel from the bundle's histograms.

    Per attempt, slope, intercept and gain are drawn in that order and the
    variance ``b = m*a + c`` is formed; the triple is resampled while
    ``b < 0`` (or, measure-zero with real data, ``a == 0``).

    Raises
    ------
    SamplingExhaustedError
        After `max_attempts` rejected triples.
    """
    ch = bundle.channel(channel)
    max_attempts = int(max_attempts)
    if max_attempts < 1:
        raise InvalidInputError(f"max_attempts must be >= 1, got {max_attempts}")
    gen = streams.generator(rng)
    for _ in range(max_attempts):
        m = sample_histogram(ch.slope, gen)
        c = sample_histogram(ch.intercept, gen)
        a = sample_histogram(ch.a, gen)
        b = m * a + c
        if b >= 0.0 and a > 0.0:
            return ChannelParams(a=a, b=b)
    raise SamplingExhaustedError(
        f"channel {channel}: no non-negative variance in {max_attempts} attempts",
        attempts=max_attempts,
        channel=channel,
    )


def sample_channel_params_batch(bundle, channel, rng, size,
                                max_attempts=DEFAULT_MAX_ATTEMPTS):
    """Vectorized :func:`sample_channel_params` for `size` independent pairs.

    Each round draws full slope, intercept and gain vectors for the samples
    still rejected. Returns ``(a, b, attempts)`` float64/float64/int64
    arrays, where ``attempts[i]`` counts the triples drawn for sample ``i``.
    """
    ch = bundle.channel(channel)
    size = int(size)
    if size < 1:
        raise InvalidInputError(f"size must be >= 1, got {size}")
    max_attempts = int(max_attempts)
    if max_attempts < 1:
        raise InvalidInputError(f"max_attempts must be >= 1, got {max_attempts}")
    gen = streams.generator(rng)
    a_out = np.empty(size)
    b_out = np.empty(size)
    attempts = np.zeros(size, dtype=np.int64)
    pending = np.arange(size)
    for round_no in range(1, max_attempts + 1):
        m = sample_histogram(ch.slope, gen, size=pending.size)
        c = sample_histogram(ch.intercept, gen, size=pending.size)
        a = sample_histogram(ch.a, gen, size=pending.size)
        b = m * a + c
        attempts[pending] = round_no
        ok = (b >= 0.0) & (a > 0.0)
        hit = pending[ok]
        a_out[hit] = a[ok]
        b_out[hit] = b[ok]
        pending = pending[~ok]
        if pending.size == 0:
            return a_out, b_out, attempts
    raise SamplingExhaustedError(
        f"channel {channel}: {pending.size} of {size} samples still rejected "
        f"after {max_attempts} attempts",
        attempts=max_attempts,
        channel=channel,
    )


def sample_noise_params(bundle, rng, max_attempts=DEFAULT_MAX_ATTEMPTS):
    """Draw independent per-channel parameters (channel substreams 0, 1, 2)."""
    if not isinstance(bundle, ParamBundle):
        raise InvalidInputError("bundle must be a ParamBundle")
    draws = {
        name: sample_channel_params(
            bundle, name, streams.generator(rng, index), max_attempts
        )
        for index, name in enumerate(CHANNEL_NAMES)
    }
    return NoiseParams(**draws)


def generate_realization(clean, bundle, seed, index, clip=True, params=None,
                         max_attempts=DEFAULT_MAX_ATTEMPTS):
    """One noisy realization of `clean` at realization `index` under `seed`.

    Realization ``index`` derives two child streams from ``seed``: key
    ``(index, 0)`` for parameter sampling and ``(index, 1)`` for noise
    synthesis, so any subset of realizations can be computed in any order,
    or in parallel, with identical results. Pre-sampled `params` skip the
    parameter draw (used for fixed-parameter batches).

    Returns
    -------
    (RgbImage, NoiseParams)
        The noisy image and the exact parameters that produced it.
    """
    if not isinstance(clean, RgbImage):
        raise InvalidInputError("clean must be an RgbImage")
    index = int(index)
    if index < 0:
        raise InvalidInputError(f"index must be >= 0, got {index}")
    try:
        if params is None:
            params = sample_noise_params(
                bundle, streams.generator(seed, index, streams.PARAMS_STREAM), max_attempts
            )
        noisy = add_noise_rgb(
            clean, params, streams.generator(seed, index, streams.NOISE_STREAM), clip=clip
        )
    except PgNoiseError as e:
        prefix = f"realization {index}"
        e.args = (f"{prefix}: {e.args[0]}",) + e.args[1:] if e.args else (prefix,)
        raise
    return noisy, params


def generate_noisy_images(clean, bundle, n, seed, clip=True, fixed_params=False,
                          max_attempts=DEFAULT_MAX_ATTEMPTS):
    """Yield `n` noisy realizations of `clean`, each with its parameters.

    Each realization gets freshly sampled parameters by default; with
    ``fixed_params`` they are sampled once, from the realization-0 parameter
    stream, and reused, so realization 0 is identical in both modes.

    Yields
    ------
    (RgbImage, NoiseParams)
        The noisy image and the exact parameters that produced it.
    """
    if not isinstance(clean, RgbImage):
        raise InvalidInputError("clean must be an RgbImage")
    n = int(n)
    if n < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    shared = None
    if fixed_params:
        shared = sample_noise_params(
            bundle, streams.generator(seed, 0, streams.PARAMS_STREAM), max_attempts
        )
    for i in range(n):
        yield generate_realization(
            clean, bundle, seed, i, clip=clip, params=shared, max_attempts=max_attempts
        )
