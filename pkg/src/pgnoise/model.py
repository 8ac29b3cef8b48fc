"""Poissonian-Gaussian noise model.

The observed signal at a pixel with clean intensity ``y`` in [0, 1] is

    z = a * K + sqrt(b) * G,   K ~ Poisson(y / a),   G ~ N(0, 1)

so ``E[z] = y`` and ``var(z) = a*y + b``. ``a`` scales the signal-dependent
(photon) part, ``b`` is the flat readout variance, and ``a = 0`` degenerates
to pure Gaussian noise with ``z = y + sqrt(b)*G``.

Random-stream contract
----------------------
Every plane-level draw consumes exactly three blocks from its generator, in
this order and regardless of parameter values:

1. ``u  = rng.random(n)``            per-pixel uniforms for Poisson inversion
2. ``gp = rng.standard_normal(n)``   normals for the large-mean approximation
3. ``g  = rng.standard_normal(n)``   the additive Gaussian component

Fixed consumption means a given seed yields the same stream positions for any
``(a, b)``, which keeps outputs reproducible across parameter sweeps and is
what the backend bit-identity guarantee is defined against.
:func:`add_noise_rgb` does not consume from its source directly; it derives
one child stream per channel (keys 0, 1, 2 for red, green, blue) so channel
outputs do not depend on evaluation order.
"""

import dataclasses
import math

import numpy as np

from . import _kernels, streams
from .errors import InvalidInputError

CHANNEL_NAMES = ("red", "green", "blue")

# lgamma(k+1) for every mode reachable on the exact branch (lam <= 1000).
# Computed once here so both kernel backends consume identical values.
_LGAMMA_KP1 = np.array(
    [math.lgamma(k + 1) for k in range(int(_kernels.LAM_EXACT_MAX) + 1)]
)


@dataclasses.dataclass(frozen=True)
class ChannelParams:
    """Noise parameters of one color channel: gain `a` and flat variance `b`."""

    a: float
    b: float

    def __post_init__(self):
        a = float(self.a)
        b = float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise InvalidInputError(f"noise parameters must be finite, got a={self.a!r} b={self.b!r}")
        if a < 0.0:
            raise InvalidInputError(f"gain a must be >= 0, got {a!r}")
        if b < 0.0:
            raise InvalidInputError(f"variance b must be >= 0, got {b!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


@dataclasses.dataclass(frozen=True)
class NoiseParams:
    """Per-channel noise parameters for an RGB image."""

    red: ChannelParams
    green: ChannelParams
    blue: ChannelParams

    def __post_init__(self):
        for name in CHANNEL_NAMES:
            if not isinstance(getattr(self, name), ChannelParams):
                raise InvalidInputError(f"{name} channel params must be ChannelParams")

    def channel(self, name):
        """Parameters for a channel by name ("red", "green" or "blue")."""
        if name not in CHANNEL_NAMES:
            raise InvalidInputError(f"unknown channel {name!r}")
        return getattr(self, name)


@dataclasses.dataclass(frozen=True)
class ImagePlane:
    """One color plane: a read-only 2-D float64 array of intensities.

    Clean planes hold normalized intensities in [0, 1]; noisy planes built
    with clipping disabled may exceed that range. Values are always finite.
    """

    pixels: np.ndarray

    def __post_init__(self):
        p = np.array(self.pixels, dtype=np.float64, copy=True)
        if p.ndim != 2 or p.size == 0:
            raise InvalidInputError(f"plane must be a non-empty 2-D array, got shape {p.shape}")
        if not np.isfinite(p).all():
            raise InvalidInputError("plane contains non-finite values")
        p.flags.writeable = False
        object.__setattr__(self, "pixels", p)

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def samples(self):
        """Row-major 1-D view of the pixel values."""
        return self.pixels.ravel()

    @classmethod
    def constant(cls, height, width, value):
        """Plane of the given size filled with one intensity."""
        return cls(np.full((height, width), float(value)))


@dataclasses.dataclass(frozen=True)
class RgbImage:
    """Three same-sized planes, in red, green, blue order."""

    red: ImagePlane
    green: ImagePlane
    blue: ImagePlane

    def __post_init__(self):
        shapes = {getattr(self, n).pixels.shape for n in CHANNEL_NAMES}
        if len(shapes) != 1:
            raise InvalidInputError(f"channel planes differ in shape: {sorted(shapes)}")

    @property
    def height(self):
        return self.red.height

    @property
    def width(self):
        return self.red.width

    def plane(self, name):
        """Plane for a channel by name ("red", "green" or "blue")."""
        if name not in CHANNEL_NAMES:
            raise InvalidInputError(f"unknown channel {name!r}")
        return getattr(self, name)

    @classmethod
    def from_array(cls, arr):
        """Build from an (height, width, 3) array in RGB channel order."""
        a = np.asarray(arr, dtype=np.float64)
        if a.ndim != 3 or a.shape[2] != 3:
            raise InvalidInputError(f"expected an (h, w, 3) array, got shape {a.shape}")
        return cls(ImagePlane(a[:, :, 0]), ImagePlane(a[:, :, 1]), ImagePlane(a[:, :, 2]))

    def to_array(self):
        """Stack the planes into an (height, width, 3) RGB array."""
        return np.stack([self.red.pixels, self.green.pixels, self.blue.pixels], axis=2)


def _clean_intensities(y, size):
    """Validate intensities in [0, 1]; return (flat array, original shape or None)."""
    arr = np.asarray(y, dtype=np.float64)
    if size is not None:
        if arr.ndim != 0:
            raise InvalidInputError("size is only valid with a scalar intensity")
        arr = np.full(int(size), float(arr))
    if not np.isfinite(arr).all():
        raise InvalidInputError("intensities must be finite")
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise InvalidInputError("clean intensities must lie in [0, 1]")
    shape = arr.shape if arr.ndim else None
    return np.atleast_1d(arr).ravel(), shape


def _poisson_counts(lam, u, gp):
    """Counts with per-pixel means `lam` from pre-drawn blocks `u`, `gp`.

    Computes the mode seed (the only transcendental work) and defers the
    inversion walk to the active kernel backend.
    """
    n = lam.shape[0]
    kmode = np.zeros(n, dtype=np.int64)
    pmode = np.zeros(n, dtype=np.float64)
    exact = (lam > 0.0) & (lam <= _kernels.LAM_EXACT_MAX)
    if exact.any():
        lx = lam[exact]
        kx = np.floor(lx).astype(np.int64)
        kmode[exact] = kx
        # pmf at the mode: exp(k*ln(lam) - lam - ln(k!)), around 1/sqrt(2*pi*lam).
        pmode[exact] = np.exp(kx * np.log(lx) - lx - _LGAMMA_KP1[kx])
    return _kernels.poisson_counts(lam, pmode, kmode, u, gp)


def sample_poisson_component(y, a, rng, size=None):
    """Draw the Poissonian part of the model: a * K with K ~ Poisson(y / a).

    Parameters
    ----------
    y : float or array
        Clean intensity in [0, 1]; scalar, or an array of per-pixel values.
    a : float
        Poissonian gain, >= 0. Zero returns `y` unchanged.
    rng : int, SeedSequence or Generator
        Random source. Two blocks are consumed (uniforms, then normals)
        whatever the value of `a`.
    size : int, optional
        With scalar `y`, number of independent draws to return.

    Returns
    -------
    float or ndarray
        Same shape as the input (or `size`); mean y, variance a * y.
    """
    a = float(a)
    if not math.isfinite(a) or a < 0.0:
        raise InvalidInputError(f"gain a must be finite and >= 0, got {a!r}")
    yf, shape = _clean_intensities(y, size)
    gen = streams.generator(rng)
    u = gen.random(yf.size)
    gp = gen.standard_normal(yf.size)
    if a == 0.0:
        out = yf.copy()
    else:
        lam = yf / a
        if not np.isfinite(lam).all():
            raise InvalidInputError(f"y / a overflows for a={a!r}")
        out = a * _poisson_counts(lam, u, gp)
    return out.reshape(shape) if shape is not None else float(out[0])


def sample_gaussian_component(b, rng, size=None):
    """Draw the flat Gaussian part: sqrt(b) times a standard normal.

    One block of normals is consumed even when b == 0 (the draw is then
    exactly 0). Returns a scalar unless `size` is given.
    """
    b = float(b)
    if not math.isfinite(b) or b < 0.0:
        raise InvalidInputError(f"variance b must be finite and >= 0, got {b!r}")
    gen = streams.generator(rng)
    g = gen.standard_normal(size if size is not None else 1)
    out = math.sqrt(b) * g
    return out if size is not None else float(out[0])


def add_noise_plane(clean, params, rng, clip=True):
    """Apply the noise model to one plane.

    Parameters
    ----------
    clean : ImagePlane
        Intensities in [0, 1].
    params : ChannelParams
        Gain and flat variance for this plane.
    rng : int, SeedSequence or Generator
        Random source; exactly three blocks are consumed (see module
        docstring).
    clip : bool
        Clamp the output to [0, 1] (default). Disable for statistical checks,
        where clipping would bias the variance near the range ends.

    Returns
    -------
    ImagePlane
        Same shape as `clean`; each pixel carries independent noise with
        variance a * y + b before clipping.
    """
    if not isinstance(clean, ImagePlane):
        raise InvalidInputError("clean must be an ImagePlane")
    if not isinstance(params, ChannelParams):
        raise InvalidInputError("params must be ChannelParams")
    gen = streams.generator(rng)
    noisy = sample_poisson_component(clean.pixels, params.a, gen)
    noisy += sample_gaussian_component(params.b, gen, size=clean.pixels.shape)
    if clip:
        np.clip(noisy, 0.0, 1.0, out=noisy)
    return ImagePlane(noisy)


def add_noise_rgb(clean, params, rng, clip=True):
    """Apply the model per channel with that channel's parameters.

    Each channel draws from its own child stream (keys 0, 1, 2 for red,
    green, blue), so the three noise fields are independent and identical
    for a given seed no matter the evaluation order.
    """
    if not isinstance(clean, RgbImage):
        raise InvalidInputError("clean must be an RgbImage")
    if not isinstance(params, NoiseParams):
        raise InvalidInputError("params must be NoiseParams")
    planes = [
        add_noise_plane(clean.plane(name), params.channel(name),
                        streams.generator(rng, index), clip=clip)
        for index, name in enumerate(CHANNEL_NAMES)
    ]
    return RgbImage(*planes)


def predicted_variance(y, params):
    """Analytic per-pixel variance a * y + b at clean intensity `y`."""
    if not isinstance(params, ChannelParams):
        raise InvalidInputError("params must be ChannelParams")
    yf, shape = _clean_intensities(y, None)
    out = params.a * yf + params.b
    return out.reshape(shape) if shape is not None else float(out[0])
