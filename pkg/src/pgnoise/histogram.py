"""Binned empirical distributions with inverse transform sampling.

Calibration records the distribution of fitted slopes, intercepts and gains
as equal-width histograms; the generator draws fresh parameters from them by
inverse transform sampling with uniform interpolation inside each bin, so the
sampled density is the normalized piecewise-constant histogram density rather
than a lattice of bin centers.
"""

import dataclasses

import numpy as np

from . import streams
from .errors import EmptyDataError, InvalidInputError

DEFAULT_BIN_COUNT = 64


@dataclasses.dataclass(frozen=True, eq=False)
class Histogram:
    """Equal-rank binned masses over strictly increasing edges.

    `edges` has one more entry than `mass`; bin ``i`` covers
    ``[edges[i], edges[i+1])`` with the last bin closed on the right. Masses
    are non-negative with positive total; they need not be normalized.
    """

    edges: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        edges = np.array(self.edges, dtype=np.float64, copy=True)
        mass = np.array(self.mass, dtype=np.float64, copy=True)
        if edges.ndim != 1 or edges.size < 2:
            raise InvalidInputError("edges must be 1-D with at least 2 entries")
        if not np.isfinite(edges).all():
            raise InvalidInputError("edges must be finite")
        if not (np.diff(edges) > 0).all():
            raise InvalidInputError("edges must be strictly increasing")
        if mass.ndim != 1 or mass.size != edges.size - 1:
            raise InvalidInputError(
                f"mass must have {edges.size - 1} entries for {edges.size} edges, got {mass.size}"
            )
        if not np.isfinite(mass).all() or (mass < 0).any():
            raise InvalidInputError("masses must be finite and >= 0")
        total = float(mass.sum())
        if not total > 0.0:
            raise InvalidInputError("total mass must be > 0")
        edges.flags.writeable = False
        mass.flags.writeable = False
        # Normalized cumulative with exact endpoints; bin i spans
        # [cum[i], cum[i+1]) of probability. Zero-mass bins span nothing,
        # so inverse transform can never land in them.
        cum = np.concatenate(([0.0], np.cumsum(mass) / total))
        cum[-1] = 1.0
        cum.flags.writeable = False
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "_cum", cum)

    @property
    def bin_count(self):
        return self.mass.size

    @property
    def total(self):
        return float(self.mass.sum())

    @property
    def centers(self):
        return (self.edges[:-1] + self.edges[1:]) / 2.0


def build_histogram(values, bin_count=DEFAULT_BIN_COUNT):
    """Equal-width histogram of `values` spanning [min, max].

    Parameters
    ----------
    values : sequence of float
        At least one finite value.
    bin_count : int
        Number of bins, >= 1. All-equal input collapses to one bin of width
        ``max(|v| * 1e-6, 1e-12)`` centered on the value so that sampling
        stays well defined.

    Returns
    -------
    Histogram
        Masses are counts; their total equals ``len(values)``.
    """
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise EmptyDataError("cannot build a histogram from no values")
    if not np.isfinite(arr).all():
        raise InvalidInputError("histogram values must be finite")
    bin_count = int(bin_count)
    if bin_count < 1:
        raise InvalidInputError(f"bin_count must be >= 1, got {bin_count}")
    lo = float(arr.min())
    hi = float(arr.max())
    if lo == hi:
        width = max(abs(lo) * 1e-6, 1e-12)
        edges = np.array([lo - width / 2.0, lo + width / 2.0])
        return Histogram(edges, np.array([float(arr.size)]))
    mass, edges = np.histogram(arr, bins=bin_count, range=(lo, hi))
    return Histogram(edges, mass.astype(np.float64))


def sample_histogram(h, rng, size=None):
    """Draw from the histogram density by inverse transform sampling.

    A uniform ``u`` picks the bin whose cumulative normalized mass bracket
    contains it, then interpolates uniformly between that bin's edges.
    Returns a scalar unless `size` is given.
    """
    if not isinstance(h, Histogram):
        raise InvalidInputError("h must be a Histogram")
    gen = streams.generator(rng)
    u = gen.random(size if size is not None else 1)
    cum = h._cum
    j = np.searchsorted(cum, u, side="right") - 1
    frac = (u - cum[j]) / (cum[j + 1] - cum[j])
    out = h.edges[j] + frac * (h.edges[j + 1] - h.edges[j])
    return out if size is not None else float(out[0])


def cdf(h, x):
    """Piecewise-linear CDF of the histogram density at `x`.

    0 below the first edge, 1 above the last, linear across each bin in
    proportion to its normalized mass.
    """
    if not isinstance(h, Histogram):
        raise InvalidInputError("h must be a Histogram")
    out = np.interp(x, h.edges, h._cum)
    return float(out) if np.isscalar(x) else out
