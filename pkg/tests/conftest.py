"""Shared fixtures and statistical helpers for the test suite."""

import numpy as np
import pytest

from pgnoise.fixtures import example_bundle
from pgnoise.model import ChannelParams, NoiseParams


def ks_two_sample(x, y):
    """Two-sample Kolmogorov-Smirnov statistic (both inputs 1-D)."""
    x = np.sort(np.asarray(x, dtype=np.float64))
    y = np.sort(np.asarray(y, dtype=np.float64))
    data = np.concatenate([x, y])
    cx = np.searchsorted(x, data, side="right") / x.size
    cy = np.searchsorted(y, data, side="right") / y.size
    return float(np.abs(cx - cy).max())


def ks_critical(n, m, coefficient=1.628):
    """Two-sample KS critical value; 1.628 is the 1% significance coefficient."""
    return coefficient * np.sqrt((n + m) / (n * m))


@pytest.fixture(scope="session")
def shipped_bundle():
    return example_bundle()


@pytest.fixture()
def mid_gray_params():
    """The shipped demo parameter set: one (a, b) pair per channel."""
    return NoiseParams(
        red=ChannelParams(a=0.0002, b=0.0030),
        green=ChannelParams(a=0.0001, b=0.0004),
        blue=ChannelParams(a=0.0001, b=0.0009),
    )
