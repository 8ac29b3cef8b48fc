"""Poisson-count kernel tests: backend parity, distribution, cap behavior."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.stats

from pgnoise import _kernels
from pgnoise.errors import InvalidInputError

HAVE_COMPILED = "compiled" in _kernels.available_backends()


def _mode_seed(lam):
    """kmode/pmode inputs for the exact branch, zeros where unused."""
    lam = np.asarray(lam, dtype=np.float64)
    kmode = np.zeros(lam.shape, dtype=np.int64)
    pmode = np.zeros(lam.shape)
    exact = (lam > 0.0) & (lam <= _kernels.LAM_EXACT_MAX)
    lx = lam[exact]
    kx = np.floor(lx).astype(np.int64)
    kmode[exact] = kx
    lgamma = np.vectorize(math.lgamma, otypes=[np.float64])
    pmode[exact] = np.exp(kx * np.log(lx) - lx - lgamma(kx + 1.0))
    return pmode, kmode


def _mixture_lams(rng, n):
    """Lambda values spanning every kernel regime, shuffled together."""
    parts = [
        np.zeros(n // 8),
        10.0 ** rng.uniform(-12, -3, n // 8),
        10.0 ** rng.uniform(-3, 1.5, n // 4),
        rng.uniform(30.0, 999.999, n // 4),
        rng.uniform(999.999, 1000.0, n // 16),
        10.0 ** rng.uniform(3.0, 7.5, n - (n // 8) * 2 - (n // 4) * 2 - n // 16),
    ]
    lam = np.concatenate(parts)
    rng.shuffle(lam)
    return lam


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled backend unavailable")
def test_backends_bit_identical():
    rng = np.random.default_rng(77001)
    n = 200_000
    lam = _mixture_lams(rng, n)
    pmode, kmode = _mode_seed(lam)
    u = rng.random(n)
    gp = rng.standard_normal(n)
    out_c = _kernels._BACKENDS["compiled"].poisson_counts(
        lam, pmode, kmode, u, gp,
        _kernels.LAM_EXACT_MAX, _kernels.MAX_INVERT_STEPS)
    out_n = _kernels._BACKENDS["numpy"].poisson_counts(
        lam, pmode, kmode, u, gp,
        _kernels.LAM_EXACT_MAX, _kernels.MAX_INVERT_STEPS)
    assert np.asarray(out_c).tobytes() == np.asarray(out_n).tobytes()


def test_zero_lambda_gives_zero_counts():
    lam = np.zeros(100)
    pmode, kmode = _mode_seed(lam)
    rng = np.random.default_rng(1)
    out = _kernels.poisson_counts(lam, pmode, kmode, rng.random(100),
                                  rng.standard_normal(100))
    assert np.all(out == 0.0)


@pytest.mark.parametrize("lam_value", [0.3, 3.7, 80.0, 743.5, 999.9])
def test_exact_branch_matches_poisson_pmf(lam_value):
    # chi-square goodness of fit against the reference pmf; 743.5 sits past
    # the exp(-lam) underflow point that breaks 0-anchored inversion
    n = 200_000
    rng = np.random.default_rng(int(lam_value * 1000) + 5)
    lam = np.full(n, lam_value)
    pmode, kmode = _mode_seed(lam)
    counts = _kernels.poisson_counts(lam, pmode, kmode, rng.random(n),
                                     rng.standard_normal(n))
    assert np.all(counts >= 0)
    assert np.all(counts == np.floor(counts))

    lo = max(0, int(lam_value - 8 * math.sqrt(lam_value) - 8))
    hi = int(lam_value + 8 * math.sqrt(lam_value) + 8)
    ks = np.arange(lo, hi + 1)
    pmf = scipy.stats.poisson.pmf(ks, lam_value)
    observed = np.array([(counts == k).sum() for k in ks], dtype=np.float64)
    observed = np.concatenate([[(counts < lo).sum()], observed, [(counts > hi).sum()]])
    expected = n * np.concatenate([[scipy.stats.poisson.cdf(lo - 1, lam_value)],
                                   pmf,
                                   [scipy.stats.poisson.sf(hi, lam_value)]])
    # pool cells until every expected count is reasonable
    keep = expected >= 5.0
    obs = np.append(observed[keep], observed[~keep].sum())
    exp = np.append(expected[keep], expected[~keep].sum())
    if exp[-1] == 0.0:
        obs, exp = obs[:-1], exp[:-1]
    stat, p = scipy.stats.chisquare(obs, exp * (obs.sum() / exp.sum()))
    assert p > 1e-4, f"lam={lam_value}: chi2={stat:.1f} p={p:.2e}"


def test_approx_branch_is_rounded_gaussian():
    n = 50_000
    rng = np.random.default_rng(4242)
    lam = np.full(n, 5.0e4)
    pmode, kmode = _mode_seed(lam)
    u = rng.random(n)
    gp = rng.standard_normal(n)
    out = _kernels.poisson_counts(lam, pmode, kmode, u, gp)
    manual = np.maximum(np.rint(lam + np.sqrt(lam) * gp), 0.0)
    assert np.array_equal(out, manual)
    assert abs(out.mean() - 5.0e4) < 5 * math.sqrt(5.0e4 / n)
    assert abs(out.var() / 5.0e4 - 1.0) < 5 * math.sqrt(2.0 / n)


def test_branch_switch_at_threshold():
    # just-below threshold values go through inversion (driven by u),
    # just-above through the normal approximation (driven by gp)
    rng = np.random.default_rng(9)
    n = 1000
    below = np.full(n, _kernels.LAM_EXACT_MAX)
    above = np.full(n, np.nextafter(_kernels.LAM_EXACT_MAX, np.inf))
    u = rng.random(n)
    gp = rng.standard_normal(n)
    pm_b, km_b = _mode_seed(below)
    pm_a, km_a = _mode_seed(above)
    out_above = _kernels.poisson_counts(above, pm_a, km_a, u, gp)
    manual = np.maximum(np.rint(above + np.sqrt(above) * gp), 0.0)
    assert np.array_equal(out_above, manual)
    out_below = _kernels.poisson_counts(below, pm_b, km_b, u, gp)
    assert not np.array_equal(out_below, manual)


def test_step_cap_falls_back_to_mode():
    # a u essentially at 1 cannot be resolved in two steps; the kernel must
    # return the mode rather than loop
    lam = np.array([10.0])
    pmode, kmode = _mode_seed(lam)
    u = np.array([1.0 - 1e-15])
    gp = np.zeros(1)
    out = _kernels.poisson_counts(lam, pmode, kmode, u, gp, max_steps=2)
    assert out[0] == 10.0
    full = _kernels.poisson_counts(lam, pmode, kmode, u, gp)
    assert full[0] > 10.0


def test_mean_variance_sweep():
    rng = np.random.default_rng(515)
    for lam_value in (0.05, 1.0, 12.0, 400.0, 2.0e4):
        n = 200_000
        lam = np.full(n, lam_value)
        pmode, kmode = _mode_seed(lam)
        out = _kernels.poisson_counts(lam, pmode, kmode, rng.random(n),
                                      rng.standard_normal(n))
        se_mean = math.sqrt(lam_value / n)
        assert abs(out.mean() - lam_value) < 5 * se_mean + 1e-12
        # Poisson variance-of-variance ~ lam*(1+2*lam)/n
        se_var = math.sqrt(lam_value * (1.0 + 2.0 * lam_value) / n)
        assert abs(out.var() - lam_value) < 5 * se_var + 1e-12


def test_backend_selection_roundtrip():
    original = _kernels.active_backend()
    try:
        for name in _kernels.available_backends():
            _kernels.set_backend(name)
            assert _kernels.active_backend() == name
        with pytest.raises(InvalidInputError):
            _kernels.set_backend("no-such-backend")
    finally:
        _kernels.set_backend(original)


def test_backend_env_override():
    env = dict(os.environ, PGNOISE_BACKEND="numpy")
    out = subprocess.run(
        [sys.executable, "-c",
         "import pgnoise._kernels as k; print(k.active_backend())"],
        capture_output=True, text=True, env=env,
    )
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() == "numpy"

    env["PGNOISE_BACKEND"] = "bogus"
    out = subprocess.run(
        [sys.executable, "-c", "import pgnoise._kernels"],
        capture_output=True, text=True, env=env,
    )
    assert out.returncode != 0
    assert "bogus" in out.stderr
