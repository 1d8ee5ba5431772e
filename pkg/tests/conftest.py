import numpy as np
import pytest

from orlicz_bounds import GammaParams, quantize

# Water-quality fixtures: total nitrogen and total phosphorus gamma fits.
TN = GammaParams(a=4.60, b=0.142)
TP = GammaParams(a=0.801, b=0.0541)

TN_MEAN, TN_VAR = 0.653, 0.0926
TP_MEAN, TP_VAR = 0.0434, 0.00235


@pytest.fixture(scope="session")
def tn_sample():
    """Full-resolution TN discretization (N = 8192)."""
    return quantize(TN, 13)


@pytest.fixture(scope="session")
def tp_sample():
    return quantize(TP, 13)


@pytest.fixture(scope="session")
def tn_small():
    """Coarse TN discretization for solver-heavy property tests."""
    return quantize(TN, 8)


@pytest.fixture(scope="session")
def tp_small():
    return quantize(TP, 8)


def constant_payoff(c):
    return lambda u: np.full_like(np.asarray(u, dtype=float), c)


def sample_with_moments(mean, variance, k=1000):
    """Deterministic positive sample with exact mean and unbiased variance.

    Nine tenths of the points sit a little below the mean, one tenth
    proportionally further above, which keeps every value positive even
    when the coefficient of variation exceeds one.
    """
    n_low = (9 * k) // 10
    n_high = k - n_low
    d_low = np.sqrt(variance * (k - 1) / k * n_high / n_low)
    d_high = d_low * n_low / n_high
    values = np.concatenate([np.full(n_low, mean - d_low),
                             np.full(n_high, mean + d_high)])
    assert np.all(values > 0.0)
    return values
