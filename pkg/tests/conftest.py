import numpy as np
import pytest

from rayprod import ChannelConfig, sample_frobenius


@pytest.fixture(scope="session")
def samples_2784():
    """10^6 seeded draws of X for dims [2,7,8,4]; shared across modules."""
    return sample_frobenius(ChannelConfig((2, 7, 8, 4)), 10**6, 0)


def sup_distance(model_cdf_at_sorted: np.ndarray, n: int) -> float:
    """Sup distance between a continuous CDF and the ECDF of n sorted samples."""
    ranks = np.arange(1, n + 1) / n
    upper = np.max(np.abs(model_cdf_at_sorted - ranks))
    lower = np.max(np.abs(model_cdf_at_sorted - (ranks - 1.0 / n)))
    return float(max(upper, lower))
