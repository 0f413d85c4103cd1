import logging

import numpy as np
from scipy import stats

from teamrules.onto import DataError

logger = logging.getLogger(__name__)

# losses are averages over test rows; differences below this are rounding
DIFF_TOL = 1e-12


def paired_ttest(a, b) -> float:
    """One-sided paired t-test p-value for mean(a) < mean(b).

    When all paired differences are equal the t statistic is undefined; the
    p-value is then 0 for a negative difference, 0.5 for none and 1 for a
    positive one.
    """
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DataError("paired samples must be vectors of equal length")
    if a.size < 2:
        raise DataError("a paired t-test needs at least two pairs")
    diff = a - b
    if np.allclose(diff, diff[0], rtol=0.0, atol=DIFF_TOL):
        mean = float(diff.mean())
        if abs(mean) <= DIFF_TOL:
            return 0.5
        return 0.0 if mean < 0 else 1.0
    return float(stats.ttest_rel(a, b, alternative="less").pvalue)


def spearman(x, y) -> float:
    """Spearman rank correlation; 0 when either input is constant."""
    x, y = np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return 0.0
    return float(stats.spearmanr(x, y)[0])


def mean_se(values) -> tuple[float, float]:
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        return float(values.mean()), 0.0
    return float(values.mean()), float(stats.sem(values))
