"""Conditional (in)dependence testing via partial correlation and Fisher z.

The partial correlation of two vectors given a conditioning set is computed
from the joint correlation matrix (Schur complement over the conditioning
block, pseudo-inverted when rank-deficient).  Significance comes from the
Fisher z transform against the standard normal.  All vectors are centered
before testing; no variance normalization is applied because correlations
are scale-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

# Relative singular-value cutoff when pseudo-inverting a rank-deficient
# correlation matrix (collinear conditioning columns).
PINV_RCOND = 1e-10

# Residual variance share below which a partialled-out vector is considered
# fully explained by the conditioning set.
_RESIDUAL_EPS = 1e-10


@dataclass(frozen=True)
class SampleMatrix:
    """Named, equal-length observation vectors entering one CI test.

    Columns are validated for equal length and finiteness; zero-variance
    columns are recorded rather than rejected, because a flat series must
    surface as a degenerate test result instead of an exception.
    """

    columns: dict[str, np.ndarray]

    def __post_init__(self):
        lengths = {v.shape[0] for v in self.columns.values()}
        if len(lengths) != 1:
            raise ValueError(f"columns differ in length: {sorted(lengths)}")
        for name, v in self.columns.items():
            if v.ndim != 1:
                raise ValueError(f"column {name!r} is not a vector")
            if not np.all(np.isfinite(v)):
                raise ValueError(f"column {name!r} contains non-finite values")

    @property
    def n(self) -> int:
        return next(iter(self.columns.values())).shape[0]

    def constant_columns(self) -> tuple[str, ...]:
        return tuple(
            name for name, v in self.columns.items() if np.ptp(v) == 0.0
        )


@dataclass(frozen=True)
class CITestResult:
    """Outcome of one conditional independence test.

    ``degenerate`` marks tests on flat or fully-explained vectors; those are
    treated as independence evidence (r = 0, p = 1) and must be surfaced to
    the caller instead of raising mid-pipeline.
    """

    r: float
    p: float
    n_effective: int
    cond_size: int
    degenerate: bool = False


def _as_columns(x, y, cond) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    vectors = [x, y]
    for i, z in enumerate(cond):
        z = np.asarray(z, dtype=float)
        vectors.append(z)
    n = x.shape[0]
    for v in vectors:
        if v.ndim != 1 or v.shape[0] != n:
            raise ValueError(
                f"all vectors must share length {n}, got shape {v.shape}"
            )
    m = np.column_stack(vectors)
    if not np.all(np.isfinite(m)):
        raise ValueError("inputs contain non-finite values")
    return m


def _pcorr(m: np.ndarray) -> tuple[float, bool]:
    """Partial correlation of columns 0 and 1 given the rest.

    Returns ``(r, degenerate)``.  Degenerate means a constant column or a
    vector fully explained by the conditioning set; r is reported as 0.
    """
    centered = m - m.mean(axis=0)
    scale = centered.std(axis=0)
    if np.any(scale == 0.0):
        return 0.0, True
    s = centered / scale
    n = s.shape[0]
    corr = (s.T @ s) / n
    if m.shape[1] == 2:
        r = corr[0, 1]
    else:
        c_xy = corr[0, 1]
        c_xz = corr[0, 2:]
        c_yz = corr[1, 2:]
        prec_z = np.linalg.pinv(corr[2:, 2:], rcond=PINV_RCOND)
        var_x = 1.0 - c_xz @ prec_z @ c_xz
        var_y = 1.0 - c_yz @ prec_z @ c_yz
        if var_x <= _RESIDUAL_EPS or var_y <= _RESIDUAL_EPS:
            return 0.0, True
        r = (c_xy - c_xz @ prec_z @ c_yz) / math.sqrt(var_x * var_y)
    return float(np.clip(r, -1.0, 1.0)), False


def partial_correlation(x, y, cond: Sequence = ()) -> float:
    """Correlation of ``x`` and ``y`` after linearly regressing out ``cond``.

    Parameters
    ----------
    x, y : array-like of shape (n,)
    cond : sequence of array-like of shape (n,)
        Conditioning vectors; may be empty.

    Returns
    -------
    float
        Partial correlation in [-1, 1].  Zero-variance inputs or residuals
        yield 0 (degenerate; see :func:`ci_test` for the flagged variant).
    """
    m = _as_columns(x, y, cond)
    if m.shape[0] <= len(cond) + 2:
        raise ValueError(
            f"need more than |cond| + 2 = {len(cond) + 2} samples, got {m.shape[0]}"
        )
    r, _ = _pcorr(m)
    return r


def fisher_z_pvalue(r: float, n: int, cond_size: int = 0) -> float:
    """Two-sided p-value for a (partial) correlation via the Fisher z transform.

    The statistic is ``sqrt(n - cond_size - 3) * atanh(r)`` referred to the
    standard normal.  ``|r| = 1`` is clamped to p = 0.
    """
    if not -1.0 <= r <= 1.0:
        raise ValueError(f"correlation out of range: {r}")
    dof = n - cond_size - 3
    if dof < 1:
        raise ValueError(
            f"n too small for Fisher z: need n >= {cond_size + 4}, got {n}"
        )
    if abs(r) >= 1.0:
        return 0.0
    z = math.sqrt(dof) * math.atanh(r)
    p = 2.0 * stats.norm.sf(abs(z))
    return float(min(max(p, 0.0), 1.0))


def ci_test(x, y, cond: Sequence = ()) -> CITestResult:
    """Test conditional independence of ``x`` and ``y`` given ``cond``.

    Composition of :func:`partial_correlation` and :func:`fisher_z_pvalue`.
    Degenerate inputs (flat vectors, residuals fully explained by the
    conditioning set) produce ``r = 0, p = 1`` with the flag set.
    """
    m = _as_columns(x, y, cond)
    n = m.shape[0]
    k = len(cond)
    if n - k - 3 < 1:
        raise ValueError(
            f"n too small for Fisher z: need n >= {k + 4}, got {n}"
        )
    r, degenerate = _pcorr(m)
    p = 1.0 if degenerate else fisher_z_pvalue(r, n, k)
    return CITestResult(r=r, p=p, n_effective=n, cond_size=k, degenerate=degenerate)


def ci_test_matrix(matrix: SampleMatrix, x: str, y: str,
                   cond: Iterable[str] = ()) -> CITestResult:
    """Run :func:`ci_test` on named columns of a :class:`SampleMatrix`."""
    cond = list(cond)
    return ci_test(
        matrix.columns[x], matrix.columns[y], [matrix.columns[c] for c in cond]
    )
