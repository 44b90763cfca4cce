"""Chain traces and sampling-efficiency diagnostics.

Three effective-sample-size estimators are provided: batch means,
autocovariance with the initial-monotone-positive truncation, and a
known-moment batch-means variant that centers at the true mean and scales by
the true variance. The known-moment variant keeps reporting small values
when a chain has not actually converged, which the plain estimators can miss;
the headline statistic is the minimum over everything computed. Degenerate
(zero-variance) chains yield an infinite sentinel rather than an error so
that benchmark sweeps keep running.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .targets import KnownMargin


@dataclass
class ChainTrace:
    """Raw output of a run: one row per iteration.

    ``n_leapfrog`` is the per-iteration leapfrog count; the total over the
    trace is exposed as a property so it can never disagree with the rows.
    """

    positions: np.ndarray
    eps_t: np.ndarray
    accepted: np.ndarray
    reversibility_ok: np.ndarray
    alpha: np.ndarray
    n_leapfrog: np.ndarray
    fingerprint: str = ""

    def __post_init__(self):
        self.positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        self.eps_t = np.asarray(self.eps_t, dtype=float)
        self.accepted = np.asarray(self.accepted, dtype=bool)
        self.reversibility_ok = np.asarray(self.reversibility_ok, dtype=bool)
        self.alpha = np.asarray(self.alpha, dtype=float)
        self.n_leapfrog = np.asarray(self.n_leapfrog, dtype=np.int64)
        n = self.positions.shape[0]
        for name in ("eps_t", "accepted", "reversibility_ok", "alpha", "n_leapfrog"):
            if getattr(self, name).shape != (n,):
                raise ValueError(f"trace field {name} length does not match positions")

    def __len__(self) -> int:
        return self.positions.shape[0]

    @property
    def n_leapfrog_total(self) -> int:
        return int(self.n_leapfrog.sum())


@dataclass
class EssReport:
    """Per-coordinate and aggregate effective sample sizes.

    ``min_ess`` is the minimum over every estimator computed; ``degenerate``
    flags the case where all of them hit the infinite sentinel.
    """

    ess_batch: float
    ess_autocov: float
    ess_known: Optional[float]
    min_ess: float
    per_coordinate: list[dict] = field(default_factory=list)
    degenerate: bool = False


def _batch_layout(n: int) -> tuple[int, int]:
    m = math.isqrt(n)
    return m, n // m


def ess_batch_means(chain) -> float:
    """Batch-means ESS of a scalar chain; +inf when the batch variance is 0.

    Batch size floor(sqrt(T)); the trailing remainder is dropped. The
    asymptotic variance uses the batch means around their grand mean with
    B - 1 degrees of freedom; the numerator variance is the full-chain
    sample variance.
    """
    x = np.asarray(chain, dtype=float).ravel()
    n = x.size
    if n < 4:
        raise ValueError(f"batch-means ESS requires at least 4 samples, got {n}")
    if float(np.ptp(x)) == 0.0:
        # A truly constant chain: summation dust can make the variances
        # formally nonzero, so detect degeneracy from the values.
        return math.inf
    m, n_batches = _batch_layout(n)
    batches = x[: m * n_batches].reshape(n_batches, m)
    batch_means = batches.mean(axis=1)
    grand_mean = batches.mean()
    var_asym = m * float(np.sum((batch_means - grand_mean) ** 2)) / (n_batches - 1)
    var_chain = float(x.var(ddof=1))
    if var_asym <= 0.0 or var_chain == 0.0:
        return math.inf
    return n * var_chain / var_asym


def ess_known_moments(chain, mu: float, sigma: float) -> float:
    """Batch-means ESS centered at the known mean and scaled by the known sd.

    Centering at the true mean loses no degrees of freedom (divide by B) and
    makes the estimator sensitive to a chain sitting at the wrong location
    or scale.
    """
    x = np.asarray(chain, dtype=float).ravel()
    n = x.size
    if n < 4:
        raise ValueError(f"known-moment ESS requires at least 4 samples, got {n}")
    if not sigma > 0.0:
        raise ValueError(f"known standard deviation must be positive, got {sigma}")
    m, n_batches = _batch_layout(n)
    if float(np.ptp(x)) == 0.0:
        # Constant chains bypass batch summation dust: pinned at the known
        # mean they are degenerate, anywhere else they are maximally stuck.
        var_asym = m * (float(x[0]) - mu) ** 2
    else:
        batches = x[: m * n_batches].reshape(n_batches, m)
        batch_means = batches.mean(axis=1)
        var_asym = m * float(np.mean((batch_means - mu) ** 2))
    if var_asym == 0.0:
        return math.inf
    return n * sigma * sigma / var_asym


def _autocorrelations(x: np.ndarray) -> np.ndarray:
    """Biased autocorrelation estimates at lags 0..n-1 via FFT."""
    n = x.size
    centered = x - x.mean()
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(centered, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[:n] / n
    if acov[0] <= 0.0:
        return np.zeros(n)
    return acov / acov[0]


def ess_autocov(chain) -> float:
    """Autocovariance ESS with initial-monotone-positive truncation.

    The integrated autocorrelation time sums pairwise lag sums while they
    remain positive, forcing them non-increasing. The result is clamped to
    (0, 10 T]; a zero-variance chain yields the +inf sentinel.
    """
    x = np.asarray(chain, dtype=float).ravel()
    n = x.size
    if n < 8:
        raise ValueError(f"autocovariance ESS requires at least 8 samples, got {n}")
    if float(np.ptp(x)) == 0.0:
        return math.inf
    rho = _autocorrelations(x)
    n_pairs = n // 2
    pair_sums = rho[0 : 2 * n_pairs : 2] + rho[1 : 2 * n_pairs : 2]
    tau = -1.0
    cap = math.inf
    for g in pair_sums:
        if g <= 0.0:
            break
        g = min(float(g), cap)
        cap = g
        tau += 2.0 * g
    if tau <= 0.0:
        return 10.0 * n
    return float(min(n / tau, 10.0 * n))


def min_ess(chain, known_margin: Optional[KnownMargin] = None) -> EssReport:
    """Minimum ESS across coordinates, estimators, and the known margin.

    ``chain`` is (T,) or (T, d). Batch-means and autocovariance ESS are
    computed per coordinate; the known-moment estimator is added on the
    margin whose true moments are available.
    """
    arr = np.asarray(chain, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    per_coordinate = []
    for i in range(arr.shape[1]):
        col = arr[:, i]
        per_coordinate.append(
            {"coordinate": i, "batch": ess_batch_means(col), "autocov": ess_autocov(col)}
        )
    ess_batch = min(rec["batch"] for rec in per_coordinate)
    ess_auto = min(rec["autocov"] for rec in per_coordinate)
    candidates = [ess_batch, ess_auto]
    ess_known = None
    if known_margin is not None:
        ess_known = ess_known_moments(
            arr[:, known_margin.index], known_margin.mean, known_margin.std
        )
        candidates.append(ess_known)
    overall = min(candidates)
    return EssReport(
        ess_batch=ess_batch,
        ess_autocov=ess_auto,
        ess_known=ess_known,
        min_ess=overall,
        per_coordinate=per_coordinate,
        degenerate=math.isinf(overall),
    )


def ks_statistic(sample, cdf: Callable) -> float:
    """One-sample Kolmogorov-Smirnov statistic against ``cdf``."""
    x = np.sort(np.asarray(sample, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise ValueError("KS statistic requires a non-empty sample")
    try:
        f = np.asarray(cdf(x), dtype=float)
        if f.shape != x.shape:
            raise TypeError
    except (TypeError, ValueError):
        f = np.array([float(cdf(v)) for v in x])
    i = np.arange(1, n + 1, dtype=float)
    d_plus = float(np.max(i / n - f))
    d_minus = float(np.max(f - (i - 1.0) / n))
    return max(d_plus, d_minus)


def leapfrogs_per_kiloess(
    trace: ChainTrace, report: EssReport, n_leapfrog_total: Optional[int] = None
) -> float:
    """Leapfrog evaluations per 1000 effective samples; NaN when undefined.

    ``n_leapfrog_total`` overrides the trace's own counter so that warmup
    rounds can be charged against samples retained from the final round.
    """
    total = trace.n_leapfrog_total if n_leapfrog_total is None else int(n_leapfrog_total)
    if not (report.min_ess > 0.0) or math.isinf(report.min_ess):
        return math.nan
    return 1000.0 * total / report.min_ess
