"""Verification harness: predicted moment expansions, replicated hull
experiments, Kolmogorov-Smirnov measurements, moment identities for the hull
area, and the exact Poisson-binomial coupling bounds.

Replications are independent streams keyed by replication index, and
reductions are index-ordered, so results never depend on the thread budget.
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import ndtr

from .chain import EULER_GAMMA, summarize_counts
from .corners import build_decomposition
from .floating_body import EventParams, floating_body_probes, floating_events
from .geometry import Polygon, hull_count_and_area, polygon_metrics
from .sampling import (
    PointSample,
    RandomStream,
    replication_generator,
    uniform_points,
)

_KS_NOISE_95 = math.sqrt(math.log(2.0 / 0.05) / 2.0)  # DKW 95% half-width factor


@dataclass(frozen=True)
class PredictedMoments:
    """Closed-form vertex-count expansion values for comparison runs."""

    mean: float
    variance: float
    remainder_order: str


def predicted_moments(
    polygon: Polygon, n: float, model: str = "binomial"
) -> PredictedMoments:
    """Leading expansion of mean and variance of the hull vertex count.

    mean   = (2 ell/3) log n + (2/3) sum log(F_i/area) + 2 gamma ell/3
    var    = (10 ell/27) log n + (10/27) sum log(F_i/area) + (10 gamma - 2 pi^2) ell/27

    F_i are the corner triangle areas; only the scale-invariant ratios
    F_i/area enter, so the prediction is invariant under rescaling. The same
    expansion applies to the binomial and Poissonized models (they differ
    only in the remainder).
    """
    if n <= 1:
        raise ValueError("n must exceed 1")
    if model not in ("binomial", "poisson"):
        raise ValueError("model must be 'binomial' or 'poisson'")
    metrics = polygon_metrics(polygon)
    ell = metrics.ell
    log_ratio_sum = float(np.log(metrics.corner_areas / metrics.total_area).sum())
    log_n = math.log(n)
    mean = (2.0 * ell / 3.0) * log_n + (2.0 / 3.0) * log_ratio_sum + (
        2.0 * EULER_GAMMA * ell / 3.0
    )
    variance = (
        (10.0 * ell / 27.0) * log_n
        + (10.0 / 27.0) * log_ratio_sum
        + (10.0 * EULER_GAMMA - 2.0 * math.pi**2) * ell / 27.0
    )
    return PredictedMoments(
        mean=mean,
        variance=variance,
        remainder_order="(log n)^2 n^(-1/4) for the mean, (log n)^4 n^(-1/4) for the variance",
    )


@dataclass(frozen=True)
class EventRates:
    regular: float
    covered: float
    wet_count_ok: float


@dataclass(frozen=True)
class ExperimentConfig:
    """Configuration of a replicated hull experiment."""

    container: Polygon
    model: str  # "binomial" | "poisson"
    n: float
    reps: int
    root_seed: int = 0
    stream_index: int | tuple[int, ...] = 0
    threads: int = 1
    event_params: EventParams | None = None
    keep_sample: bool = False

    def __post_init__(self):
        if self.model not in ("binomial", "poisson"):
            raise ValueError("model must be 'binomial' or 'poisson'")
        if self.reps < 2:
            raise ValueError("need at least 2 replications")
        if self.model == "binomial" and (self.n < 3 or self.n != int(self.n)):
            raise ValueError("binomial model needs integer n >= 3")
        if self.n < 0:
            raise ValueError("n must be nonnegative")

    @property
    def stream(self) -> RandomStream:
        return RandomStream(self.root_seed, self.stream_index)


@dataclass(frozen=True)
class ExperimentSummary:
    """Replication summary of the hull vertex count."""

    reps: int
    mean: float
    variance: float
    stderr_mean: float
    stderr_var: float
    ks: float
    event_rates: EventRates | None
    wall_time: float
    vertex_counts: np.ndarray | None = None


def _vertex_count_block(args) -> np.ndarray:
    (vertices, model, n, keys, start, stop, want_area, event_params) = args
    polygon = Polygon(vertices, validate=False)
    counts = np.empty(stop - start, dtype=np.int64)
    areas = np.empty(stop - start) if want_area else None
    events = np.empty((stop - start, 3), dtype=bool) if event_params else None
    probes = None
    if event_params:
        delta = event_params.b0 * math.log(n) / n
        try:
            probes = floating_body_probes(polygon, delta)
        except ValueError:
            probes = None
    for i in range(start, stop):
        gen = replication_generator(keys, i)
        m = int(n) if model == "binomial" else int(gen.poisson(n))
        pts = uniform_points(polygon, m, gen)
        k, area = hull_count_and_area(pts[:, 0], pts[:, 1])
        counts[i - start] = k
        if want_area:
            areas[i - start] = area
        if event_params:
            sample = PointSample(pts, model, n, polygon)
            if m == 0:
                events[i - start] = (False, False, True)
            else:
                dec = build_decomposition(polygon, sample, n)
                fl = floating_events(polygon, sample, n, event_params, probes)
                events[i - start] = (dec.is_regular, fl.covered, fl.wet_count_ok)
    out = [counts]
    if want_area:
        out.append(areas)
    if event_params:
        out.append(events)
    return out


def _run_blocks(worker, jobs, threads: int):
    if threads <= 1 or len(jobs) <= 1:
        return [worker(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, jobs))


def _hull_batches(
    polygon: Polygon,
    model: str,
    n: float,
    reps: int,
    stream: RandomStream,
    threads: int = 1,
    want_area: bool = False,
    event_params: EventParams | None = None,
):
    keys = stream.replication_keys(reps)
    blocks = max(1, min(threads * 8, reps)) if threads > 1 else 1
    bounds = np.linspace(0, reps, blocks + 1, dtype=int)
    jobs = [
        (
            np.asarray(polygon.vertices),
            model,
            n,
            keys,
            int(bounds[b]),
            int(bounds[b + 1]),
            want_area,
            event_params,
        )
        for b in range(blocks)
        if bounds[b + 1] > bounds[b]
    ]
    results = _run_blocks(_vertex_count_block, jobs, threads)
    counts = np.concatenate([r[0] for r in results])
    areas = np.concatenate([r[1] for r in results]) if want_area else None
    events = None
    if event_params:
        events = np.concatenate([r[-1] for r in results], axis=0)
    return counts, areas, events


def run_experiment(cfg: ExperimentConfig) -> ExperimentSummary:
    """Replicated hull vertex counts with moments, KS and event rates.

    Degenerate hulls (possible under the Poisson model at small n) are
    recorded with their number of extreme points, 0, 1 or 2. The KS column
    standardizes by the sample mean and standard deviation; it is NaN when
    the sample is degenerate.
    """
    t0 = time.perf_counter()
    counts, _, events = _hull_batches(
        cfg.container,
        cfg.model,
        cfg.n,
        cfg.reps,
        cfg.stream,
        threads=cfg.threads,
        event_params=cfg.event_params,
    )
    stats = summarize_counts(counts)
    sd = math.sqrt(stats.variance)
    ks = ks_to_normal(counts, stats.mean, sd) if sd > 0 else float("nan")
    rates = None
    if events is not None:
        rates = EventRates(
            regular=float(events[:, 0].mean()),
            covered=float(events[:, 1].mean()),
            wet_count_ok=float(events[:, 2].mean()),
        )
    return ExperimentSummary(
        reps=cfg.reps,
        mean=stats.mean,
        variance=stats.variance,
        stderr_mean=stats.stderr_mean,
        stderr_var=stats.stderr_var,
        ks=ks,
        event_rates=rates,
        wall_time=time.perf_counter() - t0,
        vertex_counts=counts if cfg.keep_sample else None,
    )


def ks_to_normal(sample, mean: float, sd: float) -> float:
    """Exact Kolmogorov-Smirnov distance of the standardized sample to the
    standard normal, evaluated on both sides of every atom."""
    values = np.asarray(sample, dtype=np.float64)
    if values.size == 0:
        raise ValueError("sample is empty")
    if sd <= 0:
        raise ValueError("standard deviation must be positive")
    z = np.sort((values - mean) / sd)
    uniq, counts = np.unique(z, return_counts=True)
    cum_after = np.cumsum(counts) / values.size
    cum_before = cum_after - counts / values.size
    phi = ndtr(uniq)
    return float(
        max(np.abs(phi - cum_after).max(), np.abs(phi - cum_before).max())
    )


def ks_noise_width(reps: int) -> float:
    """95% DKW half-width: the resolution floor of a KS estimate."""
    return _KS_NOISE_95 / math.sqrt(reps)


@dataclass(frozen=True)
class RateRow:
    """One row of a Berry-Esseen rate table."""

    n: float
    reps: int
    mean: float
    variance: float
    ks: float
    ks_scaled: float  # ks * sqrt(log n)
    noise: float
    small_sample_warning: bool


def berry_esseen_curve(
    polygon: Polygon,
    n_list,
    reps: int,
    stream: RandomStream,
    model: str = "binomial",
    threads: int = 1,
    standardize: str = "sample",
) -> list[RateRow]:
    """KS distance to normal across n, scaled by sqrt(log n).

    `standardize` selects the centering/scaling of the counts: "sample" uses
    the sample mean and standard deviation, "predicted" the closed-form
    expansion values.
    """
    if standardize not in ("sample", "predicted"):
        raise ValueError("standardize must be 'sample' or 'predicted'")
    rows = []
    for idx, n in enumerate(n_list):
        if n <= math.e:
            raise ValueError("each n must exceed e for the sqrt(log n) scale")
        cfg = ExperimentConfig(
            container=polygon,
            model=model,
            n=n,
            reps=reps,
            root_seed=stream.root_seed,
            stream_index=stream.split(idx).stream_index,
            threads=threads,
            keep_sample=True,
        )
        summary = run_experiment(cfg)
        counts = summary.vertex_counts
        if standardize == "sample":
            center, scale = summary.mean, math.sqrt(summary.variance)
        else:
            pred = predicted_moments(polygon, n, model)
            center, scale = pred.mean, math.sqrt(pred.variance)
        ks = ks_to_normal(counts, center, scale)
        noise = ks_noise_width(reps)
        rows.append(
            RateRow(
                n=n,
                reps=reps,
                mean=summary.mean,
                variance=summary.variance,
                ks=ks,
                ks_scaled=ks * math.sqrt(math.log(n)),
                noise=noise,
                small_sample_warning=noise > 0.1,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Efron / Buchta identities


@dataclass(frozen=True)
class IdentityCheck:
    """Two-sided Monte Carlo check of an exact moment identity."""

    name: str
    n: int
    reps: int
    lhs: float
    rhs: float
    lhs_stderr: float
    rhs_stderr: float

    @property
    def diff(self) -> float:
        return self.lhs - self.rhs

    @property
    def combined_stderr(self) -> float:
        return math.hypot(self.lhs_stderr, self.rhs_stderr)


def efron_check(
    polygon: Polygon, n: int, reps: int, stream: RandomStream, threads: int = 1
) -> IdentityCheck:
    """Efron identity: E area(hull_n)/area = 1 - E f0(hull_{n+1})/(n+1).

    The two sides use independent streams so the combined standard error is
    exact.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    _, areas, _ = _hull_batches(
        polygon, "binomial", n, reps, stream.split(0), threads, want_area=True
    )
    ratio = areas / polygon.area
    lhs = float(ratio.mean())
    lhs_se = float(ratio.std(ddof=1)) / math.sqrt(reps)
    counts, _, _ = _hull_batches(
        polygon, "binomial", n + 1, reps, stream.split(1), threads
    )
    rhs = 1.0 - float(counts.mean()) / (n + 1)
    rhs_se = float(counts.std(ddof=1)) / ((n + 1) * math.sqrt(reps))
    return IdentityCheck("efron", n, reps, lhs, rhs, lhs_se, rhs_se)


def buchta_rhs(n: int, mean_n1: float, mean_n2: float, var_n2: float) -> float:
    """Right side of Buchta's identity from vertex-count moments at n+1, n+2."""
    a = mean_n2**2 - (n + 2) / (n + 1) * mean_n1**2
    b = (2 * n + 3) * mean_n2 - 2 * (n + 2) * mean_n1
    return (var_n2 + a - b) / ((n + 1) * (n + 2))


def buchta_check(
    polygon: Polygon, n: int, reps: int, stream: RandomStream, threads: int = 1
) -> IdentityCheck:
    """Buchta identity: Var area(hull_n)/area^2 expressed through the first
    two vertex-count moments at n+1 and n+2 points.

    The area run and the two moment runs use three independent streams; the
    right-side standard error comes from the delta method including the
    within-run covariance of mean and variance estimates.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    _, areas, _ = _hull_batches(
        polygon, "binomial", n, reps, stream.split(0), threads, want_area=True
    )
    ratio = areas / polygon.area
    stats_area = summarize_counts(ratio)
    lhs = stats_area.variance
    lhs_se = stats_area.stderr_var

    counts1, _, _ = _hull_batches(
        polygon, "binomial", n + 1, reps, stream.split(1), threads
    )
    counts2, _, _ = _hull_batches(
        polygon, "binomial", n + 2, reps, stream.split(2), threads
    )
    m1 = float(counts1.mean())
    var1 = float(counts1.var(ddof=1))
    s2 = summarize_counts(counts2)
    m2, v2 = s2.mean, s2.variance
    rhs = buchta_rhs(n, m1, m2, v2)

    k = (n + 1) * (n + 2)
    g1 = (-2.0 * (n + 2) / (n + 1) * m1 + 2.0 * (n + 2)) / k
    g2 = (2.0 * m2 - (2 * n + 3)) / k
    g3 = 1.0 / k
    centered2 = counts2 - m2
    m3_2 = float((centered2**3).mean())
    cov_mean_var = m3_2 / reps
    rhs_var = (
        g1 * g1 * var1 / reps
        + g2 * g2 * v2 / reps
        + g3 * g3 * s2.stderr_var**2
        + 2.0 * g2 * g3 * cov_mean_var
    )
    return IdentityCheck(
        "buchta", n, reps, lhs, rhs, lhs_se, math.sqrt(max(rhs_var, 0.0))
    )


def binomial_poisson_gap(
    polygon: Polygon, n: float, reps: int, stream: RandomStream, threads: int = 1
) -> tuple[float, float]:
    """Difference of mean vertex counts between the binomial and Poisson
    models at the same n, with its standard error (de-Poissonization
    diagnostic; shrinks as n grows)."""
    cfg = ExperimentConfig(
        container=polygon,
        model="binomial",
        n=n,
        reps=reps,
        root_seed=stream.root_seed,
        stream_index=stream.split(0).stream_index,
        threads=threads,
    )
    b = run_experiment(cfg)
    p = run_experiment(
        replace(cfg, model="poisson", stream_index=stream.split(1).stream_index)
    )
    gap = b.mean - p.mean
    se = math.hypot(b.stderr_mean, p.stderr_mean)
    return gap, se


# ---------------------------------------------------------------------------
# Poisson-binomial coupling bound (Vervaat)


@dataclass(frozen=True)
class VervaatCheck:
    n: int
    p: float
    k: int
    total: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.total <= self.bound


def vervaat_values(n: int, p: float, k: int) -> VervaatCheck:
    """Exact weighted absolute difference of Poisson(np) and Binomial(n, p)
    mass functions together with the closed-form coupling bound.

    Sums m^k |pmf difference| with log-gamma evaluation and a compensated
    difference of exponentials; terms are accumulated with exact float
    summation until they fall below 1e-18 beyond m = np + 50 sqrt(np + 1).
    """
    if n < 1 or not (0.0 < p < 1.0) or k not in (0, 1, 2):
        raise ValueError("need n >= 1, p in (0, 1) and k in {0, 1, 2}")
    lam = n * p
    log_lam = math.log(lam)
    log_p = math.log(p)
    log_q = math.log1p(-p)
    m_safe = lam + 50.0 * math.sqrt(lam + 1.0)
    terms = []
    m = 0
    while True:
        log_pois = m * log_lam - lam - math.lgamma(m + 1)
        if m <= n:
            log_binom = (
                math.lgamma(n + 1)
                - math.lgamma(m + 1)
                - math.lgamma(n - m + 1)
                + m * log_p
                + (n - m) * log_q
            )
            hi = max(log_pois, log_binom)
            diff = math.exp(hi) * -math.expm1(-abs(log_pois - log_binom))
        else:
            diff = math.exp(log_pois)
        term = diff if k == 0 else (m**k) * diff
        terms.append(term)
        if m > m_safe and term < 1e-18:
            break
        m += 1
    total = math.fsum(terms)
    if k == 0:
        bound = 2.0 * p
    elif k == 1:
        bound = 2.0 * n * p * p
    else:
        bound = 2.0 * n * p * p * (1.0 + n * p)
    return VervaatCheck(n=n, p=p, k=k, total=total, bound=bound)


def vervaat_check(n: int, p: float, k: int) -> VervaatCheck:
    """`vervaat_values` plus the assertion that the bound holds (it must)."""
    check = vervaat_values(n, p, k)
    assert check.holds, f"coupling bound violated: {check.total} > {check.bound}"
    return check


def vervaat_default_grid() -> list[tuple[int, float, int]]:
    """The 27-point (n, p, k) verification grid."""
    return [
        (n, p, k)
        for n in (10, 100, 1000)
        for p in (1e-3, 1e-2, 1e-1)
        for k in (0, 1, 2)
    ]


def default_threads() -> int:
    return max(1, os.cpu_count() or 1)
