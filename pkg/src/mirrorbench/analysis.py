"""Decay fitting, bootstrap intervals, frame-potential estimation, scatter runs.

The survival data of a mirror experiment is fit to

    p(L) = A * u**(L - 1) + B,      B fixed to 1/2**n,

with inverse-variance weights from binomial standard errors.  The fitted ``u``
estimates the unitarity of the per-layer error channel; ``A`` absorbs state
preparation, measurement, and the first-layer contraction ``f``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import least_squares

from .channels import Depolarizing, depolarizing_tensor_unitarity
from .circuits import sample_experiment
from .operators import CLIFFORD_UNITARIES
from .simulator import DecayDataset, NoiseModel, simulate_survival

SE_FLOOR = 1e-4
CI_PERCENTILES = (16.0, 84.0)
DEFAULT_RESAMPLES = 1000

_GRID_STARTS = (0.3, 0.6, 0.8, 0.9, 0.95, 0.99)


def _as_rng(rng: Union[None, int, np.random.Generator]) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


# ---------------------------------------------------------------------------
# Decay fitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FitResult:
    """Result of the fixed-baseline exponential fit.

    ``bootstrap_ci`` is the 68% percentile interval for ``u`` when a bootstrap
    was run (``resamples`` then records the resample count).
    """

    amplitude: float
    u: float
    baseline: float
    residual_norm: float
    n_qubits: int
    degenerate: bool
    bootstrap_ci: Optional[tuple] = None
    resamples: Optional[int] = None
    ci_percentiles: tuple = CI_PERCENTILES

    def predict(self, length) -> np.ndarray:
        length = np.asarray(length, dtype=float)
        return self.amplitude * self.u ** (length - 1.0) + self.baseline


def survival_points(dataset: DecayDataset) -> tuple:
    """Aggregate a dataset into per-length survival estimates.

    Returns ``(lengths, p_hat, se)``: mean per-circuit success rate at each
    length and a pooled binomial standard error with a small floor.
    """
    groups = {}
    for e in dataset.entries:
        groups.setdefault(e.length, []).append(e)
    lengths = np.array(sorted(groups), dtype=float)
    p_hat = np.empty_like(lengths)
    se = np.empty_like(lengths)
    for i, length in enumerate(lengths):
        entries = groups[int(length)]
        rates = np.array([e.successes / e.shots for e in entries])
        total = sum(e.shots for e in entries)
        p = float(rates.mean())
        p_hat[i] = p
        se[i] = max(math.sqrt(max(p * (1.0 - p), 0.0) / total), SE_FLOOR)
    return lengths, p_hat, se


def _fit_points(lengths: np.ndarray, p_hat: np.ndarray, se: np.ndarray,
                baseline: float, starts=None) -> tuple:
    """Weighted least squares for (A, u); returns (A, u, residual_norm)."""
    y = p_hat - baseline

    def residuals(params):
        a, u = params
        return (a * u ** (lengths - 1.0) + baseline - p_hat) / se

    if starts is None:
        mask = y > 1e-9
        if int(mask.sum()) >= 2:
            slope, intercept = np.polyfit(lengths[mask], np.log(y[mask]), 1)
            u0 = float(np.exp(slope))
            a0 = float(np.exp(intercept) * u0)
        else:
            u0, a0 = 0.9, max(float(y.max()), 0.1)
        u0 = min(max(u0, 1e-3), 1.0 - 1e-9)
        a0 = min(max(a0, 1e-6), 2.0 - 1e-9)
        starts = [(a0, u0)] + [(a0, g) for g in _GRID_STARTS]
    best = None
    for x0 in starts:
        try:
            res = least_squares(
                residuals, x0=np.clip(x0, [0.0, 0.0], [2.0, 1.0]),
                bounds=([0.0, 0.0], [2.0, 1.0]),
                method="trf", xtol=1e-14, ftol=1e-14, gtol=1e-14,
            )
        except Exception:
            continue
        if best is None or res.cost < best.cost * (1.0 - 1e-12):
            best = res
        if best.cost < 1e-22:
            break
    if best is None:
        raise RuntimeError("decay fit failed to converge from every start")
    a, u = best.x
    return float(a), float(u), float(math.sqrt(2.0 * best.cost))


def fit_decay(dataset: DecayDataset, resamples: Optional[int] = None,
              rng: Union[None, int, np.random.Generator] = None) -> FitResult:
    """Fit the survival decay; optionally attach a bootstrap CI for u.

    The fit is deterministic: the nonlinear solver is seeded from the
    log-slope of ``p_hat - B`` plus a fixed grid of fallback starts, and the
    lowest-cost solution wins.  A dataset whose per-length survivals are flat
    within errors (zero noise, or fully depolarized to the baseline) carries
    no decay information; the result is then flagged ``degenerate``.
    """
    lengths, p_hat, se = survival_points(dataset)
    if len(lengths) < 2:
        raise ValueError("need at least two distinct lengths to fit")
    baseline = 1.0 / 2 ** dataset.n_qubits
    amplitude, u, residual_norm = _fit_points(lengths, p_hat, se, baseline)
    degenerate = bool(p_hat.max() - p_hat.min() <= 3.0 * se.max())
    result = FitResult(
        amplitude=amplitude, u=u, baseline=baseline,
        residual_norm=residual_norm, n_qubits=dataset.n_qubits,
        degenerate=degenerate,
    )
    if resamples:
        ci = bootstrap_ci(dataset, resamples=resamples, rng=rng, base_fit=result)
        result = replace(result, bootstrap_ci=ci, resamples=int(resamples))
    return result


def bootstrap_ci(dataset: DecayDataset, resamples: int = DEFAULT_RESAMPLES,
                 rng: Union[None, int, np.random.Generator] = None,
                 percentiles: tuple = CI_PERCENTILES,
                 base_fit: Optional[FitResult] = None) -> tuple:
    """Percentile bootstrap interval for u.

    Each resample redraws circuits per length with replacement and redraws
    each chosen circuit's counts binomially, then refits starting from the
    full-data solution.
    """
    if resamples < 1:
        raise ValueError("resamples must be >= 1")
    rng = _as_rng(rng)
    groups = {}
    for e in dataset.entries:
        groups.setdefault(e.length, []).append(e)
    if len(groups) < 2:
        raise ValueError("need at least two distinct lengths")
    baseline = 1.0 / 2 ** dataset.n_qubits
    if base_fit is None:
        lengths, p_hat, se = survival_points(dataset)
        amplitude, u, _ = _fit_points(lengths, p_hat, se, baseline)
    else:
        amplitude, u = base_fit.amplitude, base_fit.u
    starts = [(amplitude, u), (max(amplitude, 0.1), 0.9)]
    sorted_lengths = sorted(groups)
    us = np.empty(resamples)
    for r in range(resamples):
        ls = np.empty(len(sorted_lengths))
        ps = np.empty(len(sorted_lengths))
        ses = np.empty(len(sorted_lengths))
        for i, length in enumerate(sorted_lengths):
            entries = groups[length]
            picks = rng.integers(0, len(entries), size=len(entries))
            rates = np.empty(len(picks))
            total = 0
            for j, k in enumerate(picks):
                e = entries[k]
                rates[j] = rng.binomial(e.shots, e.successes / e.shots) / e.shots
                total += e.shots
            p = float(rates.mean())
            ls[i] = length
            ps[i] = p
            ses[i] = max(math.sqrt(max(p * (1.0 - p), 0.0) / total), SE_FLOOR)
        _, u_r, _ = _fit_points(ls, ps, ses, baseline, starts=starts)
        us[r] = u_r
    lo, hi = np.percentile(us, percentiles)
    return (float(lo), float(hi))


# ---------------------------------------------------------------------------
# Frame potential
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FramePotentialEstimate:
    """Monte Carlo estimate of Phi_2 = E |Tr U|^4 over L-layer circuits."""

    n_qubits: int
    length: int
    samples: int
    phi2: float
    std_error: float


def _layer_batch_apply(unitaries: np.ndarray, rng: np.random.Generator,
                       bits: np.ndarray) -> np.ndarray:
    """Apply one random layer (Cliffords + random-matching UZZ) to a batch.

    Draw order (stable, relied on by tests): Clifford indices with
    ``rng.integers(0, 24, size=(m, n))``, then a qubit permutation per sample
    with ``rng.permuted`` whose consecutive entries form the matching.
    """
    m, d, _ = unitaries.shape
    n = bits.shape[1]
    idx = rng.integers(0, 24, size=(m, n))
    perm = rng.permuted(np.tile(np.arange(n), (m, 1)), axis=1)
    for q in range(n):
        g = CLIFFORD_UNITARIES[idx[:, q]]
        s1 = 1 << q
        s2 = d >> (q + 1)
        unitaries = np.matmul(
            g[:, None, :, :], unitaries.reshape(m, s1, 2, s2 * d)
        ).reshape(m, d, d)
    pairs_a = perm[:, 0::2]
    pairs_b = perm[:, 1::2]
    cnt = (bits[:, pairs_a] ^ bits[:, pairs_b]).sum(axis=2)  # (d, m)
    phase = np.exp(-1j * np.pi / 4.0 * (pairs_a.shape[1] - 2 * cnt))
    unitaries *= phase.T[:, :, None]
    return unitaries


def frame_potential(n_qubits: int, length: int, samples: int,
                    rng: Union[None, int, np.random.Generator] = None
                    ) -> FramePotentialEstimate:
    """Estimate Phi_2 of the L-layer ensemble; 2 marks a unitary 2-design.

    ``length == 0`` is the trivial ensemble {identity} with Phi_2 = d^4
    exactly.  Limited to n <= 8.
    """
    return frame_potential_profile(n_qubits, (length,), samples, rng)[0]


def frame_potential_profile(n_qubits: int, lengths: Sequence[int], samples: int,
                            rng: Union[None, int, np.random.Generator] = None
                            ) -> list:
    """Estimate Phi_2 at several lengths from common sample paths.

    One set of circuits of depth max(lengths) is sampled; each requested
    length is evaluated on the corresponding prefix.  Sharing paths gives
    every length the full sample budget in a single pass and correlates
    adjacent estimates, which stabilizes the shape of the curve.
    """
    if n_qubits < 2 or n_qubits % 2:
        raise ValueError("n_qubits must be even and >= 2")
    if n_qubits > 8:
        raise ValueError("frame_potential limited to n <= 8")
    if samples < 2:
        raise ValueError("need at least two samples")
    lengths = [int(x) for x in lengths]
    if any(x < 0 for x in lengths):
        raise ValueError("lengths must be non-negative")
    d = 2 ** n_qubits
    max_len = max(lengths)
    wanted = sorted(set(x for x in lengths if x > 0))
    sums = {x: 0.0 for x in wanted}
    sq_sums = {x: 0.0 for x in wanted}
    rng = _as_rng(rng)
    bits = ((np.arange(d)[:, None] >> (n_qubits - 1 - np.arange(n_qubits))) & 1)
    block = max(16, min(samples, (1 << 22) // (d * d)))
    remaining = samples
    while remaining > 0 and wanted:
        m = min(block, remaining)
        unitaries = np.tile(np.eye(d, dtype=complex), (m, 1, 1))
        for depth in range(1, max_len + 1):
            unitaries = _layer_batch_apply(unitaries, rng, bits)
            if depth in sums:
                values = np.abs(np.einsum("bii->b", unitaries)) ** 4
                sums[depth] += float(values.sum())
                sq_sums[depth] += float((values * values).sum())
        remaining -= m
    out = []
    for x in lengths:
        if x == 0:
            out.append(FramePotentialEstimate(n_qubits, 0, samples, float(d) ** 4, 0.0))
            continue
        mean = sums[x] / samples
        var = max(sq_sums[x] / samples - mean * mean, 0.0) * samples / (samples - 1)
        out.append(FramePotentialEstimate(
            n_qubits, x, samples, float(mean), float(math.sqrt(var / samples))))
    return out


# ---------------------------------------------------------------------------
# Scatter experiments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScatterPoint:
    """One simulated experiment: noise strength, true and fitted unitarity."""

    p: float
    u_true: float
    u_est: float


def scatter_experiment(n_qubits: int, num_experiments: int, p_max: float,
                       rng: Union[None, int, np.random.Generator] = None,
                       lengths: Sequence[int] = (4, 8, 12, 16),
                       circuits_per_length: int = 10, shots: int = 100,
                       jobs: int = 1) -> list:
    """Simulate fitted-vs-true unitarity pairs under two-qubit depolarizing noise.

    Each experiment draws ``p`` uniformly in ``[0, p_max]``, runs the standard
    design (lengths x circuits at ``shots`` shots), fits the decay, and pairs
    the fitted ``u`` with ``u_true = depolarizing_tensor_unitarity(p, n/2)``.
    """
    if n_qubits % 2:
        raise ValueError("n_qubits must be even")
    rng = _as_rng(rng)
    points = []
    for _ in range(num_experiments):
        p = float(rng.uniform(0.0, p_max))
        gen_seed = int(rng.integers(0, 2 ** 63 - 1))
        sim_seed = int(rng.integers(0, 2 ** 63 - 1))
        specs = sample_experiment(gen_seed, n_qubits, lengths, circuits_per_length)
        noise = NoiseModel(two_qubit=Depolarizing(p))
        dataset = simulate_survival(specs, noise, shots, rng=sim_seed, jobs=jobs)
        fit = fit_decay(dataset)
        points.append(
            ScatterPoint(p, depolarizing_tensor_unitarity(p, n_qubits // 2), fit.u)
        )
    return points
