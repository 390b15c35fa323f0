"""Monte-Carlo simulation of the pure-jump process defined by a rate table.

Each trial draws from its own counter-based Philox stream keyed by
(seed, trial_index), so batches are reproducible bit-for-bit regardless of
execution order or worker count. Explosion cannot be observed directly on a
finite truncation: it is inferred from jump-cap hits with stalled elapsed
time, and separated from plain truncation artifacts (boundary absorption).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .forms import RateTable
from .space import DiscreteMMSpace

STATUS_ALIVE = "alive-at-T"
STATUS_ABSORBED = "absorbed-at-boundary"
STATUS_CAPPED = "jump-cap-hit"
_STATUS_BY_CODE = (STATUS_ALIVE, STATUS_ABSORBED, STATUS_CAPPED)
_BLOCK = 256  # random numbers drawn per refill


@dataclass
class SimConfig:
    """Batch configuration; trials are independent given (seed, trial_index)."""

    horizon: float
    trials: int = 1000
    max_jumps: int = 1_000_000
    seed: int = 0
    policy: str = "absorb"  # "absorb" | "reflect": handling of the outer radius
    outer_radius: float = float("inf")
    workers: int = 1

    def __post_init__(self) -> None:
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if self.trials < 1 or self.max_jumps < 1:
            raise ValueError("trials and max_jumps must be at least 1")
        if self.policy not in ("absorb", "reflect"):
            raise ValueError("policy must be 'absorb' or 'reflect'")


@dataclass
class Trajectory:
    """Sampled path: visited states with holding times and the exit status.

    holding_times[i] is the time spent at states[i]. Paths alive at the
    horizon carry one hold per state (the last one truncated at T); absorbed
    and jump-capped paths occupy their terminal state for zero time, so the
    holding list is one entry shorter than the state list.
    """

    states: np.ndarray
    holding_times: np.ndarray
    status: str
    elapsed: float


class _Stream:
    """Blocked draws from a per-trial Philox generator."""

    def __init__(self, seed: int, trial: int):
        self.gen = np.random.Generator(np.random.Philox(key=[int(seed) % 2**64, int(trial) % 2**64]))
        self._exp = np.empty(0)
        self._uni = np.empty(0)
        self._i = 0

    def draw(self) -> tuple[float, float]:
        if self._i >= len(self._exp):
            self._exp = self.gen.exponential(size=_BLOCK)
            self._uni = self.gen.random(size=_BLOCK)
            self._i = 0
        e, u = self._exp[self._i], self._uni[self._i]
        self._i += 1
        return e, u


def _run_trial(
    rates: RateTable,
    x0: int,
    config: SimConfig,
    trial: int,
    outside: Optional[np.ndarray],
    target: Optional[np.ndarray],
    keep_path: bool,
):
    """One CTMC path. Returns (status_code, elapsed, n_jumps, final, hit, path).

    status codes: 0 alive-at-T, 1 absorbed-at-boundary, 2 jump-cap-hit.
    `hit` marks arrival in the target set before any other stopping event.
    """
    lam = rates.lam
    indptr = rates.q.indptr
    indices = rates.q.indices
    cum = rates.cumulative_rows()
    stream = _Stream(config.seed, trial)
    horizon = config.horizon
    reflect = config.policy == "reflect"

    state = int(x0)
    t = 0.0
    jumps = 0
    states = [state] if keep_path else None
    holds = [] if keep_path else None

    while True:
        if target is not None and target[state]:
            return 0, t, jumps, state, True, states, holds
        if outside is not None and outside[state] and not reflect:
            return 1, t, jumps, state, False, states, holds
        rate = lam[state]
        if rate <= 0.0:
            if keep_path:
                holds.append(horizon - t)
            return 0, horizon, jumps, state, False, states, holds
        e, u = stream.draw()
        hold = e / rate
        if t + hold >= horizon:
            if keep_path:
                holds.append(horizon - t)
            return 0, horizon, jumps, state, False, states, holds
        t += hold
        if keep_path:
            holds.append(hold)
        lo, hi = indptr[state], indptr[state + 1]
        pos = int(np.searchsorted(cum[lo:hi], u * rate, side="right"))
        pos = min(pos, hi - lo - 1)
        nxt = int(indices[lo + pos])
        jumps += 1
        if reflect and outside is not None and outside[nxt]:
            nxt = state  # censored jump: the walker stays put
        state = nxt
        if keep_path:
            states.append(state)
        if jumps >= config.max_jumps:
            return 2, t, jumps, state, False, states, holds


def gillespie_path(rates: RateTable, x0: int, config: SimConfig, trial_index: int = 0) -> Trajectory:
    """Sample one path; deterministic given (seed, trial_index)."""
    outside = _outside_mask(rates.space, x0, config)
    code, elapsed, _, _, _, states, holds = _run_trial(
        rates, x0, config, trial_index, outside, None, keep_path=True
    )
    return Trajectory(np.asarray(states), np.asarray(holds), _STATUS_BY_CODE[code], elapsed)


@dataclass
class BatchResult:
    """Per-trial outcome arrays (order-independent aggregation)."""

    status: np.ndarray  # int8 codes
    elapsed: np.ndarray
    n_jumps: np.ndarray
    final_state: np.ndarray
    hit: np.ndarray
    horizon: float

    def status_fraction(self, status: str) -> float:
        code = _STATUS_BY_CODE.index(status)
        return float(np.mean(self.status == code))


def _outside_mask(space: DiscreteMMSpace, x0: int, config: SimConfig) -> Optional[np.ndarray]:
    if not np.isfinite(config.outer_radius):
        return None
    return space.distances_from(x0) >= config.outer_radius


def run_batch(
    rates: RateTable,
    x0: int,
    config: SimConfig,
    target: Optional[np.ndarray] = None,
    outside: Optional[np.ndarray] = None,
) -> BatchResult:
    """Run config.trials independent paths and collect light per-trial records."""
    if outside is None:
        outside = _outside_mask(rates.space, x0, config)
    n = config.trials
    status = np.empty(n, dtype=np.int8)
    elapsed = np.empty(n)
    n_jumps = np.empty(n, dtype=np.int64)
    final_state = np.empty(n, dtype=np.int64)
    hit = np.zeros(n, dtype=bool)

    def work(lo: int, hi: int) -> None:
        for trial in range(lo, hi):
            code, t, jumps, final, h, _, _ = _run_trial(
                rates, x0, config, trial, outside, target, keep_path=False
            )
            status[trial] = code
            elapsed[trial] = t
            n_jumps[trial] = jumps
            final_state[trial] = final
            hit[trial] = h

    workers = max(1, int(config.workers))
    if workers == 1:
        work(0, n)
    else:
        chunk = math.ceil(n / workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(work, lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]
            for f in futures:
                f.result()
    return BatchResult(status, elapsed, n_jumps, final_state, hit, config.horizon)


def wilson_interval(successes: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95% binomial score interval."""
    if n == 0:
        return 0.0, 1.0
    p = successes / n
    denom = 1 + z**2 / n
    center = (p + z**2 / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z**2 / (4 * n**2)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass
class Estimate:
    value: float
    ci_low: float
    ci_high: float
    n_trials: int
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "ci95": [self.ci_low, self.ci_high],
            "n_trials": self.n_trials,
            "notes": self.notes,
        }


def survival_estimate(rates: RateTable, x0: int, config: SimConfig) -> tuple[Estimate, BatchResult]:
    """Fraction of paths alive at the horizon (conservativeness proxy)."""
    batch = run_batch(rates, x0, config)
    alive = int(np.sum(batch.status == 0))
    lo, hi = wilson_interval(alive, config.trials)
    return Estimate(alive / config.trials, lo, hi, config.trials), batch


def return_probability(
    rates: RateTable,
    x0: int,
    target: Sequence[int],
    outer_radius: float,
    config: SimConfig,
) -> tuple[Estimate, BatchResult]:
    """P[hit the target set before exiting the open ball B(target, R)].

    The exit ball is centered on the target set (gambler's-ruin convention:
    the trial fails once d(., K) >= R). Estimates are monotone nondecreasing
    in R in expectation; censored trials (horizon or jump cap first) count
    as misses and are flagged.
    """
    space = rates.space
    target = np.asarray(target, dtype=np.int64)
    if np.isin(x0, target):
        raise ValueError("x0 must lie outside the target set")
    target_mask = np.zeros(space.n_points, dtype=bool)
    target_mask[target] = True
    dist_to_k = np.min(
        np.stack([space.distances_from(int(k)) for k in target]), axis=0
    )
    outside = dist_to_k >= outer_radius
    notes = []
    reachable = rates.lam[x0] > 0
    batch = run_batch(rates, x0, config, target=target_mask, outside=outside)
    hits = int(np.sum(batch.hit))
    censored = int(np.sum((~batch.hit) & (batch.status != 1)))
    if censored:
        notes.append(f"{censored} trials censored by horizon/jump cap before hitting or exiting")
    if not reachable and hits == 0:
        notes.append("target unreachable from x0 (zero total rate)")
    lo, hi = wilson_interval(hits, config.trials)
    return Estimate(hits / config.trials, lo, hi, config.trials, notes), batch


@dataclass
class ExplosionSummary:
    capped_fraction: float
    absorbed_fraction: float
    alive_fraction: float
    median_elapsed_capped: Optional[float]
    elapsed_quantiles: dict
    explosion_suspected: bool
    truncation_too_small: bool

    def to_dict(self) -> dict:
        return {
            "capped_fraction": self.capped_fraction,
            "absorbed_fraction": self.absorbed_fraction,
            "alive_fraction": self.alive_fraction,
            "median_elapsed_capped": self.median_elapsed_capped,
            "elapsed_quantiles": self.elapsed_quantiles,
            "explosion_suspected": self.explosion_suspected,
            "truncation_too_small": self.truncation_too_small,
        }


def explosion_diagnostic(batch: BatchResult) -> ExplosionSummary:
    """Separate 'explosion suspected' from 'truncation too small'.

    Explosion is flagged when a substantial share of paths hit the jump cap
    with elapsed time far below the horizon (holding times accumulating);
    dominant boundary absorption points at the truncation instead.
    """
    if len(batch.status) == 0:
        raise ValueError("empty trajectory batch")
    capped = batch.status == 2
    absorbed = batch.status == 1
    alive = batch.status == 0
    med_capped = float(np.median(batch.elapsed[capped])) if capped.any() else None
    quantiles = {
        q: float(np.quantile(batch.elapsed, q)) for q in (0.1, 0.5, 0.9)
    }
    explosion = bool(capped.mean() >= 0.2 and med_capped is not None and med_capped < batch.horizon / 10)
    truncation = bool(absorbed.mean() >= 0.5)
    return ExplosionSummary(
        float(capped.mean()),
        float(absorbed.mean()),
        float(alive.mean()),
        med_capped,
        quantiles,
        explosion,
        truncation,
    )


def occupation_measure(traj: Trajectory, n_points: int) -> np.ndarray:
    """Time-weighted empirical occupation distribution of one path."""
    occ = np.zeros(n_points)
    np.add.at(occ, traj.states[: len(traj.holding_times)], traj.holding_times)
    total = occ.sum()
    return occ / total if total > 0 else occ
