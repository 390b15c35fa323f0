import numpy as np
import pytest
from scipy.linalg import expm

from jdlab import (
    SimConfig,
    equilibrium_potential,
    explosion_diagnostic,
    gillespie_path,
    lattice_nn,
    return_probability,
    run_batch,
    survival_estimate,
)
from jdlab.forms import jump_rates
from jdlab.kernels import explicit_kernel
from jdlab.simulate import occupation_measure, wilson_interval
from jdlab.space import open_ball_mask


def birth_chain(length=400, scale=1.0):
    entries = [[k, k + 1, scale * float((k + 1) ** 3)] for k in range(length)]
    return explicit_kernel(length + 1, entries)


@pytest.fixture(scope="module")
def z_rates(z_line):
    return jump_rates(z_line.kernel)


def test_isolated_state_stays_alive():
    silent = explicit_kernel(1, [])
    r0 = jump_rates(silent.kernel)
    traj = gillespie_path(r0, 0, SimConfig(horizon=2.0, trials=1, seed=0))
    assert traj.status == "alive-at-T"
    assert list(traj.states) == [0]
    assert traj.elapsed == 2.0


def test_two_state_mean_holding_time():
    # q = 2 both ways: holds are Exp(2) with mean 1/2 (exponential-law oracle)
    b = explicit_kernel(2, [[0, 1, 1.0]])
    rates = jump_rates(b.kernel)
    traj = gillespie_path(rates, 0, SimConfig(horizon=1e18, trials=1, seed=123, max_jumps=100_000))
    holds = traj.holding_times
    assert len(holds) == 100_000
    assert np.mean(holds) == pytest.approx(0.5, abs=0.01)


def test_absorption_matches_matrix_exponential_oracle(z_rates, z_line):
    sp = z_line.space
    o = sp.origin
    interior = np.flatnonzero(sp.distances_from(o) < 5.0)
    pos = {s: k for k, s in enumerate(interior)}
    gen = np.zeros((len(interior), len(interior)))
    q = z_rates.q
    for k, s in enumerate(interior):
        lo, hi = q.indptr[s], q.indptr[s + 1]
        for c, v in zip(q.indices[lo:hi], q.data[lo:hi]):
            if c in pos:
                gen[k, pos[c]] += v
        gen[k, k] -= z_rates.lam[s]
    oracle = (expm(gen * 1.5) @ np.ones(len(interior)))[pos[o]]
    cfg = SimConfig(horizon=1.5, trials=3000, seed=5, outer_radius=5.0)
    est, _ = survival_estimate(z_rates, o, cfg)
    se = np.sqrt(oracle * (1 - oracle) / cfg.trials)
    assert abs(est.value - oracle) <= 3 * se


def test_survival_one_for_bounded_rates(z_rates, z_line):
    cfg = SimConfig(horizon=10.0, trials=2000, seed=42, outer_radius=100.0)
    est, batch = survival_estimate(z_rates, z_line.space.origin, cfg)
    assert est.value == 1.0
    assert np.all(batch.status == 0)


def test_single_trial_interval_is_wide():
    lo, hi = wilson_interval(1, 1)
    assert hi - lo > 0.5


def test_explosive_birth_chain_flag():
    b = birth_chain(length=800)
    rates = jump_rates(b.kernel)
    cfg = SimConfig(horizon=1.0, trials=300, seed=7, max_jumps=3000)
    batch = run_batch(rates, 5, cfg)
    diag = explosion_diagnostic(batch)
    assert diag.explosion_suspected
    assert not diag.truncation_too_small
    assert diag.median_elapsed_capped < 0.1


def test_truncation_artifact_flagged_separately(z_rates, z_line):
    # bounded-rate walk absorbed by a tiny ball: truncation flag, not explosion
    cfg = SimConfig(horizon=50.0, trials=400, seed=11, outer_radius=3.0)
    batch = run_batch(z_rates, z_line.space.origin, cfg)
    diag = explosion_diagnostic(batch)
    assert diag.truncation_too_small
    assert not diag.explosion_suspected
    # enlarging the outer radius shrinks the absorbed fraction
    wide = SimConfig(horizon=50.0, trials=400, seed=11, outer_radius=40.0)
    diag_wide = explosion_diagnostic(run_batch(z_rates, z_line.space.origin, wide))
    assert diag_wide.absorbed_fraction < diag.absorbed_fraction


def test_gamblers_ruin_closed_form(z_rates, z_line):
    o = z_line.space.origin
    cfg = SimConfig(horizon=1e12, trials=2000, seed=21, max_jumps=10**6)
    est, _ = return_probability(z_rates, o + 1, [o], 10.0, cfg)
    se = np.sqrt(0.9 * 0.1 / cfg.trials)
    assert abs(est.value - 0.9) <= 3 * se


def test_adjacent_target_hits_immediately():
    # x0 adjacent to K with no other transitions: the only move is into K
    b = explicit_kernel(2, [[0, 1, 1.0]])
    rates = jump_rates(b.kernel)
    est, _ = return_probability(rates, 1, [0], 50.0, SimConfig(horizon=1e12, trials=200, seed=3))
    assert est.value == 1.0


def test_unreachable_target_warns():
    b = explicit_kernel(3, [[0, 1, 1.0]])  # state 2 disconnected
    rates = jump_rates(b.kernel)
    est, _ = return_probability(rates, 2, [0], 10.0, SimConfig(horizon=5.0, trials=50, seed=1))
    assert est.value == 0.0
    assert any("unreachable" in n for n in est.notes)


def test_z3_return_plateaus_below_one(z3_cube):
    sp = z3_cube.space
    rates = jump_rates(z3_cube.kernel)
    o = sp.origin
    start = o + 1  # one lattice step away
    values = {}
    for r in (4.0, 8.0):
        mask = open_ball_mask(sp, o, r)
        solve = equilibrium_potential(sp, z3_cube.kernel, None, [o], mask)
        oracle = solve.u[start]
        cfg = SimConfig(horizon=1e12, trials=1500, seed=17, max_jumps=10**6)
        est, _ = return_probability(rates, start, [o], r, cfg)
        se = max(np.sqrt(oracle * (1 - oracle) / cfg.trials), 1e-3)
        assert abs(est.value - oracle) <= 3 * se
        values[r] = oracle
    # transient walk: the hitting probability stays bounded away from 1
    assert values[8.0] < 0.75
    assert values[8.0] - values[4.0] < 0.15


def test_deterministic_batches_and_worker_independence(z_rates, z_line):
    o = z_line.space.origin
    cfg1 = SimConfig(horizon=5.0, trials=200, seed=99, outer_radius=30.0, workers=1)
    cfg3 = SimConfig(horizon=5.0, trials=200, seed=99, outer_radius=30.0, workers=3)
    b1 = run_batch(z_rates, o, cfg1)
    b2 = run_batch(z_rates, o, cfg1)
    b3 = run_batch(z_rates, o, cfg3)
    for a, b in ((b1, b2), (b1, b3)):
        assert np.array_equal(a.status, b.status)
        assert np.array_equal(a.elapsed, b.elapsed)
        assert np.array_equal(a.n_jumps, b.n_jumps)
        assert np.array_equal(a.final_state, b.final_state)


def test_occupation_converges_to_symmetrizing_measure():
    rng = np.random.default_rng(0)
    entries = [[i, j, float(rng.uniform(0.2, 2.0))] for i in range(5) for j in range(i + 1, 5)]
    built = explicit_kernel(5, entries, measure=rng.uniform(0.5, 2.0, 5))
    rates = jump_rates(built.kernel)
    pi = built.space.measure / built.space.measure.sum()
    traj = gillespie_path(rates, 0, SimConfig(horizon=1e18, trials=1, seed=2, max_jumps=30_000))
    short = np.zeros(5)
    np.add.at(short, traj.states[:300], traj.holding_times[:300])
    short /= short.sum()
    full = occupation_measure(traj, 5)
    chi2 = lambda p: float(np.sum((p - pi) ** 2 / pi))
    assert chi2(full) < chi2(short)
    assert chi2(full) < 0.01


def test_survival_monotone_in_horizon():
    b = birth_chain(length=800)
    rates = jump_rates(b.kernel)
    estimates = {}
    for horizon in (0.05, 1.0):
        cfg = SimConfig(horizon=horizon, trials=400, seed=31, max_jumps=3000)
        est, _ = survival_estimate(rates, 5, cfg)
        estimates[horizon] = est
    e_short, e_long = estimates[0.05], estimates[1.0]
    ci = e_long.ci_high - e_long.ci_low
    assert e_short.value >= e_long.value - 2 * ci


def test_trajectory_invariants(z_rates, z_line):
    o = z_line.space.origin
    cfg = SimConfig(horizon=4.0, trials=1, seed=13, outer_radius=6.0)
    for trial in range(25):
        traj = gillespie_path(z_rates, o, cfg, trial_index=trial)
        assert np.all(traj.holding_times > 0)
        if traj.status == "alive-at-T":
            assert len(traj.holding_times) == len(traj.states)
            assert traj.elapsed == 4.0
            assert np.sum(traj.holding_times) == pytest.approx(4.0)
        else:
            assert len(traj.holding_times) == len(traj.states) - 1
            assert traj.elapsed <= 4.0
            assert np.sum(traj.holding_times) == pytest.approx(traj.elapsed)
        for a, b in zip(traj.states[:-1], traj.states[1:]):
            assert z_rates.q[a, b] > 0


def test_reflect_policy_keeps_paths_inside(z_rates, z_line):
    sp = z_line.space
    o = sp.origin
    cfg = SimConfig(horizon=5.0, trials=50, seed=4, outer_radius=4.0, policy="reflect")
    batch = run_batch(z_rates, o, cfg)
    assert np.all(batch.status == 0)  # nothing absorbed under reflection
    d = sp.distances_from(o)
    assert np.all(d[batch.final_state] < 4.0)
