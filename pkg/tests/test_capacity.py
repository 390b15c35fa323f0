import numpy as np
import pytest

from jdlab import (
    capacity_scan,
    energy,
    equilibrium_potential,
    green_growth,
    lattice_nn,
    theta_test_function,
)
from jdlab.forms import form_matrix
from jdlab.kernels import explicit_kernel
from jdlab.space import open_ball_mask
from conftest import random_symmetric_kernel


def test_cap_z_closed_form(z_line):
    sp = z_line.space
    for big_r in (4.0, 10.0):
        mask = open_ball_mask(sp, sp.origin, big_r)
        solve = equilibrium_potential(sp, z_line.kernel, None, [sp.origin], mask)
        assert solve.energy == pytest.approx(4.0 / big_r, abs=1e-9)
        # piecewise linear equilibrium profile
        d = sp.distances_from(sp.origin)
        inside = d < big_r
        assert solve.u[inside] == pytest.approx(1.0 - d[inside] / big_r, abs=1e-9)


def test_cap_one_step_drop_closed_form(z_line):
    # K = B minus its outermost shell: one free point per side, minimized at 1/2
    sp = z_line.space
    big_r = 7.0
    d = sp.distances_from(sp.origin)
    mask = d < big_r
    inner = np.flatnonzero(d <= big_r - 2)
    solve = equilibrium_potential(sp, z_line.kernel, None, inner, mask)
    assert solve.energy == pytest.approx(2.0, abs=1e-9)
    assert np.all(solve.u[inner] == 1.0)


def test_zero_kernel_capacity():
    b = explicit_kernel(9, [], coords=np.arange(9.0)[:, None])
    mask = open_ball_mask(b.space, 0, 5.0)
    solve = equilibrium_potential(b.space, b.kernel, None, [0], mask)
    assert solve.energy == 0.0
    assert solve.u[0] == 1.0
    assert np.all(solve.u[1:] == 0.0)  # feasible indicator reported
    assert solve.warnings


def test_maximum_principle_random_kernels():
    rng = np.random.default_rng(77)
    for _ in range(15):
        built = random_symmetric_kernel(rng, int(rng.integers(8, 40)))
        sp = built.space
        mask = open_ball_mask(sp, 0, float(sp.n_points // 2))
        solve = equilibrium_potential(sp, built.kernel, None, [0], mask)
        assert np.all(solve.u >= -1e-9)
        assert np.all(solve.u <= 1.0 + 1e-9)
        assert solve.residual <= 1e-8


def test_capacity_monotone_in_radius_and_inner_set(z_line):
    sp = z_line.space
    rep = capacity_scan(sp, z_line.kernel, None, [sp.origin], [5.0, 10.0, 20.0, 40.0])
    assert all(a >= b - 1e-12 for a, b in zip(rep.capacities, rep.capacities[1:]))
    # larger K -> larger capacity
    small = equilibrium_potential(sp, z_line.kernel, None, [sp.origin], open_ball_mask(sp, sp.origin, 20.0))
    big_k = np.flatnonzero(sp.distances_from(sp.origin) <= 2.0)
    large = equilibrium_potential(sp, z_line.kernel, None, big_k, open_ball_mask(sp, sp.origin, 20.0))
    assert large.energy >= small.energy - 1e-12


def test_variational_consistency(z_line):
    sp = z_line.space
    mask = open_ball_mask(sp, sp.origin, 15.0)
    solve = equilibrium_potential(sp, z_line.kernel, None, [sp.origin], mask)
    g = form_matrix(sp, z_line.kernel, None)
    quadratic = float(solve.u @ (g @ solve.u))
    assert solve.energy == pytest.approx(quadratic, rel=1e-8)


def test_capacity_below_theta_energy(z_line):
    sp = z_line.space
    for big_r in (5.0, 9.0, 21.0):
        mask = sp.distances_from(sp.origin) < big_r
        unit_ball = np.flatnonzero(sp.distances_from(sp.origin) <= 1.0)
        solve = equilibrium_potential(sp, z_line.kernel, None, unit_ball, mask)
        theta = theta_test_function(sp, sp.origin, big_r)
        e_theta = energy(sp, z_line.kernel, None, theta)
        assert solve.energy <= e_theta + 1e-12


def test_disconnected_component_zeroed_with_warning():
    # points 0-1-2 chained; 3-4 isolated pair inside B
    entries = [[0, 1, 1.0], [1, 2, 1.0], [3, 4, 1.0]]
    b = explicit_kernel(6, entries, coords=np.arange(6.0)[:, None])
    mask = b.space.distances_from(0) < 5.0  # contains 0..4, excludes 5
    solve = equilibrium_potential(b.space, b.kernel, None, [0], mask)
    assert any("components" in w for w in solve.warnings)
    assert solve.u[3] == 0.0 and solve.u[4] == 0.0


def test_capacity_scan_z3_transient_no_certificate(z3_cube):
    sp = z3_cube.space
    rep = capacity_scan(sp, z3_cube.kernel, None, [sp.origin], [3.0, 5.0, 7.0, 9.0])
    assert not rep.certificate
    # transient walk: capacities settle toward a positive limit
    assert rep.capacities[-1] > 0.5 * rep.capacities[0]


def test_k_not_inside_ball_raises(z_line):
    sp = z_line.space
    with pytest.raises(ValueError, match="K"):
        capacity_scan(sp, z_line.kernel, None, [sp.origin, sp.origin + 8], [5.0, 10.0])


def test_green_growth_z_matches_tridiagonal_oracle(z_line):
    sp = z_line.space
    f = np.zeros(sp.n_points)
    f[sp.origin] = 1.0
    radii = [5.0, 10.0, 20.0, 40.0]
    got = green_growth(sp, z_line.kernel, None, f, sp.origin, radii)
    for r, u0 in zip(radii, got):
        # independent oracle: tridiagonal system with literal entries 4 / -2
        n_free = 2 * int(r) - 1
        a = 4.0 * np.eye(n_free) - 2.0 * (np.eye(n_free, k=1) + np.eye(n_free, k=-1))
        rhs = np.zeros(n_free)
        rhs[n_free // 2] = 1.0
        oracle = np.linalg.solve(a, rhs)[n_free // 2]
        assert u0 == pytest.approx(oracle, rel=1e-9)
    # unbounded growth along R: recurrence evidence
    diffs = np.diff(got)
    assert np.all(diffs > 0)
    assert got[-1] == pytest.approx(40.0 / 4.0, rel=1e-6)


def test_green_growth_z3_converges(z3_cube):
    sp = z3_cube.space
    f = np.zeros(sp.n_points)
    f[sp.origin] = 1.0
    got = green_growth(sp, z3_cube.kernel, None, f, sp.origin, [3.0, 5.0, 7.0, 9.0])
    diffs = np.diff(got)
    assert np.all(diffs > 0)  # monotone in R
    assert diffs[-1] < diffs[0] / 3  # increments collapse: transience evidence


def test_green_rejects_bad_f(z_line):
    sp = z_line.space
    with pytest.raises(ValueError):
        green_growth(sp, z_line.kernel, None, np.zeros(sp.n_points), sp.origin, [5.0])


def test_green_f_outside_ball_gives_zero(z_line):
    sp = z_line.space
    f = np.zeros(sp.n_points)
    f[sp.origin + 30] = 1.0
    got = green_growth(sp, z_line.kernel, None, f, sp.origin, [5.0], center=sp.origin)
    assert got[0] == 0.0
