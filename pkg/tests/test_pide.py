'''
Grid, implicit system, jump operator, boundary data and interpolation of the 1-D solver
'''

import math

import numpy as np
import pytest
from scipy.linalg import solve

from conftest import bates, call
from errors import ConfigError, SingularSystemError
from model import OptionSpec, Payoff, drift_reduced, levy_density, payoff, rho3
from pide import (Interpolation, PideGrid, apply_B, assemble_A, boundary_vector, build_grid, dirichlet_vector,
                  interpolate_shift, interpolate_shift_cubic, jump_tail, payoff_boundary, shift_slices,
                  solve_step, symbol, zero_boundary)

def make_grid(M: int, R: int, dy: float = 0.01, params=None) -> PideGrid:
  params = params or bates()
  nu = levy_density(params, np.arange(-R, R + 1) * dy) if R else np.zeros(1)
  return PideGrid(math.log(100.0), dy, M, R, nu)

def direct_jump_sum(grid: PideGrid, f: np.ndarray) -> np.ndarray:
  M, R = grid.M, grid.R
  out = np.zeros(grid.size)
  for i in range(-M, M + 1):
    for l in range(-R, R + 1):
      if abs(i + l) <= M:
        out[i + M] += grid.nu_samples[l + R] * f[i + l + M]
  return out

class TestBuildGrid:

  def test_covers_the_short_maturity_domain(self, bates_params, european_call):
    grid = build_grid(bates_params, european_call, 50, 0.01)
    assert grid.y[0] <= math.log(100) - 1.59
    assert grid.y[-1] >= math.log(100) + 1.93
    assert grid.y[grid.M] == pytest.approx(math.log(100))

  def test_kernel_mass(self, bates_params, european_call):
    grid = build_grid(bates_params, european_call, 50, 0.01)
    assert abs(grid.dy * grid.Lambda - 5.0) <= 1e-4 * 5.0
    # one point less on each side is not enough
    inner = grid.Lambda - grid.nu_samples[0] - grid.nu_samples[-1]
    assert abs(grid.dy * inner - 5.0) > 1e-4 * 5.0

  def test_six_jump_deviations_suffice(self, bates_params, european_call):
    grid = build_grid(bates_params, european_call, 50, 0.01, jump_tolerance=1e-8)
    assert grid.R * grid.dy <= 0.6 + 1e-12
    assert abs(grid.dy * grid.Lambda - 5.0) <= 1e-8 * 5.0

  def test_no_jumps(self, european_call):
    grid = build_grid(bates(lam=0.0), european_call, 50, 0.01)
    assert grid.R == 0 and grid.Lambda == 0.0
    f = np.random.default_rng(0).random(grid.size)
    np.testing.assert_array_equal(apply_B(grid, f, 0.01), f)

  def test_explicit_span(self, bates_params, european_call):
    grid = build_grid(bates_params, european_call, 50, 0.01, span=2.5)
    assert grid.M == 250

  def test_memory_cap(self, bates_params, european_call):
    with pytest.raises(ConfigError) as info:
      build_grid(bates_params, european_call, 50, 1e-6)
    assert info.value.field == "dy"

  def test_radius_must_stay_inside(self):
    with pytest.raises(ConfigError):
      make_grid(8, 8)

class TestAssembleA:

  def test_coefficients(self):
    grid = make_grid(16, 4)
    system = assemble_A(grid, -0.04, 0.04, math.sqrt(0.75), 0.01)
    assert float(system.beta) == pytest.approx(1.5)
    assert float(system.alpha) == pytest.approx(-0.02)
    assert float(system.lower) == pytest.approx(-1.52)
    assert float(system.diagonal) == pytest.approx(4.0)
    assert float(system.upper) == pytest.approx(-1.48)

  def test_diagonal_dominance(self):
    system = assemble_A(make_grid(16, 4), -0.04, 0.04, math.sqrt(0.75), 0.01)
    off = abs(float(system.lower)) + abs(float(system.upper))
    assert abs(float(system.diagonal)) - off == pytest.approx(1.0)

  def test_identity_without_drift_and_variance(self):
    system = assemble_A(make_grid(16, 4), 0.0, 0.0, 0.5, 0.01)
    np.testing.assert_array_equal(system.dense(), np.eye(33))

  def test_singular_guard(self):
    with pytest.raises(SingularSystemError):
      assemble_A(make_grid(16, 4), 4.0, 0.04, 1.0, 0.01)

  def test_negative_variance(self):
    with pytest.raises(ValueError):
      assemble_A(make_grid(16, 4), 0.0, -0.01, 1.0, 0.01)

  def test_symbol_modulus_at_least_one(self):
    grid = make_grid(16, 4)
    theta = np.linspace(-math.pi, math.pi, 10000)
    for mu, v in [(-0.04, 0.04), (3.0, 0.001), (-50.0, 0.5), (0.0, 0.0)]:
      system = assemble_A(grid, mu, v, math.sqrt(0.75), 0.01)
      assert np.all(np.abs(symbol(system, theta)) >= 1 - 1e-15)

class TestApplyB:

  def test_matches_direct_sum(self):
    grid = make_grid(64, 16)
    f = np.random.default_rng(1).normal(size=grid.size)
    h = 0.01
    expected = f + h * grid.dy * (direct_jump_sum(grid, f) - grid.Lambda * f)
    np.testing.assert_allclose(apply_B(grid, f, h), expected, rtol=0, atol=1e-12)

  def test_constants_preserved_in_the_interior(self):
    grid = make_grid(64, 16)
    out = apply_B(grid, np.full(grid.size, 3.7), 0.01)
    interior = slice(grid.R, grid.size - grid.R)
    np.testing.assert_allclose(out[interior], 3.7, rtol=1e-13)
    # clipped stencils lose the exterior mass
    assert out[0] < 3.7 and out[-1] < 3.7

  def test_batched(self):
    grid = make_grid(32, 8)
    f = np.random.default_rng(2).normal(size=(3, 2, grid.size))
    out = apply_B(grid, f, 0.02)
    np.testing.assert_allclose(out[1, 0], apply_B(grid, f[1, 0], 0.02), atol=1e-13)

class TestBoundaryVector:

  def test_zero_boundary(self):
    grid = make_grid(32, 8)
    d = boundary_vector(grid, zero_boundary, 3, -0.02, 1.5, 0.01)
    np.testing.assert_array_equal(d, 0.0)

  def test_dirichlet_only_without_jumps(self):
    grid = make_grid(32, 0, dy=0.05)
    b = payoff_boundary(call())
    d = boundary_vector(grid, b, 3, -0.02, 1.5, 0.01)
    high = math.exp(grid.y0 + 33 * 0.05) - 100
    assert d[0] == 0.0
    assert d[-1] == pytest.approx(1.48 * high)
    np.testing.assert_array_equal(d[1:-1], 0.0)

  def test_dirichlet_put(self):
    grid = make_grid(32, 0, dy=0.05)
    b = payoff_boundary(OptionSpec(strike=100.0, maturity=0.5, payoff=Payoff.PUT))
    d = dirichlet_vector(grid, b, 0.0, -0.02, 1.5)
    assert d[0] == pytest.approx(1.52 * (100 - math.exp(grid.y0 - 33 * 0.05)))
    assert d[-1] == 0.0

  def test_tail_matches_direct_sum(self):
    grid = make_grid(32, 8, dy=0.05)
    b = payoff_boundary(call())
    h = 0.01
    tail = jump_tail(grid, b, 0.0, h)

    M, R = grid.M, grid.R
    expected = np.zeros(grid.size)
    for i in range(-M, M + 1):
      for l in range(-R, R + 1):
        if abs(i + l) > M:
          expected[i + M] += grid.nu_samples[l + R] * b(0.0, grid.y_at(i + l))
    np.testing.assert_allclose(tail, h * grid.dy * expected, rtol=1e-13, atol=1e-15)
    # only rows within R of either end receive exterior mass
    np.testing.assert_array_equal(tail[R:grid.size - R], 0.0)

  def test_upper_tail_rows(self):
    grid = make_grid(32, 8, dy=0.05)
    b = payoff_boundary(call())
    h = 0.01
    tail = jump_tail(grid, b, 0.0, h)
    M, R = grid.M, grid.R
    for i in range(M - R + 1, M):
      direct = sum(grid.nu_samples[l + R] * b(0.0, grid.y_at(i + l)) for l in range(M - i + 1, R + 1))
      assert tail[i + M] == pytest.approx(h * grid.dy * direct, rel=1e-13)

class TestSolveStep:

  def test_identity(self):
    grid = make_grid(16, 4)
    system = assemble_A(grid, 0.0, 0.0, 1.0, 0.01)
    rhs = np.random.default_rng(3).random(grid.size)
    np.testing.assert_allclose(solve_step(system, rhs), rhs, atol=1e-15)

  def test_round_trip(self):
    grid = make_grid(64, 4)
    system = assemble_A(grid, -0.04, 0.04, math.sqrt(0.75), 0.01)
    w = np.random.default_rng(4).normal(size=grid.size)
    np.testing.assert_allclose(solve_step(system, system.matvec(w)), w, atol=1e-12)

  def test_dense_oracle(self):
    grid = make_grid(16, 4)
    system = assemble_A(grid, 0.3, 0.09, 0.8, 0.01)
    rhs = np.random.default_rng(5).normal(size=grid.size)
    np.testing.assert_allclose(solve_step(system, rhs), solve(system.dense(), rhs), atol=1e-12)

  def test_residual(self):
    grid = make_grid(64, 4)
    system = assemble_A(grid, -1.2, 0.3, 0.7, 0.02)
    rhs = np.random.default_rng(6).normal(size=grid.size) * 50
    u = solve_step(system, rhs)
    assert np.max(np.abs(system.matvec(u) - rhs)) <= 1e-10 * np.max(np.abs(rhs))

  def test_batched_systems_are_independent(self):
    grid = make_grid(16, 4)
    mu = np.array([[-0.04, 0.5], [1.0, 0.0]])
    v = np.array([[0.04, 0.1], [0.0, 0.2]])
    system = assemble_A(grid, mu, v, 0.9, 0.01)
    rhs = np.random.default_rng(7).normal(size=(2, 2, grid.size))
    out = solve_step(system, rhs)
    for a in range(2):
      for c in range(2):
        single = assemble_A(grid, mu[a, c], v[a, c], 0.9, 0.01)
        np.testing.assert_allclose(out[a, c], solve(single.dense(), rhs[a, c]), atol=1e-12)

class TestInterpolateShift:

  def test_zero_shift(self):
    grid = make_grid(16, 4)
    f = np.random.default_rng(8).random(grid.size)
    np.testing.assert_allclose(interpolate_shift(grid, f, 0.0), f)

  def test_whole_cell_shift(self):
    grid = make_grid(16, 4)
    f = np.random.default_rng(9).random(grid.size)
    out = interpolate_shift(grid, f, grid.dy)
    np.testing.assert_allclose(out[:-1], f[1:])
    assert out[-1] == f[-1]

  def test_affine_slices_are_reproduced(self):
    grid = make_grid(16, 4)
    f = 2.0 * np.arange(grid.size)
    out = interpolate_shift(grid, f, 0.4 * grid.dy)
    np.testing.assert_allclose(out[:-1], f[:-1] + 0.8, atol=1e-12)

  def test_negative_shift_clamps_below(self):
    grid = make_grid(16, 4)
    f = 2.0 * np.arange(grid.size)
    out = interpolate_shift(grid, f, -2.5 * grid.dy)
    assert out[0] == 0.0 and out[1] == 0.0
    np.testing.assert_allclose(out[3:], f[3:] - 5.0, atol=1e-12)

  def test_contraction(self):
    grid = make_grid(32, 4)
    rng = np.random.default_rng(10)
    f = rng.normal(size=(5, grid.size))
    zeta = rng.uniform(-0.5, 0.5, size=5)
    out = interpolate_shift(grid, f, zeta)
    assert np.all(np.max(np.abs(out), axis=-1) <= np.max(np.abs(f), axis=-1) + 1e-15)

  def test_one_shift_per_slice(self):
    grid = make_grid(16, 4)
    f = np.random.default_rng(11).random(grid.size)
    out = interpolate_shift(grid, f, np.array([0.0, grid.dy]))
    assert out.shape == (2, grid.size)
    np.testing.assert_allclose(out[0], f)
    np.testing.assert_allclose(out[1, :-1], f[1:])

class TestCubicShift:

  def test_zero_shift(self):
    grid = make_grid(16, 4)
    f = np.random.default_rng(12).random(grid.size)
    np.testing.assert_allclose(interpolate_shift_cubic(grid, f, 0.0), f, atol=1e-15)

  @pytest.mark.parametrize("cells", [0.3, -1.7, 2.25])
  def test_cubic_slices_are_reproduced(self, cells):
    grid = make_grid(16, 4)
    i = np.arange(grid.size, dtype=float)
    f = 0.01 * i ** 3 - i ** 2 + 3 * i
    out = interpolate_shift_cubic(grid, f, cells * grid.dy)

    s = i + cells
    inside = (np.floor(s) - 1 >= 0) & (np.floor(s) + 2 <= grid.size - 1)
    expected = 0.01 * s ** 3 - s ** 2 + 3 * s
    np.testing.assert_allclose(out[inside], expected[inside], atol=1e-9)

  def test_far_off_the_grid_takes_the_end_values(self):
    grid = make_grid(16, 4)
    f = np.random.default_rng(13).random(grid.size)
    np.testing.assert_allclose(interpolate_shift_cubic(grid, f, 100 * grid.dy), f[-1])
    np.testing.assert_allclose(interpolate_shift_cubic(grid, f, -100 * grid.dy), f[0])

  def test_repeated_half_cell_shifts_keep_the_peak(self):
    '''Back and forth by half a cell: the linear rule flattens a bump, the cubic rule barely does'''
    grid = make_grid(64, 4)
    bump = np.exp(-0.5 * ((np.arange(grid.size) - grid.M) / 4.0) ** 2)

    def peak_loss(kind):
      f = bump
      for _ in range(50):
        f = shift_slices(grid, shift_slices(grid, f, 0.5 * grid.dy, kind), -0.5 * grid.dy, kind)
      return 1.0 - f[grid.M]

    linear, cubic = peak_loss(Interpolation.LINEAR), peak_loss(Interpolation.CUBIC)
    assert linear > 0.3
    assert abs(cubic) < 0.05
    assert abs(cubic) < 0.25 * linear

  def test_dispatch(self):
    grid = make_grid(16, 4)
    f = np.random.default_rng(14).random((3, grid.size))
    zeta = np.array([0.1, -0.7, 1.3]) * grid.dy
    linear = shift_slices(grid, f, zeta, Interpolation.LINEAR)
    np.testing.assert_array_equal(linear, interpolate_shift(grid, f, zeta))
    np.testing.assert_array_equal(shift_slices(grid, f, zeta), interpolate_shift_cubic(grid, f, zeta))

class TestStability:

  def test_l2_amplification(self, bates_params, european_call):
    h = 0.01
    grid = build_grid(bates_params, european_call, 50, 0.01, span=2.56)
    assert grid.M == 256
    v = 0.04
    system = assemble_A(grid, drift_reduced(bates_params, v, 0.0, 0.0), v, rho3(bates_params), h)
    bound = 1 + 2 * h * grid.dy * np.sum(np.abs(grid.nu_samples))

    rng = np.random.default_rng(12)
    for _ in range(20):
      f = rng.normal(size=grid.size)
      u = solve_step(system, apply_B(grid, f, h))
      assert np.linalg.norm(u) <= bound * np.linalg.norm(f) * (1 + 1e-12)

  def test_identity_step(self):
    grid = make_grid(32, 0)
    f = payoff(call(), grid.y)
    system = assemble_A(grid, 0.0, 0.0, 1.0, 0.01)
    u = solve_step(system, apply_B(grid, f, 0.01) + boundary_vector(grid, zero_boundary, 0, 0.0, 0.0, 0.01))
    np.testing.assert_allclose(u, f, atol=1e-14)
