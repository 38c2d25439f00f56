'''
Hybrid Monte Carlo paths, European averaging and Longstaff-Schwartz regression
'''

import math

import numpy as np
import pytest

from conftest import SPOTS, bates, call
from errors import ConfigError
from htfd import price_htfd
from lattice import build_lattice
from mc import (McConfig, continuation_values, price_american_ls, price_european_mc, regression_basis,
                simulate_batch)
from model import Exercise, ModelMode, OptionSpec, Payoff

CF_ATM = 7.5210

def put(maturity: float = 0.5, exercise: Exercise = Exercise.EUROPEAN) -> OptionSpec:
  return OptionSpec(strike=100.0, maturity=maturity, exercise=exercise, payoff=Payoff.PUT)

def simulate(params, n_paths=20000, n_steps=50, maturity=0.5, mode=None, **options):
  mode = mode or params.default_mode
  params = params.for_mode(mode)
  cfg = McConfig(n_paths, n_steps, **options)
  return simulate_batch(params, build_lattice(params, n_steps, maturity, mode), cfg)

class TestMcConfig:

  @pytest.mark.parametrize("options, field", [
    (dict(n_paths=1, n_steps=10), "n_paths"),
    (dict(n_paths=100, n_steps=0), "n_steps"),
    (dict(n_paths=100, n_steps=10, exercise_dates=3), "exercise_dates"),
    (dict(n_paths=100, n_steps=10, basis_degree=0), "basis_degree"),
  ])
  def test_validation(self, options, field):
    with pytest.raises(ConfigError) as info:
      McConfig(**options)
    assert info.value.field == field

  def test_record_steps(self):
    assert McConfig(100, 100, exercise_dates=20).record_steps.tolist() == list(range(5, 101, 5))
    assert McConfig(100, 100).record_steps.tolist() == [100]

class TestSimulateBatch:

  def test_same_seed_same_batch(self, bhw_params):
    first = simulate(bhw_params, n_paths=3000, n_steps=20, seed=7, chunk_size=1000)
    second = simulate(bhw_params, n_paths=3000, n_steps=20, seed=7, chunk_size=1000)
    np.testing.assert_array_equal(first.y, second.y)
    np.testing.assert_array_equal(first.jump_counts, second.jump_counts)

  def test_thread_count_does_not_matter(self, bhw_params):
    serial = simulate(bhw_params, n_paths=3000, n_steps=20, seed=7, chunk_size=500)
    pooled = simulate(bhw_params, n_paths=3000, n_steps=20, seed=7, chunk_size=500, threads=3)
    np.testing.assert_array_equal(serial.y, pooled.y)
    np.testing.assert_array_equal(serial.discount, pooled.discount)

  def test_different_seeds_differ(self, bates_params):
    assert not np.array_equal(simulate(bates_params, 1000, 10, seed=1).y, simulate(bates_params, 1000, 10, seed=2).y)

  def test_shapes(self, bhw_params):
    batch = simulate(bhw_params, n_paths=500, n_steps=20, exercise_dates=4)
    assert batch.n_paths == 500
    assert batch.y.shape == batch.variance.shape == batch.discount.shape == (500, 4)
    assert batch.jump_counts.shape == (500, 20)
    assert np.all((batch.v_index >= 0) & (batch.v_index <= batch.record_steps))

  def test_lattice_must_match(self, bates_params):
    lattice = build_lattice(bates_params, 10, 0.5, ModelMode.STANDARD_BATES)
    with pytest.raises(ConfigError):
      simulate_batch(bates_params, lattice, McConfig(100, 20))

  def test_gaussian_increments_without_jumps_or_correlation(self):
    params = bates(lam=0.0, rho1=0.0, sigma_v=1e-4)
    batch = simulate(params, n_paths=40000, n_steps=10)
    increments = batch.y[:, -1] - math.log(100.0)

    variance = 0.04 * 0.5
    mean = (0.03 - 0.05 - 0.02) * 0.5
    assert abs(increments.mean() - mean) < 3 * math.sqrt(variance / 40000)
    assert increments.var(ddof=1) == pytest.approx(variance, abs=3 * variance * math.sqrt(2 / 40000))

  def test_jump_counts(self, bates_params):
    batch = simulate(bates_params, n_paths=40000, n_steps=50)
    totals = batch.jump_counts.sum(axis=1)
    assert abs(totals.mean() - 2.5) < 3 * math.sqrt(2.5 / 40000)
    assert np.all(batch.jump_sums[totals == 0] == 0.0)

  def test_deterministic_rate_discount(self, bates_params):
    batch = simulate(bates_params, n_paths=200, n_steps=50)
    np.testing.assert_allclose(batch.discount[:, -1], 0.015, rtol=1e-12)

  def test_stochastic_rate_discount_matches_the_curve(self, bhw_params):
    batch = simulate(bhw_params, n_paths=50000, n_steps=50)
    bonds = np.exp(-batch.discount[:, -1])
    stderr = bonds.std(ddof=1) / math.sqrt(len(bonds))
    assert abs(bonds.mean() - math.exp(-0.015)) < 3 * stderr + 5e-4

  def test_discounted_forward(self, bates_params):
    batch = simulate(bates_params, n_paths=40000, n_steps=50, seed=3)
    forward = np.exp(batch.y[:, -1] - batch.discount[:, -1])
    stderr = forward.std(ddof=1) / math.sqrt(len(forward))
    assert abs(forward.mean() - 100 * math.exp(-0.05 * 0.5)) < 4 * stderr

class TestEuropean:

  def test_close_to_the_fourier_price(self, bates_params, european_call):
    price, ci = price_european_mc(bates_params, european_call, McConfig(50000, 50, seed=11))
    assert abs(price - CF_ATM) < ci + 0.03

  def test_put_call_parity_pathwise(self, bates_params):
    cfg = McConfig(20000, 20, seed=5)
    call_price, _ = price_european_mc(bates_params, call(), cfg)
    put_price, _ = price_european_mc(bates_params, put(), cfg)

    batch = simulate(bates_params, n_paths=20000, n_steps=20, seed=5)
    forward = np.mean(np.exp(-batch.discount[:, -1]) * (np.exp(batch.y[:, -1]) - 100.0))
    assert call_price - put_price == pytest.approx(forward, abs=1e-9)

  def test_rejects_american(self, bates_params, american_call):
    with pytest.raises(ConfigError):
      price_european_mc(bates_params, american_call, McConfig(100, 10))

  def test_diagnostics(self, bates_params, european_call):
    estimate = price_european_mc(bates_params, european_call, McConfig(1000, 10))
    assert estimate.diagnostics["jumps"] > 0
    assert estimate.ci_halfwidth > 0

  @pytest.mark.slow
  def test_within_confidence_interval(self, bates_params, european_call):
    price, ci = price_european_mc(bates_params, european_call, McConfig(200000, 100, seed=20240501))
    assert abs(price - CF_ATM) <= ci

  @pytest.mark.slow
  def test_bates_hull_white(self, bhw_params, european_call):
    price, ci = price_european_mc(bhw_params, european_call, McConfig(200000, 100, seed=20240501))
    assert abs(price - 7.2315) <= ci + 0.02

  @pytest.mark.slow
  def test_confidence_interval_coverage(self, bates_params, european_call):
    covered = 0
    for seed in range(50):
      price, ci = price_european_mc(bates_params, european_call, McConfig(200000, 100, seed=seed))
      covered += abs(price - CF_ATM) <= ci
    assert covered >= 44

class TestRegression:

  def test_basis_columns(self):
    m, v, x = np.linspace(0.5, 1.5, 20), np.linspace(0.01, 0.1, 20), np.linspace(-1, 1, 20)
    assert regression_basis(m, v, None, 2).shape == (20, 6)
    assert regression_basis(m, v, x, 2).shape == (20, 10)
    assert regression_basis(m, v, None, 3).shape == (20, 10)
    np.testing.assert_array_equal(regression_basis(m, v, x, 1)[:, 0], 1.0)

  def test_recovers_polynomials(self):
    rng = np.random.default_rng(0)
    m, v = rng.uniform(0.8, 1.2, 500), rng.uniform(0.01, 0.1, 500)
    basis = regression_basis(m, v, None, 2)
    targets = 1.0 + 2.0 * m - 3.0 * m * v + 0.5 * v ** 2
    np.testing.assert_allclose(continuation_values(basis, targets), targets, atol=1e-6)

  def test_falls_back_to_the_mean(self):
    basis = regression_basis(np.array([1.1, 1.2, 1.3]), np.array([0.04, 0.05, 0.06]), None, 2)
    np.testing.assert_allclose(continuation_values(basis, np.array([1.0, 2.0, 6.0])), 3.0)

class TestLongstaffSchwartz:

  def test_single_date_is_european(self, bates_params):
    cfg = McConfig(5000, 20, seed=9)
    american = price_american_ls(bates_params, call(exercise=Exercise.AMERICAN), cfg)
    european = price_european_mc(bates_params, call(), cfg)
    assert american.price == european.price
    assert american.ci_halfwidth == european.ci_halfwidth

  def test_no_early_exercise_without_dividends(self):
    params = bates(eta=0.0)
    cfg = McConfig(20000, 50, seed=4, exercise_dates=10)
    american = price_american_ls(params, call(exercise=Exercise.AMERICAN), cfg)
    european = price_european_mc(params, call(), McConfig(20000, 50, seed=4))
    assert abs(american.price - european.price) <= 2 * european.ci_halfwidth

  def test_early_exercise_premium_of_a_put(self, bates_params):
    cfg = McConfig(20000, 50, seed=6, exercise_dates=10)
    american = price_american_ls(bates_params, put(exercise=Exercise.AMERICAN), cfg)
    european = price_european_mc(bates_params, put(), McConfig(20000, 50, seed=6))
    assert american.price >= european.price - american.ci_halfwidth

  def test_deep_in_the_money_put_is_worth_at_least_intrinsic(self):
    params = bates(s0=40.0)
    estimate = price_american_ls(params, put(exercise=Exercise.AMERICAN), McConfig(2000, 10, exercise_dates=5))
    assert estimate.price >= 60.0

  def test_rate_factor_enters_the_basis(self, bhw_params):
    estimate = price_american_ls(bhw_params, put(exercise=Exercise.AMERICAN),
                                 McConfig(5000, 20, seed=2, exercise_dates=4))
    assert estimate.price > 0

  def test_rejects_european(self, bates_params, european_call):
    with pytest.raises(ConfigError):
      price_american_ls(bates_params, european_call, McConfig(100, 10))

  @pytest.mark.slow
  def test_reference_american(self, bates_params, american_call):
    price, ci = price_american_ls(bates_params, american_call, McConfig(200000, 100, seed=20240501, exercise_dates=20))
    assert abs(price - 7.5970) <= 2 * ci

  @pytest.mark.slow
  @pytest.mark.parametrize("spot", SPOTS)
  def test_low_biased_against_finite_differences(self, spot, american_call):
    '''Finitely many exercise dates can only lose value'''
    params = bates(s0=spot)
    reference = price_htfd(params, american_call, 100, 0.0025).price
    price, ci = price_american_ls(params, american_call, McConfig(200000, 100, seed=20240501, exercise_dates=20))
    assert price <= reference + 2 * ci
