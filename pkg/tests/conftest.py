'''
Shared parameter sets: standard Bates, a Feller-violating variant and Bates-Hull-White
'''

import pytest

from model import ModelParams, OptionSpec, Exercise, Payoff

SPOTS = (80.0, 90.0, 100.0, 110.0, 120.0)

def bates(rho1: float = -0.5, sigma_v: float = 0.4, s0: float = 100.0, **overrides) -> ModelParams:
  '''Standard Bates parameters of the short-maturity experiments'''
  values = dict(s0=s0, v0=0.04, r0=0.03, eta=0.05, kappa_v=2.0, theta_v=0.04, sigma_v=sigma_v,
                rho1=rho1, lam=5.0, gamma=0.0, delta=0.1)
  values.update(overrides)
  return ModelParams(**values)

def bates_hull_white(rho2: float = -0.5, s0: float = 100.0, **overrides) -> ModelParams:
  return bates(s0=s0, kappa_r=1.0, sigma_r=0.2, rho2=rho2, flat_forward=0.03, **overrides)

def call(maturity: float = 0.5, exercise: Exercise = Exercise.EUROPEAN) -> OptionSpec:
  return OptionSpec(strike=100.0, maturity=maturity, exercise=exercise, payoff=Payoff.CALL)

@pytest.fixture
def bates_params() -> ModelParams:
  return bates()

@pytest.fixture
def feller_params() -> ModelParams:
  return bates(sigma_v=0.7)

@pytest.fixture
def bhw_params() -> ModelParams:
  return bates_hull_white()

@pytest.fixture
def european_call() -> OptionSpec:
  return call()

@pytest.fixture
def american_call() -> OptionSpec:
  return call(exercise=Exercise.AMERICAN)
