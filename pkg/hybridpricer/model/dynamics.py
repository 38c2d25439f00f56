'''
Drift functions, the Levy density of the log-jumps and the payoff in log-price.
All functions broadcast over numpy arrays.
'''

import numpy as np
from scipy.stats import norm

from errors import DomainError
from .params import ModelParams, OptionSpec, Payoff
from .rate_curve import rate_curve

def rho3(params: ModelParams) -> float:
  '''sqrt(1 - rho1^2 - rho2^2), the loading on the independent Brownian motion'''
  rest = 1.0 - params.rho1 ** 2 - params.rho2 ** 2
  if rest < 0:
    # Rounding can push a boundary case a hair below zero
    if rest > -1e-14:
      return 0.0
    raise DomainError("rho2", f"rho1^2 + rho2^2 = {1 - rest} exceeds 1")
  return float(np.sqrt(rest))

def mu_v(params: ModelParams, v):
  '''CIR drift kappa_v (theta_v - v)'''
  return params.kappa_v * (params.theta_v - v)

def mu_x(params: ModelParams, x):
  '''OU drift of the rate factor'''
  return -params.kappa_r * x

def drift_y(params: ModelParams, v, x, t):
  '''Drift of the log-price, sigma_r x + phi_t - eta - v/2'''
  return params.sigma_r * x + rate_curve(params).phi(t) - params.eta - v / 2

def drift_reduced(params: ModelParams, v, x, t):
  '''
  Drift of the log-price once the variance and rate increments are taken out:
  mu_Y - (rho1/sigma_v) mu_V - rho2 sqrt(v) mu_X
  '''
  return (
    drift_y(params, v, x, t)
    - params.rho1 / params.sigma_v * mu_v(params, v)
    - params.rho2 * np.sqrt(v) * mu_x(params, x)
  )

def levy_density(params: ModelParams, xi):
  '''lambda times the Gaussian density of the log-jump'''
  if params.lam == 0:
    return np.zeros_like(np.asarray(xi, dtype=float))[()]
  return params.lam * norm.pdf(xi, loc=params.jump_mean, scale=params.delta)

def payoff(spec: OptionSpec, y):
  '''Payoff as a function of log-price'''
  spot = np.exp(y)
  match spec.payoff:
    case Payoff.CALL: return np.maximum(spot - spec.strike, 0.0)
    case Payoff.PUT: return np.maximum(spec.strike - spot, 0.0)
