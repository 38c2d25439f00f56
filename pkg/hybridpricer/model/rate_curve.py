'''
Deterministic shift of the short rate, r_t = sigma_r X_t + phi_t,
fitted to a flat market curve P(0, T) = exp(-f T).
'''

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .params import ModelParams

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class RateCurve:
  '''
  The fitted shift phi_t of the Hull-White rate.
  With sigma_r = 0 the curve is flat at r0.
  '''
  level: float
  '''phi at t = 0 (the flat forward, or r0 for deterministic rates)'''
  kappa_r: float
  sigma_r: float

  @property
  def _convexity(self) -> float:
    if self.sigma_r == 0:
      return 0.0
    return self.sigma_r ** 2 / (2 * self.kappa_r ** 2)

  def phi(self, t):
    '''phi_t = f + sigma_r^2/(2 kappa_r^2) (1 - e^{-kappa_r t})^2'''
    t = np.asarray(t, dtype=float)
    if self.sigma_r == 0:
      return np.full_like(t, self.level)[()]
    return (self.level + self._convexity * (1 - np.exp(-self.kappa_r * t)) ** 2)[()]

  def _shape_integral(self, t):
    '''Integral over [0, t] of (1 - e^{-kappa s})^2'''
    k = self.kappa_r
    return t - 2 * (1 - np.exp(-k * t)) / k + (1 - np.exp(-2 * k * t)) / (2 * k)

  def integrated_phi(self, t):
    '''Closed form of the integral of phi over [0, t]'''
    t = np.asarray(t, dtype=float)
    if self.sigma_r == 0:
      return (self.level * t)[()]
    return (self.level * t + self._convexity * self._shape_integral(t))[()]

  def factor_variance(self, t):
    '''Variance of sigma_r times the integral of X over [0, t], X an OU factor started at 0'''
    t = np.asarray(t, dtype=float)
    if self.sigma_r == 0:
      return np.zeros_like(t)[()]
    return (2 * self._convexity * self._shape_integral(t))[()]

  def bond_price(self, t):
    '''Model zero-coupon bond price E[exp(-int_0^t r_s ds)]'''
    return np.exp(-self.integrated_phi(t) + 0.5 * self.factor_variance(t))

def fit_phi(params: ModelParams, market_flat_forward: float) -> RateCurve:
  '''
  Fits phi so the model's zero-coupon prices reproduce exp(-f T).
  Returns phi = r0 everywhere when the rate is deterministic.
  '''
  if params.sigma_r == 0:
    return RateCurve(level=params.r0, kappa_r=params.kappa_r, sigma_r=0.0)

  if market_flat_forward != params.r0:
    logger.warning("Fitted phi starts at %s instead of r0 = %s", market_flat_forward, params.r0)
  return RateCurve(level=market_flat_forward, kappa_r=params.kappa_r, sigma_r=params.sigma_r)

@lru_cache(maxsize=64)
def rate_curve(params: ModelParams) -> RateCurve:
  '''The curve fitted to the parameters' own flat forward'''
  return fit_phi(params, params.flat_forward)
