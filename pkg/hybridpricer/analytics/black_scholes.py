'''
Black-Scholes prices and implied volatility
'''

import numpy as np
from scipy.optimize import brentq
from scipy.stats import norm

from errors import BoundViolationError
from model import Payoff

VOL_BRACKET = (1e-6, 5.0)

def bs_price(spot: float, strike: float, maturity: float, rate: float, dividend: float,
             vol: float, payoff: Payoff = Payoff.CALL) -> float:
  '''Black-Scholes price with continuous dividend yield'''
  sqrt_t = np.sqrt(maturity)
  d1 = (np.log(spot / strike) + (rate - dividend + vol ** 2 / 2) * maturity) / (vol * sqrt_t)
  d2 = d1 - vol * sqrt_t
  forward_spot = spot * np.exp(-dividend * maturity)
  pv_strike = strike * np.exp(-rate * maturity)
  match payoff:
    case Payoff.CALL: return float(forward_spot * norm.cdf(d1) - pv_strike * norm.cdf(d2))
    case Payoff.PUT: return float(pv_strike * norm.cdf(-d2) - forward_spot * norm.cdf(-d1))

def price_bounds(spot: float, strike: float, maturity: float, rate: float, dividend: float,
                 payoff: Payoff = Payoff.CALL) -> tuple[float, float]:
  '''Static no-arbitrage band of a European price'''
  forward_spot = spot * np.exp(-dividend * maturity)
  pv_strike = strike * np.exp(-rate * maturity)
  match payoff:
    case Payoff.CALL: return max(forward_spot - pv_strike, 0.0), forward_spot
    case Payoff.PUT: return max(pv_strike - forward_spot, 0.0), pv_strike

def implied_vol(price: float, spot: float, strike: float, maturity: float, rate: float,
                dividend: float, payoff: Payoff = Payoff.CALL) -> float:
  '''The Black-Scholes volatility reproducing `price`, found by Brent's method'''
  low, high = price_bounds(spot, strike, maturity, rate, dividend, payoff)
  if not low < price < high:
    raise BoundViolationError(f"Price {price} outside the no-arbitrage band ({low}, {high})")

  def mismatch(vol):
    return bs_price(spot, strike, maturity, rate, dividend, vol, payoff) - price

  try:
    return float(brentq(mismatch, *VOL_BRACKET, xtol=1e-14, rtol=1e-14, maxiter=200))
  except ValueError as e:
    raise BoundViolationError(f"No volatility in {VOL_BRACKET} reproduces price {price}") from e
