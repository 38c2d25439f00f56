'''
Market and model parameters of the Bates-Hull-White dynamics and the option contract
'''

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, fields, replace
from enum import Enum
from typing import Optional

from errors import ConfigError, DomainError

logger = logging.getLogger(__name__)

class Exercise(Enum):
  '''Exercise style of the option'''
  EUROPEAN = "european"
  AMERICAN = "american"

class Payoff(Enum):
  '''Vanilla payoff type'''
  CALL = "call"
  PUT = "put"

class ModelMode(Enum):
  '''
  Which dynamics a pricer runs.
  `STANDARD_BATES` collapses the rate factor to a single node with r = r0.
  '''
  STANDARD_BATES = "standard_bates"
  BATES_HULL_WHITE = "bates_hull_white"

@dataclass(frozen=True)
class ModelParams:
  '''
  All parameters of the Bates-Hull-White model.
  Validated on construction, immutable afterwards.
  '''
  s0: float
  '''Initial spot price'''
  v0: float
  '''Initial variance'''
  r0: float
  '''Initial short rate'''
  eta: float
  '''Continuous dividend yield'''
  kappa_v: float
  '''Mean-reversion speed of the variance'''
  theta_v: float
  '''Long-run variance'''
  sigma_v: float
  '''Vol-of-vol'''
  rho1: float
  '''Spot-variance correlation'''
  lam: float
  '''Jump intensity per year'''
  gamma: float
  '''Log-jumps are Normal(gamma - delta^2/2, delta^2)'''
  delta: float
  '''Standard deviation of the log-jumps'''
  kappa_r: float = 0.0
  '''Mean-reversion speed of the rate factor'''
  sigma_r: float = 0.0
  '''Rate volatility, zero selects the standard Bates model'''
  rho2: float = 0.0
  '''Spot-rate correlation'''
  flat_forward: Optional[float] = None
  '''Instantaneous forward of the flat market curve, defaults to r0'''

  def __post_init__(self):
    for f in fields(self):
      value = getattr(self, f.name)
      if value is not None and not math.isfinite(value):
        raise ConfigError(f.name, f"must be finite, got {value}")

    if self.flat_forward is None:
      object.__setattr__(self, "flat_forward", self.r0)

    for name in ("s0", "v0", "kappa_v", "theta_v", "sigma_v", "delta"):
      if getattr(self, name) <= 0:
        raise ConfigError(name, f"must be positive, got {getattr(self, name)}")
    for name in ("kappa_r", "sigma_r", "lam"):
      if getattr(self, name) < 0:
        raise ConfigError(name, f"must be nonnegative, got {getattr(self, name)}")

    if not -1 < self.rho1 < 1:
      raise ConfigError("rho1", f"must lie in (-1, 1), got {self.rho1}")
    if self.rho1 ** 2 + self.rho2 ** 2 > 1:
      raise DomainError("rho2", f"rho1^2 + rho2^2 = {self.rho1 ** 2 + self.rho2 ** 2} exceeds 1")
    if self.sigma_r > 0 and self.kappa_r <= 0:
      raise ConfigError("kappa_r", "must be positive when sigma_r > 0")

  @property
  def jump_mean(self) -> float:
    '''Mean of the Gaussian log-jump'''
    return self.gamma - self.delta ** 2 / 2

  @property
  def default_mode(self) -> ModelMode:
    return ModelMode.STANDARD_BATES if self.sigma_r == 0 else ModelMode.BATES_HULL_WHITE

  def with_spot(self, s0: float) -> ModelParams:
    return replace(self, s0=s0)

  def for_mode(self, mode: ModelMode) -> ModelParams:
    '''
    Returns the parameters a pricer in `mode` actually uses.
    In standard Bates mode the rate factor is switched off, so phi is constantly r0.
    '''
    if mode is ModelMode.BATES_HULL_WHITE:
      return self

    if self.rho2 != 0:
      logger.warning("Ignoring rho2 = %s in standard Bates mode", self.rho2)
    if self.sigma_r != 0:
      logger.warning("Ignoring sigma_r = %s in standard Bates mode", self.sigma_r)
    return replace(self, sigma_r=0.0, kappa_r=0.0, rho2=0.0, flat_forward=self.r0)

@dataclass(frozen=True)
class OptionSpec:
  '''A vanilla option on the spot'''
  strike: float
  maturity: float
  '''Time to maturity in years'''
  exercise: Exercise = Exercise.EUROPEAN
  payoff: Payoff = Payoff.CALL

  def __post_init__(self):
    if not (math.isfinite(self.strike) and self.strike > 0):
      raise ConfigError("strike", f"must be positive, got {self.strike}")
    if not (math.isfinite(self.maturity) and self.maturity > 0):
      raise ConfigError("maturity", f"must be positive, got {self.maturity}")
    if not isinstance(self.exercise, Exercise):
      raise ConfigError("exercise", f"unknown exercise style {self.exercise!r}")
    if not isinstance(self.payoff, Payoff):
      raise ConfigError("payoff", f"unknown payoff {self.payoff!r}")

  @property
  def is_american(self) -> bool:
    return self.exercise is Exercise.AMERICAN
