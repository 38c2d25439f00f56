'''
The log-price mesh and the truncated Levy kernel sampled on it
'''

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy import fft

from errors import ConfigError
from model import ModelParams, OptionSpec, levy_density

logger = logging.getLogger(__name__)

PAPER_SPAN = 1.93
'''Half-width covering [ln S0 - 1.59, ln S0 + 1.93] for the short-maturity experiments'''

@dataclass(frozen=True)
class PideGrid:
  '''
  Uniform grid y_i = y0 + i dy, i = -M..M, and the kernel nu(l dy), l = -R..R.
  '''
  y0: float
  dy: float
  M: int
  '''Half-width in grid points'''
  R: int
  '''Truncation radius of the jump integral in grid points'''
  nu_samples: np.ndarray
  '''nu(xi_l) for l = -R..R'''

  def __post_init__(self):
    if self.R >= self.M:
      raise ConfigError("dy", f"jump radius R = {self.R} must stay below the half-width M = {self.M}")
    if len(self.nu_samples) != 2 * self.R + 1:
      raise ValueError("Kernel length does not match the truncation radius")

  @property
  def size(self) -> int:
    return 2 * self.M + 1

  @property
  def Lambda(self) -> float:
    '''Sum of the kernel samples'''
    return float(np.sum(self.nu_samples))

  @cached_property
  def y(self) -> np.ndarray:
    return self.y_at(np.arange(-self.M, self.M + 1))

  def y_at(self, index):
    '''Grid value at (possibly exterior) signed indices'''
    return self.y0 + np.asarray(index) * self.dy

  @cached_property
  def fft_size(self) -> int:
    '''Smallest power of two holding the full linear convolution, at least 2(2M+1)'''
    return 1 << (2 * self.size - 1).bit_length()

  @cached_property
  def kernel_spectrum(self) -> np.ndarray:
    '''Real FFT of the reversed kernel, so that convolution samples sum_l nu_l f_{i+l}'''
    return fft.rfft(self.nu_samples[::-1], self.fft_size)

def default_span(params: ModelParams, maturity: float, width: float = 6.0) -> float:
  '''
  Localization half-width: `width` standard deviations of the log-price over the
  contract's life, counting the diffusion and the jumps, never below the
  short-maturity interval.
  '''
  variance = max(params.v0, params.theta_v) + params.lam * (params.jump_mean ** 2 + params.delta ** 2)
  if params.sigma_r > 0:
    variance += params.sigma_r ** 2 * maturity ** 2 / 3
  return max(PAPER_SPAN, width * math.sqrt(variance * maturity))

def _truncation_radius(params: ModelParams, dy: float, max_radius: int, tolerance: float):
  '''Smallest R whose kernel mass dy * sum nu is within tolerance * lambda of lambda'''
  l = np.arange(0, max_radius + 1)
  right = levy_density(params, l * dy)
  left = levy_density(params, -l * dy)

  mass = dy * (np.cumsum(right) + np.cumsum(left) - right[0])
  within = np.nonzero(np.abs(mass - params.lam) <= tolerance * params.lam)[0]
  if len(within) == 0:
    raise ConfigError(
      "jump_tolerance",
      f"kernel mass never reaches {params.lam} within {tolerance:g} for R < {max_radius + 1}"
    )
  R = int(within[0])
  return R, np.concatenate([left[R:0:-1], right[:R + 1]])

def build_grid(params: ModelParams, spec: OptionSpec, n_steps: int, dy: float,
               span: Optional[float] = None, jump_tolerance: float = 1e-4,
               max_half_width: int = 2 ** 15) -> PideGrid:
  '''
  Grid centered at ln S0 covering +-span, with the smallest jump radius that
  keeps the quadrature mass within tolerance of lambda.
  '''
  if not dy > 0:
    raise ConfigError("dy", f"must be positive, got {dy}")
  if span is None:
    span = default_span(params, spec.maturity)
  elif span <= 0:
    raise ConfigError("span", f"must be positive, got {span}")

  M = math.ceil(span / dy - 1e-9)
  if M > max_half_width:
    raise ConfigError("dy", f"dy = {dy} needs M = {M} points per side, above the cap {max_half_width}")

  if params.lam == 0:
    R, nu = 0, np.zeros(1)
  else:
    R, nu = _truncation_radius(params, dy, M - 1, jump_tolerance)

  grid = PideGrid(math.log(params.s0), dy, M, R, nu)
  logger.info("PIDE grid: %i points, dy = %g, jump radius %i (%i steps)", grid.size, dy, R, n_steps)
  return grid
