'''
Module contains a base definition of a pricing method
'''

import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Optional

from config import Resolution, RunEntry
from model import ModelParams, OptionSpec

@dataclass
class PriceResult:
  '''One row of the result table'''
  price: float
  ci_halfwidth: Optional[float]
  '''Half-width of the 95% confidence interval, None for deterministic methods'''
  wall_time_seconds: float
  '''Time spent in the numerical kernel only'''
  diagnostics: dict = field(default_factory=dict)

class PricingMethod(ABC):
  '''
  Abstract base class for a pricing method.
  Concrete methods are looked up by their `name` among the subclasses.
  '''
  name: str
  '''Key used by the `method` field of a run entry'''
  entry: RunEntry
  '''The run entry this method was configured from'''
  threads: int
  '''Worker threads the method may use'''

  def __init__(self, entry: RunEntry, threads: int = 1):
    self.entry = entry
    self.threads = max(1, threads)

  def price(self, params: ModelParams, spec: OptionSpec, n_steps: Optional[int],
            resolution: Resolution) -> PriceResult:
    '''Prices one discretization and times the numerical kernel'''
    start_time = time.perf_counter()
    price, ci_halfwidth, diagnostics = self.compute(params, spec, n_steps, resolution)
    stop_time = time.perf_counter()
    return PriceResult(price, ci_halfwidth, stop_time - start_time, diagnostics)

  @abstractmethod
  def compute(self, params: ModelParams, spec: OptionSpec, n_steps: Optional[int],
              resolution: Resolution) -> tuple[float, Optional[float], dict]:
    '''
    Returns (price, CI half-width or None, diagnostics) for one discretization.
    '''
