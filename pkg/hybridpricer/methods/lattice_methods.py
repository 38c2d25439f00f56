'''
Pricing methods built on the (V, X) lattice: the hybrid tree/finite-difference
scheme and the hybrid Monte Carlo estimators
'''

import logging
from dataclasses import replace

from htfd import price_htfd
from mc import McConfig, price_american_ls, price_european_mc
from .base import PricingMethod

logger = logging.getLogger(__name__)

class HybridTreeFiniteDifference(PricingMethod):
  '''Backward induction on the lattice with one PIDE solve per node'''
  name = "htfd"

  def compute(self, params, spec, n_steps, resolution):
    settings = replace(self.entry.htfd, threads=self.threads)
    result = price_htfd(params, spec, n_steps, float(resolution), self.entry.mode, settings)
    return result.price, None, result.diagnostics

class HybridMonteCarlo(PricingMethod):
  '''Discounted payoff average over hybrid paths (European only)'''
  name = "mc"

  def _mc_config(self, n_steps, n_paths, exercise_dates=1):
    return McConfig(
      n_paths=int(n_paths),
      n_steps=n_steps,
      seed=self.entry.seed,
      exercise_dates=exercise_dates,
      basis_degree=self.entry.basis_degree,
      threads=self.threads
    )

  def compute(self, params, spec, n_steps, resolution):
    estimate = price_european_mc(params, spec, self._mc_config(n_steps, resolution), self.entry.mode)
    return estimate.price, estimate.ci_halfwidth, estimate.diagnostics

class LongstaffSchwartz(HybridMonteCarlo):
  '''Least-squares Monte Carlo over the hybrid paths (American only)'''
  name = "ls"

  def compute(self, params, spec, n_steps, resolution):
    cfg = self._mc_config(n_steps, resolution, self.entry.exercise_dates)
    estimate = price_american_ls(params, spec, cfg, self.entry.mode)
    return estimate.price, estimate.ci_halfwidth, estimate.diagnostics
