'''
European and Longstaff-Schwartz estimators on top of the hybrid path simulation
'''

import logging
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Optional

import numpy as np
from scipy import linalg

from errors import ConfigError, NumericalError
from lattice import build_lattice
from model import ModelMode, ModelParams, OptionSpec, payoff
from .batch import McBatch, McConfig, simulate_batch

logger = logging.getLogger(__name__)

Z_95 = 1.96
RIDGE = 1e-10

@dataclass
class McEstimate:
  price: float
  ci_halfwidth: float
  '''Half-width of the 95% confidence interval'''
  diagnostics: dict = field(default_factory=dict)

  def __iter__(self):
    yield self.price
    yield self.ci_halfwidth

def _simulate(params: ModelParams, spec: OptionSpec, cfg: McConfig, mode: Optional[ModelMode]):
  mode = mode or params.default_mode
  params = params.for_mode(mode)
  lattice = build_lattice(params, cfg.n_steps, spec.maturity, mode)
  return params, mode, simulate_batch(params, lattice, cfg)

def _summarize(samples: np.ndarray) -> tuple[float, float]:
  return float(np.mean(samples)), float(Z_95 * np.std(samples, ddof=1) / np.sqrt(len(samples)))

def price_european_mc(params: ModelParams, spec: OptionSpec, cfg: McConfig,
                      mode: Optional[ModelMode] = None) -> McEstimate:
  '''Mean discounted payoff and the half-width of its 95% confidence interval'''
  if spec.is_american:
    raise ConfigError("exercise", "European Monte Carlo needs a European option")
  _, _, batch = _simulate(params, spec, cfg, mode)

  samples = np.exp(-batch.discount[:, -1]) * payoff(spec, batch.y[:, -1])
  price, ci = _summarize(samples)
  logger.info("European MC %.6f +- %.6f (%i paths)", price, ci, batch.n_paths)
  return McEstimate(price, ci, {"jumps": int(batch.jump_counts.sum(dtype=np.int64))})

def regression_basis(moneyness: np.ndarray, variance: np.ndarray, factor: Optional[np.ndarray],
                     degree: int) -> np.ndarray:
  '''All monomials of total degree <= `degree` in the state variables, constant included'''
  variables = [moneyness, variance] if factor is None else [moneyness, variance, factor]
  columns = [np.ones_like(moneyness)]
  for d in range(1, degree + 1):
    for combo in combinations_with_replacement(variables, d):
      columns.append(np.prod(combo, axis=0))
  return np.column_stack(columns)

def continuation_values(basis: np.ndarray, targets: np.ndarray) -> np.ndarray:
  '''
  Least-squares fit of `targets` on `basis` through the ridge-regularized
  normal equations. Falls back to the mean when there are fewer samples than columns.
  '''
  if basis.shape[0] < basis.shape[1]:
    return np.full(basis.shape[0], targets.mean())
  gram = basis.T @ basis + RIDGE * np.eye(basis.shape[1])
  try:
    coef = linalg.solve(gram, basis.T @ targets, assume_a="pos")
  except linalg.LinAlgError as e:
    raise NumericalError(f"Regression normal equations are singular: {e}") from e
  return basis @ coef

def _longstaff_schwartz(spec: OptionSpec, batch: McBatch, degree: int, with_factor: bool) -> np.ndarray:
  '''Discounted cash flow of every path under the regressed exercise rule'''
  cash = payoff(spec, batch.y[:, -1])
  cash_discount = batch.discount[:, -1].copy()

  for date in reversed(range(len(batch.record_steps) - 1)):
    exercise = payoff(spec, batch.y[:, date])
    itm = np.nonzero(exercise > 0)[0]
    if len(itm) == 0:
      continue

    discount = batch.discount[itm, date]
    held = cash[itm] * np.exp(-(cash_discount[itm] - discount))
    basis = regression_basis(
      np.exp(batch.y[itm, date]) / spec.strike,
      batch.variance[itm, date],
      batch.factor[itm, date] if with_factor else None,
      degree
    )
    if len(itm) < basis.shape[1]:
      logger.debug("Only %i paths in the money at date %i, using the mean", len(itm), date)
    continuation = continuation_values(basis, held)

    stop = itm[exercise[itm] > continuation]
    cash[stop] = exercise[stop]
    cash_discount[stop] = batch.discount[stop, date]
    logger.debug("Date %i: %i of %i in-the-money paths exercise", date, len(stop), len(itm))

  return cash * np.exp(-cash_discount)

def price_american_ls(params: ModelParams, spec: OptionSpec, cfg: McConfig,
                      mode: Optional[ModelMode] = None) -> McEstimate:
  '''
  Longstaff-Schwartz estimate over `cfg.exercise_dates` equally spaced dates.
  Immediate exercise at time 0 is compared against the mean continuation.
  '''
  if not spec.is_american:
    raise ConfigError("exercise", "Longstaff-Schwartz needs an American option")
  params, mode, batch = _simulate(params, spec, cfg, mode)
  with_factor = mode is ModelMode.BATES_HULL_WHITE
  samples = _longstaff_schwartz(spec, batch, cfg.basis_degree, with_factor)

  held, ci = _summarize(samples)
  intrinsic = float(payoff(spec, np.log(params.s0)))
  price = max(intrinsic, held)
  logger.info("Longstaff-Schwartz %.6f +- %.6f (%i dates, %i paths)", price, ci, cfg.exercise_dates, batch.n_paths)
  return McEstimate(price, ci, {"jumps": int(batch.jump_counts.sum(dtype=np.int64))})
