'''
Backward induction of the hybrid tree/finite-difference scheme.

At every step and every lattice node (k, j) the four successor slices are
shifted by the correlation terms, averaged with the joint probabilities,
passed through the explicit jump operator and then through the implicit
tridiagonal solve. The shifts use four-point Lagrange interpolation unless
the settings ask for the linear rule. Nodes of one step are independent and
are processed in row chunks, optionally on a thread pool.
'''

import logging
from contextlib import nullcontext
from dataclasses import dataclass, field
from enum import Enum
from multiprocessing.pool import ThreadPool
from typing import Optional

import numpy as np

from errors import NumericalError
from lattice import BivariateLattice, build_lattice
from model import ModelMode, ModelParams, OptionSpec, drift_reduced, payoff, rate_curve, rho3
from pide import (PideGrid, TridiagonalSystem, apply_B, assemble_A, boundary_vector, build_grid,
                  Interpolation, default_span, payoff_boundary, shift_slices, solve_step, zero_boundary)
from .cube import PriceCube, terminal_condition

logger = logging.getLogger(__name__)

class Boundary(Enum):
  '''Values assumed outside the log-price grid'''
  PAYOFF = "payoff"
  ZERO = "zero"

@dataclass(frozen=True)
class HtfdSettings:
  '''Everything about the finite-difference side besides dy and N'''
  span: Optional[float] = None
  '''Half-width of the grid in log-price, derived from the model when None'''
  span_width: float = 6.0
  '''Standard deviations covered by the derived span'''
  jump_tolerance: float = 1e-4
  max_half_width: int = 2 ** 15
  boundary: Boundary = Boundary.PAYOFF
  interpolation: Interpolation = Interpolation.CUBIC
  '''Rule for the branch shifts; the linear rule adds a diffusion growing with N'''
  truncation: Optional[float] = None
  '''Rate-factor threshold L of the discount, no truncation when None'''
  chunk_elements: int = 2 ** 22
  '''Cap on grid values processed at once'''
  threads: int = 1

@dataclass
class HtfdResult:
  price: float
  '''Value at ln S0 on the root node'''
  cube: PriceCube
  '''The full time-0 cube'''
  grid: PideGrid
  lattice: BivariateLattice
  diagnostics: dict = field(default_factory=dict)

  def __iter__(self):
    yield self.price
    yield self.cube

def discount_factor(params: ModelParams, x, t: float, h: float, L: Optional[float] = None):
  '''exp(-(sigma_r x 1{x > -L} + phi_t) h)'''
  x = np.asarray(x, dtype=float)
  rate = params.sigma_r * x
  if L is not None:
    rate = np.where(x > -L, rate, 0.0)
  return np.exp(-(rate + rate_curve(params).phi(t)) * h)

def _boundary(settings: HtfdSettings, spec: OptionSpec):
  match settings.boundary:
    case Boundary.PAYOFF: return payoff_boundary(spec)
    case Boundary.ZERO: return zero_boundary

def backward_step(cube: PriceCube, lattice: BivariateLattice, grid: PideGrid, params: ModelParams,
                  spec: OptionSpec, n: int, settings: HtfdSettings = HtfdSettings(),
                  pool: Optional[ThreadPool] = None) -> PriceCube:
  '''Values at step n from the values at step n+1'''
  if cube.n != n + 1:
    raise ValueError(f"Expected the step {n + 1} cube, got step {cube.n}")

  h = lattice.h
  t = n * h
  P = grid.size
  v, x = lattice.v_tree.level(n), lattice.x_tree.level(n)
  v_next, x_next = lattice.v_tree.level(n + 1), lattice.x_tree.level(n + 1)
  k_up, k_down, pv = lattice.v_tree.transitions(n)
  j_up, j_down, px = lattice.x_tree.transitions(n)

  mu = drift_reduced(params, v[:, None], x[None, :], t)
  system = assemble_A(grid, mu, v[:, None], rho3(params), h)
  discount = discount_factor(params, x, t, h, settings.truncation)
  boundary = _boundary(settings, spec)
  obstacle = payoff(spec, grid.y) if spec.is_american else None
  workers = 1 if pool is not None else settings.threads

  v_moves = ((k_up, pv), (k_down, 1 - pv))
  x_moves = ((j_up, px), (j_down, 1 - px))

  def solve_rows(rows: slice) -> np.ndarray:
    vk = v[rows]
    combined = np.zeros((len(vk), len(x), P))
    for k_target, v_weight in v_moves:
      v_shift = params.rho1 / params.sigma_v * (v_next[k_target[rows]] - vk)
      successors = cube.values[k_target[rows]]
      for j_target, x_weight in x_moves:
        weight = v_weight[rows][:, None] * x_weight[None, :]
        if not np.any(weight):
          continue
        zeta = v_shift[:, None] + params.rho2 * np.sqrt(vk)[:, None] * (x_next[j_target] - x)[None, :]
        combined += weight[..., None] * shift_slices(grid, successors[:, j_target], zeta, settings.interpolation)

    chunk = TridiagonalSystem(system.alpha[rows], system.beta[rows], P)
    rhs = apply_B(grid, combined, h, workers) + boundary_vector(grid, boundary, n, chunk.alpha, chunk.beta, h)
    values = solve_step(chunk, rhs) * discount[None, :, None]
    if obstacle is not None:
      values = np.maximum(obstacle, values)
    return values

  rows_per_chunk = max(1, settings.chunk_elements // (len(x) * P))
  chunks = [slice(start, start + rows_per_chunk) for start in range(0, len(v), rows_per_chunk)]
  parts = pool.map(solve_rows, chunks) if pool is not None and len(chunks) > 1 else list(map(solve_rows, chunks))

  values = np.concatenate(parts, axis=0)
  if not np.all(np.isfinite(values)):
    raise NumericalError(f"Non-finite option values at step {n}")
  return PriceCube(values, n, h)

def price_htfd(params: ModelParams, spec: OptionSpec, n_steps: int, dy: float,
               mode: Optional[ModelMode] = None, settings: Optional[HtfdSettings] = None) -> HtfdResult:
  '''
  Runs the full backward induction and returns the price at (ln S0, V0, X0)
  together with the time-0 cube.
  '''
  if n_steps < 1:
    raise ValueError(f"Need at least one time step, got {n_steps}")
  mode = mode or params.default_mode
  settings = settings or HtfdSettings()
  params = params.for_mode(mode)

  lattice = build_lattice(params, n_steps, spec.maturity, mode)
  span = settings.span if settings.span is not None else default_span(params, spec.maturity, settings.span_width)
  grid = build_grid(params, spec, n_steps, dy, span, settings.jump_tolerance, settings.max_half_width)

  cube = terminal_condition(grid, lattice, spec)
  with ThreadPool(settings.threads) if settings.threads > 1 else nullcontext() as pool:
    for n in reversed(range(n_steps)):
      cube = backward_step(cube, lattice, grid, params, spec, n, settings, pool)
      logger.debug("Finished step %i with %i nodes", n, cube.values.shape[0] * cube.values.shape[1])

  price = float(cube.values[0, 0, grid.M])
  diagnostics = {
    "negative_values": cube.negative_count,
    "clamped_nodes": lattice.clamp_count,
    "grid_points": grid.size,
    "jump_radius": grid.R,
  }
  if diagnostics["negative_values"]:
    logger.warning("%i negative values in the time-0 cube", diagnostics["negative_values"])
  logger.info("HTFD price %.6f (N = %i, dy = %g)", price, n_steps, dy)
  return HtfdResult(price, cube, grid, lattice, diagnostics)
