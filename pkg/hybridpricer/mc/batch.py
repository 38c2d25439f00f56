'''
Hybrid Monte Carlo simulation: (V, X) move on the lattice, the log-price
follows the Euler-type recursion with Gaussian and compound-Poisson increments.
'''

import logging
from dataclasses import dataclass
from multiprocessing.pool import ThreadPool
from typing import Optional

import numpy as np

from errors import ConfigError
from lattice import BivariateLattice
from model import ModelParams, drift_reduced, rate_curve, rho3

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class McConfig:
  '''Simulation and regression settings'''
  n_paths: int
  n_steps: int
  seed: int = 0
  exercise_dates: int = 1
  '''Number of equally spaced exercise dates, the last one at maturity'''
  basis_degree: int = 2
  '''Maximal total degree of the regression polynomials'''
  chunk_size: int = 2 ** 14
  '''Paths per random stream; fixes the streams independently of the thread count'''
  threads: int = 1

  def __post_init__(self):
    if self.n_paths < 2:
      raise ConfigError("n_paths", f"need at least two paths, got {self.n_paths}")
    if self.n_steps < 1:
      raise ConfigError("n_steps", f"need at least one step, got {self.n_steps}")
    if self.exercise_dates < 1 or self.n_steps % self.exercise_dates:
      raise ConfigError("exercise_dates", f"{self.exercise_dates} does not divide n_steps = {self.n_steps}")
    if self.basis_degree < 1:
      raise ConfigError("basis_degree", f"must be at least 1, got {self.basis_degree}")
    if self.chunk_size < 1:
      raise ConfigError("chunk_size", f"must be positive, got {self.chunk_size}")

  @property
  def record_steps(self) -> np.ndarray:
    '''Steps whose state is kept: the exercise dates, maturity included'''
    stride = self.n_steps // self.exercise_dates
    return stride * np.arange(1, self.exercise_dates + 1)

@dataclass(frozen=True)
class McBatch:
  '''
  Path ensemble recorded at `record_steps`. Rows are paths.
  `discount` holds sum (sigma_r X_n + phi_{nh}) h up to each recorded step.
  '''
  record_steps: np.ndarray
  y: np.ndarray
  v_index: np.ndarray
  x_index: np.ndarray
  variance: np.ndarray
  factor: np.ndarray
  discount: np.ndarray
  jump_counts: np.ndarray
  '''Number of jumps per path and step'''
  jump_sums: np.ndarray
  '''Total log-jump per path'''

  @property
  def n_paths(self) -> int:
    return self.y.shape[0]

def _simulate_chunk(params: ModelParams, lattice: BivariateLattice, record_steps: np.ndarray,
                    n_paths: int, rng: np.random.Generator) -> dict:
  v_tree, x_tree = lattice.v_tree, lattice.x_tree
  h = lattice.h
  curve = rate_curve(params)
  loading = rho3(params)
  jump_rate = params.lam * h
  shift_scale = params.rho1 / params.sigma_v

  k = np.zeros(n_paths, dtype=np.int64)
  j = np.zeros(n_paths, dtype=np.int64)
  y = np.full(n_paths, np.log(params.s0))
  discount = np.zeros(n_paths)
  jump_sums = np.zeros(n_paths)
  jump_counts = np.zeros((n_paths, lattice.n_steps), dtype=np.int16)

  n_records = len(record_steps)
  out = {name: np.empty((n_paths, n_records)) for name in ("y", "variance", "factor", "discount")}
  out["v_index"] = np.empty((n_paths, n_records), dtype=np.int64)
  out["x_index"] = np.empty((n_paths, n_records), dtype=np.int64)
  record = 0

  for n in range(lattice.n_steps):
    t = n * h
    v = v_tree.nodes[n, k]
    x = x_tree.nodes[n, j]
    discount += (params.sigma_r * x + curve.phi(t)) * h

    k = np.where(rng.random(n_paths) < v_tree.prob_up[n, k], v_tree.up_index[n, k], v_tree.down_index[n, k])
    j = np.where(rng.random(n_paths) < x_tree.prob_up[n, j], x_tree.up_index[n, j], x_tree.down_index[n, j])
    v_new = v_tree.nodes[n + 1, k]
    x_new = x_tree.nodes[n + 1, j]

    gaussian = rng.standard_normal(n_paths)
    counts = rng.poisson(jump_rate, n_paths)
    # Given K jumps, their sum is exactly Normal(K m, K delta^2)
    jumps = rng.normal(counts * params.jump_mean, np.sqrt(counts) * params.delta)

    y = y + (
      drift_reduced(params, v, x, t) * h
      + loading * np.sqrt(h * v) * gaussian
      + shift_scale * (v_new - v)
      + params.rho2 * np.sqrt(v) * (x_new - x)
      + jumps
    )
    jump_counts[:, n] = counts
    jump_sums += jumps

    if record < n_records and n + 1 == record_steps[record]:
      out["y"][:, record] = y
      out["variance"][:, record] = v_new
      out["factor"][:, record] = x_new
      out["v_index"][:, record] = k
      out["x_index"][:, record] = j
      # Left-endpoint rule: the rate over [nh, (n+1)h] was already added
      out["discount"][:, record] = discount
      record += 1

  out["jump_counts"] = jump_counts
  out["jump_sums"] = jump_sums
  return out

def simulate_batch(params: ModelParams, lattice: BivariateLattice, cfg: McConfig,
                   threads: Optional[int] = None) -> McBatch:
  '''
  Simulates `cfg.n_paths` paths. Paths are split into fixed-size chunks,
  each with its own Philox stream spawned from the seed, so the batch only
  depends on the seed and the chunk size.
  '''
  if lattice.n_steps != cfg.n_steps:
    raise ConfigError("n_steps", f"lattice has {lattice.n_steps} steps, config asks for {cfg.n_steps}")

  sizes = [min(cfg.chunk_size, cfg.n_paths - start) for start in range(0, cfg.n_paths, cfg.chunk_size)]
  streams = [np.random.Generator(np.random.Philox(s)) for s in np.random.SeedSequence(cfg.seed).spawn(len(sizes))]
  record_steps = cfg.record_steps

  def run(args):
    size, rng = args
    return _simulate_chunk(params, lattice, record_steps, size, rng)

  threads = threads or cfg.threads
  if threads > 1 and len(sizes) > 1:
    with ThreadPool(threads) as pool:
      parts = pool.map(run, zip(sizes, streams))
  else:
    parts = list(map(run, zip(sizes, streams)))

  merged = {name: np.concatenate([p[name] for p in parts], axis=0) for name in parts[0]}
  batch = McBatch(record_steps=record_steps, **merged)
  logger.info("Simulated %i paths in %i chunks, %i jumps in total",
              batch.n_paths, len(sizes), int(batch.jump_counts.sum(dtype=np.int64)))
  return batch
