'''
Recombining binomial trees with multiple jumps for the CIR variance and the OU rate factor.
'''

import logging
from dataclasses import dataclass

import numpy as np

from model import ModelParams, mu_v, mu_x

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class TreeGrid1D:
  '''
  A fully precomputed tree over N steps.
  Arrays are stored padded: row n holds `size(n)` meaningful entries.
  '''
  n_steps: int
  h: float
  '''Time step T/N'''
  nodes: np.ndarray
  '''Node values, shape (N+1, width), NaN beyond the level'''
  up_index: np.ndarray
  '''Target index at step n+1 of the up move, shape (N, width)'''
  down_index: np.ndarray
  '''Target index at step n+1 of the down move'''
  prob_up: np.ndarray
  '''Probability of the up move, clamped to [0, 1]'''
  clamp_count: int = 0
  '''Number of nodes where the raw up probability left [0, 1]'''

  @property
  def degenerate(self) -> bool:
    '''True for a single-node tree that never moves'''
    return self.nodes.shape[1] == 1

  def size(self, n: int) -> int:
    return 1 if self.degenerate else n + 1

  def level(self, n: int) -> np.ndarray:
    return self.nodes[n, :self.size(n)]

  def transitions(self, n: int):
    '''(up_index, down_index, prob_up) of every node at step n'''
    width = self.size(n)
    return self.up_index[n, :width], self.down_index[n, :width], self.prob_up[n, :width]

def _multiple_jumps(nxt: np.ndarray, current: np.ndarray, target: np.ndarray):
  '''
  For each node k, the smallest index >= k+1 whose value reaches the target
  and the largest index <= k whose value does not exceed it.
  Falls back to the top / bottom node of the next level when no index qualifies.
  '''
  n = len(current) - 1
  k = np.arange(n + 1)

  up = np.maximum(np.searchsorted(nxt, target, side="left"), k + 1)
  up = np.minimum(up, n + 1)
  down = np.minimum(np.searchsorted(nxt, target, side="right") - 1, k)
  down = np.maximum(down, 0)

  v_up, v_down = nxt[up], nxt[down]
  spread = v_up - v_down
  raw = np.divide(target - v_down, spread, out=np.ones_like(target), where=spread > 0)
  prob = np.clip(raw, 0.0, 1.0)
  clamped = int(np.count_nonzero((raw < 0) | (raw > 1)))
  return up, down, prob, clamped

def _build(nodes: np.ndarray, drift, h: float) -> TreeGrid1D:
  n_steps = nodes.shape[0] - 1
  up_index = np.full((n_steps, n_steps + 1), -1, dtype=np.int64)
  down_index = np.full((n_steps, n_steps + 1), -1, dtype=np.int64)
  prob_up = np.full((n_steps, n_steps + 1), np.nan)

  clamp_count = 0
  for n in range(n_steps):
    current = nodes[n, :n + 1]
    target = current + drift(current) * h
    up, down, prob, clamped = _multiple_jumps(nodes[n + 1, :n + 2], current, target)
    up_index[n, :n + 1] = up
    down_index[n, :n + 1] = down
    prob_up[n, :n + 1] = prob
    clamp_count += clamped

  if clamp_count:
    logger.warning("Up probability clamped to [0, 1] on %i nodes", clamp_count)

  return TreeGrid1D(n_steps, h, nodes, up_index, down_index, prob_up, clamp_count)

def _triangle(values: np.ndarray) -> np.ndarray:
  '''Masks entries k > n with NaN'''
  n_steps = values.shape[0] - 1
  n = np.arange(n_steps + 1)[:, None]
  k = np.arange(n_steps + 1)[None, :]
  return np.where(k <= n, values, np.nan)

def build_v_tree(params: ModelParams, n_steps: int, maturity: float) -> TreeGrid1D:
  '''
  Tree for the CIR variance, v^n_k = (sqrt(V0) + sigma_v/2 (2k - n) sqrt(h))^2,
  absorbed at zero where the base turns nonpositive.
  '''
  if n_steps < 1:
    raise ValueError(f"Need at least one time step, got {n_steps}")
  h = maturity / n_steps
  n = np.arange(n_steps + 1)[:, None]
  k = np.arange(n_steps + 1)[None, :]
  base = np.sqrt(params.v0) + params.sigma_v / 2 * (2 * k - n) * np.sqrt(h)
  nodes = _triangle(np.where(base > 0, base ** 2, 0.0))

  logger.debug("Built %i-step variance tree, top node %.4f", n_steps, nodes[-1, -1])
  return _build(nodes, lambda v: mu_v(params, v), h)

def build_x_tree(params: ModelParams, n_steps: int, maturity: float) -> TreeGrid1D:
  '''Tree for the rate factor, x^n_j = (2j - n) sqrt(h)'''
  if n_steps < 1:
    raise ValueError(f"Need at least one time step, got {n_steps}")
  h = maturity / n_steps
  n = np.arange(n_steps + 1)[:, None]
  j = np.arange(n_steps + 1)[None, :]
  nodes = _triangle((2.0 * j - n) * np.sqrt(h))
  return _build(nodes, lambda x: mu_x(params, x), h)

def degenerate_tree(n_steps: int, maturity: float) -> TreeGrid1D:
  '''A single node at zero that always moves "up" onto itself'''
  return TreeGrid1D(
    n_steps,
    maturity / n_steps,
    nodes=np.zeros((n_steps + 1, 1)),
    up_index=np.zeros((n_steps, 1), dtype=np.int64),
    down_index=np.zeros((n_steps, 1), dtype=np.int64),
    prob_up=np.ones((n_steps, 1))
  )
