'''
Product lattice of the variance and rate-factor trees
'''

import logging
from dataclasses import dataclass

import numpy as np

from model import ModelParams, ModelMode
from .tree import TreeGrid1D, build_v_tree, build_x_tree, degenerate_tree

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class BivariateLattice:
  '''
  The (V, X) lattice. Both trees move independently, so joint transition
  probabilities are products of the marginal ones.
  '''
  v_tree: TreeGrid1D
  x_tree: TreeGrid1D

  def __post_init__(self):
    if self.v_tree.n_steps != self.x_tree.n_steps or not np.isclose(self.v_tree.h, self.x_tree.h):
      raise ValueError("Variance and rate trees must share the time grid")

  @property
  def n_steps(self) -> int:
    return self.v_tree.n_steps

  @property
  def h(self) -> float:
    return self.v_tree.h

  @property
  def clamp_count(self) -> int:
    return self.v_tree.clamp_count + self.x_tree.clamp_count

  def branch_probs(self, n: int) -> np.ndarray:
    '''
    Joint probabilities of every node at step n, shape (size_v, size_x, 4),
    ordered (uu, ud, du, dd) with the variance move first.
    '''
    pv = self.v_tree.transitions(n)[2][:, None]
    px = self.x_tree.transitions(n)[2][None, :]
    return np.stack([pv * px, pv * (1 - px), (1 - pv) * px, (1 - pv) * (1 - px)], axis=-1)

def joint_probs(lattice: BivariateLattice, n: int, k: int, j: int) -> tuple[float, float, float, float]:
  '''(p_uu, p_ud, p_du, p_dd) at node (n, k, j)'''
  if not 0 <= n < lattice.n_steps:
    raise IndexError(f"Step {n} outside 0..{lattice.n_steps - 1}")
  if not 0 <= k < lattice.v_tree.size(n):
    raise IndexError(f"Variance index {k} outside level {n}")
  if not 0 <= j < lattice.x_tree.size(n):
    raise IndexError(f"Rate index {j} outside level {n}")

  pv = float(lattice.v_tree.prob_up[n, k])
  px = float(lattice.x_tree.prob_up[n, j])
  return (pv * px, pv * (1 - px), (1 - pv) * px, (1 - pv) * (1 - px))

def build_lattice(params: ModelParams, n_steps: int, maturity: float,
                  mode: ModelMode = ModelMode.BATES_HULL_WHITE) -> BivariateLattice:
  '''
  Builds both trees. In standard Bates mode the rate tree is a single frozen node.
  '''
  v_tree = build_v_tree(params, n_steps, maturity)
  if mode is ModelMode.STANDARD_BATES:
    x_tree = degenerate_tree(n_steps, maturity)
  else:
    x_tree = build_x_tree(params, n_steps, maturity)

  logger.info("Built %s lattice with %i steps (h = %g)", mode.value, n_steps, v_tree.h)
  return BivariateLattice(v_tree, x_tree)
