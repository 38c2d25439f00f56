'''
Option values over the whole (y, v, x) lattice at one time step
'''

from dataclasses import dataclass

import numpy as np

from lattice import BivariateLattice
from model import OptionSpec, payoff
from pide import PideGrid

@dataclass(frozen=True)
class PriceCube:
  '''Values at step n, shape (size_v(n), size_x(n), 2M+1)'''
  values: np.ndarray
  n: int
  h: float

  def __post_init__(self):
    if self.values.ndim != 3:
      raise ValueError(f"Price cube needs three axes, got shape {self.values.shape}")
    if self.values.shape[0] != self.n + 1:
      raise ValueError(f"Step {self.n} cube must have {self.n + 1} variance nodes, got {self.values.shape[0]}")

  def at(self, k: int, j: int) -> np.ndarray:
    '''The price slice at node (k, j)'''
    return self.values[k, j]

  @property
  def negative_count(self) -> int:
    return int(np.count_nonzero(self.values < 0))

def terminal_condition(grid: PideGrid, lattice: BivariateLattice, spec: OptionSpec) -> PriceCube:
  '''Payoff on every node of the last lattice level, identical across (k, j)'''
  N = lattice.n_steps
  shape = (lattice.v_tree.size(N), lattice.x_tree.size(N), grid.size)
  values = np.broadcast_to(payoff(spec, grid.y), shape)
  return PriceCube(values, N, lattice.h)
