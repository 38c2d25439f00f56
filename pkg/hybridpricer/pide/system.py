'''
The implicit part of the one-step scheme: the tridiagonal matrix A and its solver.
'''

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from errors import NumericalError, SingularSystemError
from .grid import PideGrid

logger = logging.getLogger(__name__)

MAX_BANDED_SIZE = 2 ** 21
'''Upper bound on the unknowns handed to one banded solve'''

@dataclass(frozen=True)
class TridiagonalSystem:
  '''
  A batch of matrices with rows [alpha - beta, 1 + 2 beta, -(alpha + beta)].
  `alpha` and `beta` share a batch shape, one matrix per entry.
  '''
  alpha: np.ndarray
  beta: np.ndarray
  size: int
  '''Number of grid points 2M + 1'''

  @property
  def lower(self) -> np.ndarray:
    return self.alpha - self.beta

  @property
  def diagonal(self) -> np.ndarray:
    return 1 + 2 * self.beta

  @property
  def upper(self) -> np.ndarray:
    return -(self.alpha + self.beta)

  def matvec(self, u: np.ndarray) -> np.ndarray:
    '''A u with zeros outside the grid'''
    lower, diagonal, upper = (np.asarray(c)[..., None] for c in (self.lower, self.diagonal, self.upper))
    out = diagonal * u
    out[..., 1:] += lower * u[..., :-1]
    out[..., :-1] += upper * u[..., 1:]
    return out

  def dense(self) -> np.ndarray:
    '''Dense matrix of an unbatched system'''
    if np.ndim(self.alpha) != 0:
      raise ValueError("Only unbatched systems have a dense form")
    return (
      np.diag(np.full(self.size, float(self.diagonal)))
      + np.diag(np.full(self.size - 1, float(self.lower)), -1)
      + np.diag(np.full(self.size - 1, float(self.upper)), 1)
    )

def assemble_A(grid: PideGrid, mu, v, rho3: float, h: float) -> TridiagonalSystem:
  '''
  alpha = h mu / (2 dy), beta = h rho3^2 v / (2 dy^2).
  Raises when beta = |alpha| > 0, where invertibility is no longer guaranteed.
  '''
  mu, v = np.broadcast_arrays(np.asarray(mu, dtype=float), np.asarray(v, dtype=float))
  alpha = h * mu / (2 * grid.dy)
  beta = h * rho3 ** 2 * v / (2 * grid.dy ** 2)

  if np.any(beta < 0):
    raise ValueError("Negative variance passed to the implicit system")
  singular = (beta > 0) & np.isclose(beta, np.abs(alpha), rtol=1e-12, atol=0.0)
  if np.any(singular):
    raise SingularSystemError(f"beta = |alpha| on {np.count_nonzero(singular)} nodes")
  return TridiagonalSystem(alpha, beta, grid.size)

def symbol(system: TridiagonalSystem, theta_dy):
  '''Fourier symbol 1 + 2 beta (1 - cos) - 2i alpha sin of the matrix A'''
  return 1 + 2 * system.beta * (1 - np.cos(theta_dy)) - 2j * system.alpha * np.sin(theta_dy)

def _banded_block(system: TridiagonalSystem, batch: slice, count: int) -> np.ndarray:
  '''Stacks `count` systems into one banded matrix with zero coupling between blocks'''
  P = system.size
  alpha = np.ravel(system.alpha)[batch][:, None]
  beta = np.ravel(system.beta)[batch][:, None]

  ab = np.empty((3, count, P))
  ab[0] = -(alpha + beta)
  ab[0, :, 0] = 0.0
  ab[1] = 1 + 2 * beta
  ab[2] = alpha - beta
  ab[2, :, -1] = 0.0
  return ab.reshape(3, count * P)

def solve_step(system: TridiagonalSystem, rhs: np.ndarray) -> np.ndarray:
  '''Solves A u = rhs for every system of the batch, O(M) per system'''
  P = system.size
  batch_shape = np.shape(system.alpha)
  rhs = np.broadcast_to(rhs, batch_shape + (P,))
  flat_rhs = rhs.reshape(-1, P)
  n_systems = flat_rhs.shape[0]

  out = np.empty_like(flat_rhs, dtype=float)
  per_call = max(1, MAX_BANDED_SIZE // P)
  for start in range(0, n_systems, per_call):
    stop = min(start + per_call, n_systems)
    ab = _banded_block(system, slice(start, stop), stop - start)
    try:
      solution = solve_banded((1, 1), ab, flat_rhs[start:stop].ravel(),
                              overwrite_ab=True, check_finite=False)
    except LinAlgError as e:
      raise SingularSystemError(f"Tridiagonal solve broke down: {e}") from e
    out[start:stop] = solution.reshape(stop - start, P)

  if not np.all(np.isfinite(out)):
    raise NumericalError("Tridiagonal solve produced non-finite values")
  return out.reshape(batch_shape + (P,))
