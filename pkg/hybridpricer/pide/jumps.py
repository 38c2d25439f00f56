'''
The explicit jump operator B, FFT-accelerated, and the boundary vector d
carrying the Dirichlet data and the exterior part of the jump integral.
'''

from typing import Callable, Optional

import numpy as np
from scipy import fft

from model import OptionSpec, payoff
from .grid import PideGrid

BoundaryFunction = Callable[[float, np.ndarray], np.ndarray]
'''b(t, y): option value assumed outside the grid'''

def payoff_boundary(spec: OptionSpec) -> BoundaryFunction:
  return lambda t, y: payoff(spec, y)

def zero_boundary(t: float, y: np.ndarray) -> np.ndarray:
  return np.zeros_like(np.asarray(y, dtype=float))

def jump_sum(grid: PideGrid, f: np.ndarray, workers: Optional[int] = None) -> np.ndarray:
  '''sum_l nu_l f_{i+l} over in-grid indices, along the last axis'''
  P = grid.size
  L = grid.fft_size
  spectrum = fft.rfft(f, L, axis=-1, workers=workers)
  full = fft.irfft(spectrum * grid.kernel_spectrum, L, axis=-1, workers=workers)
  return full[..., grid.R:grid.R + P]

def apply_B(grid: PideGrid, f: np.ndarray, h: float, workers: Optional[int] = None) -> np.ndarray:
  '''
  (Bf)_i = f_i + h dy (sum_{|i+l| <= M} nu_l f_{i+l} - Lambda f_i).
  The full Lambda stays on the diagonal; the exterior terms come in through d.
  '''
  f = np.asarray(f, dtype=float)
  if grid.R == 0 and grid.Lambda == 0:
    return f.copy()
  return f + h * grid.dy * (jump_sum(grid, f, workers) - grid.Lambda * f)

def dirichlet_vector(grid: PideGrid, b: BoundaryFunction, t: float, alpha, beta) -> np.ndarray:
  '''(beta - alpha) b(t, y_{-M-1}) in the first row and (beta + alpha) b(t, y_{M+1}) in the last'''
  alpha, beta = np.broadcast_arrays(np.asarray(alpha, dtype=float), np.asarray(beta, dtype=float))
  low, high = b(t, grid.y_at(np.array([-grid.M - 1, grid.M + 1])))
  d = np.zeros(alpha.shape + (grid.size,))
  d[..., 0] = (beta - alpha) * low
  d[..., -1] = (beta + alpha) * high
  return d

def jump_tail(grid: PideGrid, b: BoundaryFunction, t: float, h: float) -> np.ndarray:
  '''h dy sum over exterior indices |i+l| > M of nu_l b(t, y_{i+l})'''
  M, R = grid.M, grid.R
  tail = np.zeros(grid.size)
  if R == 0:
    return tail

  # outside[e-1] = b at y_{M+e}, e = 1..R, and likewise below the grid
  above = b(t, grid.y_at(np.arange(M + 1, M + R + 1)))
  below = b(t, grid.y_at(-np.arange(M + 1, M + R + 1)))
  nu = grid.nu_samples
  for s in range(R):
    e = np.arange(1, R - s + 1)
    tail[-1 - s] = np.dot(nu[R + s + e], above[e - 1])
    tail[s] = np.dot(nu[R - s - e], below[e - 1])
  return h * grid.dy * tail

def boundary_vector(grid: PideGrid, b: BoundaryFunction, n: int, alpha, beta, h: float) -> np.ndarray:
  '''
  d = a_b^n + a_b^{n+1}: Dirichlet data at step n plus the exterior
  jump mass evaluated at step n+1.
  '''
  return dirichlet_vector(grid, b, n * h, alpha, beta) + jump_tail(grid, b, (n + 1) * h, h)
