'''
Interpolation of price slices at shifted grid points.

Linear interpolation is the convex two-point rule. It is exact on affine
slices but smears a slice by q(1 - q) dy^2 f'' every time it is applied, which
accumulates over the time steps of a backward induction. The four-point
Lagrange rule reproduces cubics and leaves an O(dy^4) error per application.
'''

from enum import Enum

import numpy as np

from .grid import PideGrid

class Interpolation(Enum):
  LINEAR = "linear"
  CUBIC = "cubic"

def _stencil(grid: PideGrid, values, zeta):
  '''Broadcast slices, left cell indices and cell fractions q in [0, 1)'''
  values = np.asarray(values, dtype=float)
  P = values.shape[-1]
  zeta = np.asarray(zeta, dtype=float)
  batch_shape = np.broadcast_shapes(values.shape[:-1], zeta.shape)

  steps = zeta / grid.dy
  offset = np.floor(steps)
  q = (steps - offset)[..., None]

  index = np.arange(P) + offset.astype(np.int64)[..., None]
  index = np.broadcast_to(index, batch_shape + (P,))
  values = np.broadcast_to(values, batch_shape + (P,))
  return values, index, q

def _gather(values: np.ndarray, index: np.ndarray) -> np.ndarray:
  P = values.shape[-1]
  return np.take_along_axis(values, np.clip(index, 0, P - 1), axis=-1)

def interpolate_shift(grid: PideGrid, values: np.ndarray, zeta) -> np.ndarray:
  '''
  Values of the slices at y_i + zeta, one shift per slice.
  `values` has the grid on its last axis and `zeta` broadcasts against the rest.
  Points falling off the grid take the value of the nearest end point.
  '''
  values, index, q = _stencil(grid, values, zeta)
  return (1 - q) * _gather(values, index) + q * _gather(values, index + 1)

def interpolate_shift_cubic(grid: PideGrid, values: np.ndarray, zeta) -> np.ndarray:
  '''
  Four-point Lagrange interpolation on the nodes I-1, I, I+1, I+2 around
  y_i + zeta. Where that stencil is not fully on the grid the linear rule is
  used, so points off the grid clamp to the end values as before.
  '''
  values, index, q = _stencil(grid, values, zeta)
  P = values.shape[-1]
  left, right = _gather(values, index), _gather(values, index + 1)
  cubic = (
    -q * (q - 1) * (q - 2) / 6 * _gather(values, index - 1)
    + (q + 1) * (q - 1) * (q - 2) / 2 * left
    - (q + 1) * q * (q - 2) / 2 * right
    + (q + 1) * q * (q - 1) / 6 * _gather(values, index + 2)
  )
  inside = (index >= 1) & (index <= P - 3)
  return np.where(inside, cubic, (1 - q) * left + q * right)

def shift_slices(grid: PideGrid, values: np.ndarray, zeta, kind: Interpolation = Interpolation.CUBIC) -> np.ndarray:
  match kind:
    case Interpolation.LINEAR: return interpolate_shift(grid, values, zeta)
    case Interpolation.CUBIC: return interpolate_shift_cubic(grid, values, zeta)
