'''
One-step solver of the 1-D partial integro-differential equation in log-price
'''

from .grid import PideGrid, build_grid, default_span
from .system import TridiagonalSystem, assemble_A, solve_step, symbol
from .jumps import BoundaryFunction, payoff_boundary, zero_boundary, apply_B, boundary_vector, dirichlet_vector, jump_tail
from .interpolation import Interpolation, interpolate_shift, interpolate_shift_cubic, shift_slices
