'''
Empirical order of convergence in the time step
'''

import numpy as np

from errors import ConvergenceError

def convergence_ratio(prices_at_n4, prices_at_n2, prices_at_n):
  '''
  (P_{N/2} - P_{N/4}) / (P_N - P_{N/2}); about 2 for first-order convergence.
  Accepts scalars or arrays of prices (one entry per spot).
  '''
  coarse = np.asarray(prices_at_n2, dtype=float) - np.asarray(prices_at_n4, dtype=float)
  fine = np.asarray(prices_at_n, dtype=float) - np.asarray(prices_at_n2, dtype=float)
  if np.any(np.abs(fine) < 1e-12):
    raise ConvergenceError("P_N and P_N/2 coincide, the ratio is undefined")
  return (coarse / fine)[()]
