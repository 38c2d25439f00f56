'''
Hybrid Monte Carlo engine and its estimators
'''

from .batch import McConfig, McBatch, simulate_batch
from .estimators import McEstimate, price_european_mc, price_american_ls, regression_basis, continuation_values
