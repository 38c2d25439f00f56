'''
Benchmarks and diagnostics: characteristic-function prices, implied volatility, convergence ratios
'''

from .fourier import CfQuadratureConfig, bates_cf, price_cf_bates, simpson_weights
from .black_scholes import bs_price, implied_vol, price_bounds
from .convergence import convergence_ratio
