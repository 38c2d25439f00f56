'''
Hybrid tree/finite-difference pricer
'''

from .cube import PriceCube, terminal_condition
from .scheme import Boundary, HtfdSettings, HtfdResult, backward_step, discount_factor, price_htfd
