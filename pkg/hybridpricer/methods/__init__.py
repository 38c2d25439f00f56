'''
Module for all pricing-method related stuff
'''

from .base import PricingMethod, PriceResult
from .lattice_methods import HybridTreeFiniteDifference, HybridMonteCarlo, LongstaffSchwartz
from .fourier_methods import CarrMadan
from .util import available_methods, get_method_by_name
