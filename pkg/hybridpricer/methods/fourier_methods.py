'''
Characteristic-function benchmark as a pricing method
'''

from analytics import price_cf_bates
from .base import PricingMethod

class CarrMadan(PricingMethod):
  '''Damped Fourier inversion of the Bates characteristic function'''
  name = "cf"

  def compute(self, params, spec, n_steps, resolution):
    return price_cf_bates(params, spec, self.entry.cf), None, {}
