'''
Exceptions raised by the pricing engine.
The CLI maps `ConfigError` to exit code 1 and `NumericalError` to exit code 2.
'''

class PricingError(Exception):
  '''Base class for every error raised on purpose by the engine'''

class ConfigError(PricingError, ValueError):
  '''
  A parameter, run entry or config field is invalid.
  `field` names the offending entry so the message can point the user at it.
  '''
  field: str
  '''Name of the offending field'''

  def __init__(self, field: str, message: str):
    super().__init__(f"{field}: {message}")
    self.field = field

class DomainError(ConfigError):
  '''The correlation structure leaves no room for the third Brownian motion'''

class NumericalError(PricingError, ArithmeticError):
  '''A numerical routine could not produce a trustworthy result'''

class SingularSystemError(NumericalError):
  '''The implicit tridiagonal system is (or may be) singular'''

class ConvergenceError(NumericalError):
  '''A refinement test or a ratio denominator failed'''

class BoundViolationError(NumericalError):
  '''A price lies outside the static no-arbitrage bounds'''
