from typing import Optional

from .base import PricingMethod

def available_methods() -> list[type[PricingMethod]]:
  '''Every concrete pricing method, subclasses of subclasses included'''
  found, pending = [], list(PricingMethod.__subclasses__())
  while pending:
    method = pending.pop(0)
    found.append(method)
    pending.extend(method.__subclasses__())
  return found

def get_method_by_name(name: str) -> Optional[type[PricingMethod]]:
  '''Returns the method class with a given name or none if no name matched'''
  return next(filter(lambda m: m.name == name, available_methods()), None)
