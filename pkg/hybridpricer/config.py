'''
This module contains the run-configuration for the application
and reads it from a TOML file.

A configuration has a [model] block with every model parameter, an [option]
block with the contract and the list of spots, one [[runs]] entry per
pricing method and an [output] block. Smile sweeps add a [smile] block.
'''

from __future__ import annotations

import logging
try:
  import tomllib
except ModuleNotFoundError:  # Python < 3.11
  import tomli as tomllib
from dataclasses import dataclass, field, replace
from itertools import product
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from analytics import CfQuadratureConfig
from errors import ConfigError
from htfd import Boundary, HtfdSettings
from pide import Interpolation
from model import Exercise, ModelMode, ModelParams, OptionSpec, Payoff

logger = logging.getLogger(__name__)

METHODS = ("htfd", "mc", "ls", "cf")
SMILE_METHODS = ("htfd", "mc", "cf")
VERBOSITY = ("quiet", "summary")

Resolution = Union[float, int]
'''dy for finite differences, paths for Monte Carlo, Fourier points for CF'''

@dataclass(frozen=True)
class RunEntry:
  '''One [[runs]] entry: a pricing method and the discretizations to sweep'''
  method: str
  label: str
  mode: Optional[ModelMode] = None
  '''Derived from sigma_r when None'''
  n_steps: tuple[int, ...] = (100,)
  dy: tuple[float, ...] = (0.0025,)
  n_paths: tuple[int, ...] = (100000,)
  seed: int = 0
  exercise_dates: int = 1
  basis_degree: int = 2
  htfd: HtfdSettings = field(default_factory=HtfdSettings)
  cf: CfQuadratureConfig = field(default_factory=CfQuadratureConfig)

  def discretizations(self) -> list[tuple[Optional[int], Resolution]]:
    '''(N_t, dy_or_paths) pairs this entry prices, in file order'''
    match self.method:
      case "htfd": return list(product(self.n_steps, self.dy))
      case "mc" | "ls": return list(product(self.n_steps, self.n_paths))
      case "cf": return [(None, self.cf.n_points)]
      case _: raise ConfigError("runs.method", f"unknown method {self.method!r}")

@dataclass(frozen=True)
class SmileConfig:
  '''Sweep over moneyness K/S0 or over maturities'''
  axis: str
  values: tuple[float, ...]

@dataclass(frozen=True)
class RunConfiguration:
  '''Encapsulates all information needed to run a batch of pricings'''
  model: ModelParams
  '''Model parameters, s0 is replaced by each spot'''
  option: OptionSpec
  spots: tuple[float, ...]
  runs: tuple[RunEntry, ...]
  csv_path: Optional[Path] = None
  verbosity: str = "summary"
  smile: Optional[SmileConfig] = None

  def jobs(self):
    '''Yields (spot, entry, N_t, dy_or_paths) for every row of the result table'''
    for entry in self.runs:
      for spot in self.spots:
        for n_steps, resolution in entry.discretizations():
          yield spot, entry, n_steps, resolution

  def with_overrides(self, seed: Optional[int] = None, out: Optional[Path] = None) -> RunConfiguration:
    '''Applies the command-line overrides'''
    config = self
    if seed is not None:
      config = replace(config, runs=tuple(replace(r, seed=seed) for r in config.runs))
    if out is not None:
      config = replace(config, csv_path=Path(out))
    return config

def _require(block: dict, key: str, prefix: str) -> Any:
  if key not in block:
    raise ConfigError(f"{prefix}.{key}", "missing")
  return block[key]

def _as_tuple(value, kind, name: str) -> tuple:
  values = value if isinstance(value, list) else [value]
  if len(values) == 0:
    raise ConfigError(name, "must not be empty")
  try:
    return tuple(kind(v) for v in values)
  except (TypeError, ValueError) as e:
    raise ConfigError(name, f"expected {kind.__name__} values, got {value!r}") from e

def _enum(kind, value: str, name: str):
  try:
    return kind(str(value).lower())
  except ValueError as e:
    raise ConfigError(name, f"must be one of {[k.value for k in kind]}, got {value!r}") from e

def _float(value, name: str) -> float:
  if isinstance(value, bool) or not isinstance(value, (int, float)):
    raise ConfigError(name, f"expected a number, got {value!r}")
  return float(value)

def _int(value, name: str) -> int:
  if isinstance(value, bool) or not isinstance(value, int):
    raise ConfigError(name, f"expected an integer, got {value!r}")
  return value

def parse_model(block: dict, default_spot: float) -> ModelParams:
  values = {}
  for key, raw in block.items():
    name = "lam" if key == "lambda" else key
    values[name] = _float(raw, f"model.{key}")
  values.setdefault("s0", default_spot)

  required = ("v0", "r0", "eta", "kappa_v", "theta_v", "sigma_v", "rho1", "lam", "gamma", "delta")
  for name in required:
    if name not in values:
      raise ConfigError(f"model.{'lambda' if name == 'lam' else name}", "missing")
  try:
    return ModelParams(**values)
  except TypeError as e:
    raise ConfigError("model", f"unknown parameter ({e})") from e

def parse_option(block: dict) -> tuple[OptionSpec, tuple[float, ...]]:
  spots = _as_tuple(_require(block, "spots", "option"), float, "option.spots")
  if any(s <= 0 for s in spots):
    raise ConfigError("option.spots", f"spots must be positive, got {spots}")
  spec = OptionSpec(
    strike=_float(_require(block, "strike", "option"), "option.strike"),
    maturity=_float(_require(block, "maturity", "option"), "option.maturity"),
    exercise=_enum(Exercise, block.get("exercise", "european"), "option.exercise"),
    payoff=_enum(Payoff, block.get("payoff", "call"), "option.payoff")
  )
  return spec, spots

def parse_run(block: dict, index: int) -> RunEntry:
  prefix = f"runs[{index}]"
  method = str(_require(block, "method", prefix)).lower()
  if method not in METHODS:
    raise ConfigError(f"{prefix}.method", f"must be one of {METHODS}, got {method!r}")

  mode = _enum(ModelMode, block["mode"], f"{prefix}.mode") if "mode" in block else None
  htfd = HtfdSettings(
    span=_float(block["span"], f"{prefix}.span") if "span" in block else None,
    jump_tolerance=_float(block.get("jump_tolerance", 1e-4), f"{prefix}.jump_tolerance"),
    boundary=_enum(Boundary, block.get("boundary", "payoff"), f"{prefix}.boundary"),
    interpolation=_enum(Interpolation, block.get("interpolation", "cubic"), f"{prefix}.interpolation"),
    truncation=_float(block["truncation"], f"{prefix}.truncation") if "truncation" in block else None
  )
  cf = CfQuadratureConfig(
    damping=_float(block.get("damping", 1.5), f"{prefix}.damping"),
    n_points=_int(block.get("n_points", 4096), f"{prefix}.n_points"),
    eta_grid=_float(block.get("eta_grid", 0.25), f"{prefix}.eta_grid")
  )

  entry = RunEntry(
    method=method,
    label=str(block.get("label", method)),
    mode=mode,
    n_steps=_as_tuple(block.get("n_steps", 100), int, f"{prefix}.n_steps"),
    dy=_as_tuple(block.get("dy", 0.0025), float, f"{prefix}.dy"),
    n_paths=_as_tuple(block.get("n_paths", 100000), int, f"{prefix}.n_paths"),
    seed=_int(block.get("seed", 0), f"{prefix}.seed"),
    exercise_dates=_int(block.get("exercise_dates", 1), f"{prefix}.exercise_dates"),
    basis_degree=_int(block.get("basis_degree", 2), f"{prefix}.basis_degree"),
    htfd=htfd,
    cf=cf
  )
  if any(n < 1 for n in entry.n_steps):
    raise ConfigError(f"{prefix}.n_steps", f"must be positive, got {entry.n_steps}")
  if any(d <= 0 for d in entry.dy):
    raise ConfigError(f"{prefix}.dy", f"must be positive, got {entry.dy}")
  if method == "ls" and any(n % entry.exercise_dates for n in entry.n_steps):
    raise ConfigError(f"{prefix}.exercise_dates", f"{entry.exercise_dates} must divide every n_steps")
  return entry

def parse_smile(block: dict) -> SmileConfig:
  axis = str(block.get("axis", "moneyness")).lower()
  if axis not in ("moneyness", "maturity"):
    raise ConfigError("smile.axis", f"must be 'moneyness' or 'maturity', got {axis!r}")

  if "values" in block:
    values = _as_tuple(block["values"], float, "smile.values")
  else:
    start = _float(_require(block, "start", "smile"), "smile.start")
    stop = _float(_require(block, "stop", "smile"), "smile.stop")
    step = _float(_require(block, "step", "smile"), "smile.step")
    if step <= 0 or stop < start:
      raise ConfigError("smile.step", f"cannot sweep {start}..{stop} with step {step}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    values = tuple(float(v) for v in np.round(start + step * np.arange(count), 12))
  if any(v <= 0 for v in values):
    raise ConfigError("smile.values", f"must be positive, got {values}")
  return SmileConfig(axis, values)

def parse_config(document: dict) -> RunConfiguration:
  option_block = _require(document, "option", "config")
  spec, spots = parse_option(option_block)
  model = parse_model(_require(document, "model", "config"), spots[0])

  run_blocks = document.get("runs", [])
  if len(run_blocks) == 0:
    raise ConfigError("runs", "at least one run entry is required")
  runs = tuple(parse_run(block, i) for i, block in enumerate(run_blocks))

  output = document.get("output", {})
  verbosity = str(output.get("verbosity", "summary")).lower()
  if verbosity not in VERBOSITY:
    raise ConfigError("output.verbosity", f"must be one of {VERBOSITY}, got {verbosity!r}")
  csv_path = Path(output["csv"]) if "csv" in output else None

  smile = parse_smile(document["smile"]) if "smile" in document else None
  return RunConfiguration(model, spec, spots, runs, csv_path, verbosity, smile)

def load_config(path: Union[str, Path]) -> RunConfiguration:
  '''Reads and validates a TOML run configuration'''
  path = Path(path)
  try:
    with path.open("rb") as f:
      document = tomllib.load(f)
  except FileNotFoundError as e:
    raise ConfigError("config", f"no such file {path}") from e
  except tomllib.TOMLDecodeError as e:
    raise ConfigError("config", f"{path} is not valid TOML: {e}") from e

  config = parse_config(document)
  logger.info("Loaded %s: %i run entries, %i spots", path, len(config.runs), len(config.spots))
  return config
