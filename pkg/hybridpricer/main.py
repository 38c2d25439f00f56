'''
Batch driver.

  python hybridpricer/main.py price configs/european_rho_neg.toml
  python hybridpricer/main.py smile configs/smile_moneyness.toml --out results/smile.csv

Exit code 1 means an invalid configuration, 2 a numerical failure.
'''

import logging
import os
import sys
from argparse import ArgumentParser
from dataclasses import replace
from multiprocessing import cpu_count
from pathlib import Path
from typing import Optional

from rich.console import Console

from analytics import implied_vol
from config import SMILE_METHODS, RunConfiguration, load_config
from errors import ConfigError, NumericalError
from methods import get_method_by_name
from model import Exercise, Payoff
from report import ResultRow, price_frame, print_summary, ratio_frame, smile_frame, write_csv

logger = logging.getLogger(__name__)

def default_threads() -> int:
  '''Worker threads, capped by HYBRIDPRICER_MAX_THREADS when set'''
  raw = os.environ.get("HYBRIDPRICER_MAX_THREADS", "0")
  try:
    cap = int(raw)
  except ValueError as e:
    raise ConfigError("HYBRIDPRICER_MAX_THREADS", f"expected an integer, got {raw!r}") from e
  return min(cap, cpu_count()) if cap > 0 else cpu_count()

def execute(config: RunConfiguration, threads: int) -> list[ResultRow]:
  '''Prices every (run entry, spot, discretization) in file order'''
  rows = []
  for spot, entry, n_steps, resolution in config.jobs():
    Method = get_method_by_name(entry.method)
    if Method is None:
      raise ConfigError("runs.method", f"unknown method {entry.method!r}")
    logger.info("Running %s at spot %s (N_t = %s, %s)", entry.label, spot, n_steps, resolution)

    result = Method(entry, threads).price(config.model.with_spot(spot), config.option, n_steps, resolution)
    rows.append(ResultRow(spot, entry.label, n_steps, resolution, result.price,
                          result.ci_halfwidth, result.wall_time_seconds))
    logger.info("Price %.6f in %.3f seconds", result.price, result.wall_time_seconds)
  return rows

def _guarded(action) -> int:
  '''Runs `action` and maps engine errors to exit codes'''
  try:
    action()
  except ConfigError as e:
    logger.error("Invalid configuration: %s", e)
    return 1
  except NumericalError as e:
    logger.error("Numerical failure: %s", e)
    return 2
  return 0

def ratio_path(csv_path: Path) -> Path:
  return csv_path.with_name(f"{csv_path.stem}_ratios.csv")

def run(config_path, threads: Optional[int] = None, seed: Optional[int] = None,
        out: Optional[Path] = None, console: Optional[Console] = None) -> int:
  '''
  Executes every run entry of a configuration, writes the CSV and prints the
  summary. Entries sweeping N/4, N/2 and N also get a convergence-ratio table
  next to the price CSV.
  '''
  def action():
    config = load_config(config_path).with_overrides(seed=seed, out=out)
    frame = price_frame(execute(config, threads or default_threads()))
    ratios = ratio_frame(frame)
    if config.csv_path is not None:
      write_csv(frame, config.csv_path)
      if len(ratios):
        write_csv(ratios, ratio_path(config.csv_path))
    if config.verbosity == "summary":
      print_summary(frame, Path(config_path).stem, console)
      if len(ratios):
        print_summary(ratios, f"{Path(config_path).stem} convergence ratios", console)

  return _guarded(action)

def smile_points(config: RunConfiguration, threads: int) -> list[dict]:
  '''
  Implied volatilities of European calls along the smile axis, one column
  per method. The rate used for inversion is the flat forward of the curve.
  '''
  if config.smile is None:
    raise ConfigError("smile", "the configuration has no [smile] block")
  entries = {}
  for entry in config.runs:
    if entry.method in SMILE_METHODS:
      entries.setdefault(entry.method, entry)
  if not entries:
    raise ConfigError("runs", f"a smile needs at least one of {SMILE_METHODS}")

  spot = config.spots[0]
  params = config.model.with_spot(spot)
  base = replace(config.option, exercise=Exercise.EUROPEAN, payoff=Payoff.CALL)

  points = []
  for value in config.smile.values:
    match config.smile.axis:
      case "moneyness": spec = replace(base, strike=value * spot)
      case "maturity": spec = replace(base, maturity=value)

    point = {"moneyness_or_maturity": value}
    for name, entry in entries.items():
      if name == "cf" and params.sigma_r != 0:
        logger.warning("Skipping the characteristic-function column under stochastic rates")
        continue
      n_steps, resolution = entry.discretizations()[0]
      result = get_method_by_name(name)(entry, threads).price(params, spec, n_steps, resolution)
      point[f"iv_{name}"] = implied_vol(result.price, spot, spec.strike, spec.maturity,
                                        params.flat_forward, params.eta)
    logger.info("Smile point %s: %s", value, point)
    points.append(point)
  return points

def smile_report(config_path, threads: Optional[int] = None, seed: Optional[int] = None,
                 out: Optional[Path] = None, console: Optional[Console] = None) -> int:
  '''Writes the implied-volatility sweep of a smile configuration'''
  def action():
    config = load_config(config_path).with_overrides(seed=seed, out=out)
    frame = smile_frame(smile_points(config, threads or default_threads()))
    if config.csv_path is not None:
      write_csv(frame, config.csv_path)
    if config.verbosity == "summary":
      print_summary(frame, Path(config_path).stem, console)

  return _guarded(action)

def build_parser() -> ArgumentParser:
  parser = ArgumentParser(description="Hybrid tree/finite-difference and Monte Carlo option pricer")
  parser.add_argument("command", choices=["price", "smile"], help="Price table or implied-volatility smile")
  parser.add_argument("config", type=Path, help="TOML run configuration")
  parser.add_argument(
    "--threads",
    type=int,
    help="Worker threads (default: HYBRIDPRICER_MAX_THREADS or the CPU count)"
  )
  parser.add_argument(
    "--seed",
    type=int,
    help="Override the seed of every Monte Carlo run"
  )
  parser.add_argument(
    "--out",
    type=Path,
    help="Override the CSV output path"
  )
  parser.add_argument(
    "--log",
    type=str,
    help="Log level can be one of ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']",
    default="WARNING"
  )
  return parser

def main(argv: Optional[list[str]] = None) -> int:
  args = build_parser().parse_args(argv)

  # Set log level
  numeric_level = getattr(logging, args.log.upper(), None)
  if not isinstance(numeric_level, int):
    raise ValueError(f"Invalid log level: {args.log}")
  logging.basicConfig(level=numeric_level)

  if args.threads is not None and args.threads < 1:
    logger.error("Invalid configuration: --threads must be positive")
    return 1

  match args.command:
    case "price": return run(args.config, args.threads, args.seed, args.out)
    case "smile": return smile_report(args.config, args.threads, args.seed, args.out)

if __name__ == "__main__":
  sys.exit(main())
