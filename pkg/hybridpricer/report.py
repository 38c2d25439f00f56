'''
Result tables: CSV files for external tools and a rich summary for the terminal
'''

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import pandas as pd
from rich.console import Console
from rich.table import Table

from analytics import convergence_ratio
from errors import ConvergenceError

logger = logging.getLogger(__name__)

PRICE_COLUMNS = ["spot", "method", "N_t", "dy_or_paths", "price", "ci_halfwidth", "wall_time_seconds"]
SMILE_COLUMNS = ["moneyness_or_maturity", "iv_htfd", "iv_mc", "iv_cf"]
RATIO_COLUMNS = ["spot", "method", "dy_or_paths", "N_t", "price_quarter_n", "price_half_n", "price", "ratio"]

@dataclass
class ResultRow:
  spot: float
  method: str
  '''Label of the run entry'''
  n_steps: Optional[int]
  dy_or_paths: float | int
  price: float
  ci_halfwidth: Optional[float]
  wall_time_seconds: float

def price_frame(rows: list[ResultRow]) -> pd.DataFrame:
  frame = pd.DataFrame({
    "spot": pd.Series([r.spot for r in rows], dtype=float),
    "method": pd.Series([r.method for r in rows], dtype=object),
    "N_t": pd.Series([r.n_steps for r in rows], dtype="Int64"),
    # dy is a float and path counts are integers, keep both as written
    "dy_or_paths": pd.Series([r.dy_or_paths for r in rows], dtype=object),
    "price": pd.Series([r.price for r in rows], dtype=float),
    "ci_halfwidth": pd.Series([r.ci_halfwidth for r in rows], dtype=float),
    "wall_time_seconds": pd.Series([r.wall_time_seconds for r in rows], dtype=float),
  })
  return frame[PRICE_COLUMNS]

def smile_frame(points: list[dict]) -> pd.DataFrame:
  '''One row per smile point, methods that were not run stay empty'''
  return pd.DataFrame(points, columns=SMILE_COLUMNS).astype(float)

def ratio_frame(prices: pd.DataFrame) -> pd.DataFrame:
  '''
  Convergence ratios of every (method, spot, dy) whose time grids contain
  N/4, N/2 and N, one row per such N. Monte Carlo rows are skipped.
  '''
  deterministic = prices[prices["ci_halfwidth"].isna() & prices["N_t"].notna()]
  rows = []
  for (method, spot, dy), group in deterministic.groupby(["method", "spot", "dy_or_paths"], sort=False):
    by_steps = dict(zip(group["N_t"].astype(int), group["price"]))
    for n in sorted(by_steps):
      if n % 4 or n // 2 not in by_steps or n // 4 not in by_steps:
        continue
      coarse, middle, fine = by_steps[n // 4], by_steps[n // 2], by_steps[n]
      try:
        ratio = float(convergence_ratio(coarse, middle, fine))
      except ConvergenceError as e:
        logger.warning("No convergence ratio for %s at spot %s, N = %i: %s", method, spot, n, e)
        ratio = float("nan")
      rows.append((spot, method, dy, n, coarse, middle, fine, ratio))
  return pd.DataFrame(rows, columns=RATIO_COLUMNS)

def write_csv(frame: pd.DataFrame, path: Path):
  path = Path(path)
  path.parent.mkdir(parents=True, exist_ok=True)
  frame.to_csv(path, index=False, encoding="utf-8")
  logger.info("Wrote %i rows to %s", len(frame), path)

def _cell(column: str, value) -> str:
  if value is None or pd.isna(value):
    return ""
  if isinstance(value, float) and column != "dy_or_paths":
    return f"{value:0.4f}"
  return str(value)

def print_summary(frame: pd.DataFrame, title: str, console: Optional[Console] = None):
  '''Prints the frame with four decimals'''
  table = Table(*frame.columns, title=title)
  for row in frame.itertuples(index=False):
    table.add_row(*(_cell(c, v) for c, v in zip(frame.columns, row)))

  console = console or Console()
  console.print(table)
