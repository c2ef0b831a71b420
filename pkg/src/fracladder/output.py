"""Deterministic CSV and JSON emission for states and energy curves."""

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .config import RunConfig
from .ladder import energy_curve, excited_state
from .spectral import UniformGrid, ensure_decay, normalized, sample, to_position

logger = logging.getLogger(__name__)


def format_number(value: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    return f"{float(value):.17g}"


def format_alpha(alpha: float) -> str:
    """1.2 -> '1.2', 2 -> '2.0'."""
    text = f"{float(alpha):.10g}"
    return text if "." in text or "e" in text else f"{text}.0"


def state_filename(alpha: float, n: int, representation: str) -> str:
    return f"state_a{format_alpha(alpha)}_n{n}_{representation}.csv"


def energy_filename(alpha: float, n: int, suffix: str = "csv") -> str:
    return f"energy_a{format_alpha(alpha)}_n{n}.{suffix}"


def write_csv(path: Path, header: Sequence[str], columns: Sequence[Iterable[float]]) -> Path:
    """Write UTF-8, comma-separated, LF-terminated columns under a header row."""
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([format_number(v) for v in row])
    return path


def write_json(path: Path, data: Dict[str, Any]) -> Path:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def run_jobs(config: RunConfig, job: Callable[[float, int], List[Path]],
             pairs: Sequence[Tuple[float, int]]) -> List[Path]:
    """Dispatch independent (alpha, n) jobs; the returned paths keep input order."""
    logger.info("dispatching %d job(s) on %d worker(s)", len(pairs), config.workers)
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        batches = list(pool.map(lambda pair: job(*pair), pairs))
    return [path for batch in batches for path in batch]


def config_pairs(config: RunConfig) -> List[Tuple[float, int]]:
    return [(alpha, n) for alpha in config.alphas for n in config.levels]


def write_state_files(config: RunConfig, alpha: float, n: int) -> List[Path]:
    """Momentum and position CSVs of phi_n, both L2-normalized."""
    state = excited_state(alpha, n, config.max_level)
    grid = ensure_decay(state, UniformGrid(config.k_max, config.points))
    momentum = normalized(sample(state, grid, n))
    position = to_position(momentum)
    paths = []
    for samples, label, coordinate in ((momentum, "momentum", "k"), (position, "position", "x")):
        path = config.out_dir / state_filename(alpha, n, label)
        write_csv(path, (coordinate, "re", "im"),
                  (samples.coordinates, samples.values.real, samples.values.imag))
        paths.append(path)
    return paths


def energy_grid(config: RunConfig) -> np.ndarray:
    k = UniformGrid(config.k_max, config.points).k_points
    return k[np.abs(k) <= config.energy_k_max]


def write_energy_files(config: RunConfig, alpha: float, n: int) -> List[Path]:
    """E_n(k, alpha) CSV plus a sidecar JSON listing the excluded windows."""
    curve = energy_curve(alpha, n, energy_grid(config), max_level=config.max_level)
    csv_path = write_csv(config.out_dir / energy_filename(alpha, n), ("k", "E"), (curve.k, curve.energy))
    meta_path = write_json(config.out_dir / energy_filename(alpha, n, "json"), {
        'alpha': alpha,
        'n': n,
        'samples': len(curve),
        'excluded_windows': [[lo, hi] for lo, hi in curve.excluded_windows],
        'energy_k_max': config.energy_k_max,
    })
    return [csv_path, meta_path]
