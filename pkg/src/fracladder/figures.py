"""Six-panel SVG rendering of wavefunctions and energies."""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import matplotlib
import numpy as np
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure
from scipy.special import hermite

from .config import RunConfig
from .ladder import energy_curve
from .output import energy_grid, format_alpha, write_csv, write_json
from .spectral import UniformGrid, phase_fixed, position_state

logger = logging.getLogger(__name__)

FIGSIZE = (6.0, 4.0)
# Fixed hash salt and no date keep SVG output reproducible.
SVG_RC = {"svg.hashsalt": "fracladder"}
DPI = 100

PANELS: Tuple[Tuple[str, str, int], ...] = (
    ("a", "wavefunction", 0),
    ("b", "wavefunction", 1),
    ("c", "wavefunction", 2),
    ("d", "energy", 0),
    ("e", "energy", 1),
    ("f", "energy", 2),
)

STYLES: Dict[float, Dict[str, str]] = {
    1.2: {"color": "tab:blue", "linestyle": "--"},
    1.5: {"color": "tab:red", "linestyle": "-"},
}
OVERLAY_STYLE = {"color": "black", "linestyle": ":"}
PLOTTED_QUANTITY = "real part of the L2-normalized position state, global phase rotated so the largest sample is real-positive"


@dataclass(eq=False)
class Series:
    """One curve of a panel."""
    label: str
    x: np.ndarray
    y: np.ndarray
    style: Dict[str, str]


def style_for(alpha: float) -> Dict[str, str]:
    return STYLES.get(round(alpha, 10), {"color": "tab:gray", "linestyle": "-."})


def wavefunction_series(config: RunConfig, alpha: float, n: int) -> Series:
    psi = phase_fixed(position_state(alpha, n, UniformGrid(config.k_max, config.points), config.max_level))
    window = np.abs(psi.coordinates) <= config.plot_x_max
    return Series(f"α={format_alpha(alpha)}", psi.coordinates[window], psi.values.real[window], style_for(alpha))


def energy_series(config: RunConfig, alpha: float, n: int) -> Series:
    k = energy_grid(config)
    curve = energy_curve(alpha, n, k[k > 0], max_level=config.max_level)
    return Series(f"α={format_alpha(alpha)}", curve.k, curve.energy, style_for(alpha))


def conventional_series(config: RunConfig, kind: str, n: int) -> Series:
    """Hermite-Gaussian state or the constant 2n+1, for the overlay."""
    if kind == "energy":
        k = energy_grid(config)
        k = k[k > 0]
        return Series("oscillator", k, np.full(k.shape, 2.0 * n + 1.0), OVERLAY_STYLE)
    x = np.linspace(-config.plot_x_max, config.plot_x_max, 801)
    norm = 1.0 / math.sqrt(2.0 ** n * math.factorial(n) * math.sqrt(math.pi))
    psi = norm * hermite(n)(x) * np.exp(-x ** 2 / 2.0)
    if psi[int(np.argmax(np.abs(psi)))] < 0:
        psi = -psi
    return Series("oscillator", x, psi, OVERLAY_STYLE)


def _robust_limits(series: List[Series]) -> Optional[Tuple[float, float]]:
    """Clip the divergent branches near k = 0 out of the energy axis."""
    values = np.concatenate([s.y for s in series]) if series else np.array([])
    if not values.size:
        return None
    lo, hi = np.percentile(values, [1.0, 95.0])
    pad = 0.1 * max(hi - lo, 1e-9)
    return float(min(lo, 0.0) - pad), float(hi + pad)


def render_panel(path: Path, panel: str, kind: str, n: int, series: List[Series]) -> Path:
    with matplotlib.rc_context(SVG_RC):
        figure = Figure(figsize=FIGSIZE, dpi=DPI)
        FigureCanvasSVG(figure)
        axes = figure.add_subplot()
        for s in series:
            axes.plot(s.x, s.y, label=s.label, linewidth=1.2, **s.style)
        if kind == "energy":
            axes.set_xlabel("k")
            axes.set_ylabel(f"E_{n}(k, α)")
            limits = _robust_limits(series)
            if limits:
                axes.set_ylim(*limits)
        else:
            axes.set_xlabel("x")
            axes.set_ylabel(f"ψ_{n}(x)")
        axes.set_title(f"({panel})")
        axes.legend(frameon=False)
        figure.savefig(path, format="svg", metadata={"Date": None})
    return path


def write_figure(config: RunConfig) -> List[Path]:
    """Write one CSV per curve and one SVG per panel, as requested by config.formats.

    figure_metadata.json is always written; it records the plotted quantity.
    """
    paths: List[Path] = []
    for panel, kind, n in PANELS:
        series = []
        for alpha in config.alphas:
            if kind == "energy":
                s = energy_series(config, alpha, n)
                header = ("k", "E")
            else:
                s = wavefunction_series(config, alpha, n)
                header = ("x", "psi")
            series.append(s)
            if "csv" in config.formats:
                paths.append(write_csv(config.out_dir / f"figure_{panel}_a{format_alpha(alpha)}.csv",
                                       header, (s.x, s.y)))
        if config.overlay:
            series.append(conventional_series(config, kind, n))
        if "svg" in config.formats:
            paths.append(render_panel(config.out_dir / f"figure_{panel}.svg", panel, kind, n, series))
        logger.info("panel (%s) rendered with %d curve(s)", panel, len(series))
    paths.append(write_json(config.out_dir / "figure_metadata.json", {
        'alphas': list(config.alphas),
        'panels': [{'panel': p, 'kind': k, 'n': n} for p, k, n in PANELS],
        'plotted_quantity': PLOTTED_QUANTITY,
        'overlay': config.overlay,
    }))
    return paths
