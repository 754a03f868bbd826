"""Load series CSVs and build the two-panel ensemble-dynamics figure."""
import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

REQUIRED_COLUMNS = ("t", "mean_q", "mean_p", "var_q", "var_p_op")
HJ_COLUMN = "var_p_hj"


class SchemaError(Exception):
    """The CSV does not carry the expected series schema."""


@dataclass(frozen=True)
class FigureSpec:
    inputs: tuple
    labels: tuple
    output: Path
    panels: str = "both"          # position | momentum | both
    hj_band: bool = False         # extra panel with the flow-dispersion band
    formats: tuple = ("png", "svg")

    def __post_init__(self):
        if len(self.inputs) < 1:
            raise SchemaError("need at least one input CSV")
        if len(self.labels) != len(self.inputs):
            raise SchemaError("one label per input CSV is required")
        if len(set(self.labels)) != len(self.labels):
            raise SchemaError("labels must be unique")
        if self.panels not in ("position", "momentum", "both"):
            raise SchemaError(f"unknown panel selection {self.panels!r}")
        object.__setattr__(self, "inputs", tuple(Path(p) for p in self.inputs))
        object.__setattr__(self, "output", Path(self.output))


def load_series(path) -> dict:
    """Read one series.csv into arrays, validating the schema."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file, expected a series header")
        for col in REQUIRED_COLUMNS:
            if col not in reader.fieldnames:
                raise SchemaError(f"{path}: missing required column {col!r}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    out = {}
    for col in reader.fieldnames:
        vals = [row[col] for row in rows]
        try:
            out[col] = np.array([float(v) if v != "" else np.nan for v in vals])
        except ValueError:
            out[col] = np.array(vals)
    return out


def _band(ax, t, center, half_width, color, label):
    ax.plot(t, center, color=color, lw=1.4, label=label)
    ax.fill_between(t, center - half_width, center + half_width,
                    color=color, alpha=0.22, lw=0)


def build_figure(series_list, labels, panels="both", hj_band=False):
    """Assemble the figure from pre-loaded series; returns the Figure."""
    panel_names = ["position", "momentum"] if panels == "both" else [panels]
    if hj_band:
        panel_names.append("hj")
    fig, axes = plt.subplots(1, len(panel_names),
                             figsize=(4.2 * len(panel_names), 3.2),
                             squeeze=False)
    axes = axes[0]
    colors = plt.cm.viridis(np.linspace(0.1, 0.85, len(series_list)))
    for name, ax in zip(panel_names, axes):
        for data, label, color in zip(series_list, labels, colors):
            t = data["t"]
            if name == "position":
                _band(ax, t, data["mean_q"], np.sqrt(data["var_q"]),
                      color, label)
                ax.set_ylabel("q")
            elif name == "momentum":
                _band(ax, t, data["mean_p"], np.sqrt(data["var_p_op"]),
                      color, label)
                ax.set_ylabel("p")
            else:
                _band(ax, t, data["mean_p"], np.sqrt(data[HJ_COLUMN]),
                      color, label)
                ax.set_ylabel("p (flow band)")
        ax.set_xlabel("t")
        ax.legend(fontsize=8, framealpha=0.6)
    fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> list[Path]:
    """Render the figure to <output>.<fmt> for each requested format."""
    series_list = [load_series(p) for p in spec.inputs]
    if spec.hj_band:
        for path, data in zip(spec.inputs, series_list):
            if HJ_COLUMN not in data:
                raise SchemaError(f"{path}: missing required column {HJ_COLUMN!r}")
    fig = build_figure(series_list, spec.labels, spec.panels, spec.hj_band)
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    written = []
    for fmt in spec.formats:
        target = spec.output.with_suffix(f".{fmt}")
        fig.savefig(target, dpi=150)
        written.append(target)
    plt.close(fig)
    return written
