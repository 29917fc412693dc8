"""Matplotlib rendering of sweep results to deterministic SVG."""

from __future__ import annotations

import io
from collections import defaultdict
from typing import TYPE_CHECKING, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

if TYPE_CHECKING:
    from .evaluation import SweepRow

WIDTH_PX, HEIGHT_PX = 800, 500

STYLE = {
    "svg.fonttype": "none",
    "svg.hashsalt": "cnmdesign",
    "font.family": "DejaVu Sans",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.8,
    "lines.markersize": 5,
}

_COLORS = {"min-risk": "#1b7837", "min-resource": "#b2182b"}
_MARKERS = {"min-risk": "o", "min-resource": "s"}


def _series(rows: Sequence[SweepRow]) -> dict[str, dict[int, tuple[int, int]]]:
    """objective -> count -> (disruptions, resource links), one point per design."""
    by_design: dict[tuple[str, int], list[SweepRow]] = defaultdict(list)
    for row in rows:
        by_design[(row.objective, row.controllers)].append(row)
    out: dict[str, dict[int, tuple[int, int]]] = defaultdict(dict)
    for (objective, count), group in sorted(by_design.items()):
        agg = [r for r in group if r.disaster_id == "ALL"]
        use = agg if agg else group
        out[objective][count] = (sum(r.disruptions for r in use), group[0].resource_links)
    return dict(out)


def sweep_figure_svg(rows: Sequence[SweepRow]) -> str:
    """Disruptions and resource usage versus controller count, one line per objective.

    Each line is wrapped in an SVG group with id ``<metric>-<objective>``.
    """
    series = _series(rows)
    with plt.rc_context(STYLE):
        fig, (ax_d, ax_r) = plt.subplots(1, 2, figsize=(WIDTH_PX / 72, HEIGHT_PX / 72))
        for objective in sorted(series):
            points = series[objective]
            xs = sorted(points)
            style = dict(
                color=_COLORS.get(objective, "#444444"),
                marker=_MARKERS.get(objective, "^"),
                label=objective,
            )
            ax_d.plot(xs, [points[x][0] for x in xs], gid=f"disruptions-{objective}", **style)
            ax_r.plot(xs, [points[x][1] for x in xs], gid=f"resource-{objective}", **style)
        ax_d.set_title("Control-plane disruptions")
        ax_d.set_xlabel("Number of controllers")
        ax_d.set_ylabel("Failed channels + failed controllers")
        ax_r.set_title("Resource consumption")
        ax_r.set_xlabel("Number of controllers")
        ax_r.set_ylabel("Physical links used")
        for ax in (ax_d, ax_r):
            ax.xaxis.get_major_locator().set_params(integer=True)
            ax.legend(loc="best", frameon=False)
        fig.tight_layout()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)
    return buf.getvalue()
