"""Chart rendering for simulation reports.

Figures are written to files next to the delimited output, never
shown interactively, and carry no timestamps or random ids so reruns
produce identical bytes.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "surveytree"

import matplotlib.pyplot as plt  # noqa: E402

from surveytree.simlab import AggregateRecord  # noqa: E402

__all__ = ["render_sim_chart"]

_STYLE = {
    "unweighted": {"color": "tab:red", "marker": "o"},
    "weighted": {"color": "tab:blue", "marker": "s"},
}


def render_sim_chart(
    aggregate: Sequence[AggregateRecord], path: str | Path
) -> None:
    """Plot bias and RMSE against sample size, one line per method.

    Dotted companions mark plus or minus 1.96 Monte Carlo standard
    errors around each bias line. The x axis is logarithmic since
    study sizes usually double. Output format follows the file
    extension; the simulate command passes an ``.svg`` path.
    """
    methods = sorted({r.method for r in aggregate})
    fig, (ax_bias, ax_rmse) = plt.subplots(1, 2, figsize=(9.0, 3.8))
    for method in methods:
        rows = sorted(
            (r for r in aggregate if r.method == method), key=lambda r: r.n
        )
        ns = [r.n for r in rows]
        style = _STYLE.get(method, {})
        ax_bias.plot(
            ns, [r.bias for r in rows], label=method, **style
        )
        for sign in (1.0, -1.0):
            ax_bias.plot(
                ns,
                [r.bias + sign * 1.96 * r.bias_se for r in rows],
                linestyle=":",
                linewidth=0.9,
                color=style.get("color"),
            )
        ax_rmse.plot(ns, [r.rmse for r in rows], label=method, **style)
    ax_bias.axhline(0.0, color="gray", linewidth=0.7)
    for ax, title in ((ax_bias, "mean error"), (ax_rmse, "root mean squared error")):
        ax.set_xscale("log")
        ax.set_xticks(sorted({r.n for r in aggregate}))
        ax.get_xaxis().set_major_formatter(matplotlib.ticker.ScalarFormatter())
        ax.set_xlabel("sample size")
        ax.set_ylabel(title)
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
