"""Matplotlib rendering of bounded-reachability curves."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_curve(points, path, title=None, limit=None):
    """Write a step-vs-probability line chart to ``path`` (format from suffix).

    ``limit`` draws the unbounded reachability value as a dashed line.
    """
    steps = [k for k, _ in points]
    probs = [p for _, p in points]
    fig, ax = plt.subplots(figsize=(6, 3.7))
    ax.plot(steps, probs, drawstyle="steps-post", color="tab:blue", lw=1.5)
    if limit is not None:
        ax.axhline(limit, color="0.5", ls="--", lw=1)
    ax.set_xlabel("step bound k")
    ax.set_ylabel("probability")
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlim(0, max(steps[-1], 1))
    if title:
        ax.set_title(title, fontsize=10)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
