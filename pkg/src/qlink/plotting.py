"""Optional sweep figure. Only this module imports matplotlib."""

from __future__ import annotations

from .errors import ValidationError


def plot_sweep(rows, parameter, unit, path, y="survival"):
    """Render ``y`` against the swept parameter to a PNG at ``path``.

    ``rows`` are the sweep CSV rows ``(parameter, value, unit, *verdict)``.
    """
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        raise ValidationError("--plot needs matplotlib (pip install 'artifact[plot]')") from None
    from .scenario import VERDICT_FIELDS

    col = 3 + VERDICT_FIELDS.index(y)
    xs = [r[1] for r in rows]
    ys = [float("nan") if r[col] is None else float(r[col]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, ys, marker="o")
    positive = all(x > 0 for x in xs)
    if positive and len(xs) > 1 and max(xs) / min(xs) > 100:
        ax.set_xscale("log")
    ax.set_xlabel(f"{parameter} [{unit}]")
    ax.set_ylabel(y)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
