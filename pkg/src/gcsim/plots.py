"""Figures rendered next to report files (Agg backend, PNG)."""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .config import LEVEL_NAMES  # noqa: E402

PARTS = [
    ("dynamic_read_aj", "dynamic read", "#4c72b0"),
    ("dynamic_write_aj", "dynamic write", "#55a868"),
    ("refresh_aj", "refresh", "#c44e52"),
    ("leakage_aj", "leakage", "#8172b2"),
]


def energy_breakdown(parsed, path):
    """Stacked per-level energy bars (nJ) for one parsed report."""
    names = list(LEVEL_NAMES) + ["DRAM"]
    fig, ax = plt.subplots(figsize=(6, 4))
    bottom = [0.0] * len(names)
    for key, label, color in PARTS:
        vals = [int(parsed[f"{n}.energy.{key}"]) / 1e9 for n in LEVEL_NAMES] + [0.0]
        ax.bar(names, vals, bottom=bottom, label=label, color=color)
        bottom = [b + v for b, v in zip(bottom, vals)]
    dram = int(parsed["energy.dram_aj"]) / 1e9
    ax.bar(["DRAM"], [dram], bottom=[bottom[-1]], label="DRAM access", color="#937860")
    ax.set_ylabel("energy (nJ)")
    ax.set_title(f"energy breakdown: {parsed['label']}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path


def normalized(rows, path, label_a="A", label_b="B"):
    """Horizontal bars of A/B ratios from :func:`report.compare` rows."""
    rows = [r for r in rows if r[3] is not None]
    fig, ax = plt.subplots(figsize=(7, max(2.5, 0.3 * len(rows))))
    keys = [r[0] for r in rows]
    ratios = [float(r[3]) for r in rows]
    ax.barh(keys, ratios, color="#4c72b0")
    ax.axvline(1.0, color="black", linestyle="--", linewidth=1)
    ax.invert_yaxis()
    ax.set_xlabel(f"{label_a} normalized to {label_b}")
    ax.tick_params(axis="y", labelsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path


def sweep_bars(labels, values, path, ylabel):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(labels, values, color="#55a868")
    ax.set_ylabel(ylabel)
    ax.tick_params(axis="x", rotation=30)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
