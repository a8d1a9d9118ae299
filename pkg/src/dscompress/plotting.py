"""Figures written next to the tab-separated reports."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .chooser import normalized_rows  # noqa: E402

# PNG metadata without version strings keeps reruns byte-identical
_SAVE_KW = {"metadata": {"Software": None}, "dpi": 100}


def plot_length_table(rows, chosen, policy, path, title=None):
    """Raw and length-normalized log-probability against compression length."""
    table = normalized_rows(rows, policy)
    lengths = [r[0] for r in table]
    fig, (ax_raw, ax_norm) = plt.subplots(1, 2, figsize=(9, 3.6))
    ax_raw.plot(lengths, [r[1] for r in table], "o-", color="0.3")
    ax_norm.plot(lengths, [r[2] for r in table], "o-", color="tab:blue")
    for r in table:
        if r[0] == chosen:
            ax_raw.plot([r[0]], [r[1]], "o", ms=10, mfc="none", mec="tab:red", mew=2)
            ax_norm.plot([r[0]], [r[2]], "o", ms=10, mfc="none", mec="tab:red", mew=2)
    ax_raw.set_xlabel("length (tokens)")
    ax_raw.set_ylabel("log prob")
    ax_norm.set_xlabel("length (tokens)")
    if policy.alpha == 0:
        ax_norm.set_ylabel("log prob (raw argmax)")
    else:
        ax_norm.set_ylabel(f"log prob / n^{policy.alpha:g}")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def plot_cmp_summary(summaries, path, title="Average compression rate"):
    names = [s.system for s in summaries]
    values = [float(s.cmp) for s in summaries]
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    bars = ax.bar(names, values, color="0.55")
    for bar, v in zip(bars, values):
        ax.text(bar.get_x() + bar.get_width() / 2, v + 0.01, f"{v:.2f}", ha="center",
                va="bottom", fontsize=9)
    ax.set_ylim(0, 1.1)
    ax.set_ylabel("Cmp")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path
