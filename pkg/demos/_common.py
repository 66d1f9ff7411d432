"""Shared helpers for the demo scripts: output folder and image panels."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

OUT = Path(__file__).resolve().parent / "out"


def save_panels(name, panels, title=None, cmap="gray"):
    """Plot ``(label, image)`` pairs side by side and write ``out/<name>.png``."""
    OUT.mkdir(exist_ok=True)
    fig, axes = plt.subplots(1, len(panels), figsize=(3.2 * len(panels), 3.4))
    for ax, (label, img) in zip(axes, panels):
        ax.imshow(img, cmap=cmap)
        ax.set_title(label, fontsize=9)
        ax.axis("off")
    if title:
        fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    path = OUT / f"{name}.png"
    fig.savefig(path, dpi=110)
    plt.close(fig)
    print(f"wrote {path}")
    return path
