"""Static figures for SweepResult objects, written next to the numeric output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "font.size": 10,
    "axes.labelsize": 11,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.4,
    "xtick.direction": "in",
    "ytick.direction": "in",
    "savefig.dpi": 150,
}


def _column(result, name):
    return result.data[:, result.columns.index(name)]


def _evolve(ax, result):
    t = _column(result, "t")
    for name in ("p00", "p01", "p10", "p11"):
        ax.plot(t, _column(result, name), label=name)
    ax.plot(t, _column(result, "negativity"), "k--", label="negativity")
    ax.set_xlabel(r"$\tau$")
    ax.legend(frameon=False, fontsize=8)


def _negativity(ax, result):
    t = _column(result, "t")
    ax.plot(t, _column(result, "mean_negativity"), "k-", label="ensemble mean")
    ax.plot(t, _column(result, "steady_negativity"), "k--", label="steady state")
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(r"$\mathcal{N}$")
    ax.legend(frameon=False)


def _spectrum(ax, result):
    if result.columns[0] == "nu":
        ax.plot(_column(result, "nu"), _column(result, "S"), "k-")
        ax.set_ylabel(r"$S(\nu)$")
    else:
        param = result.columns[0]
        values = np.unique(_column(result, param))
        nu = np.unique(_column(result, "nu"))
        surface = _column(result, "S").reshape(len(values), len(nu))
        mesh = ax.pcolormesh(nu, values, surface, shading="auto", cmap="viridis")
        if values.min() > 0 and values.max() / values.min() > 100:
            ax.set_yscale("log")
        ax.set_ylabel(param)
        ax.figure.colorbar(mesh, ax=ax, label=r"$S(\nu)$")
    ax.set_xlabel(r"$\nu$")


def _sweep(ax, result):
    x = result.data[:, 0]
    ax.plot(x, _column(result, "negativity"), "k-", label="negativity")
    ax.plot(x, _column(result, "mutual_information"), "k:", label="mutual information")
    ax.set_xlabel(result.columns[0])
    ax.legend(frameon=False)


def _steady(ax, result):
    rho = (_column(result, "re") + 1j * _column(result, "im")).reshape(4, 4)
    image = ax.imshow(np.abs(rho), cmap="Greys")
    labels = ["00", "01", "10", "11"]
    ax.set_xticks(range(4), labels)
    ax.set_yticks(range(4), labels)
    ax.figure.colorbar(image, ax=ax, label=r"$|\varrho_{ij}|$")


def _cv(ax, result):
    cell = np.arange(len(result.data))
    ax.plot(cell, _column(result, "E_beta"), "ko", label=r"$E_\beta$ (mode-1 marginal)")
    ax.plot(cell, _column(result, "log_negativity"), "rs", label="log-negativity")
    ax.set_xlabel(r"grid cell ($\Gamma$, $\bar n$, $\tau$)")
    ax.legend(frameon=False)


_DRAW = {
    "evolve": _evolve,
    "negativity": _negativity,
    "spectrum": _spectrum,
    "sweep": _sweep,
    "steady": _steady,
    "cv-marginal": _cv,
}


def render(result, path):
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5.0, 3.4))
        _DRAW[result.task](ax, result)
        fig.tight_layout()
        fig.savefig(path, format="png")
        plt.close(fig)
