"""Render sweep CSV exports into static figures.

Five figure kinds cover the standard views of the sweep data: log-log
information vs. photon number with reference-slope guides, information and
negativity vs. absorbance, exponent and value heatmaps over the
(photon number, absorbance) plane, and a Wigner-function panel.

Rendering is deterministic: a fixed style is applied, no timestamps or
environment-dependent metadata end up inside the canvas, and re-running on
the same CSV produces an identical image file.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
from matplotlib.colors import LogNorm, TwoSlopeNorm

from .exceptions import EmptySelection, SchemaError

SWEEP_COLUMNS = (
    "family",
    "param",
    "mean_photon",
    "epsilon",
    "measurement",
    "value",
    "dim",
    "status",
)
FIELD_COLUMNS = ("q", "p", "W")

KINDS = (
    "loglog_fi_vs_n",
    "fi_vs_epsilon",
    "exponent_heatmap",
    "fi_heatmap",
    "wigner_panel",
)

# slopes of the dashed power-law guides on log-log plots
GUIDE_SLOPES = (2, 3, 4)

_STYLE = {
    "figure.figsize": (6.4, 4.4),
    "figure.dpi": 110,
    "savefig.dpi": 150,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.markersize": 4.5,
    "svg.hashsalt": "tpa-figures",
}

_LABELS = {
    "qfi": "QFI",
    "photon_number": "CFI (photon number)",
    "negativity": "Wigner negativity",
}


def _measurement_label(name: str) -> str:
    if name in _LABELS:
        return _LABELS[name]
    if name.startswith("quadrature:"):
        theta = float(name.split(":", 1)[1])
        return f"CFI (quadrature, theta={theta:g})"
    if name.startswith("exponent:"):
        return f"exponent of {_measurement_label(name.split(':', 1)[1])}"
    return name


def load_sweep(path) -> pd.DataFrame:
    """Read a sweep CSV, checking the column schema."""
    table = pd.read_csv(path)
    missing = [c for c in SWEEP_COLUMNS if c not in table.columns]
    if missing:
        raise SchemaError(f"sweep CSV is missing columns: {', '.join(missing)}")
    return table


def load_field(path) -> pd.DataFrame:
    """Read a phase-space field CSV (long q,p,W format)."""
    table = pd.read_csv(path)
    missing = [c for c in FIELD_COLUMNS if c not in table.columns]
    if missing:
        raise SchemaError(f"field CSV is missing columns: {', '.join(missing)}")
    return table


def _ok_rows(table: pd.DataFrame, mask, what: str) -> pd.DataFrame:
    sel = table[(table["status"] == "ok") & mask]
    if sel.empty:
        raise EmptySelection(f"no usable rows for {what}")
    return sel


def _save(fig, out_path) -> None:
    fig.savefig(out_path, metadata={"Software": "tpa-figures"})
    plt.close(fig)


def plot_loglog_fi_vs_n(table: pd.DataFrame, out_path) -> None:
    """Fisher information vs. mean photon number, log-log, with slope guides."""
    is_fi = ~table["measurement"].str.startswith(("exponent:", "negativity"))
    sel = _ok_rows(table, is_fi & (table["value"] > 0), "log-log information curves")
    fig, ax = plt.subplots()
    n_anchor, v_anchor = 0.0, 0.0
    for (family, meas), grp in sorted(sel.groupby(["family", "measurement"])):
        grp = grp.sort_values("mean_photon")
        ax.loglog(
            grp["mean_photon"],
            grp["value"],
            marker="o",
            label=f"{family}, {_measurement_label(meas)}",
        )
        if grp["mean_photon"].iloc[-1] >= n_anchor:
            n_anchor = grp["mean_photon"].iloc[-1]
            v_anchor = max(v_anchor, grp["value"].iloc[-1])
    # power-law guides anchored at the largest-photon-number data point,
    # where the asymptotic scalings apply
    n_lo = sel["mean_photon"].min()
    ns = np.geomspace(n_lo, n_anchor, 50)
    for slope in GUIDE_SLOPES:
        ax.loglog(ns, v_anchor * (ns / n_anchor) ** slope, "k--", lw=0.8, alpha=0.6)
        ax.annotate(
            f"$n^{slope}$",
            (ns[0], v_anchor * (ns[0] / n_anchor) ** slope),
            fontsize=8,
            ha="right",
        )
    ax.set_xlabel("mean photon number")
    ax.set_ylabel("Fisher information")
    ax.legend(fontsize=8)
    _save(fig, out_path)


def plot_fi_vs_epsilon(table: pd.DataFrame, out_path) -> None:
    """Information vs. absorbance; adds a negativity panel when present."""
    is_fi = ~table["measurement"].str.startswith(("exponent:", "negativity"))
    fi = _ok_rows(table, is_fi & (table["value"] > 0), "information vs absorbance")
    neg = table[(table["status"] == "ok") & (table["measurement"] == "negativity")]
    if neg.empty:
        fig, ax_fi = plt.subplots()
    else:
        fig, (ax_neg, ax_fi) = plt.subplots(
            2, 1, sharex=True, figsize=(6.4, 6.0), height_ratios=[1, 1.4]
        )
        for (family, param), grp in sorted(neg.groupby(["family", "param"])):
            grp = grp.sort_values("epsilon")
            ax_neg.semilogx(
                grp["epsilon"], grp["value"], marker="o", label=f"{family}, param={param:g}"
            )
        ax_neg.set_ylabel("Wigner negativity")
        ax_neg.legend(fontsize=8)
    for (family, param, meas), grp in sorted(fi.groupby(["family", "param", "measurement"])):
        grp = grp.sort_values("epsilon")
        ax_fi.loglog(
            grp["epsilon"],
            grp["value"],
            marker="o",
            label=f"{family} ({param:g}), {_measurement_label(meas)}",
        )
    ax_fi.set_xlabel("absorbance")
    ax_fi.set_ylabel("Fisher information")
    ax_fi.legend(fontsize=8)
    _save(fig, out_path)


def _pivot(sel: pd.DataFrame) -> pd.DataFrame:
    return sel.pivot_table(index="mean_photon", columns="epsilon", values="value")


def plot_exponent_heatmap(table: pd.DataFrame, out_path) -> None:
    """Scaling exponent over the (photon number, absorbance) plane."""
    is_exp = table["measurement"].str.startswith("exponent:")
    sel = _ok_rows(table, is_exp, "exponent heatmap")
    families = sorted(sel["family"].unique())
    fig, axes = plt.subplots(
        1, len(families), figsize=(5.0 * len(families), 4.2), squeeze=False
    )
    vmin, vmax = sel["value"].min(), sel["value"].max()
    mesh = None
    for ax, family in zip(axes[0], families):
        grid = _pivot(sel[sel["family"] == family])
        mesh = ax.pcolormesh(
            grid.columns, grid.index, grid.values, shading="nearest", vmin=vmin, vmax=vmax
        )
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("absorbance")
        ax.set_title(family)
    axes[0][0].set_ylabel("mean photon number")
    bar = fig.colorbar(mesh, ax=axes[0], fraction=0.046)
    bar.set_label(f"scaling exponent (range {vmin:.2f} to {vmax:.2f})")
    _save(fig, out_path)


def plot_fi_heatmap(table: pd.DataFrame, out_path) -> None:
    """Fisher-information value over the (photon number, absorbance) plane."""
    is_fi = ~table["measurement"].str.startswith(("exponent:", "negativity"))
    sel = _ok_rows(table, is_fi & (table["value"] > 0), "information heatmap")
    meas = sorted(sel["measurement"].unique())[0]
    sel = sel[sel["measurement"] == meas]
    families = sorted(sel["family"].unique())
    fig, axes = plt.subplots(
        1, len(families), figsize=(5.0 * len(families), 4.2), squeeze=False
    )
    norm = LogNorm(vmin=sel["value"].min(), vmax=sel["value"].max())
    mesh = None
    for ax, family in zip(axes[0], families):
        grid = _pivot(sel[sel["family"] == family])
        mesh = ax.pcolormesh(grid.columns, grid.index, grid.values, shading="nearest", norm=norm)
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("absorbance")
        ax.set_title(family)
    axes[0][0].set_ylabel("mean photon number")
    bar = fig.colorbar(mesh, ax=axes[0], fraction=0.046)
    bar.set_label(_measurement_label(meas))
    _save(fig, out_path)


def plot_wigner_panel(table: pd.DataFrame, out_path) -> None:
    """Phase-space panel of a Wigner function with a symmetric diverging scale."""
    grid = table.pivot_table(index="q", columns="p", values="W")
    if grid.empty:
        raise EmptySelection("field CSV holds no grid points")
    span = float(np.nanmax(np.abs(grid.values)))
    if span <= 0:
        raise EmptySelection("field CSV holds only zero values")
    fig, ax = plt.subplots(figsize=(5.4, 4.6))
    mesh = ax.pcolormesh(
        grid.columns,
        grid.index,
        grid.values,
        shading="nearest",
        cmap="RdBu_r",
        norm=TwoSlopeNorm(vcenter=0.0, vmin=-span, vmax=span),
    )
    ax.set_xlabel("p")
    ax.set_ylabel("q")
    ax.set_aspect("equal")
    fig.colorbar(mesh, ax=ax, label="W(q, p)")
    _save(fig, out_path)


def render(kind: str, in_path, out_path) -> None:
    """Load the CSV for ``kind`` and write the figure to ``out_path``."""
    if kind not in KINDS:
        raise SchemaError(f"unknown figure kind {kind!r}; choose from {sorted(KINDS)}")
    with plt.rc_context(_STYLE):
        if kind == "wigner_panel":
            plot_wigner_panel(load_field(in_path), out_path)
            return
        table = load_sweep(in_path)
        if kind == "loglog_fi_vs_n":
            plot_loglog_fi_vs_n(table, out_path)
        elif kind == "fi_vs_epsilon":
            plot_fi_vs_epsilon(table, out_path)
        elif kind == "exponent_heatmap":
            plot_exponent_heatmap(table, out_path)
        else:
            plot_fi_heatmap(table, out_path)
