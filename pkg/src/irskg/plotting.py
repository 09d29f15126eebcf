"""Figure rendering for the report path.

Each function takes driver output (aggregates, curves, theory rows) and
writes one PNG. Rendering is headless and metadata that would vary between
runs is stripped, so repeated runs with the same seed produce identical
files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402 - backend must be fixed first

_SAVE_OPTS = {"dpi": 150, "metadata": {"Software": None}}


def _ordered_unique(values):
    seen = []
    for v in values:
        if v not in seen:
            seen.append(v)
    return seen


def save_comparison_figure(aggregates: list, path: str) -> str:
    """Mean secure throughput per scheme over transmit power, with 95% CIs."""
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    for scheme in _ordered_unique(a["scheme"] for a in aggregates):
        pts = sorted((a for a in aggregates if a["scheme"] == scheme),
                     key=lambda a: a["p_dbm"])
        xs = [a["p_dbm"] for a in pts]
        ys = [a["c_edt_mean"] for a in pts]
        err = [1.96 * a["c_edt_std"] / max(a["count"], 1) ** 0.5 for a in pts]
        ax.errorbar(xs, ys, yerr=err, marker="o", capsize=3, label=scheme)
    ax.set_xlabel("transmit power (dBm)")
    ax.set_ylabel("secure throughput (b/s)")
    ax.set_yscale("log")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
    return path


def save_allocation_figure(curves: list, curve_marks: list, path: str) -> str:
    """Throughput versus training rounds, one curve per (L, P), optimum marked."""
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    combos = _ordered_unique((c["ell"], c["p_dbm"]) for c in curves)
    for ell, p_dbm in combos:
        pts = [c for c in curves if c["ell"] == ell and c["p_dbm"] == p_dbm]
        qs = [c["q"] for c in pts]
        rs = [c["r_edt"] for c in pts]
        line, = ax.plot(qs, rs, label=f"L={ell}, P={p_dbm:g} dBm")
        mark = next((m for m in curve_marks
                     if m["ell"] == ell and m["p_dbm"] == p_dbm), None)
        if mark is not None:
            peak = max(pts, key=lambda c: c["r_edt"])
            ax.plot([mark["q_argmax"]], [peak["r_edt"]], marker="*",
                    markersize=11, color=line.get_color(), linestyle="none")
    ax.set_xlabel("training rounds Q")
    ax.set_ylabel("encrypted throughput (b/s)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
    return path


def save_ppp_figure(aggregates: list, theory: list, path: str) -> str:
    """Key rate versus element count: simulation markers, theory lines."""
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    radii = _ordered_unique(a["radius"] for a in aggregates)
    r_big = max(radii) if radii else None
    for le in _ordered_unique(t["lambda_e"] for t in theory):
        pts = sorted((t for t in theory if t["lambda_e"] == le), key=lambda t: t["n"])
        line, = ax.plot([t["n"] for t in pts], [t["kgr_theory"] for t in pts],
                        linestyle="--", label=f"theory, lambda_E={le:g}")
        for rad in radii:
            sim = sorted((a for a in aggregates
                          if a["lambda_e"] == le and a["radius"] == rad),
                         key=lambda a: a["n"])
            if not sim:
                continue
            err = [1.96 * a["r_skg_sim_std"] / max(a["count"], 1) ** 0.5 for a in sim]
            ax.errorbar([a["n"] for a in sim], [a["r_skg_sim_mean"] for a in sim],
                        yerr=err, marker="o", markersize=4, capsize=3,
                        linestyle="none", color=line.get_color(),
                        alpha=0.9 if rad == r_big else 0.5,
                        label=f"sim, lambda_E={le:g}, R={rad:g} m")
    ax.set_xlabel("reflecting elements N")
    ax.set_ylabel("key generation rate (b/s)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
    return path
