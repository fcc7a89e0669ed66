# SPDX-License-Identifier: Apache-2.0
# Copyright the homwalk authors
"""Figure kinds and the slopes they report."""

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .fits import ols  # noqa: E402
from .schema import SchemaError, read_table, read_thresholds  # noqa: E402


@dataclass
class FigureSpec:
    kind: str
    input: Path
    output: Path
    fit_overlay: bool = True
    slopes: Optional[Path] = None

    def slopes_path(self):
        return Path(self.slopes) if self.slopes else Path(self.output).with_name("slopes.json")


def number_tag(v):
    """Shortest decimal form of v, without a trailing .0."""
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def finite(v):
    return v if math.isfinite(v) else None


def diameter(spec, ax_pair):
    t = read_table(spec.input, ["r", "log_inv_r", "net_size", "diam"])
    fits, scalars = {}, {}
    x = [a for a, d in zip(t["log_inv_r"], t["diam"]) if d >= 0]
    y = [d for d in t["diam"] if d >= 0]
    ax, ax_net = ax_pair
    ax.plot(x, y, "o", color="C0", label="diam")
    if len(x) >= 4:
        f = ols(x, y)
        fits["diam_vs_log_inv_r"] = f
        if spec.fit_overlay:
            xs = np.array([min(x), max(x)])
            ax.plot(xs, f["slope"] * xs + f["intercept"], "-", color="C1",
                    label=f"slope {f['slope']:.3f}")
    ax.set_xlabel("log(1/r)")
    ax.set_ylabel("diameter")
    ax.legend()
    lr = np.log(t["r"])
    ln = np.log(t["net_size"])
    ax_net.plot(lr, ln, "s", color="C0", label="net size")
    if len(lr) >= 3:
        f = ols(lr, ln)
        fits["net_size_vs_r"] = f
        if spec.fit_overlay:
            xs = np.array([lr.min(), lr.max()])
            ax_net.plot(xs, f["slope"] * xs + f["intercept"], "-", color="C1",
                        label=f"exponent {f['slope']:.3f}")
    ax_net.set_xlabel("log r")
    ax_net.set_ylabel("log net size")
    ax_net.legend()
    return fits, scalars


def equidist(spec, axes):
    t = read_table(spec.input, ["beta", "n", "error", "sigma"], ["function"])
    th = read_thresholds(spec.input)
    sigmas = float(th.get("fit_sigmas", 3))
    min_points = int(th.get("min_fit_points", 4))
    fits, scalars = {}, {}
    betas = sorted(set(t["beta"]))
    for ax, beta in zip(axes, betas):
        rows = [i for i, b in enumerate(t["beta"]) if b == beta]
        sig = [i for i in rows if abs(t["error"][i]) > sigmas * t["sigma"][i]]
        per = {}
        for i in sig:
            per[t["function"][i]] = per.get(t["function"][i], 0) + 1
        keep = [i for i in sig if per[t["function"][i]] >= 2]
        labels = sorted(set(t["function"][i] for i in rows))
        for k, fn in enumerate(labels):
            pts = [i for i in rows if t["function"][i] == fn]
            ax.semilogy([t["n"][i] for i in pts], [abs(t["error"][i]) for i in pts],
                        "o-", color=f"C{k % 10}", ms=3, lw=0.8)
        tag = "beta" + number_tag(beta)
        if len(keep) >= min_points and len(keep) > len(per) + 1:
            f = ols([t["n"][i] for i in keep], [math.log(abs(t["error"][i])) for i in keep],
                    [t["function"][i] for i in keep])
            fits["equidist_" + tag] = f
            scalars["theta_hat_" + tag] = -f["slope"]
            if spec.fit_overlay:
                ns = np.array([min(t["n"][i] for i in keep), max(t["n"][i] for i in keep)])
                ax.semilogy(ns, np.exp(f["slope"] * ns + f["intercept"]), "k--",
                            label=f"theta {-f['slope']:.3f}")
                ax.legend()
        ax.set_title(f"beta = {number_tag(beta)}")
        ax.set_xlabel("n")
    axes[0].set_ylabel("|error|")
    return fits, scalars


def dimension(spec, ax):
    t = read_table(spec.input, ["center", "delta", "mass"])
    fits, scalars = {}, {}
    slopes, last = [], []
    for c in sorted(set(t["center"])):
        rows = sorted((t["delta"][i], t["mass"][i]) for i, v in enumerate(t["center"]) if v == c)
        if any(m <= 0 for _, m in rows):
            raise SchemaError(f"{spec.input}: center {int(c)} has nonpositive mass")
        ld = np.log([d for d, _ in rows])
        lm = np.log([m for _, m in rows])
        f = ols(ld, lm)
        fits[f"center{int(c)}"] = f
        slopes.append(f["slope"])
        last.append(lm[-1])
        ax.plot(ld, lm, "-", color="0.6", lw=0.6)
    slopes = np.array(slopes)
    scalars["slope_median"] = float(np.quantile(slopes, 0.5))
    scalars["slope_q25"] = float(np.quantile(slopes, 0.25))
    scalars["slope_q75"] = float(np.quantile(slopes, 0.75))
    scalars["slope_min"] = float(slopes.min())
    if spec.fit_overlay:
        ld = np.log(sorted(set(t["delta"])))
        ax.plot(ld, scalars["slope_median"] * (ld - ld[-1]) + np.median(last), "k--",
                label=f"median slope {scalars['slope_median']:.3f}")
        ax.legend()
    ax.set_xlabel("log delta")
    ax.set_ylabel("log mass")
    return fits, scalars


def nondiv(spec, ax):
    t = read_table(spec.input, ["n", "h", "ratio"], ["set"])
    rows = [i for i, s in enumerate(t["set"]) if s == "train"]
    if not rows:
        raise SchemaError(f"{spec.input}: no train rows")
    ns = sorted(set(t["n"][i] for i in rows))
    hs = sorted(set(t["h"][i] for i in rows))
    grid = np.full((len(ns), len(hs)), np.nan)
    for i in rows:
        grid[ns.index(t["n"][i]), hs.index(t["h"][i])] = t["ratio"][i]
    if np.isnan(grid).any():
        raise SchemaError(f"{spec.input}: train grid is incomplete")
    scalars = {"C_hat": float(grid.max())}
    for k, h in enumerate(hs):
        lo, hi = grid[:, k].min(), grid[:, k].max()
        scalars["spread_h" + number_tag(h)] = finite(hi / lo) if lo > 0 else None
    im = ax.imshow(grid, origin="lower", aspect="auto", cmap="viridis")
    ax.set_xticks(range(len(hs)), [number_tag(h) for h in hs])
    ax.set_yticks(range(len(ns)), [number_tag(n) for n in ns])
    ax.set_xlabel("h")
    ax.set_ylabel("n")
    ax.figure.colorbar(im, ax=ax, label="h P(ht >= h) / ht(x0)")
    return {}, scalars


def _diameter(spec):
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    return fig, diameter(spec, axes)


def _equidist(spec):
    t = read_table(spec.input, ["beta"])
    k = len(set(t["beta"]))
    fig, axes = plt.subplots(1, k, figsize=(4 * k, 4), sharey=True, squeeze=False)
    return fig, equidist(spec, list(axes[0]))


def _dimension(spec):
    fig, ax = plt.subplots(figsize=(5, 4))
    return fig, dimension(spec, ax)


def _nondiv(spec):
    fig, ax = plt.subplots(figsize=(6, 4))
    return fig, nondiv(spec, ax)


KINDS = {"diameter": _diameter, "equidist": _equidist, "dimension": _dimension,
         "nondiv": _nondiv}


def render(spec):
    """Write the figure and slopes.json for ``spec``; returns the slopes document."""
    if spec.kind not in KINDS:
        raise ValueError(f"unknown figure kind {spec.kind!r}; expected one of "
                         f"{', '.join(sorted(KINDS))}")
    with plt.style.context("default"):
        fig, (fits, scalars) = KINDS[spec.kind](spec)
        try:
            fig.tight_layout()
            Path(spec.output).parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(spec.output, dpi=100, metadata={"Software": None})
        finally:
            plt.close(fig)
    doc = {
        "kind": spec.kind,
        "input": Path(spec.input).name,
        "fits": {name: {k: (finite(v) if isinstance(v, float) else v) for k, v in f.items()}
                 for name, f in fits.items()},
        "scalars": scalars,
    }
    path = spec.slopes_path()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return doc
