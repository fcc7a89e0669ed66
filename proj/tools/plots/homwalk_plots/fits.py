# SPDX-License-Identifier: Apache-2.0
# Copyright the homwalk authors
"""Least-squares fits solved through an explicit design matrix."""

import numpy as np


def ols(x, y, groups=None):
    """Fit y = slope * x + intercept, one intercept per group when given.

    Returns slope, mean intercept, R^2 of the within-group fit, slope standard
    error, point count and residual degrees of freedom.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if groups is None:
        groups = np.zeros(len(x), dtype=int)
    labels = sorted(set(groups))
    index = {g: i for i, g in enumerate(labels)}
    design = np.zeros((len(x), 1 + len(labels)))
    design[:, 0] = x
    for row, g in enumerate(groups):
        design[row, 1 + index[g]] = 1.0
    dof = len(x) - design.shape[1]
    if dof < 0 or np.linalg.matrix_rank(design) < design.shape[1]:
        raise ValueError("design matrix is rank deficient")
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    rss = float(resid @ resid)
    # Total sum of squares about each group's own mean
    tss = 0.0
    for g in labels:
        yg = y[np.asarray(groups) == g]
        tss += float(((yg - yg.mean()) ** 2).sum())
    out = {
        "slope": float(coef[0]),
        "intercept": float(np.mean(coef[1:])),
        "r2": 1.0 - rss / tss if tss > 0 else 1.0,
        "n": int(len(x)),
        "dof": int(dof),
    }
    if dof > 0:
        cov = rss / dof * np.linalg.inv(design.T @ design)
        out["slope_se"] = float(np.sqrt(cov[0, 0]))
    return out
