#! /usr/bin/python
#
# Copyright (C) 2025 Paradox
#
# Release: 2.5.5
# @link olivia.paradox.ai
#

__author__ = "tri.tran"
__date__ = "$Nov 25, 2025 15:40:19$"

"""
Support-point designs in the standardized hyperparameter space.

theta = theta_mode + scaling @ z, where scaling = V diag(lambda)^-1/2
from the eigen-decomposition of the negative Hessian at the mode.
"""

import itertools
import logging
from typing import Callable

import numpy as np

logger = logging.getLogger(__name__)


def standardization(curvature: np.ndarray) -> tuple[np.ndarray, bool]:
    """
    Scaling matrix from the negative Hessian.

    Returns:
        (scaling, ok); ok is False when the curvature is not positive
        definite and the identity scaling is returned instead
    """
    d = curvature.shape[0]
    if d == 0:
        return np.zeros((0, 0)), True
    sym = 0.5 * (curvature + curvature.T)
    eigval, eigvec = np.linalg.eigh(sym)
    if not np.all(np.isfinite(eigval)) or np.any(eigval <= 0):
        logger.warning(f"Negative Hessian is not positive definite (eigenvalues {eigval}), using identity scaling")
        return np.eye(d), False
    return eigvec / np.sqrt(eigval)[None, :], True


def ccd_design(dim: int, radius_factor: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Centre, 2*dim axial points and a factorial shell on a sphere of
    radius radius_factor * sqrt(dim).

    Weights make the design integrate exp(-|z|^2 / 2) and its second
    moment exactly, so they carry the (2 pi)^(dim/2) normalization.

    Returns:
        (z_points, weights, shell_mask)
    """
    f0 = radius_factor
    radius = f0 * np.sqrt(dim)
    axial = []
    for i in range(dim):
        for sign in (1.0, -1.0):
            z = np.zeros(dim)
            z[i] = sign * radius
            axial.append(z)
    corners = []
    if dim >= 2:
        full = np.array(list(itertools.product((-1.0, 1.0), repeat=dim)))
        if dim > 4:
            # half fraction: last column is the product of the others
            full = full[np.prod(full[:, :-1], axis=1) == full[:, -1]]
        corners = list(f0 * full)
    points = np.vstack([np.zeros(dim)] + axial + corners)
    n = points.shape[0]
    norm = (2.0 * np.pi) ** (dim / 2.0)
    weights = np.empty(n)
    # all non-centre points share one weight; on a standard Gaussian they
    # carry 1 / f0^2 of the mass, which fixes the second moment at dim
    weights[0] = norm * (1.0 - 1.0 / f0 ** 2)
    weights[1:] = norm * np.exp(radius ** 2 / 2.0) / ((n - 1) * f0 ** 2)
    # every non-centre point lies on the sphere of the given radius
    shell = np.ones(n, dtype=bool)
    shell[0] = False
    return points, weights, shell


def axis_grid(
    evaluate: Callable[[tuple], float],
    dim: int,
    step: float,
    threshold: float,
    max_steps: int,
) -> tuple[dict, np.ndarray]:
    """
    Regular lattice of z = step * index around the mode.

    Each axis is walked outwards until the log density drops more than
    threshold below the best value seen; the product lattice inside those
    extents is evaluated and points within threshold of the maximum kept.

    Returns:
        (retained {index tuple: log density}, shell mask aligned with the
        retained keys in insertion order)
    """
    values: dict[tuple, float] = {}

    def value(index: tuple) -> float:
        if index not in values:
            values[index] = evaluate(index)
        return values[index]

    origin = (0,) * dim
    best = value(origin)
    extents = []
    for axis in range(dim):
        reach = []
        for sign in (1, -1):
            kept = 0
            for m in range(1, max_steps + 1):
                index = tuple(sign * m if i == axis else 0 for i in range(dim))
                ld = value(index)
                best = max(best, ld) if np.isfinite(ld) else best
                if not np.isfinite(ld) or best - ld > threshold:
                    break
                kept = m
            reach.append(kept)
        extents.append((-reach[1], reach[0]))

    for index in itertools.product(*(range(lo, hi + 1) for lo, hi in extents)):
        if dim > 2 and 0.5 * step * step * sum(i * i for i in index) > threshold + 2.0:
            continue
        ld = value(index)
        if np.isfinite(ld):
            best = max(best, ld)

    retained = {k: v for k, v in values.items() if np.isfinite(v) and best - v <= threshold}
    keys = set(retained)
    shell = []
    for index in retained:
        edge = False
        for axis in range(dim):
            for delta in (1, -1):
                neighbour = tuple(c + delta if i == axis else c for i, c in enumerate(index))
                if neighbour not in keys:
                    edge = True
        shell.append(edge)
    return retained, np.asarray(shell, dtype=bool)
