"""Vectorised numpy implementation of the batch evaluation kernels.

This is the reference backend; ``_kernels.pyx`` mirrors it loop by loop.
All arrays are 1-D and contiguous.  Pieces are addressed by
``(strip, upper)``: strip ``k`` uses local coordinates
``u' = (-1)**k * u`` and ``v' = v - k*s``, and ``upper`` selects the mirrored
sheet above the crease.
"""
from __future__ import annotations

import numpy as np


def locate(u, v, r, tau, s, n):
    k = np.floor((v + 0.5 * s) / s).astype(np.int64)
    np.clip(k, 0, n - 1, out=k)
    sigma = np.where(k % 2 == 0, 1.0, -1.0)
    vloc = v - k * s
    crease = tau * r * np.sin(sigma * u / r)
    upper = (vloc > crease).astype(np.uint8)
    return k, upper


def _local(u, v, strip, upper, r, s, nrm):
    sigma = np.where(strip % 2 == 0, 1.0, -1.0)
    t = sigma * u / r
    p = np.empty((u.shape[0], 3))
    p[:, 0] = r * np.sin(t)
    p[:, 1] = v - strip * s
    p[:, 2] = r * np.cos(t)
    up = upper.astype(bool)
    d = p[up] @ nrm
    p[up] -= 2.0 * d[:, None] * nrm
    return p


def evaluate_pieces(u, v, strip, upper, lin, trans, r, tau, s, nrm):
    p = _local(u, v, strip, upper, r, s, nrm)
    return np.einsum("nij,nj->ni", lin[strip], p) + trans[strip]


def jacobian_pieces(u, v, strip, upper, lin, trans, r, tau, s, nrm):
    sigma = np.where(strip % 2 == 0, 1.0, -1.0)
    t = sigma * u / r
    du = np.empty((u.shape[0], 3))
    du[:, 0] = sigma * np.cos(t)
    du[:, 1] = 0.0
    du[:, 2] = -sigma * np.sin(t)
    dv = np.zeros((u.shape[0], 3))
    dv[:, 1] = 1.0
    up = upper.astype(bool)
    for col in (du, dv):
        d = col[up] @ nrm
        col[up] -= 2.0 * d[:, None] * nrm
    g = lin[strip]
    jac = np.empty((u.shape[0], 3, 2))
    jac[:, :, 0] = np.einsum("nij,nj->ni", g, du)
    jac[:, :, 1] = np.einsum("nij,nj->ni", g, dv)
    return jac
