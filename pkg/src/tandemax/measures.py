"""Sojourn and waiting times of customers in open tandem systems.

Sojourn times are departure epochs referenced to the arrival-stream
epoch d_1(k); waiting times strip the accumulated service times back
out.  Both admit linear max-plus recursions
s(k) = U_k (x) s(k-1) and w(k) = V_{k,k-1} (x) w(k-1) that this module
builds alongside the direct definitions, so the two routes can be
cross-checked exactly.

For blocking systems the waiting figures include server blocking time
as well; callers should label them accordingly.
"""

from __future__ import annotations

import numpy as np

from .core import EPS, MaxPlusMatrix, ShapeError
from .models import _check_tau


class ReferenceEpochError(ValueError):
    """d_1(k) is eps, so sojourn times are undefined."""


class MeasureConsistencyError(ValueError):
    """A derived measure violated a structural constraint of the model."""


def sojourn_direct(d_k: np.ndarray) -> np.ndarray:
    """s_i(k) = d_i(k) - d_1(k)."""
    d = np.asarray(d_k, dtype=np.float64)
    if d[0] == EPS:
        raise ReferenceEpochError("reference epoch d_1(k) is eps")
    return d - d[0]


def sojourn_matrix(t_k: MaxPlusMatrix, tau_1k: float) -> MaxPlusMatrix:
    """U_k = tau_1k^-1 (x) T_k, driving s(k) = U_k (x) s(k-1)."""
    if tau_1k == EPS:
        raise ValueError("interarrival time must be finite")
    return t_k.scale(-tau_1k)


def waiting_scale_matrix(tau_k) -> MaxPlusMatrix:
    """Diagonal matrix of cumulative service prefixes tau_1 (x) ... (x) tau_i."""
    v = _check_tau(tau_k)
    return MaxPlusMatrix.diag(np.cumsum(v))


def waiting_transition(t_k: MaxPlusMatrix, tau_k, tau_prev) -> MaxPlusMatrix:
    """V_{k,k-1} = tau_{1,k-1}^-1 (x) P_k^-1 (x) T_k (x) P_{k-1}."""
    v_k = _check_tau(tau_k)
    v_prev = _check_tau(tau_prev)
    p_k_inv = waiting_scale_matrix(v_k).diag_inverse()
    p_prev = waiting_scale_matrix(v_prev)
    return (p_k_inv @ t_k @ p_prev).scale(-v_prev[0])


def waiting_from_sojourn(s_k, tau_k, check_nonneg: bool = True) -> np.ndarray:
    """w_1(k) = 0; w_i(k) = s_i(k) - (tau_2k + ... + tau_ik).

    With ``check_nonneg`` (the infinite-buffer case) a negative entry
    signals a model bug and raises; blocking callers disable the check
    because their w includes blocking time measured the same way.
    """
    s = np.asarray(s_k, dtype=np.float64)
    v = _check_tau(tau_k)
    if s.size != v.size:
        raise ShapeError("sojourn and service vectors must have equal length")
    w = s.copy()
    w[1:] -= np.cumsum(v[1:])
    w[0] = 0.0
    if check_nonneg and (w < 0).any():
        i = int(np.argmax(w < 0))
        raise MeasureConsistencyError(
            f"negative waiting time w_{i + 1} = {w[i]} in an infinite-buffer system"
        )
    return w


def trajectory_sojourn(states: np.ndarray, n: int) -> np.ndarray:
    """Sojourn vectors for k = 1..K from the raw state rows.

    ``states`` holds d(k) in row k (row 0 is the initial state);
    augmented history columns beyond n are ignored.
    """
    return np.vstack([sojourn_direct(states[k, :n]) for k in range(1, states.shape[0])])


def trajectory_waiting(
    states: np.ndarray, tau: np.ndarray, check_nonneg: bool = True
) -> np.ndarray:
    """Waiting vectors for k = 1..K; tau is the n x K service matrix."""
    n = tau.shape[0]
    rows = []
    for k in range(1, states.shape[0]):
        s = sojourn_direct(states[k, :n])
        rows.append(waiting_from_sojourn(s, tau[:, k - 1], check_nonneg=check_nonneg))
    return np.vstack(rows)
