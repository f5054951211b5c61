"""Finite-action learning automaton with the linear reward/inaction scheme.

The automaton is plain data (a probability vector) plus pure transition
functions. Callers own the random stream and pass the uniform draw ``z``
to :func:`select_action`, which keeps seeded runs reproducible.

All functions accept a single vector of shape ``(n,)``; :func:`lri_update`
also accepts a batch of shape ``(m, n)`` with one chosen index per row.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptyActionSetError

#: Tolerance of the sum-to-one guard. A violation means a bug, not drift.
SUM_TOLERANCE = 1e-9


def init_uniform(n: int) -> np.ndarray:
    """Uniform distribution over ``n`` actions."""
    if n < 1:
        raise EmptyActionSetError("an automaton needs at least one action")
    return np.full(n, 1.0 / n)


def lri_update(p, chosen, beta, theta: float) -> np.ndarray:
    """One L_RI step: reward the chosen action in proportion to ``beta``.

    ``p_r += theta*beta*(1 - p_r)`` for the chosen action and
    ``p_q -= theta*beta*p_q`` for every other one. ``beta = 0`` leaves the
    vector unchanged. A new array is returned; the input is not modified.

    Parameters
    ----------
    p : (n,) or (m, n) array
    chosen : int or (m,) int array
    beta : float or (m,) array in [0, 1]
    theta : float in (0, 1)
    """
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    p = np.asarray(p, dtype=np.float64)
    if p.ndim == 1 and np.ndim(chosen) == 0 and np.ndim(beta) == 0:
        return _update_one(p, chosen, float(beta), theta)

    batched = p.ndim == 2
    pp = p if batched else p[None, :]
    n = pp.shape[1]
    chosen = np.atleast_1d(np.asarray(chosen))
    if chosen.dtype.kind not in "iu":
        raise TypeError("chosen must be an integer index")
    if np.any(chosen < 0) or np.any(chosen >= n):
        raise IndexError(f"action index {chosen} out of range for {n} actions")
    beta = np.broadcast_to(np.asarray(beta, dtype=np.float64), (pp.shape[0],))
    if np.any(beta < 0.0) or np.any(beta > 1.0):
        raise ValueError("reinforcement must lie in [0, 1]")

    step = (theta * beta)[:, None]
    rows = np.arange(pp.shape[0])
    pr = pp[rows, chosen]
    out = pp - step * pp
    out[rows, chosen] = pr + step[:, 0] * (1.0 - pr)

    drift = np.abs(out.sum(axis=1) - 1.0)
    assert np.all(drift <= SUM_TOLERANCE), f"probability mass drifted by {drift.max():.3e}"
    return out if batched else out[0]


def _update_one(p: np.ndarray, r, beta: float, theta: float) -> np.ndarray:
    if isinstance(r, (float, np.floating)):
        raise TypeError("chosen must be an integer index")
    r = int(r)
    if not 0 <= r < len(p):
        raise IndexError(f"action index {r} out of range for {len(p)} actions")
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"reinforcement must lie in [0, 1], got {beta}")
    step = theta * beta
    pr = p[r]
    out = p - step * p
    out[r] = pr + step * (1.0 - pr)
    drift = abs(out.sum() - 1.0)
    assert drift <= SUM_TOLERANCE, f"probability mass drifted by {drift:.3e}"
    return out


def select_action(p, z: float) -> int:
    """Smallest index whose cumulative probability strictly exceeds ``z``."""
    cum = np.cumsum(p)
    idx = int(np.searchsorted(cum, z, side="right"))
    # guards z within rounding of the total mass
    return min(idx, len(cum) - 1)


def best_action(p) -> int:
    """Index of the most probable action; ties go to the lowest index."""
    return int(np.argmax(p))
