"""Minkowski four-vectors with signature (-+++), Wick rotation and on-shell kinematics.

Four-vectors are plain ``numpy`` arrays ordered ``(t, x, y, z)``; natural
units (hbar = c = 1) throughout.
"""
from __future__ import annotations

import numpy as np

#: Minkowski metric, index 0 is time.
ETA = np.diag([-1.0, 1.0, 1.0, 1.0])

#: Rest-frame unit vector e = (1, 0, 0, 0).
E_REST = np.array([1.0, 0.0, 0.0, 0.0])

#: Default absolute comparison tolerance.
ATOL = 1e-10


def four_vector(t, x=0.0, y=0.0, z=0.0) -> np.ndarray:
    return np.array([t, x, y, z], dtype=float)


def minkowski_dot(a, b):
    """Return ``-a0*b0 + a1*b1 + a2*b2 + a3*b3``.

    Works on stacks of vectors along the last axis.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    return -a[..., 0] * b[..., 0] + np.sum(a[..., 1:] * b[..., 1:], axis=-1)


def minkowski_norm2(a):
    return minkowski_dot(a, a)


def lower_index(a) -> np.ndarray:
    """Covariant components a_mu = eta_{mu nu} a^nu."""
    a = np.array(a, dtype=np.result_type(np.asarray(a), float))
    a[..., 0] = -a[..., 0]
    return a


def wick_rotate(x) -> np.ndarray:
    """Euclidean image of ``x`` under t -> i t.

    The returned vector keeps the components ``(t, x, y, z)``; its Euclidean
    squared norm ``t**2 + |x|**2`` equals ``minkowski_dot(x, x) + 2 t**2``.
    """
    return np.array(x, dtype=float, copy=True)


def euclidean_norm2(x_e):
    x_e = np.asarray(x_e)
    return np.sum(x_e * x_e, axis=-1)


def on_shell_energy(p, m: float):
    """E_p = sqrt(|p|^2 + m^2) for a three-momentum (or stack of them)."""
    if m < 0:
        raise ValueError(f"mass must be non-negative, got {m}")
    p = np.asarray(p, dtype=float)
    return np.sqrt(np.sum(p * p, axis=-1) + m * m)


def on_shell_momentum(p, m: float, sign: int = 1) -> np.ndarray:
    """Four-momentum (sign * E_p, p) on the mass shell."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    p = np.asarray(p, dtype=float)
    return np.concatenate([[sign * on_shell_energy(p, m)], p])


def is_timelike(x, atol: float = ATOL) -> bool:
    return bool(minkowski_norm2(x) < -atol)


def unit_timelike(n, atol: float = 1e-12) -> np.ndarray:
    """Validate a unit timelike vector (n.n = -1) and return it as an array."""
    n = np.asarray(n, dtype=float)
    if n.shape != (4,):
        raise ValueError(f"expected a four-vector, got shape {n.shape}")
    if abs(minkowski_norm2(n) + 1.0) > atol * max(1.0, n[0] * n[0]):
        raise ValueError(f"not a unit timelike vector: n.n = {minkowski_norm2(n)!r}")
    return n


def unit_timelike_from_velocity(v) -> np.ndarray:
    """n = gamma (1, v) for a three-velocity |v| < 1."""
    v = np.asarray(v, dtype=float)
    v2 = float(v @ v)
    if v2 >= 1.0:
        raise ValueError("velocity must satisfy |v| < 1")
    gamma = 1.0 / np.sqrt(1.0 - v2)
    return np.concatenate([[gamma], gamma * v])


def unit_timelike_from_spatial(n_vec, future: bool = True) -> np.ndarray:
    """n = (+-sqrt(1 + |n_vec|^2), n_vec)."""
    n_vec = np.asarray(n_vec, dtype=float)
    n0 = np.sqrt(1.0 + n_vec @ n_vec)
    return np.concatenate([[n0 if future else -n0], n_vec])
