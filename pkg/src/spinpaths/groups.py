"""SU(2), SO(4) ~ SU(2) x SU(2) and the proper orthochronous Lorentz group.

SU(2) elements are exposed as 2x2 complex matrices
``U = w I - i (x sx + y sy + z sz)`` built from unit quaternions ``(w, x, y, z)``.
Lorentz transformations are 4x4 real matrices; :class:`LorentzTransform`
additionally carries the SL(2, C) cover element, which the spinor
representation needs to stay single valued.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.linalg import expm

from .minkowski import ETA

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
#: sigma^mu = (I, sx, sy, sz), used for the SL(2, C) -> SO(3, 1) map.
SIGMA4 = np.concatenate([np.eye(2, dtype=complex)[None], PAULI])

I2 = np.eye(2, dtype=complex)


# ---------------------------------------------------------------------------
# SU(2)
# ---------------------------------------------------------------------------

def su2_from_quaternion(q) -> np.ndarray:
    """2x2 matrix (or stack) for unit quaternion(s) ``(w, x, y, z)``."""
    q = np.asarray(q, dtype=float)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    out = np.empty(q.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = w - 1j * z
    out[..., 0, 1] = -y - 1j * x
    out[..., 1, 0] = y - 1j * x
    out[..., 1, 1] = w + 1j * z
    return out


def su2_to_quaternion(U) -> np.ndarray:
    U = np.asarray(U)
    w = 0.5 * (U[..., 0, 0] + U[..., 1, 1]).real
    x = -0.5 * (U[..., 0, 1] + U[..., 1, 0]).imag
    y = 0.5 * (U[..., 1, 0] - U[..., 0, 1]).real
    z = 0.5 * (U[..., 1, 1] - U[..., 0, 0]).imag
    return np.stack([w, x, y, z], axis=-1)


def su2_normalize(U) -> np.ndarray:
    """Project a nearly-SU(2) matrix back onto the group via its quaternion."""
    q = su2_to_quaternion(U)
    q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    return su2_from_quaternion(q)


def su2_multiply(*Us) -> np.ndarray:
    out = Us[0]
    for U in Us[1:]:
        out = out @ U
    return su2_normalize(out)


def su2_inverse(U) -> np.ndarray:
    return np.conj(np.swapaxes(U, -1, -2))


def is_su2(U, atol: float = 1e-12) -> bool:
    U = np.asarray(U)
    if U.shape != (2, 2):
        return False
    return bool(
        np.allclose(U.conj().T @ U, I2, atol=atol)
        and abs(np.linalg.det(U) - 1.0) <= atol
    )


def su2_exp(theta) -> np.ndarray:
    """cos(t/2) I - i sin(t/2) (t_hat . sigma) for an angle vector ``theta``.

    Accepts a single 3-vector or a stack ``(..., 3)``.
    """
    theta = np.asarray(theta, dtype=float)
    angle = np.linalg.norm(theta, axis=-1)
    half = 0.5 * angle
    # sin(t/2)/t is smooth at t = 0
    scale = 0.5 * np.sinc(half / np.pi)
    q = np.concatenate([np.cos(half)[..., None], scale[..., None] * theta], axis=-1)
    return su2_from_quaternion(q)


def su2_log(U) -> np.ndarray:
    """Angle vector with class angle in [0, 2pi] such that ``su2_exp`` inverts it.

    At ``U = -I`` the axis is degenerate and fixed to (1, 0, 0), giving
    ``(2pi, 0, 0)``.
    """
    q = su2_to_quaternion(U)
    w = q[..., 0]
    v = q[..., 1:]
    s = np.linalg.norm(v, axis=-1)
    half = np.arctan2(s, w)
    angle = 2.0 * half
    with np.errstate(invalid="ignore", divide="ignore"):
        axis = np.where(s[..., None] > 0, v / np.where(s > 0, s, 1.0)[..., None], 0.0)
    out = angle[..., None] * axis
    # antipode: s == 0 and w < 0
    antipode = (s == 0) & (w < 0)
    if np.any(antipode):
        out = np.where(antipode[..., None], np.array([2 * np.pi, 0.0, 0.0]), out)
    return out


def su2_class_angle(U):
    """Class angle theta in [0, 2pi] with tr U = 2 cos(theta/2).

    The value is 2pi only at ``U = -I``.
    """
    q = su2_to_quaternion(U)
    return 2.0 * np.arctan2(np.linalg.norm(q[..., 1:], axis=-1), q[..., 0])


# ---------------------------------------------------------------------------
# Haar measure (total measure 1)
# ---------------------------------------------------------------------------

def class_quadrature_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for (1/pi) int_0^{2pi} dtheta sin^2(theta/2) f(theta).

    With x = cos(theta/2) the measure becomes (2/pi) sqrt(1 - x^2) dx, whose
    Gauss rule (Chebyshev, second kind) has equally spaced class angles
    theta_k = 2 pi k / (n + 1) and weights 2 sin^2(theta_k / 2) / (n + 1).
    It is exact for polynomials in x of degree <= 2n + 1, which covers
    products of characters up to total spin n.
    """
    if n < 2:
        raise ValueError("quadrature needs at least 2 nodes")
    k = np.arange(1, n + 1)
    theta = 2.0 * np.pi * k / (n + 1)
    weights = 2.0 * np.sin(0.5 * theta) ** 2 / (n + 1)
    return theta, weights


def haar_class_quadrature(f: Callable, n: int = 64):
    """Integrate a class function of SU(2) over the normalized Haar measure.

    ``f`` receives an array of class angles in (0, 2pi) and must return an
    array of the same shape (it may be complex).
    """
    theta, weights = class_quadrature_rule(n)
    values = np.asarray(f(theta))
    return np.sum(weights * values)


def haar_grid(n_eta: int = 24, n_xi: int = 24) -> tuple[np.ndarray, np.ndarray]:
    """Tensor-product quadrature over all of SU(2).

    Uses Hopf coordinates ``a = cos(eta) e^{i xi1}``, ``b = sin(eta) e^{i xi2}``
    with Gauss-Legendre in eta and the periodic trapezoid rule in xi1, xi2.
    Returns ``(U, weights)`` with ``U`` of shape ``(N, 2, 2)``.
    """
    x, w = np.polynomial.legendre.leggauss(n_eta)
    eta = 0.25 * np.pi * (x + 1.0)
    w_eta = 0.25 * np.pi * w * np.sin(eta) * np.cos(eta)
    xi = 2.0 * np.pi * np.arange(n_xi) / n_xi
    E, X1, X2 = np.meshgrid(eta, xi, xi, indexing="ij")
    W = np.broadcast_to(w_eta[:, None, None], E.shape) * (2 * np.pi / n_xi) ** 2 / (2 * np.pi**2)
    q = np.stack(
        [np.cos(E) * np.cos(X1), np.sin(E) * np.sin(X2), np.sin(E) * np.cos(X2), -np.cos(E) * np.sin(X1)],
        axis=-1,
    ).reshape(-1, 4)
    return su2_from_quaternion(q), W.reshape(-1)


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def haar_samples(n: int, rng=None) -> np.ndarray:
    """``n`` Haar-random SU(2) elements (uniform unit quaternions)."""
    q = _as_rng(rng).standard_normal((n, 4))
    q /= np.linalg.norm(q, axis=-1, keepdims=True)
    return su2_from_quaternion(q)


def haar_sample(rng=None) -> np.ndarray:
    return haar_samples(1, rng)[0]


class SO4Element(NamedTuple):
    """Element of SO(4) through its SU(2) x SU(2) cover."""

    left: np.ndarray
    right: np.ndarray

    def __matmul__(self, other: "SO4Element") -> "SO4Element":
        return SO4Element(su2_multiply(self.left, other.left), su2_multiply(self.right, other.right))

    def inverse(self) -> "SO4Element":
        return SO4Element(su2_inverse(self.left), su2_inverse(self.right))


def so4_sample(rng=None) -> SO4Element:
    rng = _as_rng(rng)
    return SO4Element(haar_sample(rng), haar_sample(rng))


# ---------------------------------------------------------------------------
# Lorentz group
# ---------------------------------------------------------------------------

def check_pseudo_orthogonality(M) -> float:
    """max |M^T eta M - eta|; zero exactly for Lorentz matrices."""
    M = np.asarray(M, dtype=float)
    return float(np.max(np.abs(M.T @ ETA @ M - ETA)))


def is_lorentz(M, atol: float = 1e-10) -> bool:
    """Proper orthochronous Lorentz matrix test."""
    M = np.asarray(M, dtype=float)
    return (
        M.shape == (4, 4)
        and check_pseudo_orthogonality(M) <= atol * max(1.0, M[0, 0] ** 2)
        and M[0, 0] >= 1.0 - atol
        and np.linalg.det(M) > 0
    )


def validate_lorentz(M, atol: float = 1e-10) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if not is_lorentz(M, atol):
        raise ValueError("matrix is not a proper orthochronous Lorentz transformation")
    return M


def lorentz_inverse(M) -> np.ndarray:
    """eta M^T eta."""
    return ETA @ np.asarray(M).T @ ETA


def boost_matrix(velocity: float, axis=(0.0, 0.0, 1.0)) -> np.ndarray:
    """Pure boost taking the rest frame to velocity ``velocity * axis``."""
    if abs(velocity) >= 1.0:
        raise ValueError("boost velocity must satisfy |v| < 1")
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    gamma = 1.0 / np.sqrt(1.0 - velocity * velocity)
    L = np.eye(4)
    L[0, 0] = gamma
    L[0, 1:] = L[1:, 0] = gamma * velocity * axis
    L[1:, 1:] += (gamma - 1.0) * np.outer(axis, axis)
    return L


def rotation_matrix_from_su2(U) -> np.ndarray:
    """4x4 rotation R with R_ij = tr(s_i U s_j U^dagger) / 2; U and -U agree."""
    U = np.asarray(U)
    R = np.eye(4)
    R[1:, 1:] = 0.5 * np.einsum("iab,bc,jcd,da->ij", PAULI, U, PAULI, U.conj().T).real
    return R


def lorentz_from_sl2c(A) -> np.ndarray:
    """Lambda^mu_nu = tr(s_mu A s_nu A^dagger) / 2 for A in SL(2, C)."""
    A = np.asarray(A)
    return 0.5 * np.einsum("mab,bc,ncd,da->mn", SIGMA4, A, SIGMA4, A.conj().T).real


def _sl2c_standard_boost(n) -> np.ndarray:
    """Positive Hermitian sqrt of n0 I + n.sigma for future-pointing unit n."""
    n = np.asarray(n, dtype=float)
    N = n[0] * I2 + np.einsum("i,iab->ab", n[1:], PAULI)
    return (N + I2) / np.sqrt(2.0 * (1.0 + n[0]))


def _su2_from_rotation(R3) -> np.ndarray:
    """SU(2) lift of a 3x3 rotation with non-negative quaternion scalar part."""
    from scipy.spatial.transform import Rotation

    x, y, z, w = Rotation.from_matrix(R3).as_quat(canonical=True)
    return su2_from_quaternion([w, x, y, z])


@dataclass(frozen=True, eq=False)
class LorentzTransform:
    """Proper orthochronous Lorentz transformation carried by its SL(2, C) cover.

    ``matrix`` is the 4x4 vector representative; ``spinor`` is the 2x2
    cover element ``A``.  Products and inverses act on ``spinor`` so that
    spinor representation matrices compose without sign ambiguity.
    """

    spinor: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return lorentz_from_sl2c(self.spinor)

    def __matmul__(self, other: "LorentzTransform") -> "LorentzTransform":
        return LorentzTransform(self.spinor @ other.spinor)

    def inverse(self) -> "LorentzTransform":
        A = self.spinor
        # inverse of a det-1 2x2 matrix
        return LorentzTransform(np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]]))

    def apply(self, x) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float)

    @classmethod
    def identity(cls) -> "LorentzTransform":
        return cls(I2.copy())

    @classmethod
    def rotation(cls, theta) -> "LorentzTransform":
        return cls(su2_exp(theta))

    @classmethod
    def boost(cls, rapidity: float, axis=(0.0, 0.0, 1.0)) -> "LorentzTransform":
        axis = np.asarray(axis, dtype=float)
        axis = axis / np.linalg.norm(axis)
        gen = 0.5 * rapidity * np.einsum("i,iab->ab", axis, PAULI)
        return cls(expm(gen))

    @classmethod
    def standard_boost(cls, n) -> "LorentzTransform":
        """L(n) with n = L(n) e; past-pointing n uses L(-n)."""
        n = np.asarray(n, dtype=float)
        if n[0] < 0:
            n = -n
        return cls(_sl2c_standard_boost(n))

    @classmethod
    def from_matrix(cls, M) -> "LorentzTransform":
        """Lift a 4x4 Lorentz matrix.

        Polar decomposition ``M = L(M e) R``; the boost lifts to the positive
        Hermitian root and the rotation to the SU(2) element with
        non-negative scalar part (the branch continuously connected to the
        identity through rotations of angle below pi).
        """
        M = validate_lorentz(M)
        boost = cls.standard_boost(M[:, 0])
        R = lorentz_inverse(boost.matrix) @ M
        return cls(boost.spinor @ _su2_from_rotation(R[1:, 1:]))

    @classmethod
    def random(cls, rng=None, max_rapidity: float = 1.5) -> "LorentzTransform":
        rng = _as_rng(rng)
        axis = rng.standard_normal(3)
        rapidity = rng.uniform(0.0, max_rapidity)
        return cls.boost(rapidity, axis) @ cls(haar_sample(rng))


def as_lorentz_transform(L) -> LorentzTransform:
    if isinstance(L, LorentzTransform):
        return L
    return LorentzTransform.from_matrix(L)


# ---------------------------------------------------------------------------
# Path tangents and Lagrangians
# ---------------------------------------------------------------------------

def algebra_tangent(path: Callable[[float], np.ndarray], lam: float, h: float = 1e-5) -> np.ndarray:
    """Omega = dM/dlambda M^{-1} by central differences."""
    M = np.asarray(path(lam))
    dM = (np.asarray(path(lam + h)) - np.asarray(path(lam - h))) / (2.0 * h)
    return dM @ np.linalg.inv(M)


def antisymmetry_residual(omega) -> float:
    """max |Omega^{mu nu} + Omega^{nu mu}| after raising the second index with eta."""
    upper = np.asarray(omega) @ ETA
    return float(np.max(np.abs(upper + upper.T)))


def group_lagrangian(omega) -> float:
    """L_M = tr(Omega Omega^T) / 2."""
    omega = np.asarray(omega)
    return 0.5 * float(np.trace(omega @ omega.T))


def position_lagrangian(qdot, m: float) -> float:
    """L_q = qdot^2 / 4 - m^2 with the Minkowski square."""
    qdot = np.asarray(qdot, dtype=float)
    return 0.25 * float(qdot @ ETA @ qdot) - m * m
