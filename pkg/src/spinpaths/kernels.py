"""Path-integral kernels and propagators.

* the relativistic scalar kernel at fixed path length and its momentum-space form,
* the Feynman propagator in momentum and position space,
* SU(2) and SO(4) kernels as character sums (heat kernels after lambda = -i tau),
* the representation mass shift and the SO(4) group propagator.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import hankel2, kv

from .groups import SO4Element, su2_class_angle
from .minkowski import minkowski_dot
from .representations import RepLabel, SpinLabel, character_from_angle, spins_up_to

#: Relative phase of the Euclidean scalar kernel with respect to the
#: Minkowski one (the Euclidean form carries a leading factor of i).
EUCLIDEAN_KERNEL_PHASE = 1j

#: Separations with |x.x| below this are treated as lying on the light cone.
LIGHT_CONE_ATOL = 1e-6

#: Default character-sum truncation.
DEFAULT_ELL_MAX = SpinLabel(16)


class SingularInputError(ValueError):
    """Raised for separations on (or too near) the light cone."""


@dataclass(frozen=True)
class KernelParams:
    mass: float = 1.0
    lam: float = 1.0
    epsilon: float = 1e-2
    ell_max: SpinLabel = DEFAULT_ELL_MAX

    def __post_init__(self):
        if self.mass < 0:
            raise ValueError("mass must be non-negative")
        if self.lam <= 0:
            raise ValueError("path-length interval lambda must be positive")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        object.__setattr__(self, "ell_max", SpinLabel.of(self.ell_max))


# ---------------------------------------------------------------------------
# Scalar kernel and Feynman propagator
# ---------------------------------------------------------------------------

def scalar_kernel_momentum(p, lam, m: float):
    """Momentum-space kernel exp(-i lam (p^2 + m^2))."""
    return np.exp(-1j * lam * (minkowski_dot(p, p) + m * m))


def scalar_kernel(dx, params: KernelParams) -> complex:
    """kappa(dx; lam) = (2pi)^-4 int d^4p exp(i p.dx) exp(-i lam (p^2 + m^2)).

    The Gaussian momentum integral factorises into one time and three space
    Fresnel integrals, giving ``-i (4 pi lam)^-2 exp(i dx^2 / (4 lam) - i lam m^2)``.
    """
    lam = params.lam
    if lam <= 0:
        raise ValueError("lambda must be positive")
    s = float(minkowski_dot(dx, dx))
    return -1j / (4 * np.pi * lam) ** 2 * np.exp(1j * s / (4 * lam) - 1j * lam * params.mass**2)


def euclidean_scalar_kernel(dx_e, lam: float, m: float, extra_mass2: float = 0.0) -> complex:
    """Wick-rotated kernel i (2pi)^-4 int d^4p_E exp(i p.x) exp(-i lam (p^2 + m^2 + extra)).

    ``extra_mass2`` carries Delta m_A^2 + Delta m_B^2 for a given (l_A, l_B).
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    x2 = float(np.sum(np.asarray(dx_e, dtype=float) ** 2))
    # each Euclidean direction contributes (4 pi i lam)^(-1/2) exp(i x^2 / (4 lam))
    pref = (4j * np.pi * lam) ** -2
    return EUCLIDEAN_KERNEL_PHASE * pref * np.exp(1j * x2 / (4 * lam) - 1j * lam * (m * m + extra_mass2))


def feynman_propagator_momentum(p, m: float, eps: float) -> complex:
    """-i / (p^2 + m^2 - i eps)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return -1j / (minkowski_dot(p, p) + m * m - 1j * eps)


def _radial_bessel(sigma: float, m: float, order: int) -> complex:
    """F_nu(sigma) = K_nu(z) / z^nu with z = m sqrt(sigma), continued to sigma < 0.

    Timelike separations sit on z = i s (s = m sqrt(-sigma)) where
    ``K_nu(i s) = (pi/2) (-i)^(nu+1) H2_nu(s)``, the branch selected by the
    -i eps prescription.
    """
    if sigma > 0:
        z = m * np.sqrt(sigma)
        return kv(order, z) / z**order
    s = m * np.sqrt(-sigma)
    return 0.5 * np.pi * (-1j) ** (2 * order + 1) * hankel2(order, s) / s**order


def feynman_radial_derivatives(sigma: float, m: float) -> tuple[complex, complex, complex]:
    """Delta_F as f(sigma) with sigma = x.x, and its first two sigma-derivatives.

    f = m^2 F_1 / (4 pi^2), using dF_nu/dsigma = -(m^2/2) F_{nu+1}.
    """
    if abs(sigma) < LIGHT_CONE_ATOL:
        raise SingularInputError(f"separation lies on the light cone (x.x = {sigma:g})")
    if m <= 0:
        raise ValueError("position-space propagator requires m > 0")
    c = m * m / (4 * np.pi**2)
    f0 = c * _radial_bessel(sigma, m, 1)
    f1 = -0.5 * m * m * c * _radial_bessel(sigma, m, 2)
    f2 = 0.25 * m**4 * c * _radial_bessel(sigma, m, 3)
    return complex(f0), complex(f1), complex(f2)


def feynman_propagator_position(dx, m: float, eps: float = 0.0) -> complex:
    """Delta_F(dx) = -i (2pi)^-4 int d^4p exp(i p.dx) / (p^2 + m^2 - i eps), eps -> 0+.

    Spacelike: m K_1(m sqrt(s)) / (4 pi^2 sqrt(s)); timelike:
    i m H2_1(m sqrt(-s)) / (8 pi sqrt(-s)), with s = dx.dx.  ``eps`` only
    selects the branch and is otherwise taken to zero.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    sigma = float(minkowski_dot(dx, dx))
    return feynman_radial_derivatives(sigma, m)[0]


def feynman_propagator_schwinger(dx, m: float) -> complex:
    """Delta_F as the path-length integral int_0^inf dlam kappa(dx; lam).

    Independent route through the kernel: the lambda integral is split at
    lam = 1 and each half is rotated onto a contour where it decays
    exponentially, so plain adaptive quadrature converges.
    """
    from scipy.integrate import quad

    sigma = float(minkowski_dot(dx, dx))
    if abs(sigma) < LIGHT_CONE_ATOL:
        raise SingularInputError("separation lies on the light cone")
    m2 = m * m
    pref = -1j / (16 * np.pi**2)

    def cquad(fn, a, b):
        re = quad(lambda s: fn(s).real, a, b, limit=400, epsabs=1e-13, epsrel=1e-11)[0]
        im = quad(lambda s: fn(s).imag, a, b, limit=400, epsabs=1e-13, epsrel=1e-11)[0]
        return re + 1j * im

    # lam in (0, 1]: u = 1/lam in [1, inf), integrand exp(i sigma u/4 - i m2/u) du
    # rotate u = 1 + i*sgn(sigma) s so that exp(i sigma u / 4) decays
    direction = 1j if sigma > 0 else -1j

    def near(s):
        u = 1.0 + direction * s
        return np.exp(1j * sigma * u / 4 - 1j * m2 / u) * direction

    # lam in [1, inf): lam = 1 - i s so that exp(-i m2 lam) decays
    def far(s):
        lam = 1.0 - 1j * s
        return np.exp(1j * sigma / (4 * lam) - 1j * m2 * lam) / lam**2 * (-1j)

    return pref * (cquad(near, 0.0, np.inf) + cquad(far, 0.0, np.inf))


# ---------------------------------------------------------------------------
# Group kernels
# ---------------------------------------------------------------------------

def mass_shift(ell) -> float:
    """Delta m_l^2 = l (l + 1)."""
    return SpinLabel.of(ell).casimir


def su2_kernel_angle(theta, lam, ell_max=DEFAULT_ELL_MAX):
    """SU(2) kernel as a function of the class angle of dB.

    sum_{l <= ell_max} exp(-i l(l+1) lam) (2l+1) chi_l(theta).  ``lam`` may be
    complex; lam = -i tau gives the heat kernel on the group.
    """
    theta = np.asarray(theta, dtype=float)
    out = np.zeros(theta.shape, dtype=complex)
    for lab in spins_up_to(ell_max):
        out = out + np.exp(-1j * lab.casimir * lam) * lab.dim * character_from_angle(lab, theta)
    return out


def su2_kernel(dB, lam, ell_max=DEFAULT_ELL_MAX):
    return su2_kernel_angle(su2_class_angle(dB), lam, ell_max)


def su2_heat_kernel(dB, tau: float, ell_max=DEFAULT_ELL_MAX):
    """Euclidean SU(2) kernel, su2_kernel at lam = -i tau (real)."""
    return su2_kernel(dB, -1j * tau, ell_max).real


def so4_kernel(dg: SO4Element, lam, ell_max=DEFAULT_ELL_MAX):
    """Double character sum over (l_A, l_B); factorises into two SU(2) kernels."""
    labels = spins_up_to(ell_max)
    ta = su2_class_angle(dg.left)
    tb = su2_class_angle(dg.right)
    chi_a = [character_from_angle(a, ta) for a in labels]
    chi_b = [character_from_angle(b, tb) for b in labels]
    total = 0.0 + 0.0j
    for a, ca in zip(labels, chi_a):
        for b, cb in zip(labels, chi_b):
            total = total + np.exp(-1j * (a.casimir + b.casimir) * lam) * a.dim * b.dim * ca * cb
    return total


def continued_lambda(lam: float, regulator: float = 1e-6) -> complex:
    """Real lam continued below the axis: lam (1 - i regulator)."""
    return lam * (1.0 - 1j * regulator)


def su2_truncation_tail_bound(tau: float, ell_max, tol: float = 1e-300) -> float:
    """Bound on the SU(2) heat-kernel truncation error: sum_{l > ell_max} (2l+1)^2 e^{-l(l+1) tau}."""
    if tau <= 0:
        raise ValueError("tail bound requires tau > 0")
    k = SpinLabel.of(ell_max).twice_ell + 1
    total = 0.0
    while True:
        lab = SpinLabel(k)
        term = lab.dim**2 * np.exp(-lab.casimir * tau)
        total += term
        if term < tol or (k > 8 and term < 1e-18 * total):
            return total
        k += 1


def shifted_mass(m: float, rep: RepLabel) -> float:
    """Representation-shifted mass.

    m'^2 = m^2 + 2 Delta m_l^2 for (l, l), and m^2 + 2 Delta m_A^2 + 2 Delta m_B^2
    otherwise (shared by both summands of (l_A, l_B) + (l_B, l_A)).
    """
    if m < 0:
        raise ValueError("mass must be non-negative")
    if rep.ell_a == rep.ell_b:
        m2 = m * m + 2 * rep.ell_a.casimir
    else:
        m2 = m * m + 2 * rep.ell_a.casimir + 2 * rep.ell_b.casimir
    return float(np.sqrt(m2))


def group_propagator_matrix(rep: RepLabel | Sequence[RepLabel]) -> np.ndarray:
    """SO(4) group propagator: the identity on the representation space.

    ``rep`` may be a single label or the summands of a direct sum.
    """
    reps = [rep] if isinstance(rep, RepLabel) else list(rep)
    return np.eye(sum(r.dim for r in reps), dtype=complex)
