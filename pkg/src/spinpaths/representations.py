"""Spin-l representations of SU(2), characters and orthogonality checks.

Representation matrices come from the symmetric tensor powers of the
defining representation: the basis ``e_m = xi^(l+m) eta^(l-m) / sqrt((l+m)! (l-m)!)``
is ordered with weight ``m`` running from ``+l`` down to ``-l``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, sqrt

import numpy as np
from scipy.special import eval_chebyu

from .groups import SO4Element, haar_class_quadrature, haar_samples, su2_class_angle


@dataclass(frozen=True, order=True)
class SpinLabel:
    """Spin l = twice_ell / 2."""

    twice_ell: int

    def __post_init__(self):
        if not isinstance(self.twice_ell, (int, np.integer)) or self.twice_ell < 0:
            raise ValueError(f"twice_ell must be a non-negative integer, got {self.twice_ell!r}")

    @property
    def ell(self) -> float:
        return self.twice_ell / 2

    @property
    def dim(self) -> int:
        return self.twice_ell + 1

    @property
    def is_half_integer(self) -> bool:
        return self.twice_ell % 2 == 1

    @property
    def casimir(self) -> float:
        """l (l + 1), the mass shift Delta m^2_l."""
        return self.ell * (self.ell + 1.0)

    @classmethod
    def of(cls, value) -> "SpinLabel":
        """Coerce 0, 0.5, Fraction(3, 2), '1/2' or a SpinLabel."""
        if isinstance(value, SpinLabel):
            return value
        twice = Fraction(value) * 2
        if twice.denominator != 1:
            raise ValueError(f"spin must be a multiple of 1/2, got {value!r}")
        return cls(int(twice))

    def __str__(self) -> str:
        return str(self.twice_ell // 2) if self.twice_ell % 2 == 0 else f"{self.twice_ell}/2"


def spins_up_to(ell_max) -> list[SpinLabel]:
    """0, 1/2, 1, ..., ell_max."""
    return [SpinLabel(k) for k in range(SpinLabel.of(ell_max).twice_ell + 1)]


@dataclass(frozen=True)
class RepLabel:
    """(l_A, l_B) representation of SU(2) x SU(2)."""

    ell_a: SpinLabel
    ell_b: SpinLabel

    def __init__(self, ell_a, ell_b):
        object.__setattr__(self, "ell_a", SpinLabel.of(ell_a))
        object.__setattr__(self, "ell_b", SpinLabel.of(ell_b))

    @property
    def dim(self) -> int:
        return self.ell_a.dim * self.ell_b.dim

    def __str__(self) -> str:
        return f"({self.ell_a},{self.ell_b})"


#: Four-dimensional vector representation.  Some texts write it as (1,1);
#: the dimension count requires (1/2, 1/2).
VECTOR_REP = RepLabel(0.5, 0.5)
SCALAR_REP = RepLabel(0, 0)
DIRAC_REP = (RepLabel(0.5, 0), RepLabel(0, 0.5))


@lru_cache(maxsize=None)
def _d_terms(twice_ell: int) -> tuple:
    """Monomial expansion of the spin-l matrix in the entries of U.

    Each term is ``(row, col, coefficient, (p00, p10, p01, p11))`` meaning
    ``coefficient * U00**p00 * U10**p10 * U01**p01 * U11**p11``.
    """
    n = twice_ell
    terms = []
    for col in range(n + 1):
        a = n - col  # power of xi in e_m, m = l - col
        b = col
        for k in range(a + 1):
            for s in range(b + 1):
                row = n - (k + s)
                # exact integer combinatorics, normalised once at the end
                c = comb(a, k) * comb(b, s)
                norm = sqrt(factorial(k + s) * factorial(n - k - s) / (factorial(a) * factorial(b)))
                terms.append((row, col, c * norm, (k, a - k, s, b - s)))
    return tuple(terms)


def wigner_d(ell, U) -> np.ndarray:
    """Spin-``ell`` representation matrix of ``U`` (or of a stack of them).

    ``wigner_d(1/2, U)`` is ``U`` itself and the map is a homomorphism.
    """
    ell = SpinLabel.of(ell)
    U = np.asarray(U, dtype=complex)
    n = ell.twice_ell
    out = np.zeros(U.shape[:-2] + (n + 1, n + 1), dtype=complex)
    if n == 0:
        out[..., 0, 0] = 1.0
        return out
    u00, u01, u10, u11 = U[..., 0, 0], U[..., 0, 1], U[..., 1, 0], U[..., 1, 1]
    powers = [[x**p for p in range(n + 1)] for x in (u00, u10, u01, u11)]
    for row, col, coef, (p00, p10, p01, p11) in _d_terms(n):
        out[..., row, col] += coef * powers[0][p00] * powers[1][p10] * powers[2][p01] * powers[3][p11]
    return out


def character_from_angle(ell, theta):
    """chi_l(theta) = sin((2l+1) theta/2) / sin(theta/2), evaluated stably."""
    ell = SpinLabel.of(ell)
    return eval_chebyu(ell.twice_ell, np.cos(0.5 * np.asarray(theta, dtype=float)))


def character(ell, U, check: bool = True):
    """Trace of the spin-``ell`` matrix; real for SU(2)."""
    chi = np.trace(wigner_d(ell, U), axis1=-2, axis2=-1)
    if check and np.any(np.abs(chi.imag) > 1e-12 * max(1, SpinLabel.of(ell).dim)):
        raise ArithmeticError("character acquired an imaginary part; input is not in SU(2)")
    return chi.real


def character_product(rep: RepLabel, g: SO4Element):
    """chi^(l_A, l_B)(g) = chi^(l_A)(g.left) chi^(l_B)(g.right)."""
    return character(rep.ell_a, g.left) * character(rep.ell_b, g.right)


def character_orthonormality(ell1, ell2, n: int = 64) -> float:
    """int dB chi_l1(B) chi_l2(B) by class-angle quadrature (delta_{l1 l2})."""
    if n < 64:
        raise ValueError("orthonormality quadrature needs n >= 64")
    return float(
        haar_class_quadrature(lambda t: character_from_angle(ell1, t) * character_from_angle(ell2, t), n)
    )


def class_convolution(f, g, ell_max, n: int = 64):
    """Convolution (f * g)(theta) = int dB0 f(B B0^-1) g(B0) of two class functions.

    Both factors are projected onto characters up to ``ell_max``; by Schur
    orthogonality the convolution acts diagonally with weight 1/(2l+1).
    Returns a function of the class angle.
    """
    coeffs = []
    for lab in spins_up_to(ell_max):
        cf = haar_class_quadrature(lambda t: f(t) * character_from_angle(lab, t), n)
        cg = haar_class_quadrature(lambda t: g(t) * character_from_angle(lab, t), n)
        coeffs.append((lab, cf * cg / lab.dim))

    def conv(theta):
        return sum(c * character_from_angle(lab, theta) for lab, c in coeffs)

    return conv


def matrix_orthogonality_check(ell, n_mc: int = 10**6, rng=0, batch: int = 200_000) -> float:
    """Monte Carlo Schur orthogonality residual.

    Estimates ``int dU D_ij(U) conj(D_kl(U))`` over Haar samples and returns
    the largest deviation from ``delta_ik delta_jl / (2l + 1)``.
    """
    ell = SpinLabel.of(ell)
    d = ell.dim
    if d == 1:
        return 0.0
    rng = np.random.default_rng(rng)
    acc = np.zeros((d, d, d, d), dtype=complex)
    done = 0
    while done < n_mc:
        m = min(batch, n_mc - done)
        D = wigner_d(ell, haar_samples(m, rng))
        acc += np.einsum("nij,nkl->ijkl", D, D.conj())
        done += m
    acc /= n_mc
    expected = np.einsum("ik,jl->ijkl", np.eye(d), np.eye(d)) / d
    return float(np.max(np.abs(acc - expected)))


def conjugation_residual(ell, U) -> float:
    """max |(-1)^(s - s') D_{-s', -s} - conj(D_{s' s})|."""
    ell = SpinLabel.of(ell)
    D = wigner_d(ell, U)
    C = spin_flip_matrix(ell)
    return float(np.max(np.abs(np.linalg.inv(C) @ D @ C - D.conj())))


def spin_flip_matrix(ell) -> np.ndarray:
    """C with C[s', s] = (-1)^(j + s) delta_{s', -s}; ``D conj = C^-1 D C``.

    Rows/columns use the +l ... -l ordering.
    """
    ell = SpinLabel.of(ell)
    n = ell.twice_ell
    C = np.zeros((n + 1, n + 1))
    for col in range(n + 1):
        twice_sigma = n - 2 * col
        row = n - col
        C[row, col] = (-1) ** ((n + twice_sigma) // 2)
    return C


def class_angle(U):
    return su2_class_angle(U)
