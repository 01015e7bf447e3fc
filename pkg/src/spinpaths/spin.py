"""Little-group reduction: standard boosts, Wigner rotations, spin coefficient
matrices u and v, projectors, non-scalar propagators and localized wave functions.

Three Lorentz representations are supported: the scalar, the Dirac spinor
(1/2,0)+(0,1/2) in the chiral basis, and the vector (1/2,1/2).  Spinor matrices
are computed from the SL(2, C) cover carried by
:class:`~spinpaths.groups.LorentzTransform`, so composition is exact.

Index conventions: ``u`` and ``v`` are ``dim x (2j+1)`` with spin columns
ordered ``+j ... -j``.  Lorentz indices are lowered with the invariant form
``g``, so orthonormality reads ``u^dagger g u = 1`` and the projector is the
mixed tensor ``P = u u^dagger g``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
from scipy.special import spherical_jn

from .groups import (
    PAULI,
    LorentzTransform,
    as_lorentz_transform,
    check_pseudo_orthogonality,
    lorentz_inverse,
    su2_exp,
)
from .kernels import SingularInputError, feynman_radial_derivatives, LIGHT_CONE_ATOL
from .minkowski import E_REST, ETA, minkowski_dot, on_shell_energy, unit_timelike
from .representations import SpinLabel, spin_flip_matrix, wigner_d

BETA = np.block([[np.zeros((2, 2)), np.eye(2)], [np.eye(2), np.zeros((2, 2))]]).astype(complex)

# generic rotations used to pin down the rest-frame intertwiner
_PROBE_ROTATIONS = ((0.7, 0.2, -0.4), (-0.3, 0.9, 0.5), (0.25, -0.6, 1.1))

#: Damping parameters for the on-shell radial integrals (Richardson ladder).
ONSHELL_DELTAS = (0.1, 0.05, 0.025, 0.0125)


@dataclass(frozen=True)
class LorentzRepresentation:
    """One of the three supported finite-dimensional Lorentz representations."""

    kind: str

    def __post_init__(self):
        if self.kind not in ("scalar", "dirac_spinor", "vector"):
            raise ValueError(f"unknown representation {self.kind!r}")

    @property
    def dimension(self) -> int:
        return 1 if self.kind == "scalar" else 4

    @property
    def spin(self) -> SpinLabel:
        return SpinLabel({"scalar": 0, "dirac_spinor": 1, "vector": 2}[self.kind])

    @property
    def invariant_form(self) -> np.ndarray:
        if self.kind == "scalar":
            return np.ones((1, 1), dtype=complex)
        if self.kind == "dirac_spinor":
            return BETA.copy()
        return ETA.astype(complex)

    def rep_matrix(self, L) -> np.ndarray:
        """D(Lambda) for a 4x4 matrix or a :class:`LorentzTransform`."""
        L = as_lorentz_transform(L)
        if self.kind == "scalar":
            return np.ones((1, 1), dtype=complex)
        if self.kind == "vector":
            return L.matrix.astype(complex)
        A = L.spinor
        out = np.zeros((4, 4), dtype=complex)
        out[:2, :2] = A
        out[2:, 2:] = np.linalg.inv(A).conj().T
        return out

    @cached_property
    def rest_intertwiner(self) -> np.ndarray:
        return _rest_intertwiner(self.kind)

    @cached_property
    def polynomial(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return _projector_coefficients(self.kind)

    def __str__(self) -> str:
        return self.kind


SCALAR = LorentzRepresentation("scalar")
DIRAC = LorentzRepresentation("dirac_spinor")
VECTOR = LorentzRepresentation("vector")
REPRESENTATIONS = {r.kind: r for r in (SCALAR, DIRAC, VECTOR)}


def get_representation(name) -> LorentzRepresentation:
    if isinstance(name, LorentzRepresentation):
        return name
    aliases = {"dirac": "dirac_spinor", "spinor": "dirac_spinor"}
    try:
        return REPRESENTATIONS[aliases.get(name, name)]
    except KeyError:
        raise ValueError(f"unknown representation {name!r}") from None


@lru_cache(maxsize=None)
def _rest_intertwiner(kind: str) -> np.ndarray:
    """Solve D(W) u = u D^(j)(W) on the g = +1 subspace.

    The solution is unique up to a complex scale, fixed by u^dagger g u = 1
    and by making the first non-zero entry of the sigma = +j column real
    and positive.
    """
    rep = REPRESENTATIONS[kind]
    d, j = rep.dimension, rep.spin
    s = j.dim
    g = rep.invariant_form
    blocks = [np.kron(g - np.eye(d), np.eye(s))]
    for theta in _PROBE_ROTATIONS:
        W = su2_exp(theta)
        DW = rep.rep_matrix(LorentzTransform(W))
        Dj = wigner_d(j, W)
        blocks.append(np.kron(DW, np.eye(s)) - np.kron(np.eye(d), Dj.T))
    M = np.vstack(blocks)
    _, sv, vh = np.linalg.svd(M)
    null = np.sum(sv < 1e-10 * max(1.0, sv[0])) + max(0, M.shape[1] - len(sv))
    if null != 1:
        raise ArithmeticError(f"intertwiner for {kind} is not unique (null space dim {null})")
    u = vh[-1].conj().reshape(d, s)
    u = u / np.sqrt((u.conj().T @ g @ u)[0, 0].real)
    first = u[np.flatnonzero(np.abs(u[:, 0]) > 1e-12)[0], 0]
    u = u * (abs(first) / first)
    # clean rounding noise so the gauge is reproducible bit-for-bit
    u = np.where(np.abs(u.real) < 1e-14, 0, u.real) + 1j * np.where(np.abs(u.imag) < 1e-14, 0, u.imag)
    return u


def _projector_coefficients(kind: str):
    """(A, B, C) with P(q) = A + B_mu q^mu + C_{mu nu} q^mu q^nu (mixed indices).

    At a future-pointing unit q this reproduces u u^dagger g.
    """
    if kind == "scalar":
        return np.ones((1, 1), complex), np.zeros((4, 1, 1), complex), np.zeros((4, 4, 1, 1), complex)
    if kind == "dirac_spinor":
        A = 0.5 * np.eye(4, dtype=complex)
        B = np.zeros((4, 4, 4), dtype=complex)
        sig = np.concatenate([np.eye(2)[None], PAULI])
        sigbar = np.concatenate([np.eye(2)[None], -PAULI])
        B[:, :2, 2:] = 0.5 * sig
        B[:, 2:, :2] = 0.5 * sigbar
        return A, B, np.zeros((4, 4, 4, 4), complex)
    A = np.eye(4, dtype=complex)
    C = np.zeros((4, 4, 4, 4), dtype=complex)
    for mu in range(4):
        for nu in range(4):
            C[mu, nu, mu, :] = ETA[nu]
    return A, np.zeros((4, 4, 4), complex), C


def projector_polynomial(rep, q) -> np.ndarray:
    """Polynomial form P(q) of the projector, valid off shell (q = p/m)."""
    A, B, C = get_representation(rep).polynomial
    q = np.asarray(q, dtype=float)
    return A + np.einsum("m,mab->ab", q, B) + np.einsum("m,n,mnab->ab", q, q, C)


# ---------------------------------------------------------------------------
# Standard boosts and Wigner rotations
# ---------------------------------------------------------------------------

def standard_boost(n) -> np.ndarray:
    """L(n), the pure boost with L(n) e = n; past-pointing n uses L(-n)."""
    n = unit_timelike(n)
    if n[0] < 0:
        n = -n
    L = np.eye(4)
    L[0, 0] = n[0]
    L[0, 1:] = L[1:, 0] = n[1:]
    L[1:, 1:] += np.outer(n[1:], n[1:]) / (1.0 + n[0])
    return L


def wigner_rotation(Lambda, n) -> np.ndarray:
    """W = L(Lambda n)^-1 Lambda L(n), an element of the little group of e."""
    M = as_lorentz_transform(Lambda).matrix if isinstance(Lambda, LorentzTransform) else np.asarray(Lambda)
    n = unit_timelike(n)
    return lorentz_inverse(standard_boost(M @ n)) @ M @ standard_boost(n)


def wigner_rotation_su2(Lambda, n) -> np.ndarray:
    """SU(2) element of the Wigner rotation computed in the SL(2, C) cover."""
    L = as_lorentz_transform(Lambda)
    n = unit_timelike(n)
    Ln = LorentzTransform.standard_boost(n)
    LLn = LorentzTransform.standard_boost(L.apply(n))
    return (LLn.inverse() @ L @ Ln).spinor


# ---------------------------------------------------------------------------
# Spin frames
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpinFrame:
    n: np.ndarray
    rep: LorentzRepresentation
    L_n: LorentzTransform
    u: np.ndarray
    v: np.ndarray
    P: np.ndarray = field(repr=False)

    @property
    def P_from_v(self) -> np.ndarray:
        return self.v @ self.v.conj().T @ self.rep.invariant_form

    @property
    def P_upper(self) -> np.ndarray:
        """Projector with both indices up, u u^dagger."""
        return self.u @ self.u.conj().T


def build_spin_frame(rep, n) -> SpinFrame:
    """u(n) = D(L(n)) u(e); v_s(n) = (-1)^(j+s) u_{-s}(n); P = u u^dagger g.

    For past-pointing n the boost is L(-n), so u(n) = u(-n) and v follows
    from the spin-flip rule.
    """
    rep = get_representation(rep)
    n = unit_timelike(n)
    L = LorentzTransform.standard_boost(n)
    u = rep.rep_matrix(L) @ rep.rest_intertwiner
    v = u @ spin_flip_matrix(rep.spin)
    P = u @ u.conj().T @ rep.invariant_form
    return SpinFrame(n=n, rep=rep, L_n=L, u=u, v=v, P=P)


def covariance_residual_u(rep, Lambda, n) -> float:
    """max |u(Lambda n) D^(j)(W) - D(Lambda) u(n)|."""
    rep = get_representation(rep)
    L = as_lorentz_transform(Lambda)
    n = unit_timelike(n)
    Dj = wigner_d(rep.spin, wigner_rotation_su2(L, n))
    lhs = build_spin_frame(rep, L.apply(n)).u @ Dj
    rhs = rep.rep_matrix(L) @ build_spin_frame(rep, n).u
    return float(np.max(np.abs(lhs - rhs)))


def covariance_residual_v(rep, Lambda, n) -> float:
    """max |v(Lambda n) conj(D^(j)(W)) - D(Lambda) v(n)|."""
    rep = get_representation(rep)
    L = as_lorentz_transform(Lambda)
    n = unit_timelike(n)
    Dj = wigner_d(rep.spin, wigner_rotation_su2(L, n))
    lhs = build_spin_frame(rep, L.apply(n)).v @ Dj.conj()
    rhs = rep.rep_matrix(L) @ build_spin_frame(rep, n).v
    return float(np.max(np.abs(lhs - rhs)))


def frame_residuals(rep, n) -> dict[str, float]:
    """Orthonormality, idempotency and u/v projector agreement at ``n``."""
    fr = build_spin_frame(rep, n)
    g = fr.rep.invariant_form
    s = fr.rep.spin.dim
    return {
        "orthonormal_u": float(np.max(np.abs(fr.u.conj().T @ g @ fr.u - np.eye(s)))),
        "orthonormal_v": float(np.max(np.abs(fr.v.conj().T @ g @ fr.v - np.eye(s)))),
        "idempotent": float(np.max(np.abs(fr.P @ fr.P - fr.P))),
        "projects_u": float(np.max(np.abs(fr.P @ fr.u - fr.u))),
        "u_vs_v": float(np.max(np.abs(fr.P - fr.P_from_v))),
        "trace": float(abs(np.trace(fr.P) - s)),
    }


# ---------------------------------------------------------------------------
# On-shell integrals
# ---------------------------------------------------------------------------

def _j1_over_z(z):
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-3
    zs = np.where(small, 1.0, z)
    return np.where(small, 1.0 / 3.0 - z * z / 30.0, spherical_jn(1, zs) / zs)


def _panel_nodes(p_max: float, width: float, order: int = 16):
    x, w = np.polynomial.legendre.leggauss(order)
    n_panels = int(np.ceil(p_max / width))
    edges = np.linspace(0.0, p_max, n_panels + 1)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
    weights = (0.5 * (b - a) * w).ravel()
    return nodes, weights


def onshell_moments(dx, m: float, sign: int, deltas=ONSHELL_DELTAS):
    """Momentum moments of the on-shell integral

        (2pi)^-3 int d^3p (2E)^-1 exp(i(-sign E t + p.x)) {1, p^mu, p^mu p^nu}

    with p^0 = sign E.  Regularised with exp(-delta |p|) and extrapolated to
    delta -> 0 by Richardson over ``deltas`` (ratio 2).  Returns
    ``(T, T_mu, T_munu)``.
    """
    if m <= 0:
        raise ValueError("on-shell integrals require m > 0")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    dx = np.asarray(dx, dtype=float)
    t, xv = dx[0], dx[1:]
    r = float(np.linalg.norm(xv))
    xhat = xv / r if r > 0 else np.zeros(3)
    dmin = min(deltas)
    omega = abs(t) + r + 1.0
    p, w = _panel_nodes(45.0 / dmin, min(0.5, np.pi / (2 * omega)))
    E = np.sqrt(p * p + m * m)
    z = p * r
    j0 = spherical_jn(0, z)
    j1 = spherical_jn(1, z)
    j2 = spherical_jn(2, z)
    j1z = _j1_over_z(z)
    base = w * p * p / (2 * E) * np.exp(-1j * sign * E * t) / (2 * np.pi**2)

    def radial(delta):
        b = base * np.exp(-delta * p)
        return np.array(
            [
                np.sum(b * j0),
                np.sum(b * E * j0),
                np.sum(b * E * E * j0),
                np.sum(b * p * j1),
                np.sum(b * E * p * j1),
                np.sum(b * p * p * j1z),
                np.sum(b * p * p * j2),
            ]
        )

    vals = [radial(d) for d in sorted(deltas, reverse=True)]
    R = _richardson(vals)
    r0, r0E, r0EE, rpj1, rEpj1, rj1z, rj2 = R
    T = r0
    Tmu = np.zeros(4, dtype=complex)
    Tmu[0] = sign * r0E
    Tmu[1:] = 1j * xhat * rpj1
    Tmunu = np.zeros((4, 4), dtype=complex)
    Tmunu[0, 0] = r0EE
    Tmunu[0, 1:] = Tmunu[1:, 0] = sign * 1j * xhat * rEpj1
    Tmunu[1:, 1:] = np.eye(3) * rj1z - np.outer(xhat, xhat) * rj2
    return T, Tmu, Tmunu


def _richardson(vals):
    """Eliminate the O(delta) ... O(delta^(k-1)) terms of a halving sequence."""
    table = [np.asarray(v) for v in vals]
    k = 1
    while len(table) > 1:
        table = [(2**k * table[i + 1] - table[i]) / (2**k - 1) for i in range(len(table) - 1)]
        k += 1
    return table[0]


def onshell_kernel(dx, m: float, sign: int, deltas=ONSHELL_DELTAS) -> complex:
    """Delta_+ (sign = +1) or Delta_- (sign = -1) for a scalar particle."""
    return complex(onshell_moments(dx, m, sign, deltas)[0])


def _apply_polynomial(rep, m, F, Fmu, Fmunu):
    A, B, C = rep.polynomial
    return A * F + np.einsum("m,mab->ab", Fmu, B) / m + np.einsum("mn,mnab->ab", Fmunu, C) / (m * m)


def onshell_propagator(rep, dx, m: float, sign: int, deltas=ONSHELL_DELTAS) -> np.ndarray:
    """Delta_+- with the projector P((+-E, p)/m) under the on-shell integral."""
    rep = get_representation(rep)
    return _apply_polynomial(rep, m, *onshell_moments(dx, m, sign, deltas))


def nonscalar_propagator(rep, dx, m: float, eps: float = 0.0, method: str = "derivative") -> np.ndarray:
    """-i (2pi)^-4 int d^4p P(p/m) exp(i p.dx) / (p^2 + m^2 - i eps) away from dx = 0.

    ``method="derivative"`` applies P(-i d/dx / m) to the closed-form Feynman
    propagator; ``method="onshell"`` evaluates theta(t) Delta_+ + theta(-t) Delta_-.
    Contact terms supported at dx = 0 never appear.
    """
    rep = get_representation(rep)
    dx = np.asarray(dx, dtype=float)
    sigma = float(minkowski_dot(dx, dx))
    if abs(sigma) < LIGHT_CONE_ATOL:
        raise SingularInputError("separation lies on the light cone")
    if method == "derivative":
        f0, f1, f2 = feynman_radial_derivatives(sigma, m)
        F = f0
        Fmu = -2j * dx * f1
        Fmunu = -(2 * np.linalg.inv(ETA) * f1 + 4 * np.outer(dx, dx) * f2)
        return _apply_polynomial(rep, m, F, Fmu, Fmunu)
    if method == "onshell":
        if dx[0] > 0:
            return onshell_propagator(rep, dx, m, 1)
        if dx[0] < 0:
            return onshell_propagator(rep, dx, m, -1)
        return 0.5 * (onshell_propagator(rep, dx, m, 1) + onshell_propagator(rep, dx, m, -1))
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Localized wave functions
# ---------------------------------------------------------------------------

def _momentum_frame_vector(p, m: float, sign: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return np.concatenate([[sign * on_shell_energy(p, m)], p]) / m


def _plane_phase(p, x, m: float, sign: int) -> complex:
    p = np.asarray(p, dtype=float)
    x = np.asarray(x, dtype=float)
    return np.exp(1j * (sign * on_shell_energy(p, m) * x[0] - p @ x[1:]))


def plane_wave_amplitude(p, x, m: float, sign: int, j) -> np.ndarray:
    """(2pi)^-3/2 delta exp(i(+-E_p t - p.x)), diagonal in spin."""
    if m <= 0:
        raise ValueError("m must be positive")
    j = SpinLabel.of(j)
    return (2 * np.pi) ** -1.5 * _plane_phase(p, x, m, sign) * np.eye(j.dim, dtype=complex)


def spin_coefficients(rep, p, m: float, sign: int) -> np.ndarray:
    """u(n_p) for particles, v(n_p) for antiparticles, n_p = (+-E_p, p)/m."""
    fr = build_spin_frame(rep, _momentum_frame_vector(p, m, sign))
    return fr.u if sign == 1 else fr.v


def newton_wigner_wavefunction(p, x, m: float, sign: int, rep) -> np.ndarray:
    """(2pi)^-3/2 w(n_p)^dagger g exp(i(+-E_p t - p.x)), w = u or v; shape (2j+1, dim)."""
    if m <= 0:
        raise ValueError("m must be positive")
    rep = get_representation(rep)
    w = spin_coefficients(rep, p, m, sign)
    return (2 * np.pi) ** -1.5 * _plane_phase(p, x, m, sign) * (w.conj().T @ rep.invariant_form)


def _translated_derivative(fn, p, t, m, sign, h):
    """e^{+-iEt} i d/dp (e^{-+iEt} fn(p)) by central differences, one matrix per axis."""
    p = np.asarray(p, dtype=float)
    out = []
    for k in range(3):
        dp = np.zeros(3)
        dp[k] = h
        fp = np.exp(-1j * sign * on_shell_energy(p + dp, m) * t) * fn(p + dp)
        fm = np.exp(-1j * sign * on_shell_energy(p - dp, m) * t) * fn(p - dp)
        out.append(np.exp(1j * sign * on_shell_energy(p, m) * t) * 1j * (fp - fm) / (2 * h))
    return np.array(out)


def translated_position_operator(fn, p, t: float, m: float, sign: int, h: float = 1e-4) -> np.ndarray:
    """Apply e^{+-iE t} i d/dp e^{-+iE t} to a momentum wave function ``fn``."""
    return _translated_derivative(fn, p, t, m, sign, h)


def newton_wigner_position_operator(fn, p, t: float, m: float, sign: int, rep, h: float = 1e-4) -> np.ndarray:
    """Position operator sandwiched between spin coefficients.

    The Lorentz index of ``fn(p)`` is contracted with w(n_p), differentiated in
    the spin basis, then mapped back with w(n_p)^dagger g.
    """
    rep = get_representation(rep)
    g = rep.invariant_form

    def reduced(q):
        return fn(q) @ spin_coefficients(rep, q, m, sign)

    inner = _translated_derivative(reduced, p, t, m, sign, h)
    w = spin_coefficients(rep, p, m, sign)
    return inner @ (w.conj().T @ g)
