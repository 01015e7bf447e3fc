"""Multiparticle position states, their permutation-sum inner product,
external-leg factors and the first-order vertex amplitude.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import NamedTuple, Sequence

import numpy as np

from .minkowski import on_shell_energy
from .spin import (
    LorentzRepresentation,
    get_representation,
    nonscalar_propagator,
    spin_coefficients,
)

MAX_PARTICLES = 6


@dataclass(frozen=True)
class ParticleSpec:
    type_index: int
    rep: LorentzRepresentation
    mass: float
    statistics: str

    def __post_init__(self):
        object.__setattr__(self, "rep", get_representation(self.rep))
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if self.statistics not in ("boson", "fermion"):
            raise ValueError("statistics must be 'boson' or 'fermion'")
        half = self.rep.spin.is_half_integer
        if half != (self.statistics == "fermion"):
            raise ValueError(f"{self.statistics} statistics incompatible with spin {self.rep.spin}")

    @property
    def is_fermion(self) -> bool:
        return self.statistics == "fermion"


class Leg(NamedTuple):
    """One particle in a position-state label: position, species and Lorentz index."""

    x: np.ndarray
    spec: ParticleSpec
    index: int


class MultiParticleLabel:
    """Ordered list of legs (x_i, n_i, l_i)."""

    def __init__(self, legs: Sequence, max_particles: int = MAX_PARTICLES):
        legs = tuple(Leg(np.asarray(x, dtype=float), spec, int(l)) for x, spec, l in legs)
        if not legs:
            raise ValueError("a multiparticle label needs at least one leg")
        if len(legs) > max_particles:
            raise ValueError(f"at most {max_particles} particles supported, got {len(legs)}")
        for leg in legs:
            if leg.x.shape != (4,):
                raise ValueError("leg positions must be four-vectors")
            if not 0 <= leg.index < leg.spec.rep.dimension:
                raise ValueError(f"index {leg.index} out of range for {leg.spec.rep}")
        self.legs = legs

    def __len__(self):
        return len(self.legs)

    def __iter__(self):
        return iter(self.legs)

    def swapped(self, i: int, j: int) -> "MultiParticleLabel":
        legs = list(self.legs)
        legs[i], legs[j] = legs[j], legs[i]
        return MultiParticleLabel(legs)

    def type_signature(self) -> tuple:
        return tuple(sorted(leg.spec.type_index for leg in self.legs))


class InnerProduct(NamedTuple):
    value: complex
    type_mismatch: bool


def _fermion_parity(perm: Sequence[int], ket: MultiParticleLabel) -> int:
    """Sign of the permutation restricted to fermion legs (counted by inversions)."""
    images = [perm[i] for i, leg in enumerate(ket.legs) if leg.spec.is_fermion]
    inversions = sum(1 for a in range(len(images)) for b in range(a + 1, len(images)) if images[a] > images[b])
    return -1 if inversions % 2 else 1


def _leg_propagator(bra_leg: Leg, ket_leg: Leg) -> complex:
    spec = ket_leg.spec
    D = nonscalar_propagator(spec.rep, bra_leg.x - ket_leg.x, spec.mass)
    return D[bra_leg.index, ket_leg.index]


def _compatible_permutations(bra: MultiParticleLabel, ket: MultiParticleLabel):
    """Permutations P (ket leg i -> bra leg P[i]) preserving particle type, in lexicographic order."""
    n = len(ket)
    perm = [0] * n
    used = [False] * n

    def rec(i):
        if i == n:
            yield tuple(perm)
            return
        t = ket.legs[i].spec
        for j in range(n):
            if not used[j] and bra.legs[j].spec == t:
                used[j] = True
                perm[i] = j
                yield from rec(i + 1)
                used[j] = False

    yield from rec(0)


def multiparticle_inner_product(bra: MultiParticleLabel, ket: MultiParticleLabel) -> InnerProduct:
    """sum_P delta_P prod_i Delta^{l'_{P i}}_{l_i}(x'_{P i} - x_i).

    Only type-preserving permutations contribute; delta_P is the parity of
    the permutation among fermion legs.  Mismatched particle content gives
    zero with ``type_mismatch`` set.
    """
    if len(bra) != len(ket) or bra.type_signature() != ket.type_signature():
        return InnerProduct(0j, True)
    if any(b.spec != k.spec for b, k in zip(sorted(bra, key=_spec_key), sorted(ket, key=_spec_key))):
        return InnerProduct(0j, True)
    n = len(ket)
    cache: dict[tuple[int, int], complex] = {}
    total = 0j
    for perm in _compatible_permutations(bra, ket):
        term = complex(_fermion_parity(perm, ket))
        for i in range(n):
            key = (perm[i], i)
            if key not in cache:
                cache[key] = _leg_propagator(bra.legs[perm[i]], ket.legs[i])
            term = term * cache[key]
        total = total + term
    return InnerProduct(total, False)


def _spec_key(leg: Leg):
    return (leg.spec.type_index, leg.spec.rep.kind, leg.spec.mass, leg.spec.statistics)


def brute_force_inner_product(bra: MultiParticleLabel, ket: MultiParticleLabel) -> complex:
    """Naive oracle: every one of the N! permutations, zero for type mismatches."""
    if len(bra) != len(ket):
        return 0j
    n = len(ket)
    total = 0j
    for perm in permutations(range(n)):
        if any(bra.legs[perm[i]].spec != ket.legs[i].spec for i in range(n)):
            continue
        sign = 1
        fermions = [perm[i] for i in range(n) if ket.legs[i].spec.is_fermion]
        for a in range(len(fermions)):
            for b in range(a + 1, len(fermions)):
                if fermions[a] > fermions[b]:
                    sign = -sign
        term = complex(sign)
        for i in range(n):
            term = term * _leg_propagator(bra.legs[perm[i]], ket.legs[i])
        total = total + term
    return total


# ---------------------------------------------------------------------------
# External legs and the first-order vertex
# ---------------------------------------------------------------------------

def external_leg_factor(p, vertex_x, spec: ParticleSpec, direction: str, species: str = "particle", t_ref: float | None = None) -> np.ndarray:
    """Factor contributed by an external line at a vertex.

    outgoing: (2pi)^-3/2 exp(i(+-E x^0 - p.x)) w^dagger g, shape (2j+1, dim)
    incoming: (2pi)^-3/2 exp(i(-+E x^0 + p.x)) w,          shape (dim, 2j+1)

    with w = u for particles (upper signs) and v for antiparticles.  For an
    incoming line ``t_ref`` is the time of the asymptotic state; it must lie
    before the vertex and does not otherwise enter.
    """
    if direction not in ("incoming", "outgoing"):
        raise ValueError("direction must be 'incoming' or 'outgoing'")
    if species not in ("particle", "antiparticle"):
        raise ValueError("species must be 'particle' or 'antiparticle'")
    p = np.asarray(p, dtype=float)
    x = np.asarray(vertex_x, dtype=float)
    sign = 1 if species == "particle" else -1
    if t_ref is not None and direction == "incoming" and not sign * (x[0] - t_ref) > 0:
        raise ValueError("reference time must precede the vertex in the sense of the species")
    E = on_shell_energy(p, spec.mass)
    w = spin_coefficients(spec.rep, p, spec.mass, sign)
    norm = (2 * np.pi) ** -1.5
    if direction == "outgoing":
        return norm * np.exp(1j * (sign * E * x[0] - p @ x[1:])) * (w.conj().T @ spec.rep.invariant_form)
    return norm * np.exp(1j * (-sign * E * x[0] + p @ x[1:])) * w


class ExternalLeg(NamedTuple):
    p: np.ndarray
    spec: ParticleSpec
    species: str = "particle"


@dataclass(frozen=True, eq=False)
class VertexSpec:
    """Coupling tensor with axes (incoming_1 .. incoming_a, outgoing_1 .. outgoing_b)."""

    coupling: np.ndarray
    a: int
    b: int

    def __post_init__(self):
        g = np.asarray(self.coupling, dtype=complex)
        object.__setattr__(self, "coupling", g)
        if not (0 <= self.a <= 3 and 0 <= self.b <= 3) or self.a + self.b == 0:
            raise ValueError("a vertex takes at most 3 incoming and 3 outgoing legs")
        if g.ndim != self.a + self.b:
            raise ValueError("coupling rank must equal a + b")

    def check_legs(self, in_legs, out_legs):
        if len(in_legs) != self.a or len(out_legs) != self.b:
            raise ValueError("leg counts do not match the vertex")
        dims = tuple(l.spec.rep.dimension for l in (*in_legs, *out_legs))
        if self.coupling.shape != dims:
            raise ValueError(f"coupling shape {self.coupling.shape} does not match leg dimensions {dims}")


def _box_factor(k: float, half_width: float) -> float:
    """int_{-L}^{L} exp(i k s) ds = 2 sin(k L) / k."""
    return 2 * half_width * np.sinc(k * half_width / np.pi)


def vertex_phase_mismatch(in_legs, out_legs) -> tuple[float, np.ndarray]:
    """(Omega, K): the vertex integrand is exp(i (Omega x^0 - K.x))."""
    omega, K = 0.0, np.zeros(3)
    for leg in out_legs:
        s = 1 if leg.species == "particle" else -1
        omega += s * on_shell_energy(leg.p, leg.spec.mass)
        K += np.asarray(leg.p, dtype=float)
    for leg in in_legs:
        s = 1 if leg.species == "particle" else -1
        omega -= s * on_shell_energy(leg.p, leg.spec.mass)
        K -= np.asarray(leg.p, dtype=float)
    return omega, K


def box_integral(omega: float, K, T: float, L: float) -> float:
    """Analytic int over [-T, T] x [-L, L]^3 of exp(i (omega t - K.x))."""
    out = _box_factor(omega, T)
    for k in np.asarray(K, dtype=float):
        out *= _box_factor(k, L)
    return float(out)


def box_integral_quadrature(omega: float, K, T: float, L: float, nodes: int = 400) -> complex:
    """Gauss-Legendre evaluation of the same box integral, axis by axis."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    out = T * np.sum(w * np.exp(1j * omega * T * x))
    for k in np.asarray(K, dtype=float):
        out *= L * np.sum(w * np.exp(-1j * k * L * x))
    return complex(out)


def vertex_amplitude_first_order(in_legs, out_legs, vertex: VertexSpec, T: float | None = None, L: float | None = None) -> np.ndarray:
    """-i g . (leg factors at x = 0) . box integral of the plane-wave phases.

    Returns a tensor over spin indices (sigma_in..., sigma_out...).  The box
    defaults to T = L = 20 / m_min.
    """
    in_legs = [ExternalLeg(np.asarray(l.p, float), l.spec, l.species) for l in in_legs]
    out_legs = [ExternalLeg(np.asarray(l.p, float), l.spec, l.species) for l in out_legs]
    vertex.check_legs(in_legs, out_legs)
    if len(in_legs) + len(out_legs) > MAX_PARTICLES:
        raise ValueError("at most 6 external legs")
    m_min = min(l.spec.mass for l in (*in_legs, *out_legs))
    T = 20.0 / m_min if T is None else T
    L = 20.0 / m_min if L is None else L
    origin = np.zeros(4)
    amp = vertex.coupling
    # contract incoming legs (dim, 2j+1) on the leading axes
    for leg in in_legs:
        f = external_leg_factor(leg.p, origin, leg.spec, "incoming", leg.species)
        amp = np.tensordot(amp, f, axes=([0], [0]))
    for leg in out_legs:
        f = external_leg_factor(leg.p, origin, leg.spec, "outgoing", leg.species)
        amp = np.tensordot(amp, f, axes=([0], [1]))
    omega, K = vertex_phase_mismatch(in_legs, out_legs)
    return -1j * amp * box_integral(omega, K, T, L)
