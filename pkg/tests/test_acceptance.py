"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` to see the report lines.
"""
import time

import numpy as np
import pytest
from scipy.integrate import quad

from spinpaths.cli import main
from spinpaths.fock import MultiParticleLabel, ParticleSpec, brute_force_inner_product, multiparticle_inner_product
from spinpaths.groups import LorentzTransform, SO4Element, haar_samples
from spinpaths.kernels import (
    feynman_propagator_momentum,
    feynman_propagator_position,
    shifted_mass,
    so4_kernel,
    su2_kernel,
    su2_kernel_angle,
)
from spinpaths.minkowski import ETA, minkowski_dot, unit_timelike_from_velocity
from spinpaths.representations import RepLabel, SpinLabel, character_orthonormality, class_convolution, spins_up_to
from spinpaths.spin import (
    DIRAC,
    SCALAR,
    VECTOR,
    build_spin_frame,
    covariance_residual_u,
    covariance_residual_v,
    frame_residuals,
    newton_wigner_position_operator,
    newton_wigner_wavefunction,
    nonscalar_propagator,
    onshell_kernel,
    plane_wave_amplitude,
    standard_boost,
    translated_position_operator,
)


@pytest.fixture
def report(capsys):
    def emit(number, name, value, tol, elapsed, limit, ok=None):
        ok = (value <= tol if ok is None else ok) and (limit is None or elapsed < limit)
        limit_txt = f"< {limit:g} s" if limit is not None else "none"
        line = (f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {name}: "
                f"value={value:.3e} tol={tol:.0e} runtime={elapsed:.2f} s (limit {limit_txt})")
        with capsys.disabled():
            print("\n" + line)
        return ok
    return emit


def random_n(rng, past=False):
    v = rng.normal(size=3)
    v *= 0.9 * rng.random() / np.linalg.norm(v)
    n = unit_timelike_from_velocity(v)
    return -n if past else n


def test_criterion_01_character_orthonormality(report):
    t0 = time.perf_counter()
    spins = spins_up_to(SpinLabel(4))
    worst = max(abs(character_orthonormality(a, b, 64) - (a == b)) for a in spins for b in spins)
    assert report(1, "character orthonormality, l <= 4, 64 nodes", worst, 1e-10, time.perf_counter() - t0, 1.0)


def test_criterion_02_heat_kernel_semigroup(report):
    t0 = time.perf_counter()
    ell_max, tau = SpinLabel(8), 0.3
    K = lambda t: su2_kernel_angle(t, -1j * tau, ell_max).real
    conv = class_convolution(K, K, ell_max, 64)
    theta = np.linspace(0.0, 2 * np.pi, 33)
    semigroup = np.max(np.abs(conv(theta) - su2_kernel_angle(theta, -2j * tau, ell_max).real))
    masses = (abs(shifted_mass(1.0, RepLabel(0.5, 0.5)) - np.sqrt(2.5)),
              abs(shifted_mass(2.0, RepLabel(0.5, 0)) - np.sqrt(5.5)))
    worst = max(semigroup, *masses)
    assert report(2, "semigroup at tau = 0.3 + shifted masses", worst, 1e-8, time.perf_counter() - t0, 5.0)


def test_criterion_03_so4_factorization(report):
    t0 = time.perf_counter()
    lam = -0.5j
    worst = 0.0
    for A, B in haar_samples(200, 3).reshape(100, 2, 2, 2):
        prod = su2_kernel(A, lam) * su2_kernel(B, lam)
        worst = max(worst, abs(so4_kernel(SO4Element(A, B), lam) - prod))
    assert report(3, "so4 = su2 x su2 on 100 points", worst, 1e-12, time.perf_counter() - t0, 5.0)


def test_criterion_04_lambda_integral(report):
    t0 = time.perf_counter()
    eps = 0.01
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(20):
        p = np.array([rng.uniform(0, 2), *rng.uniform(-1.5, 1.5, 3)])
        a = minkowski_dot(p, p) + 1.0
        # QAWO weights handle the oscillation; exp(-eps * cutoff) ~ e^-1000
        re = quad(lambda l: np.exp(-eps * l), 0, 1e3 / eps, weight="cos", wvar=a, limit=2000)[0]
        im = -quad(lambda l: np.exp(-eps * l), 0, 1e3 / eps, weight="sin", wvar=a, limit=2000)[0]
        worst = max(worst, abs(re + 1j * im - feynman_propagator_momentum(p, 1.0, eps)))
    assert report(4, "lambda integral vs -i/(p^2+m^2-i eps), 20 momenta", worst, 1e-6, time.perf_counter() - t0, 1.0)


def test_criterion_05_spin_frames(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst = 0.0
    for k in range(100):
        L = LorentzTransform.random(rng)
        n = random_n(rng, past=bool(k % 2))
        for rep in (SCALAR, DIRAC, VECTOR):
            res = frame_residuals(rep, n)
            worst = max(worst, *res.values(), covariance_residual_u(rep, L, n), covariance_residual_v(rep, L, n))
    assert report(5, "spin-frame identities, 100 (L, n) x 3 reps", worst, 1e-10, time.perf_counter() - t0, 10.0)


def test_criterion_06_spin_one_projector(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    eps_rest = np.array([[0, 1, 1j, 0], [0, 0, 0, np.sqrt(2)], [0, 1, -1j, 0]], dtype=complex) / np.sqrt(2)
    worst = 0.0
    for _ in range(100):
        n = random_n(rng)
        target = ETA + np.outer(n, n)
        eps = standard_boost(n) @ eps_rest.T
        worst = max(worst, np.max(np.abs(eps @ eps.conj().T - target)),
                    np.max(np.abs(build_spin_frame(VECTOR, n).P_upper - target)))
    assert report(6, "P(n) = eta + n n, 100 n", worst, 1e-10, time.perf_counter() - t0, 1.0)


TIMELIKE_GRID = [
    [1.5, 0.3, -0.2, 0.1], [2.0, 0.0, 0.0, 0.0], [2.5, 1.0, 0.5, 0.0], [3.0, -1.2, 0.4, 0.8],
    [1.3, 0.0, 0.2, -0.1], [-1.7, 0.2, 0.0, 0.6], [-2.2, 0.5, 0.5, 0.5], [-3.0, 0.0, -1.5, 0.0],
    [-1.4, 0.3, 0.1, 0.0], [-2.8, 1.0, -0.8, 0.2],
]


def test_criterion_07_propagator_decomposition(report):
    t0 = time.perf_counter()
    worst = 0.0
    for dx in map(np.array, TIMELIKE_GRID):
        sign = 1 if dx[0] > 0 else -1
        worst = max(worst, abs(feynman_propagator_position(dx, 1.0) - onshell_kernel(dx, 1.0, sign)))
        direct = nonscalar_propagator(DIRAC, dx, 1.0)
        split = nonscalar_propagator(DIRAC, dx, 1.0, method="onshell")
        worst = max(worst, np.max(np.abs(direct - split)))
    assert report(7, "Feynman = theta(t) D+ + theta(-t) D-, scalar + Dirac", worst, 1e-3, time.perf_counter() - t0, 60.0)


def test_criterion_08_position_operator(report):
    t0 = time.perf_counter()
    x = np.array([0.7, 0.4, -1.1, 0.25])
    p = np.array([0.3, -0.2, 0.5])
    worst = 0.0
    for sign in (1, -1):
        fn = lambda q: plane_wave_amplitude(q, x, 1.3, sign, 0.5)
        res = translated_position_operator(fn, p, x[0], 1.3, sign)
        worst = max(worst, np.max(np.abs(res - x[1:, None, None] * fn(p)[None])))
        for rep in (DIRAC, VECTOR):
            fn = lambda q: newton_wigner_wavefunction(q, x, 1.1, sign, rep)
            res = newton_wigner_position_operator(fn, p, x[0], 1.1, sign, rep)
            worst = max(worst, np.max(np.abs(res - x[1:, None, None] * fn(p)[None])))
    assert report(8, "position operator eigenvalue, plane wave + Newton-Wigner", worst, 1e-5, time.perf_counter() - t0, 5.0)


def test_criterion_09_fock_oracle(report):
    t0 = time.perf_counter()
    fermion = ParticleSpec(1, "dirac_spinor", 1.0, "fermion")
    scalar = ParticleSpec(2, "scalar", 1.2, "boson")
    vector = ParticleSpec(3, "vector", 0.8, "boson")
    mixes = [[fermion], [scalar], [fermion, fermion], [fermion, scalar], [scalar, vector, scalar],
             [fermion, scalar, fermion], [fermion, scalar, fermion, vector], [fermion, fermion, fermion, scalar]]
    rng = np.random.default_rng(9)

    def label(specs):
        return MultiParticleLabel([(np.array([rng.uniform(-0.3, 0.3), *rng.uniform(-1, 1, 3)]), s,
                                    int(rng.integers(s.rep.dimension))) for s in specs])

    mismatches = 0
    for specs in mixes:
        for _ in range(3):
            order = rng.permutation(len(specs))
            bra, ket = label([specs[i] for i in order]), label(specs)
            if multiparticle_inner_product(bra, ket).value != brute_force_inner_product(bra, ket):
                mismatches += 1
    bra, ket = label([fermion, fermion]), label([fermion, fermion])
    a = multiparticle_inner_product(bra, ket).value
    if not (a != 0 and multiparticle_inner_product(bra.swapped(0, 1), ket).value == -a):
        mismatches += 1
    assert report(9, "inner product vs brute force, N <= 4 + fermion sign", float(mismatches), 0.0,
                  time.perf_counter() - t0, 10.0)


@pytest.mark.parametrize("suite", ["characters", "kernel", "spin-check", "propagator", "fock"])
def test_criterion_10_cli_determinism(report, tmp_path, suite):
    t0 = time.perf_counter()
    outputs = []
    for name in ("first", "second"):
        out = tmp_path / name
        code = main([suite, "--seed", "11", "--out", str(out)])
        outputs.append((code, out.read_bytes()))
    identical = outputs[0] == outputs[1] and len(outputs[0][1]) > 0
    assert report(10, f"byte-identical rerun of '{suite}'", 0.0 if identical else 1.0, 0.0,
                  time.perf_counter() - t0, None, ok=identical)
