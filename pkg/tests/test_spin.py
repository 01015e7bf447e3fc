import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinpaths.groups import (
    PAULI,
    LorentzTransform,
    boost_matrix,
    check_pseudo_orthogonality,
    rotation_matrix_from_su2,
    su2_exp,
)
from spinpaths.kernels import SingularInputError, feynman_propagator_position
from spinpaths.minkowski import E_REST, ETA, minkowski_dot, unit_timelike_from_velocity
from spinpaths.spin import (
    BETA,
    DIRAC,
    SCALAR,
    VECTOR,
    build_spin_frame,
    covariance_residual_u,
    covariance_residual_v,
    frame_residuals,
    get_representation,
    newton_wigner_position_operator,
    newton_wigner_wavefunction,
    nonscalar_propagator,
    onshell_kernel,
    onshell_propagator,
    plane_wave_amplitude,
    projector_polynomial,
    standard_boost,
    translated_position_operator,
    wigner_rotation,
    wigner_rotation_su2,
)

from strategies import seeds, sub_luminal

REPS = [SCALAR, DIRAC, VECTOR]
reps = st.sampled_from(REPS)


def random_n(rng, past=False):
    v = rng.normal(size=3)
    v *= 0.9 * rng.random() / np.linalg.norm(v)
    n = unit_timelike_from_velocity(v)
    return -n if past else n


def chiral_gammas():
    sig = np.concatenate([np.eye(2)[None], PAULI])
    sigbar = np.concatenate([np.eye(2)[None], -PAULI])
    g = np.zeros((4, 4, 4), dtype=complex)
    g[:, :2, 2:] = sig
    g[:, 2:, :2] = sigbar
    return g


def test_representation_metadata():
    assert [r.dimension for r in REPS] == [1, 4, 4]
    assert [r.spin.ell for r in REPS] == [0, 0.5, 1]
    assert get_representation("dirac") is DIRAC
    with pytest.raises(ValueError):
        get_representation("tensor")


@given(reps, seeds)
def test_representation_homomorphism_and_invariant_form(rep, seed):
    rng = np.random.default_rng(seed)
    A, B = LorentzTransform.random(rng), LorentzTransform.random(rng)
    assert np.allclose(rep.rep_matrix(A @ B), rep.rep_matrix(A) @ rep.rep_matrix(B), atol=1e-9)
    D, g = rep.rep_matrix(A), rep.invariant_form
    assert np.allclose(D.conj().T @ g @ D, g, atol=1e-9)


@given(seeds)
def test_dirac_matrices_transform_as_vector(seed):
    # oracle: D^-1 gamma_mu D = (Lambda^-1)^nu_mu gamma_nu from the Pauli algebra
    L = LorentzTransform.random(seed)
    D = DIRAC.rep_matrix(L)
    gam = chiral_gammas()
    lhs = np.array([np.linalg.inv(D) @ gam[mu] @ D for mu in range(4)])
    rhs = np.einsum("nm,nab->mab", np.linalg.inv(L.matrix), gam)
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_rep_matrix_accepts_plain_matrix(rng):
    L = LorentzTransform.random(rng)
    assert np.allclose(VECTOR.rep_matrix(L.matrix), L.matrix, atol=1e-12)


def test_scalar_frame_is_trivial(rng):
    fr = build_spin_frame(SCALAR, random_n(rng))
    assert np.array_equal(fr.u, [[1]]) and np.array_equal(fr.P, [[1]])


def test_dirac_rest_projector_is_half_one_plus_beta():
    fr = build_spin_frame(DIRAC, E_REST)
    assert np.allclose(fr.P, 0.5 * (np.eye(4) + BETA), atol=1e-14)


def test_vector_rest_projector_is_spatial():
    fr = build_spin_frame(VECTOR, E_REST)
    assert np.allclose(fr.P_upper, np.diag([0, 1, 1, 1]), atol=1e-14)


def test_rest_gauge():
    for rep in (DIRAC, VECTOR):
        u = rep.rest_intertwiner
        first = u[np.flatnonzero(np.abs(u[:, 0]) > 1e-12)[0], 0]
        assert first.imag == 0 and first.real > 0


def test_standard_boost_examples():
    assert np.array_equal(standard_boost(E_REST), np.eye(4))
    xi = 1.0
    n = np.array([np.cosh(xi), 0, 0, np.sinh(xi)])
    assert np.allclose(standard_boost(n) @ E_REST, n, atol=1e-12)
    v = np.ones(3) / np.sqrt(3) * 0.7
    n = unit_timelike_from_velocity(v)
    L = standard_boost(n)
    assert np.allclose(L @ E_REST, n, atol=1e-12)
    assert check_pseudo_orthogonality(L) < 1e-12


def test_standard_boost_is_rotated_z_boost():
    # oracle: pure boost along n_hat with speed |n|/n0
    n = unit_timelike_from_velocity([0.2, -0.5, 0.3])
    speed = np.linalg.norm(n[1:]) / n[0]
    assert np.allclose(standard_boost(n), boost_matrix(speed, n[1:]), atol=1e-12)


def test_standard_boost_many_random(rng):
    worst = 0.0
    for _ in range(1000):
        n = random_n(rng)
        worst = max(worst, np.max(np.abs(standard_boost(n) @ E_REST - n)))
    assert worst < 1e-12


def test_standard_boost_past_pointing_uses_minus_n(rng):
    n = random_n(rng)
    assert np.array_equal(standard_boost(-n), standard_boost(n))


def test_standard_boost_rejects_bad_input():
    with pytest.raises(ValueError):
        standard_boost([1.0, 0.3, 0.0, 0.0])
    with pytest.raises(ValueError):
        standard_boost([0.0, 1.0, 0.0, 0.0])


def test_wigner_rotation_examples(rng):
    R = rotation_matrix_from_su2(su2_exp([0.3, -0.8, 0.5]))
    assert np.allclose(wigner_rotation(R, E_REST), R, atol=1e-12)
    n2 = random_n(rng)
    assert np.allclose(wigner_rotation(standard_boost(n2), E_REST), np.eye(4), atol=1e-10)


@given(seeds, st.booleans())
def test_wigner_rotation_is_little_group(seed, past):
    rng = np.random.default_rng(seed)
    L = LorentzTransform.random(rng)
    n = random_n(rng, past)
    W = wigner_rotation(L.matrix, n)
    assert np.max(np.abs(W @ E_REST - E_REST)) < 1e-10
    assert np.allclose(W[1:, 1:].T @ W[1:, 1:], np.eye(3), atol=1e-10)
    assert np.allclose(rotation_matrix_from_su2(wigner_rotation_su2(L, n)), W, atol=1e-10)


@given(seeds)
def test_wigner_cocycle(seed):
    rng = np.random.default_rng(seed)
    L1, L2 = LorentzTransform.random(rng), LorentzTransform.random(rng)
    n = random_n(rng)
    lhs = wigner_rotation((L2 @ L1).matrix, n)
    rhs = wigner_rotation(L2.matrix, L1.apply(n)) @ wigner_rotation(L1.matrix, n)
    assert np.allclose(lhs, rhs, atol=1e-9)


@pytest.mark.parametrize("rep", REPS, ids=str)
def test_covariance_identity_transform(rep, rng):
    n = random_n(rng)
    I = LorentzTransform.identity()
    # zero up to the rounding of L(n)^-1 L(n) in the cover
    assert covariance_residual_u(rep, I, n) <= 1e-15
    assert covariance_residual_v(rep, I, n) <= 1e-15


def test_dirac_covariance_under_rotation_at_rest(rng):
    L = LorentzTransform.rotation(rng.normal(size=3))
    assert covariance_residual_u(DIRAC, L, E_REST) < 1e-10


@given(reps, seeds, st.booleans())
def test_covariance_random(rep, seed, past):
    rng = np.random.default_rng(seed)
    L = LorentzTransform.random(rng)
    n = random_n(rng, past)
    assert covariance_residual_u(rep, L, n) < 1e-9
    assert covariance_residual_v(rep, L, n) < 1e-9


@given(reps, seeds, st.booleans())
def test_frame_identities(rep, seed, past):
    n = random_n(np.random.default_rng(seed), past)
    assert max(frame_residuals(rep, n).values()) < 1e-10


def polarization_vectors(n):
    """Helicity-basis polarisation vectors boosted to n, built without the intertwiner solver."""
    eps_rest = np.array(
        [[0, 1, 1j, 0], [0, 0, 0, np.sqrt(2)], [0, 1, -1j, 0]], dtype=complex
    ) / np.sqrt(2)
    return standard_boost(n) @ eps_rest.T


@given(sub_luminal, st.booleans())
def test_spin_one_projector_closed_form(v, past):
    n = unit_timelike_from_velocity(v)
    n = -n if past else n
    eps = polarization_vectors(n)
    pol_sum = eps @ eps.conj().T
    target = ETA + np.outer(n, n)
    assert np.allclose(pol_sum, target, atol=1e-10)
    assert np.allclose(build_spin_frame(VECTOR, n).P_upper, target, atol=1e-10)


@given(reps, sub_luminal)
def test_polynomial_projector_matches_frame_for_future_n(rep, v):
    n = unit_timelike_from_velocity(v)
    assert np.allclose(projector_polynomial(rep, n), build_spin_frame(rep, n).P, atol=1e-10)


def test_dirac_polynomial_projectors_sum_to_one(rng):
    n = random_n(rng)
    total = projector_polynomial(DIRAC, n) + projector_polynomial(DIRAC, -n)
    assert np.allclose(total, np.eye(4), atol=1e-14)


def test_onshell_parity():
    dx = np.array([1.3, 0.4, -0.2, 0.5])
    assert abs(onshell_kernel(dx, 1.0, -1) - onshell_kernel(-dx, 1.0, 1)) < 1e-8


def test_onshell_rotation_invariance(rng):
    dx = np.array([1.3, 0.4, -0.2, 0.5])
    R = rotation_matrix_from_su2(su2_exp(rng.normal(size=3)))
    assert abs(onshell_kernel(R @ dx, 1.0, 1) - onshell_kernel(dx, 1.0, 1)) < 1e-8


def test_onshell_rejects_bad_input():
    with pytest.raises(ValueError):
        onshell_kernel([1, 0, 0, 0], 0.0, 1)
    with pytest.raises(ValueError):
        onshell_kernel([1, 0, 0, 0], 1.0, 0)


@pytest.mark.parametrize("dx", [[1.5, 0.3, -0.2, 0.1], [2.5, 1.0, 0.5, 0.0], [-1.7, 0.2, 0.0, 0.6]])
def test_scalar_decomposition(dx):
    sign = 1 if dx[0] > 0 else -1
    assert abs(feynman_propagator_position(dx, 1.0) - onshell_kernel(dx, 1.0, sign)) < 1e-4


def test_scalar_nonscalar_propagator_reduces_exactly():
    dx = [0.4, 1.2, -0.3, 0.2]
    assert nonscalar_propagator(SCALAR, dx, 1.0)[0, 0] == feynman_propagator_position(dx, 1.0)


@pytest.mark.parametrize("dx", [[1.5, 0.3, -0.2, 0.1], [-2.0, 0.5, 0.1, 0.3], [1.2, 0.0, 0.0, 0.4]])
def test_dirac_two_paths_agree_timelike(dx):
    a = nonscalar_propagator(DIRAC, dx, 1.0)
    b = nonscalar_propagator(DIRAC, dx, 1.0, method="onshell")
    assert np.max(np.abs(a - b)) < 1e-3


@pytest.mark.parametrize("dx", [[0.5, 2.0, 0.3, 0.0], [-0.3, 0.4, 1.5, -0.2], [0.0, 1.0, 0.2, 0.0]])
def test_vector_two_paths_agree_spacelike(dx):
    a = nonscalar_propagator(VECTOR, dx, 1.0)
    b = nonscalar_propagator(VECTOR, dx, 1.0, method="onshell")
    assert np.max(np.abs(a - b)) < 1e-3


def test_onshell_dirac_trace_is_twice_scalar():
    # tr P(n_p) = 2 for every on-shell p
    dx = np.array([2.0, 0.0, 0.0, 0.0])
    D = onshell_propagator(DIRAC, dx, 1.0, 1)
    assert np.trace(D) == pytest.approx(2 * onshell_kernel(dx, 1.0, 1), abs=1e-7)


@given(st.sampled_from([DIRAC, VECTOR]), seeds)
def test_nonscalar_propagator_covariance(rep, seed):
    L = LorentzTransform.random(seed, max_rapidity=0.6)
    D = rep.rep_matrix(L)
    for dx in (np.array([1.5, 0.3, -0.2, 0.1]), np.array([0.2, 1.4, 0.3, -0.5])):
        lhs = D @ nonscalar_propagator(rep, dx, 1.0) @ np.linalg.inv(D)
        rhs = nonscalar_propagator(rep, L.apply(dx), 1.0)
        assert np.max(np.abs(lhs - rhs)) < 1e-3


def test_nonscalar_propagator_rejects_light_cone():
    with pytest.raises(SingularInputError):
        nonscalar_propagator(DIRAC, [1.0, 0.0, 1.0, 0.0], 1.0)
    with pytest.raises(ValueError):
        nonscalar_propagator(DIRAC, [1.0, 0.0, 0.0, 0.0], 1.0, method="magic")


def test_plane_wave_examples():
    amp = plane_wave_amplitude([0.3, 0.1, -0.2], [0.5, 1.0, 2.0, -1.0], 1.0, 1, 1)
    assert np.allclose(np.abs(np.diag(amp)), (2 * np.pi) ** -1.5)
    assert np.allclose(amp - np.diag(np.diag(amp)), 0)
    origin = plane_wave_amplitude([0.3, 0.1, -0.2], np.zeros(4), 1.0, -1, 0.5)
    assert np.allclose(origin, (2 * np.pi) ** -1.5 * np.eye(2))


@pytest.mark.parametrize("sign", [1, -1])
def test_plane_wave_is_position_eigenfunction(sign):
    x = np.array([0.7, 0.4, -1.1, 0.25])
    p = np.array([0.3, -0.2, 0.5])
    fn = lambda q: plane_wave_amplitude(q, x, 1.3, sign, 0.5)
    res = translated_position_operator(fn, p, x[0], 1.3, sign)
    expected = x[1:, None, None] * fn(p)[None]
    assert np.max(np.abs(res - expected)) < 1e-6


def test_newton_wigner_scalar_is_plane_wave():
    x, p = np.array([0.2, 1.0, -0.5, 0.3]), np.array([0.4, 0.0, -0.3])
    for sign in (1, -1):
        assert np.allclose(newton_wigner_wavefunction(p, x, 1.0, sign, SCALAR), plane_wave_amplitude(p, x, 1.0, sign, 0))


@pytest.mark.parametrize("rep", [DIRAC, VECTOR], ids=str)
@pytest.mark.parametrize("sign", [1, -1])
def test_newton_wigner_is_position_eigenfunction(rep, sign):
    x = np.array([0.7, 0.4, -1.1, 0.25])
    p = np.array([0.3, -0.2, 0.5])
    fn = lambda q: newton_wigner_wavefunction(q, x, 1.1, sign, rep)
    res = newton_wigner_position_operator(fn, p, x[0], 1.1, sign, rep)
    expected = x[1:, None, None] * fn(p)[None]
    assert np.max(np.abs(res - expected)) < 1e-5


@pytest.mark.parametrize("rep", [DIRAC, VECTOR], ids=str)
def test_newton_wigner_smeared_normalization(rep):
    # oracle: Gaussian-smeared overlap equals (s / sqrt(2 pi))^3 exp(-s^2 d^2 / 2) times identity
    from spinpaths.spin import spin_coefficients

    s = 1.0
    x1 = np.array([0.0, 0.2, -0.1, 0.3])
    x2 = np.array([0.0, -0.3, 0.4, 0.1])
    nodes, weights = np.polynomial.legendre.leggauss(24)
    K = 7.0
    nodes, weights = K * nodes, K * weights
    acc = np.zeros((rep.spin.dim, rep.spin.dim), dtype=complex)
    for a, wa in zip(nodes, weights):
        for b, wb in zip(nodes, weights):
            for c, wc in zip(nodes, weights):
                p = np.array([a, b, c])
                w = spin_coefficients(rep, p, 1.0, 1)
                f1 = newton_wigner_wavefunction(p, x1, 1.0, 1, rep) @ w
                f2 = newton_wigner_wavefunction(p, x2, 1.0, 1, rep) @ w
                acc += wa * wb * wc * np.exp(-(p @ p) / (2 * s * s)) * f1 @ f2.conj().T
    d2 = np.sum((x1[1:] - x2[1:]) ** 2)
    expected = (s / np.sqrt(2 * np.pi)) ** 3 * np.exp(-s * s * d2 / 2) * np.eye(rep.spin.dim)
    assert np.allclose(acc, expected, atol=1e-8)
