import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from wignerflow.fock import (
    DensityOperator,
    TruncationError,
    TwoModeAmplitudes,
    apply_beam_splitter,
    beam_splitter_block,
    make_coherent,
    make_fock,
    make_squeezed_vacuum,
    mean_quadratures,
    mixer_amplitudes,
    product_state,
    reduce,
    reflectivity_to_tau,
    tau_to_reflectivity,
    traced_moment,
)
from wignerflow.oracles import binomial_beam_splitter


def ladder(dim):
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1)


# ---------------------------------------------------------------- single mode

def test_fock_basis_vector():
    v = make_fock(3, 5)
    assert v.cutoff == 5
    assert np.array_equal(v.amplitudes, [0, 0, 0, 1, 0, 0])
    assert v.leakage == 0.0


def test_fock_above_cutoff_raises():
    with pytest.raises(TruncationError) as exc:
        make_fock(4, 3)
    assert exc.value.required_cutoff == 4


def test_coherent_matches_displacement_oracle():
    alpha = 0.8 - 1.1j
    big = 80
    a = ladder(big)
    vac = np.zeros(big, dtype=complex)
    vac[0] = 1
    ref = expm(alpha * a.T - np.conj(alpha) * a) @ vac
    v = make_coherent(alpha, 30)
    assert np.max(np.abs(v.amplitudes - ref[:31])) < 1e-12
    assert v.mean_photon_number() == pytest.approx(abs(alpha) ** 2, abs=1e-10)


def test_coherent_quadrature_means():
    alpha = 2 * (1 + 1j) / math.sqrt(2)
    x, p = mean_quadratures(make_coherent(alpha, 25))
    assert x == pytest.approx(2.0, abs=1e-8)
    assert p == pytest.approx(2.0, abs=1e-8)


def test_coherent_leakage_reports_required_cutoff():
    with pytest.raises(TruncationError) as exc:
        make_coherent(4j / math.sqrt(2), 10)
    assert exc.value.leakage > 0.1
    need = exc.value.required_cutoff
    assert make_coherent(4j / math.sqrt(2), need).leakage <= 1e-8


@pytest.mark.parametrize("z,theta", [(0.5, 0.0), (0.9, 0.7), (1.2, -math.pi / 3)])
def test_squeezed_matches_exponential_oracle(z, theta):
    big = 260
    a = ladder(big)
    zeta = z * np.exp(1j * theta)
    gen = 0.5 * (np.conj(zeta) * a @ a - zeta * a.T @ a.T)
    vac = np.zeros(big, dtype=complex)
    vac[0] = 1
    ref = expm(gen) @ vac
    v = make_squeezed_vacuum(z, theta, 100)
    head = ref[:101] / np.linalg.norm(ref[:101])  # truncated states are renormalized
    assert np.max(np.abs(v.amplitudes - head)) < 1e-12


def test_squeezed_population_ratio():
    # |<2|z>|^2 / |<0|z>|^2 = tanh(z)**2 / 2
    z = 0.7
    v = make_squeezed_vacuum(z, 0.3, 40)
    ratio = abs(v.amplitudes[2]) ** 2 / abs(v.amplitudes[0]) ** 2
    assert ratio == pytest.approx(math.tanh(z) ** 2 / 2, rel=1e-12)
    assert np.all(v.amplitudes[1::2] == 0)


def test_squeezed_quadrature_variance():
    z = 0.6
    v = make_squeezed_vacuum(z, 0.0, 80).amplitudes
    a = ladder(v.size)
    x = (a + a.T) / math.sqrt(2)
    var = np.real(v.conj() @ x @ x @ v)
    assert var == pytest.approx(math.exp(-2 * z) / 2, abs=1e-10)


def test_squeezed_leakage_values():
    assert make_squeezed_vacuum(2.0, 0.0, 60, leakage_bound=0.05).leakage == pytest.approx(0.0339, abs=5e-4)
    with pytest.raises(TruncationError):
        make_squeezed_vacuum(2.0, 0.0, 60)


# ---------------------------------------------------------------- mixer

def test_reflectivity_round_trip():
    for r in (0.0, 0.25, 0.345, 0.5, 1.0):
        assert tau_to_reflectivity(reflectivity_to_tau(r)) == pytest.approx(r, abs=1e-15)
    assert reflectivity_to_tau(0.5) == pytest.approx(0.5, abs=1e-15)
    assert mixer_amplitudes(1.0)[0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        reflectivity_to_tau(1.5)
    with pytest.raises(ValueError):
        mixer_amplitudes(-0.1)


def test_identity_at_zero():
    psi = product_state(make_coherent(0.5 + 0.2j, 12), make_fock(2, 3))
    assert apply_beam_splitter(psi, 0.0).c is psi.c


def test_swap_at_one():
    # |m, n> -> (-1)**n |n, m>
    psi = product_state(make_fock(2, 3), make_fock(1, 3))
    out = apply_beam_splitter(psi, 1.0).c
    expected = np.zeros_like(out)
    expected[1, 2] = -1
    assert np.max(np.abs(out - expected)) < 1e-14


def test_hong_ou_mandel():
    one = make_fock(1, 1)
    out = apply_beam_splitter(product_state(one, one), 0.5).c
    assert abs(out[1, 1]) < 1e-14
    assert abs(out[2, 0]) == pytest.approx(1 / math.sqrt(2), abs=1e-14)
    assert out[2, 0] == pytest.approx(-out[0, 2], abs=1e-14)


@pytest.mark.parametrize("m,n", [(0, 3), (2, 2), (3, 1), (5, 4)])
@pytest.mark.parametrize("tau", [0.137, 0.5, 0.81])
def test_block_matches_binomial_oracle(m, n, tau):
    psi = product_state(make_fock(m, m), make_fock(n, n))
    out = apply_beam_splitter(psi, tau).c
    ref = np.zeros_like(out)
    for (i, j), amp in binomial_beam_splitter(m, n, tau).items():
        ref[i, j] = amp
    assert np.max(np.abs(out - ref)) < 1e-13


def test_composition():
    psi = product_state(make_coherent(1 - 0.5j, 20), make_squeezed_vacuum(0.4, 1.0, 20))
    two = apply_beam_splitter(apply_beam_splitter(psi, 0.2), 0.35).c
    one = apply_beam_splitter(psi, 0.55).c
    assert np.max(np.abs(two - one)) < 1e-13


@pytest.mark.parametrize("n", [0, 1, 7, 40, 150])
def test_block_unitary(n):
    u = beam_splitter_block(n, 0.61)
    assert np.max(np.abs(u.conj().T @ u - np.eye(n + 1))) < 1e-12


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    n_total=st.integers(0, 12),
    tau=st.floats(0.0, 1.0),
)
def test_unitarity_and_photon_number_random(seed, n_total, tau):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(n_total + 1,) * 2) + 1j * rng.normal(size=(n_total + 1,) * 2)
    m, n = np.indices(c.shape)
    c[m + n > n_total] = 0
    c /= np.linalg.norm(c)
    psi = TwoModeAmplitudes(c)
    out = apply_beam_splitter(psi, tau)
    assert abs(out.norm() - 1) < 1e-12
    # each total-photon block is invariant
    weights_in = [np.sum(np.abs(psi.block(k)) ** 2) for k in range(n_total + 1)]
    weights_out = [np.sum(np.abs(out.block(k)) ** 2) for k in range(n_total + 1)]
    assert np.max(np.abs(np.subtract(weights_in, weights_out))) < 1e-12


def test_product_state_truncation_records_leakage():
    a = make_fock(3, 3)
    b = make_coherent(0.6, 15)
    full = product_state(a, b)
    assert full.n_total == 18
    cut = product_state(a, b, 5)
    assert cut.n_total == 5
    assert cut.leakage > full.leakage
    assert abs(cut.norm() - 1) < 1e-14


def test_two_mode_validation():
    with pytest.raises(ValueError):
        TwoModeAmplitudes(np.ones((2, 3)) / math.sqrt(6))
    bad = np.zeros((3, 3))
    bad[2, 2] = 1
    with pytest.raises(ValueError):
        TwoModeAmplitudes(bad)


# ---------------------------------------------------------------- reduction

def test_reduce_product_state_is_pure():
    a = make_coherent(0.3 + 0.4j, 15)
    b = make_squeezed_vacuum(0.5, 0.0, 30)
    psi = product_state(a, b)
    ra, rb = reduce(psi, "a"), reduce(psi, "b")
    assert ra.purity() == pytest.approx(1.0, abs=1e-12)
    assert rb.purity() == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(ra.rho[: a.dim, : a.dim], np.outer(a.amplitudes, a.amplitudes.conj()), atol=1e-14)


def test_hom_reduced_state():
    one = make_fock(1, 1)
    rb = reduce(apply_beam_splitter(product_state(one, one), 0.5), "b")
    assert np.allclose(rb.rho, np.diag([0.5, 0, 0.5]), atol=1e-15)
    assert rb.entropy() == pytest.approx(math.log(2), abs=1e-14)
    rb.check_state()


def test_equal_purities_and_entropies_for_pure_states():
    psi = product_state(make_fock(3, 3), make_coherent(math.sqrt(2) * (1 + 1j), 25))
    out = apply_beam_splitter(psi, 0.4)
    ra, rb = reduce(out, "a"), reduce(out, "b")
    assert ra.purity() == pytest.approx(rb.purity(), abs=1e-12)
    assert ra.entropy() == pytest.approx(rb.entropy(), abs=1e-10)


def test_traced_moment_of_product_state():
    # Tr_a{x_a rho} = <x_a> rho_b for a product state
    a = make_coherent(0.7 - 0.2j, 20)
    b = make_fock(2, 4)
    psi = product_state(a, b)
    xa, _ = mean_quadratures(a)
    op = traced_moment(psi, "a", "x").rho
    assert np.max(np.abs(op - xa * reduce(psi, "b").rho)) < 1e-12
    assert traced_moment(psi, "a", "x").hermitian


def test_traced_moment_vanishes_for_hom():
    one = make_fock(1, 6)
    psi = apply_beam_splitter(product_state(one, one, 6), 0.5)
    for mode in "ab":
        for q in "xp":
            assert np.max(np.abs(traced_moment(psi, mode, q).rho)) < 1e-15


def test_traced_moment_trace_is_mean():
    psi = apply_beam_splitter(product_state(make_coherent(1 + 0.5j, 20), make_fock(1, 1)), 0.3)
    xa, pa = mean_quadratures(psi, "a")
    assert np.trace(traced_moment(psi, "a", "x").rho).real == pytest.approx(xa, abs=1e-12)
    assert np.trace(traced_moment(psi, "a", "p").rho).real == pytest.approx(pa, abs=1e-12)


def test_density_operator_checks():
    with pytest.raises(ValueError):
        DensityOperator(np.array([[0.5, 0.1], [0.0, 0.5]])).check_state()
    with pytest.raises(ValueError):
        DensityOperator(np.diag([0.7, 0.7])).check_state()
