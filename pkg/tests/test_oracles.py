"""Sanity checks of the reference implementations themselves."""

import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from wignerflow.fock import apply_beam_splitter, make_fock, product_state, traced_moment
from wignerflow.oracles import binomial_beam_splitter, hermite_functions, quadrature_kernel, traced_moment_4d
from wignerflow.wigner import PhaseSpaceGrid, weyl_field


def test_hermite_functions_orthonormal():
    x = np.linspace(-12, 12, 4001)
    h = hermite_functions(8, x)
    gram = trapezoid(h[:, None, :] * h[None, :, :], x, axis=-1)
    assert np.max(np.abs(gram - np.eye(9))) < 1e-12


def test_quadrature_kernel_vacuum():
    x, p = 0.4, -1.1
    assert quadrature_kernel(0, 0, x, p).real == pytest.approx(math.exp(-x * x - p * p) / math.pi, abs=1e-14)


def test_binomial_amplitudes_normalized():
    for m, n in [(1, 1), (3, 2), (4, 0)]:
        amps = binomial_beam_splitter(m, n, 0.3)
        assert sum(a * a for a in amps.values()) == pytest.approx(1.0, abs=1e-13)
        assert all(i + j == m + n for i, j in amps)


def test_binomial_hom():
    amps = binomial_beam_splitter(1, 1, 0.5)
    assert amps[(1, 1)] == pytest.approx(0.0, abs=1e-15)
    assert amps[(2, 0)] == pytest.approx(-amps[(0, 2)])


def test_four_dimensional_moment_small():
    grid = PhaseSpaceGrid(nx=25, np_=25)
    one = make_fock(1, 2)
    psi = apply_beam_splitter(product_state(one, one, 2), 0.3)
    for traced, kept in (("a", "b"), ("b", "a")):
        for q in "xp":
            slow = traced_moment_4d(psi.c, traced, grid, q)
            fast = weyl_field(traced_moment(psi, traced, q), grid).values
            assert np.max(np.abs(slow - fast)) < 1e-6
