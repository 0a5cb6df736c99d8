"""Cutoff convergence of the squeezed-pair agreement with the Gaussian closed forms."""

import math

import numpy as np
import pytest

from wignerflow.current import wigner_and_current
from wignerflow.fock import apply_beam_splitter, make_squeezed_vacuum, product_state, reflectivity_to_tau
from wignerflow.gaussian import evolve_moments, product_moments, reduced_current, reduced_wigner, single_mode_squeezed
from wignerflow.wigner import PhaseSpaceGrid


@pytest.mark.slow
def test_squeezed_pair_error_falls_with_cutoff():
    grid = PhaseSpaceGrid()
    tau = reflectivity_to_tau(0.25)
    g = evolve_moments(product_moments(single_mode_squeezed(2.0, 0.0), single_mode_squeezed(2.0, -math.pi / 3)), tau)
    wg = reduced_wigner(g, "b", grid).values
    jg = reduced_current(g, "b", grid)
    errs = []
    for cutoff in (60, 120, 200):
        a = make_squeezed_vacuum(2.0, 0.0, cutoff, leakage_bound=0.05)
        b = make_squeezed_vacuum(2.0, -math.pi / 3, cutoff, leakage_bound=0.05)
        w, j = wigner_and_current(apply_beam_splitter(product_state(a, b), tau), "b", grid)
        errs.append(
            (
                float(np.max(np.abs(w.values - wg))),
                float(max(np.max(np.abs(j.jx - jg.jx)), np.max(np.abs(j.jp - jg.jp)))),
            )
        )
    # measured: W 3.0e-3, 3.1e-4, 2.0e-5; J 3.1e-2, 4.9e-3, 3.7e-4
    for k in range(2):
        assert errs[k + 1][0] < errs[k][0] / 5
        assert errs[k + 1][1] < errs[k][1] / 5
    assert errs[-1][0] < 1e-4 and errs[-1][1] < 1e-3
