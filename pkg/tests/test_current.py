import math

import numpy as np
import pytest

from wignerflow.current import (
    HALF_PI,
    VectorField,
    closed_contour,
    continuity_residual,
    current,
    divergence,
    inversion_detect,
    radial_component,
    radial_profile,
    tangential_component,
    velocity,
    wigner_and_current,
    zero_cells,
)
from wignerflow.fock import apply_beam_splitter, make_coherent, make_fock, mean_quadratures, product_state, reduce
from wignerflow.wigner import WIGNER, PhaseSpaceGrid, ScalarField, wigner

GRID = PhaseSpaceGrid()
SMALL = PhaseSpaceGrid(nx=121, np_=121)


def hom(tau, cutoff=1):
    one = make_fock(1, cutoff)
    return apply_beam_splitter(product_state(one, one), tau)


# ---------------------------------------------------------------- divergence

def test_divergence_of_linear_field():
    X, P = GRID.mesh()
    div = divergence(VectorField(GRID, X, np.zeros_like(X))).values
    assert np.max(np.abs(div - 1)) < 1e-12


def test_divergence_exact_for_quadratics_including_edges():
    X, P = SMALL.mesh()
    div = divergence(VectorField(SMALL, X**2 - P, P**2 + 3 * X * P)).values
    assert np.max(np.abs(div - (2 * X + 2 * P + 3 * X))) < 1e-10


def test_divergence_second_order():
    errs = []
    for n in (61, 121, 241):
        g = PhaseSpaceGrid(nx=n, np_=n)
        X, P = g.mesh()
        f = VectorField(g, np.sin(X) * np.exp(-(P**2) / 8), np.cos(P) * X)
        exact = np.cos(X) * np.exp(-(P**2) / 8) - np.sin(P) * X
        errs.append(np.max(np.abs(divergence(f).values - exact)))
    assert math.log2(errs[0] / errs[1]) > 1.9
    assert math.log2(errs[1] / errs[2]) > 1.9


# ---------------------------------------------------------------- traced current

def test_product_state_current_factorizes():
    # without mixing, J_b = (pi/2) (<x_a>, <p_a>) W_b
    a = make_coherent(0.8 + 0.3j, 20)
    psi = product_state(a, make_fock(2, 2))
    w, j = wigner_and_current(psi, "b", SMALL)
    xa, pa = mean_quadratures(a)
    assert np.max(np.abs(j.jx - HALF_PI * xa * w.values)) < 1e-12
    assert np.max(np.abs(j.jp - HALF_PI * pa * w.values)) < 1e-12


def test_mode_a_current_has_opposite_sign_convention():
    b = make_coherent(-0.5 + 0.9j, 20)
    psi = product_state(make_fock(1, 1), b)
    w, j = wigner_and_current(psi, "a", SMALL)
    xb, pb = mean_quadratures(b)
    assert np.max(np.abs(j.jx + HALF_PI * xb * w.values)) < 1e-12
    assert np.max(np.abs(j.jp + HALF_PI * pb * w.values)) < 1e-12


def test_two_photon_mirror_symmetry():
    psi = hom(0.2)
    wa, ja = wigner_and_current(psi, "a", SMALL)
    wb, jb = wigner_and_current(psi, "b", SMALL)
    assert np.max(np.abs(wa.values - wb.values)) < 1e-14
    assert np.max(np.abs(ja.jx - jb.jx)) < 1e-14
    assert np.max(np.abs(ja.jp - jb.jp)) < 1e-14


def test_two_photon_current_is_radial():
    j = current(hom(0.2), "b", GRID)
    assert np.max(np.abs(tangential_component(j))) < 1e-14
    assert np.max(np.abs(radial_component(j))) > 0.1


def test_balanced_two_photon_current_vanishes():
    # the traced moments are identically zero at tau = 1/2
    j = current(hom(0.5, 6), "b", GRID)
    assert np.max(j.magnitude()) < 1e-15


def test_current_matches_wigner_of_joint_pass():
    psi = apply_beam_splitter(product_state(make_coherent(1j, 20), make_fock(1, 1)), 0.3)
    _, j1 = wigner_and_current(psi, "a", SMALL)
    j2 = current(psi, "a", SMALL)
    assert np.array_equal(j1.jx, j2.jx) and np.array_equal(j1.jp, j2.jp)


def test_vector_field_validation():
    g = PhaseSpaceGrid(nx=5, np_=5)
    with pytest.raises(ValueError):
        VectorField(g, np.zeros((5, 5)), np.full((5, 5), np.nan))
    with pytest.raises(ValueError):
        VectorField(g, np.zeros((5, 4)), np.zeros((5, 5)))


# ---------------------------------------------------------------- continuity

def test_continuity_residual_converges_at_second_order():
    psi0 = product_state(make_coherent(2j * math.sqrt(2), 30), make_fock(1, 1))
    res = []
    base = PhaseSpaceGrid(nx=61, np_=61)
    for k in range(3):
        r = continuity_residual(lambda t: apply_beam_splitter(psi0, t), "b", base.refined(2**k), 0.4, 0.02 / 2**k)
        res.append(r.max_abs)
    assert res[0] < 0.1 * r.rate_scale
    assert math.log2(res[0] / res[1]) > 1.8
    assert math.log2(res[1] / res[2]) > 1.8


def test_continuity_detects_wrong_sign():
    psi0 = product_state(make_fock(3, 3), make_coherent(math.sqrt(2) * (1 + 1j), 25))
    fn = lambda t: apply_beam_splitter(psi0, t)  # noqa: E731
    good = continuity_residual(fn, "b", GRID, 0.3, 1e-3)
    assert good.max_abs < 0.01 * good.rate_scale
    # the wrong sign doubles the divergence term instead of cancelling it
    psi = fn(0.3)
    w_lo = wigner(reduce(fn(0.299), "b"), GRID).values
    w_hi = wigner(reduce(fn(0.301), "b"), GRID).values
    j = current(psi, "b", GRID).scaled(-1.0)
    bad = (w_hi - w_lo) / 2e-3 + divergence(j).values
    assert np.max(np.abs(bad)) > 1.5 * good.rate_scale


def test_continuity_rejects_out_of_range():
    psi0 = hom(0.0)
    with pytest.raises(ValueError):
        continuity_residual(lambda t: apply_beam_splitter(psi0, t), "b", SMALL, 0.995, 0.01)


# ---------------------------------------------------------------- velocity

def test_velocity_masks_small_w():
    psi = hom(0.2)
    w, j = wigner_and_current(psi, "b", GRID)
    v = velocity(j, w)
    assert np.all(np.isnan(v.wx[~v.valid]))
    assert np.all(np.abs(w.values[v.valid]) >= v.threshold)
    ok = v.valid
    assert np.allclose(v.wx[ok] * w.values[ok], j.jx[ok])


def test_two_photon_singular_contour_below_balance():
    # at tau = 0.2 W_b has a negative core; its zero ring carries current
    w, j = wigner_and_current(hom(0.2), "b", GRID)
    v = velocity(j, w)
    assert len(v.singular_cells) > 0
    assert closed_contour(v.singular_mask())
    r = np.hypot(
        GRID.x[v.singular_cells[:, 0]] + 0.5 * GRID.dx, GRID.p[v.singular_cells[:, 1]] + 0.5 * GRID.dp
    )
    assert np.ptp(r) < 0.1  # a single ring


def test_closed_contour_geometry():
    cells = np.zeros((20, 20), dtype=bool)
    assert not closed_contour(cells)
    cells[5, 5:15] = cells[14, 5:15] = cells[5:15, 5] = cells[5:15, 14] = True
    assert closed_contour(cells)
    cells[5, 9] = False  # gap opens the ring
    assert not closed_contour(cells)


def test_zero_cells_need_current():
    g = PhaseSpaceGrid(nx=41, np_=41)
    X, P = g.mesh()
    w = ScalarField(g, 1 - X**2 - P**2, WIGNER)
    zero_j = VectorField(g, np.zeros_like(X), np.zeros_like(X))
    assert not zero_cells(w, zero_j, 1e-6, 1e-3).any()
    some_j = VectorField(g, X, P)
    assert closed_contour(zero_cells(w, some_j, 1e-6, 1e-3))


# ---------------------------------------------------------------- radial profile

def test_radial_profile_of_rigid_expansion():
    X, P = SMALL.mesh()
    prof = radial_profile(VectorField(SMALL, X, P))
    assert prof.symmetric
    sel = prof.counts > 0
    assert np.allclose(prof.mean_radial[sel], prof.radius[sel], atol=0.05)


def test_radial_profile_flags_asymmetry():
    X, P = SMALL.mesh()
    prof = radial_profile(VectorField(SMALL, X, 2 * P))
    assert not prof.symmetric
    assert "not rotationally symmetric" in prof.note


def test_liouville_violation_below_balance():
    # a divergence-free radial flow has R |w_r| constant; here it varies strongly
    w, j = wigner_and_current(hom(0.2), "b", GRID)
    prof = radial_profile(velocity(j, w))
    assert prof.symmetric
    sel = (prof.radius >= 0.5) & (prof.radius <= 2.5) & np.isfinite(prof.r_times_abs)
    vals = prof.r_times_abs[sel]
    assert (vals.max() - vals.min()) / (vals.max() + vals.min()) > 0.5


# ---------------------------------------------------------------- inversion

def test_inversion_synthetic():
    g = PhaseSpaceGrid(nx=41, np_=41)
    X, P = g.mesh()
    wv = np.where(np.hypot(X - 2, P) < 1, -0.1, np.exp(-(X**2) - P**2))
    jx = np.where(wv < 0, -1.0, 1.0)
    rep = inversion_detect(VectorField(g, jx, np.zeros_like(X)), ScalarField(g, wv, WIGNER))
    assert rep.dominant_direction == pytest.approx((1.0, 0.0))
    assert rep.n_negative > 0
    assert rep.fraction == 1.0
    assert not rep.inconclusive


def test_inversion_without_negative_region():
    g = PhaseSpaceGrid(nx=41, np_=41)
    X, P = g.mesh()
    w = ScalarField(g, np.exp(-(X**2) - P**2), WIGNER)
    rep = inversion_detect(VectorField(g, w.values, np.zeros_like(X)), w)
    assert rep.n_negative == 0 and rep.fraction is None


def test_inversion_radial_flow_is_inconclusive():
    w, j = wigner_and_current(hom(0.2), "b", GRID)
    rep = inversion_detect(j, w)
    assert rep.n_negative > 0
    assert rep.inconclusive


def test_inversion_report_for_coherent_photon_mix():
    psi0 = product_state(make_coherent(2j * math.sqrt(2), 30), make_fock(1, 1))
    tau = 2 / math.pi * math.asin(math.sqrt(0.345))
    w, j = wigner_and_current(apply_beam_splitter(psi0, tau), "b", GRID)
    rep = inversion_detect(j, w)
    assert rep.as_dict() == inversion_detect(j, w).as_dict()
    assert rep.n_negative == 293
    assert rep.n_inverted == 257
    assert rep.dominant_direction[1] == pytest.approx(1.0, abs=1e-12)
