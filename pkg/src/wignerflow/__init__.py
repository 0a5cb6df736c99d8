"""Reduced Wigner distributions and traced Wigner currents for two optical
modes mixed at a beam splitter of variable reflectivity."""

__version__ = "0.1.0"

from .fock import (
    DensityOperator,
    FockVector,
    TruncationError,
    TwoModeAmplitudes,
    apply_beam_splitter,
    make_coherent,
    make_fock,
    make_squeezed_vacuum,
    product_state,
    reduce,
    reflectivity_to_tau,
    tau_to_reflectivity,
    traced_moment,
)
from .wigner import PhaseSpaceGrid, ScalarField, kernel, marginal, weyl_field, wigner
from .current import (
    VectorField,
    VelocityField,
    continuity_residual,
    current,
    divergence,
    inversion_detect,
    radial_profile,
    velocity,
    wigner_and_current,
)
from .flowlines import integrate_line, portrait, seed_lattice
from .observables import negativity_volume, sweep
