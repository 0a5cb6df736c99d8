# The reduced Wigner function and the traced current obey
# dW/dtau + div J = 0.  Halving dtau and dx together should shrink the
# finite-difference residual four-fold.
import math

from wignerflow import PhaseSpaceGrid, apply_beam_splitter, make_coherent, make_fock, product_state, reflectivity_to_tau
from wignerflow.current import continuity_residual

psi0 = product_state(make_coherent(4j / math.sqrt(2), 30), make_fock(1, 1))
tau = reflectivity_to_tau(0.345)
base = PhaseSpaceGrid()

for mode in ("a", "b"):
    prev = None
    for k in range(3):
        res = continuity_residual(lambda t: apply_beam_splitter(psi0, t), mode, base.refined(2**k), tau, 1e-2 / 2**k)
        order = "" if prev is None else f"  order {math.log2(prev / res.max_abs):.2f}"
        print(f"mode {mode}  nx={base.refined(2**k).nx:4d}  dtau={1e-2 / 2**k:.4f}  "
              f"max|residual|={res.max_abs:.3e}  max|dW/dtau|={res.rate_scale:.3f}{order}")
        prev = res.max_abs
