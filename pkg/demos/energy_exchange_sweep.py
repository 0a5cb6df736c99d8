# Photon number, purity, entropy and negativity volume along a tau sweep.
# The total photon number is conserved and both modes always share the same
# purity, since the joint state stays pure.
import math

import numpy as np

from wignerflow import PhaseSpaceGrid, make_coherent, make_fock
from wignerflow.observables import sweep

taus = np.linspace(0, 1, 11)
recs = sweep(make_fock(3, 3), make_coherent(2 * (1 + 1j) / math.sqrt(2), 25), taus, PhaseSpaceGrid(nx=121, np_=121))

print(" tau   <n_a>   <n_b>   total   purity   entropy   neg_a    neg_b")
for r in recs:
    print(f"{r.tau:4.1f}  {r.mean_n_a:6.3f}  {r.mean_n_b:6.3f}  {r.total_n:6.3f}  "
          f"{r.purity_a:6.4f}  {r.entropy_a:7.4f}  {r.negativity_a:.4f}  {r.negativity_b:.4f}")
print("max total drift:", max(abs(r.total_n - recs[0].total_n) for r in recs))
