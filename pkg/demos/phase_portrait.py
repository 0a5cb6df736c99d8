# Field lines of the traced current for a coherent state mixed with a single
# photon.  They are snapshots at one tau, not trajectories.
import math
from collections import Counter

from wignerflow import PhaseSpaceGrid, apply_beam_splitter, make_coherent, make_fock, product_state, reflectivity_to_tau
from wignerflow.current import inversion_detect, velocity, wigner_and_current
from wignerflow.flowlines import portrait

grid = PhaseSpaceGrid()
tau = reflectivity_to_tau(0.345)
psi = apply_beam_splitter(product_state(make_coherent(4j / math.sqrt(2), 30), make_fock(1, 1)), tau)

for mode in ("a", "b"):
    w, j = wigner_and_current(psi, mode, grid, tau)
    v = velocity(j, w)
    lines = portrait(j, singular=v.singular_mask())
    ends = Counter(r for ln in lines for r in (ln.reason_backward, ln.reason_forward))
    rep = inversion_detect(j, w)
    print(f"mode {mode}: {len(lines)} lines, ends {dict(ends)}, {len(v.singular_cells)} singular cells")
    print(f"   negative nodes {rep.n_negative}, inverted fraction {rep.fraction}, dominant {rep.dominant_direction}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    X, P = grid.mesh()
    fig, ax = plt.subplots(figsize=(5.5, 5))
    ax.contourf(X, P, w.values, 40, cmap="RdBu_r")
    for ln in lines:
        ax.plot(ln.vertices[:, 0], ln.vertices[:, 1], "k", lw=0.8)
    ax.set_aspect("equal")
    ax.set_title("mode b, R = 34.5%")
    fig.savefig("phase_portrait.png", dpi=120)
    print("saved phase_portrait.png")
