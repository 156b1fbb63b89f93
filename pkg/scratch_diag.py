"""Why does step 2 fail after step 1 in the refine=1 regime?"""
import numpy as np
from eitrecon import (
    build_structured_mesh, refine_mesh, layer_order, ConductivityField,
    assemble_system, build_basis, assemble_nd, ReconProblem, test_matrix, pixel_bisect,
)

BL = ("bottom", "left")
ph = np.array([1.0, 2.0, 0.5, 3.0, 1.5, 0.8, 2.5, 1.2, 4.0])
cps, M, tol = 16, 16, 1e-3

mesh, part = build_structured_mesh(3, 3, 1.0 / (3 * cps), BL)
order = layer_order(part, mesh)
print("order", order)
dmesh, dpart = refine_mesh(mesh, part)
A = assemble_nd(assemble_system(dmesh, dpart, ConductivityField(ph)),
                build_basis(dmesh, M), M)
prob = ReconProblem(mesh, part, A, variant="upper", order=order, tol_loewner=tol)

r1 = pixel_bisect(prob, 1, [], start=1.0)
print(f"step1: value={r1.value:.6f} verified={r1.t_verified:.6f} true={ph[order[0]]}")

scale = np.abs(np.linalg.eigvalsh(A.entries)).max()
print(f"scale={scale:.4f} tol*scale={tol*scale:.2e}")
for known_label, known in (("exact", [float(ph[order[0]])]),
                           ("threaded", [r1.t_verified])):
    lams = []
    for t in (0.5, 1.0, 1.9, 2.0, 2.1, 4.0, 16.0, 100.0, 1e4, 1e6):
        B = test_matrix(prob, 2, t, known)
        d = A.entries - B.entries
        lam = float(np.linalg.eigvalsh(0.5 * (d + d.T))[0])
        lams.append((t, lam))
    print(f"step2 known={known_label}: " +
          " ".join(f"{t:g}:{lam:+.2e}" for t, lam in lams))

# where is the negative direction concentrated? look at eigvec at t=2 (true)
B = test_matrix(prob, 2, 2.0, [r1.t_verified])
d = A.entries - B.entries
w, v = np.linalg.eigh(0.5 * (d + d.T))
print("worst eigenvalue:", w[0], "vector coeffs:",
      np.array2string(v[:, 0], precision=2, suppress_small=True))
