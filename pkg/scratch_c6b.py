"""Decisive scan for the inverse-crime-free 3x3 regime (criterion-6 shape)."""
import time
import numpy as np
from eitrecon import (
    build_structured_mesh, refine_mesh, layer_order, ConductivityField,
    assemble_system, build_basis, assemble_nd, ReconProblem, reconstruct,
)

BL = ("bottom", "left")
ph = np.array([1.0, 2.0, 0.5, 3.0, 1.5, 0.8, 2.5, 1.2, 4.0])

def sweep(cps, M, tol, refine=1, fw=0, phantom=ph):
    h = 1.0 / (3 * cps)
    mesh, part = build_structured_mesh(3, 3, h, BL)
    order = layer_order(part, mesh)
    dmesh, dpart = mesh, part
    for _ in range(refine):
        dmesh, dpart = refine_mesh(dmesh, dpart)
    A = assemble_nd(assemble_system(dmesh, dpart, ConductivityField(phantom)),
                    build_basis(dmesh, M), M)
    t0 = time.time()
    prob = ReconProblem(mesh, part, A, variant="upper", order=order,
                        tol_loewner=tol, forward_refinement=fw)
    res = reconstruct(prob)
    vals = res.value_array(part.pixel_count)
    rel = (vals - phantom) / phantom
    err = np.nanmax(np.abs(rel)) if np.isfinite(vals).any() else np.inf
    shallow = np.nanmax(np.abs(rel[[0, 1, 2, 3, 6]]))
    print(f"cps={cps:3d} M={M} tol={tol:g} fw={fw}: {res.status:14s} "
          f"maxerr={err:9.2e} shallow={shallow:9.2e} t={time.time()-t0:5.1f}s")
    print("    " + " ".join(f"{p}:{e:+.2e}" for p, e in enumerate(rel)))
    return err

for tol in (1e-4, 1e-3, 3e-3, 1e-2, 3e-2):
    sweep(16, 16, tol)
print()
for tol in (1e-3, 3e-3, 1e-2):
    sweep(24, 16, tol)
print()
sweep(32, 16, 3e-3)
