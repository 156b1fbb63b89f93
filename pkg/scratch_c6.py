"""Criterion-6 regime: 3x3, gamma=bottom+left, M=16, phantom values."""
import numpy as np
from eitrecon import (
    build_structured_mesh, refine_mesh, layer_order, ConductivityField,
    assemble_system, build_basis, assemble_nd, ReconProblem, reconstruct,
)

BL = ("bottom", "left")

def run(cps, M, tol, phantom, refine=0, variant="upper", gamma=BL, rows=3, cols=3):
    h = 1.0 / (rows * cps)
    mesh, part = build_structured_mesh(rows, cols, h, gamma)
    order = layer_order(part, mesh)
    dmesh, dpart = mesh, part
    for _ in range(refine):
        dmesh, dpart = refine_mesh(dmesh, dpart)
    sigma = ConductivityField(np.asarray(phantom, dtype=float))
    dbasis = build_basis(dmesh, M)
    A = assemble_nd(assemble_system(dmesh, dpart, sigma), dbasis, M)
    prob = ReconProblem(mesh, part, A, variant=variant, order=order,
                        tol_loewner=tol)
    res = reconstruct(prob)
    vals = res.value_array(part.pixel_count)
    ph = np.asarray(phantom, dtype=float)
    rel = (vals - ph) / ph
    err = np.nanmax(np.abs(rel)) if np.isfinite(vals).any() else np.inf
    print(f"cps={cps} M={M} tol={tol:g} refine={refine} {variant}: {res.status} "
          f"maxerr={err:.2e}")
    print("    " + " ".join(f"{p}:{e:+.1e}" for p, e in enumerate(rel)))
    return err

ones = [1.0] * 9
print("== same-mesh consistent, gamma=BL, M=16 ==")
for cps in (6, 8):
    for tol in (1e-8, 1e-6):
        run(cps, 16, tol, ones)
print("== same-mesh, M=cap ==")
run(6, 18, 1e-8, ones)
run(8, 24, 1e-8, ones)
run(10, 30, 1e-8, ones)
print("== phantom, same mesh ==")
ph = [1.0, 2.0, 0.5, 3.0, 1.5, 0.8, 2.5, 1.2, 4.0]
run(8, 24, 1e-8, ph)
print("== phantom, inverse-crime-free (refine=1) ==")
for tol in (1e-4, 1e-3, 3e-3, 1e-2):
    run(8, 24, tol, ph, refine=1)
for tol in (1e-3, 3e-3):
    run(6, 16, tol, ph, refine=1)
