"""Inversion-side forward refinement: per-step shifts and full sweeps."""
import math
import time
import numpy as np
from eitrecon import (
    build_structured_mesh, refine_mesh, layer_order, ConductivityField,
    assemble_system, build_basis, assemble_nd, ReconProblem, pixel_bisect, reconstruct,
)

BL = ("bottom", "left")

def make(cps, M, phantom, refine, gamma=BL, rows=3, cols=3):
    h = 1.0 / (rows * cps)
    mesh, part = build_structured_mesh(rows, cols, h, gamma)
    dmesh, dpart = mesh, part
    for _ in range(refine):
        dmesh, dpart = refine_mesh(dmesh, dpart)
    ph = np.asarray(phantom, dtype=float)
    A = assemble_nd(assemble_system(dmesh, dpart, ConductivityField(ph)),
                    build_basis(dmesh, M), M)
    return mesh, part, A, ph

def per_step(cps, M, phantom, refine, fw, tol, order=None):
    mesh, part, A, ph = make(cps, M, phantom, refine)
    order = order or layer_order(part, mesh)
    prob = ReconProblem(mesh, part, A, variant="upper", order=order,
                        tol_loewner=tol, forward_refinement=fw)
    out = []
    for m in range(1, len(order) + 1):
        known = [float(ph[order[j]]) for j in range(m - 1)]
        res = pixel_bisect(prob, m, known, start=float(ph[order[m - 1]]))
        p = order[m - 1]
        s = (res.value - ph[p]) / ph[p] if res.status == "Converged" else math.inf
        out.append((p, s))
    txt = " ".join(f"{p}:{s:+.1e}" if math.isfinite(s) else f"{p}:CAP" for p, s in out)
    print(f"  standalone cps={cps} M={M} r_data={refine} r_fw={fw} tol={tol:g}\n    {txt}")

def sweep(cps, M, phantom, refine, fw, tol):
    mesh, part, A, ph = make(cps, M, phantom, refine)
    order = layer_order(part, mesh)
    t0 = time.time()
    prob = ReconProblem(mesh, part, A, variant="upper", order=order,
                        tol_loewner=tol, forward_refinement=fw)
    res = reconstruct(prob)
    vals = res.value_array(part.pixel_count)
    rel = (vals - ph) / ph
    err = np.nanmax(np.abs(rel)) if np.isfinite(vals).any() else np.inf
    print(f"  sweep cps={cps} M={M} r_data={refine} r_fw={fw} tol={tol:g}: {res.status} "
          f"maxerr={err:.2e} t={time.time()-t0:.1f}s\n    "
          + " ".join(f"{p}:{e:+.1e}" for p, e in enumerate(rel)))

ones = [1.0] * 9
ph = [1.0, 2.0, 0.5, 3.0, 1.5, 0.8, 2.5, 1.2, 4.0]

print("== standalone shifts, data refine=1, forward refine=2 ==")
per_step(8, 16, ones, 1, 2, 1e-8)
per_step(12, 16, ones, 1, 2, 1e-8)
per_step(12, 16, ones, 1, 2, 1e-4)
print("== full sweeps, fw=2 ==")
sweep(8, 16, ones, 1, 2, 1e-8)
sweep(8, 16, ones, 1, 2, 1e-4)
sweep(12, 16, ones, 1, 2, 1e-4)
sweep(12, 16, ph, 1, 2, 1e-4)
sweep(12, 16, ph, 1, 2, 1e-3)
