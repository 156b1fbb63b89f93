"""Standalone per-step flip gaps: exact knowns, find the flip for each m."""
import math
import numpy as np
from eitrecon import (
    build_structured_mesh, refine_mesh, ConductivityField,
    assemble_system, build_basis, assemble_nd, ReconProblem, pixel_bisect,
)

BL = ("bottom", "left")

def per_step(cps, M, order, phantom, refine=0, tol=1e-8, gamma=BL, rows=3, cols=3):
    h = 1.0 / (rows * cps)
    mesh, part = build_structured_mesh(rows, cols, h, gamma)
    dmesh, dpart = mesh, part
    for _ in range(refine):
        dmesh, dpart = refine_mesh(dmesh, dpart)
    ph = np.asarray(phantom, dtype=float)
    A = assemble_nd(assemble_system(dmesh, dpart, ConductivityField(ph)),
                    build_basis(dmesh, M), M)
    prob = ReconProblem(mesh, part, A, variant="upper", order=order, tol_loewner=tol)
    shifts = []
    for m in range(1, len(order) + 1):
        known = [float(ph[order[j]]) for j in range(m - 1)]  # exact prefix
        res = pixel_bisect(prob, m, known, start=float(ph[order[m - 1]]))
        p = order[m - 1]
        if res.status != "Converged":
            shifts.append((p, math.inf))
        else:
            shifts.append((p, (res.value - ph[p]) / ph[p]))
    txt = " ".join(f"{p}:{s:+.1e}" if math.isfinite(s) else f"{p}:CAP" for p, s in shifts)
    print(f"cps={cps} M={M} refine={refine} tol={tol:g}\n    {txt}")
    return shifts

ones = [1.0] * 9
o_layer = (0, 1, 2, 3, 6, 4, 5, 7, 8)
o_center_last = (0, 1, 2, 3, 6, 5, 7, 8, 4)

print("== same-mesh, exact knowns, order layer ==")
per_step(8, 16, o_layer, ones)
per_step(16, 16, o_layer, ones)
per_step(16, 24, o_layer, ones)
print("== same-mesh, center-last order ==")
per_step(16, 16, o_center_last, ones)
print("== inverse-crime-free (refine=1), exact knowns ==")
per_step(8, 16, o_layer, ones, refine=1, tol=1e-3)
per_step(16, 16, o_layer, ones, refine=1, tol=1e-3)
per_step(16, 16, o_layer, ones, refine=1, tol=1e-4)
per_step(24, 16, o_layer, ones, refine=1, tol=1e-4)
