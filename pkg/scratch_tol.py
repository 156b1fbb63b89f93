"""Per-pixel flip accuracy of the upper-variant sweep on consistent data."""
import numpy as np
from eitrecon import (
    build_structured_mesh, layer_order, ConductivityField, assemble_system,
    build_basis, assemble_nd, ReconProblem, reconstruct,
)

def run(rows, cols, cps, gamma, M, tol, c=1.0, verbose=True):
    h = 1.0 / (max(rows, cols) * cps)
    mesh, part = build_structured_mesh(rows, cols, h, gamma)
    order = layer_order(part, mesh)
    basis = build_basis(mesh, M)
    sys_true = assemble_system(mesh, part, ConductivityField.uniform(part.pixel_count, c))
    A = assemble_nd(sys_true, basis, M)
    prob = ReconProblem(mesh, part, A, variant="upper", order=order, basis=basis,
                        tol_loewner=tol)
    res = reconstruct(prob)
    vals = res.value_array(part.pixel_count)
    err = np.nanmax(np.abs(vals - c) / c) if np.isfinite(vals).any() else np.inf
    errs = " ".join(f"{p.pixel}:{(p.value - c) / c:+.1e}" for p in res.pixels
                    if p.value is not None)
    print(f"{rows}x{cols} cps={cps} g={len(gamma)} M={M} tol={tol:g}: {res.status} "
          f"maxerr={err:.1e}\n    {errs}")
    return err

ALL = ("bottom", "right", "top", "left")

print("== 2x2 bottom-only, depth problem ==")
for cps, M in ((16, 16), (24, 24), (32, 32)):
    run(2, 2, cps, ("bottom",), M, 1e-8)
print("== 2x2 all sides ==")
for cps, M in ((4, 8), (4, 16), (8, 16), (8, 32), (12, 48)):
    run(2, 2, cps, ALL, M, 1e-8)
print("== 3x3 all sides ==")
for cps, M in ((2, 16), (2, 24), (4, 24), (4, 32), (4, 48), (6, 48)):
    run(3, 3, cps, ALL, M, 1e-8)
