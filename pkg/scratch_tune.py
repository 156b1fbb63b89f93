"""Measure upper-test sweep accuracy on same-mesh consistent data."""
import time
import numpy as np
from eitrecon import (
    build_structured_mesh, layer_order, ConductivityField, assemble_system,
    build_basis, assemble_nd, ReconProblem, reconstruct,
)

def run(rows, cols, cps, gamma, M, c=1.0, variant="upper", tol_loewner=None):
    h = 1.0 / (max(rows, cols) * cps)
    mesh, part = build_structured_mesh(rows, cols, h, gamma)
    order = layer_order(part, mesh)
    basis = build_basis(mesh, M)
    sys_true = assemble_system(mesh, part, ConductivityField.uniform(part.pixel_count, c))
    A = assemble_nd(sys_true, basis, M)
    t0 = time.time()
    kw = dict(variant=variant, order=order, basis=basis)
    if tol_loewner:
        kw["tol_loewner"] = tol_loewner
    prob = ReconProblem(mesh, part, A, **kw)
    res = reconstruct(prob)
    vals = res.value_array(part.pixel_count)
    err = np.nanmax(np.abs(vals - c) / c) if np.isfinite(vals).any() else np.inf
    dt = time.time() - t0
    print(f"{rows}x{cols} cps={cps} gamma={','.join(gamma)} M={M} c={c} {variant} "
          f"tol={tol_loewner}: status={res.status} maxerr={err:.2e} time={dt:.1f}s")
    return err, res

ALL = ("bottom", "left", "top", "right")
BL = ("bottom", "left")

for M in (8, 16, 24, 32):
    cps = max(1, (2 * M) // 16 + (1 if (2 * M) % 16 else 0))  # bottom-only: edges = 2*cps*...
    # 2x2: bottom edges = 2*cps; cap = cps; need cps >= M
    run(2, 2, M, ("bottom",), M)
print()
for M in (8, 16, 24):
    # 3x3 gamma=BL: edges = 2*(3*cps); cap = 3*cps; want cps so cap >= M
    cps = max(2, -(-M // 3))
    run(3, 3, cps, BL, M)
print()
for M in (12, 16, 24, 32):
    # gamma=ALL: edges = 4*3*cps, cap = 6*cps
    cps = max(2, -(-M // 6))
    run(3, 3, cps, ALL, M)
print()
run(3, 3, 4, ALL, 24)
run(3, 3, 4, ALL, 32)
run(3, 3, 4, ALL, 40)
run(2, 2, 4, ALL, 16)
run(2, 2, 4, ALL, 24)
run(2, 2, 4, ALL, 32)
