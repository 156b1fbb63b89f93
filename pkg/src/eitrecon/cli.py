"""Command-line workflow: validate, simulate, reconstruct, msweep.

Exit codes: 0 success, 1 invalid input or partition, 2 inconsistent data
(bracket cap hit, partial output still written), 3 internal numeric
failure.  ``EITRECON_THREADS`` caps the worker pool used for independent
forward systems (0 or unset picks the CPU count).
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import geometry, reconstruction
from .config import load_config
from .errors import ConfigError, DataError, EitreconError, GeometryError
from .forward import ConductivityField, assemble_system
from .loewner import default_tolerance
from .ndmap import add_noise, assemble_nd, build_basis, read_ndmatrix, write_ndmatrix
from .reconstruction import ReconProblem, m_sweep, reconstruct, write_recon

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INCONSISTENT = 2
EXIT_NUMERIC = 3


def solver_threads():
    """Worker cap from EITRECON_THREADS (0 or unset means auto)."""
    raw = os.environ.get("EITRECON_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"EITRECON_THREADS={raw!r} is not an integer")
    if n < 0:
        raise ConfigError("EITRECON_THREADS must be nonnegative")
    return n if n > 0 else (os.cpu_count() or 1)


def _build_domain(cfg):
    if cfg.mesh_file is not None:
        mesh, part = geometry.read_mesh(cfg.mesh_file)
    else:
        mesh, part = geometry.build_structured_mesh(
            cfg.grid_rows, cfg.grid_cols, cfg.h, cfg.gamma
        )
    return mesh, part


def _choose_order(cfg, mesh, part):
    if cfg.order is not None:
        return tuple(int(p) for p in cfg.order)
    if cfg.roi is not None:
        return geometry.roi_order(part, mesh, cfg.roi)
    return geometry.layer_order(part, mesh)


def cmd_validate(cfg, out=sys.stdout):
    """Report ordering validity; exit 0 iff valid."""
    mesh, part = _build_domain(cfg)
    order = _choose_order(cfg, mesh, part)
    report = geometry.validate_ordering(part, mesh, order)
    out.write(report.describe() + "\n")
    return EXIT_OK if report.valid else EXIT_INVALID


def cmd_simulate(cfg, out=sys.stdout):
    """Forward-simulate measured data and write the ND matrix file."""
    if cfg.phantom is None:
        raise ConfigError("simulate needs phantom values")
    if cfg.M is None:
        raise ConfigError("simulate needs M")
    mesh, part = _build_domain(cfg)
    if len(cfg.phantom) != part.pixel_count:
        raise ConfigError(
            f"phantom lists {len(cfg.phantom)} values for {part.pixel_count} pixels"
        )
    for _ in range(cfg.data_refinement):
        mesh, part = geometry.refine_mesh(mesh, part)
    sigma = ConductivityField(np.array(cfg.phantom, dtype=float))
    system = assemble_system(mesh, part, sigma)
    basis = build_basis(mesh, cfg.M)
    nd = assemble_nd(system, basis, cfg.M)
    nd = add_noise(nd, cfg.noise, cfg.seed)
    path = cfg.out_prefix + ".nd"
    write_ndmatrix(path, nd)
    out.write(f"wrote {path}\n")
    return EXIT_OK


def _build_problem(cfg, mesh, part, order):
    if cfg.data is None:
        raise ConfigError("reconstruct needs a data file")
    measured = read_ndmatrix(cfg.data)
    if cfg.M is not None and cfg.M != measured.m:
        raise DataError(f"config M={cfg.M} but data file holds order {measured.m}")
    return ReconProblem(
        mesh=mesh,
        partition=part,
        measured=measured,
        variant=cfg.variant,
        order=order,
        tol_loewner=cfg.tol_loewner,
        tol_bisect=cfg.tol_bisect,
    )


def _write_raster(path, values, rows, cols):
    """Portable graymap of the pixel grid, values mapped over [min, max]."""
    vmin = np.nanmin(values)
    vmax = np.nanmax(values)
    span = vmax - vmin
    with open(path, "w") as f:
        f.write("P2\n")
        f.write(f"{cols} {rows}\n255\n")
        for r in range(rows - 1, -1, -1):
            line = []
            for c in range(cols):
                v = values[r * cols + c]
                if np.isnan(v):
                    g = 0
                elif span > 0:
                    g = int(round(255 * (v - vmin) / span))
                else:
                    g = 128
                line.append(str(g))
            f.write(" ".join(line) + "\n")


def _write_csv(path, values, rows, cols):
    with open(path, "w") as f:
        f.write("pixel,row,col,value\n")
        for p in range(values.size):
            if rows is not None:
                r, c = divmod(p, cols)
            else:
                r, c = "", ""
            v = "" if np.isnan(values[p]) else f"{values[p]:.17g}"
            f.write(f"{p},{r},{c},{v}\n")


def cmd_reconstruct(cfg, out=sys.stdout):
    """Reconstruct from a data file; write result, raster, and CSV."""
    mesh, part = _build_domain(cfg)
    order = _choose_order(cfg, mesh, part)
    problem = _build_problem(cfg, mesh, part, order)
    result = reconstruct(problem)

    path = cfg.out_prefix + ".recon"
    write_recon(path, result, header_lines=cfg.echo_lines())
    values = result.value_array(part.pixel_count)
    grid = cfg.mesh_file is None
    rows = cfg.grid_rows if grid else None
    cols = cfg.grid_cols if grid else None
    if grid and np.isfinite(values).any():
        _write_raster(cfg.out_prefix + ".pgm", values, rows, cols)
    _write_csv(cfg.out_prefix + ".csv", values, rows, cols)
    out.write(f"wrote {path}\n")
    if result.status != reconstruction.CONVERGED:
        out.write(f"status: {result.status}\n")
        return EXIT_INCONSISTENT
    return EXIT_OK


def cmd_msweep(cfg, out=sys.stdout):
    """Tabulate lambda_min over truncation orders for a grid of trial values."""
    if cfg.m is None:
        raise ConfigError("msweep needs the step index m")
    if not cfg.t_list:
        raise ConfigError("msweep needs t_list")
    if cfg.phantom is None:
        raise ConfigError("msweep needs phantom values for the known prefix")
    mesh, part = _build_domain(cfg)
    order = _choose_order(cfg, mesh, part)
    problem = _build_problem(cfg, mesh, part, order)
    m_list = cfg.M_list or tuple(range(1, problem.measured.m + 1))
    if not 1 <= cfg.m <= len(order):
        raise ConfigError(f"m={cfg.m} outside the ordering length {len(order)}")
    known = [float(cfg.phantom[order[i]]) for i in range(cfg.m - 1)]
    tol = cfg.tol_loewner or default_tolerance(problem.measured.provenance.noise_level)

    def work(t):
        return t, m_sweep(problem, cfg.m, float(t), m_list, known)

    with ThreadPoolExecutor(max_workers=min(solver_threads(), len(cfg.t_list))) as pool:
        results = list(pool.map(work, cfg.t_list))

    path = cfg.out_prefix + "_msweep.csv"
    with open(path, "w") as f:
        f.write(f"# tolerance = {tol:.17g} (relative to scale column)\n")
        f.write("t,M,lambda_min\n")
        for t, rows in results:
            for mm, lam, _scale in rows:
                f.write(f"{t:.17g},{mm},{lam:.17g}\n")
    out.write(f"wrote {path}\n")
    return EXIT_OK


_COMMANDS = {
    "validate": cmd_validate,
    "simulate": cmd_simulate,
    "reconstruct": cmd_reconstruct,
    "msweep": cmd_msweep,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="eitrecon",
        description="Pixel-by-pixel EIT reconstruction from boundary measurements",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", required=True, help="path to a key = value config file")
        p.add_argument(
            "--override",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config entry (repeatable)",
        )
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, args.override)
        return _COMMANDS[args.command](cfg)
    except (ConfigError, DataError, GeometryError, EitreconError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
