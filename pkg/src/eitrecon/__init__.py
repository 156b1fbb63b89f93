"""Pixel-by-pixel EIT conductivity reconstruction from finite partial-boundary data."""

from .errors import (
    BasisError,
    ConfigError,
    DataError,
    EitreconError,
    GeometryError,
    MeshError,
    ModelError,
)
from .geometry import (
    Mesh,
    Partition,
    ValidityReport,
    build_structured_mesh,
    layer_order,
    read_mesh,
    refine_mesh,
    roi_order,
    validate_ordering,
    write_mesh,
)
from .forward import (
    CONDUCTING,
    INSULATING,
    ConductivityField,
    NeumannSolution,
    NeumannSystem,
    assemble_system,
    pixel_energy,
    solve_neumann,
)
from .ndmap import (
    BoundaryBasis,
    NDMatrix,
    Provenance,
    add_noise,
    assemble_nd,
    build_basis,
    read_ndmatrix,
    write_ndmatrix,
)
from .loewner import LoewnerVerdict, default_tolerance, loewner_geq
from .reconstruction import (
    ReconProblem,
    ReconResult,
    m_sweep,
    pixel_bisect,
    read_recon,
    reconstruct,
    test_matrix,
    write_recon,
)
from .config import RunConfig, load_config

__version__ = "0.1.0"
