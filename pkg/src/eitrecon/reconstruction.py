"""Sequential pixel-by-pixel conductivity reconstruction.

For each pixel in a valid ordering, the unknown value is the point where
a monotone boolean predicate flips.  The predicate compares the measured
ND matrix against the ND matrix of a hybrid field: already-reconstructed
values behind, a trial value t on the current pixel, and an extreme
value ahead — perfectly conducting for the upper test (the measured map
must dominate), perfectly insulating for the lower test (the trial map
must dominate, which solves on the built-up region only since insulated
elements drop out of the PDE).

The flip point is bracketed by geometric expansion and located by
bisection in log scale, which respects the problem's multiplicative
symmetry (scaling sigma by c scales the ND map by 1/c).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .errors import DataError, GeometryError, ModelError
from .forward import CONDUCTING, INSULATING, ConductivityField, assemble_system
from .loewner import default_tolerance, loewner_geq
from .ndmap import NDMatrix, build_basis, assemble_nd

UPPER = "upper"
LOWER = "lower"

CONVERGED = "Converged"
CAP_HIT = "BracketCapHit"
INCONSISTENT = "Inconsistent"

BRACKET_CAP = (1e-6, 1e6)
EXPANSION = 4.0


@dataclass
class ReconProblem:
    """One reconstruction task: mesh, data, variant, and tolerances.

    ``order`` defaults to the partition's stored order and may be a
    partial (ROI) ordering; it is validated on construction.
    ``tol_loewner`` defaults to the noise-aware policy derived from the
    data's declared noise level.
    """

    mesh: object
    partition: object
    measured: NDMatrix
    variant: str = UPPER
    order: tuple = None
    tol_loewner: float = None
    tol_bisect: float = 1e-4
    bracket_cap: tuple = BRACKET_CAP
    forward_refinement: int = 0
    basis: object = None

    def __post_init__(self):
        if self.variant not in (UPPER, LOWER):
            raise DataError(f"unknown variant {self.variant!r}; expected 'upper' or 'lower'")
        if self.order is None:
            self.order = tuple(int(p) for p in self.partition.order)
        else:
            self.order = tuple(int(p) for p in self.order)
        report = geometry.validate_ordering(self.partition, self.mesh, self.order)
        if not report.valid:
            raise GeometryError("invalid ordering: " + "; ".join(report.failures))
        if self.tol_loewner is None:
            self.tol_loewner = default_tolerance(self.measured.provenance.noise_level)
        if self.tol_bisect <= 0:
            raise DataError("tol_bisect must be positive")
        lo, hi = self.bracket_cap
        if not (0 < lo < hi):
            raise DataError("bracket_cap must satisfy 0 < lo < hi")
        # mesh used by the test-operator solves; refining it beyond the
        # data's refinement keeps the one-sided Galerkin model error on
        # the benign side of the monotonicity predicates
        if self.forward_refinement < 0:
            raise DataError("forward_refinement must be nonnegative")
        self.fw_mesh, self.fw_partition = self.mesh, self.partition
        for _ in range(self.forward_refinement):
            self.fw_mesh, self.fw_partition = geometry.refine_mesh(
                self.fw_mesh, self.fw_partition
            )
        if self.basis is None:
            self.basis = build_basis(self.fw_mesh, self.measured.m)
        elif self.basis.m_max < self.measured.m:
            raise DataError(
                f"basis holds {self.basis.m_max} functions, data needs {self.measured.m}"
            )


@dataclass(frozen=True)
class PixelResult:
    """Reconstruction outcome for one pixel of the ordering.

    ``value`` is the log-scale bracket midpoint.  ``t_verified`` is the
    bracket end on the side where the operator inequality was last seen
    to hold; the sweep threads this value into later steps because an
    underestimated known value (upper variant; overestimated for lower)
    leaves the later predicates false for every trial t.
    """

    pixel: int
    value: float
    t_lo: float
    t_hi: float
    lambda_min: float
    flips: int
    status: str
    n_solves: int = 0
    t_verified: float = None


@dataclass(frozen=True)
class ReconResult:
    """Values and diagnostics for a full (or partial) sweep."""

    order: tuple
    pixels: tuple
    status: str

    def values(self):
        """Mapping pixel -> reconstructed value (converged pixels only)."""
        return {
            r.pixel: r.value
            for r in self.pixels
            if r.status == CONVERGED and r.value is not None
        }

    def value_array(self, n_pixels):
        out = np.full(n_pixels, np.nan)
        for p, v in self.values().items():
            out[p] = v
        return out


def test_matrix(problem, m, t, known):
    """ND matrix of the hybrid test field at step m with trial value t.

    ``m`` is the 1-based position in the problem's ordering; ``known``
    lists the m-1 values already reconstructed for the earlier
    positions.  Pixels after position m (and any pixels outside an ROI
    ordering) take the variant's extreme value.
    """
    order = problem.order
    if not 1 <= m <= len(order):
        raise DataError(f"step index {m} outside 1..{len(order)}")
    if len(known) != m - 1:
        raise DataError(f"step {m} needs {m - 1} known values, got {len(known)}")
    lo, hi = problem.bracket_cap
    if not (lo <= t <= hi):
        raise DataError(f"trial value {t} outside the bracket cap {problem.bracket_cap}")
    extreme = INSULATING if problem.variant == LOWER else CONDUCTING
    values = np.full(problem.partition.pixel_count, extreme)
    for pos in range(m - 1):
        values[order[pos]] = known[pos]
    values[order[m - 1]] = t
    sigma = ConductivityField(values)
    system = assemble_system(
        problem.fw_mesh,
        problem.fw_partition,
        sigma,
        allow_dead_gamma=problem.variant == LOWER,
    )
    return assemble_nd(system, problem.basis, problem.measured.m)


def _predicate(problem, m, known, tol):
    """Monotone-in-t verdict function for the bisection.

    Upper test: holds iff measured >= test(t); false below the true
    value, true at and above it.  Lower test: holds iff test(t) >=
    measured; true at and below, false above.  Either way the set where
    it holds is a half line with the flip at the pixel's value.
    """
    a = problem.measured

    def check(t):
        b = test_matrix(problem, m, t, known)
        if problem.variant == LOWER:
            return loewner_geq(b, a, tol)
        return loewner_geq(a, b, tol)

    return check


def pixel_bisect(problem, m, known, start=None, tol=None):
    """Locate the predicate flip for step m by expansion plus bisection.

    Returns a PixelResult; status is ``BracketCapHit`` when no flip was
    found inside the bracket cap (inconsistent data, excessive noise, or
    a wrong partition), in which case ``value`` is the cap boundary.
    """
    tol = problem.tol_loewner if tol is None else tol
    check = _predicate(problem, m, known, tol)
    cap_lo, cap_hi = problem.bracket_cap
    pixel = problem.order[m - 1]
    # "holds on the high side" for the upper variant, low side for lower
    high_side = problem.variant == UPPER

    t0 = float(start) if start is not None else 1.0
    t0 = min(max(t0, cap_lo), cap_hi)
    n_solves = 1
    v0 = check(t0)
    flips = 0

    def make_cap_result(t_bound, verdict):
        return PixelResult(
            pixel=pixel,
            value=t_bound,
            t_lo=t_bound,
            t_hi=t_bound,
            lambda_min=verdict.lambda_min,
            flips=flips,
            status=CAP_HIT,
            n_solves=n_solves,
            t_verified=t_bound,
        )

    # expand geometrically until the verdict changes; v_true tracks the
    # most recent verdict on the side where the predicate holds
    holds_towards_hi = v0.holds == high_side
    v_true = v0 if v0.holds else None
    v_last = v0
    if holds_towards_hi:
        # flip is below the start; walk down
        lo_t, hi_t = None, t0
        t = t0
        while True:
            if t <= cap_lo * (1 + 1e-12):
                return make_cap_result(cap_lo, v_last)
            t = max(t / EXPANSION, cap_lo)
            flips += 1
            n_solves += 1
            v = check(t)
            v_last = v
            if v.holds:
                v_true = v
            if v.holds != v0.holds:
                lo_t = t
                break
            hi_t = t
    else:
        lo_t, hi_t = t0, None
        t = t0
        while True:
            if t >= cap_hi * (1 - 1e-12):
                return make_cap_result(cap_hi, v_last)
            t = min(t * EXPANSION, cap_hi)
            flips += 1
            n_solves += 1
            v = check(t)
            v_last = v
            if v.holds:
                v_true = v
            if v.holds != v0.holds:
                hi_t = t
                break
            lo_t = t

    # invariant: verdict differs between lo_t and hi_t
    while (hi_t - lo_t) / lo_t > problem.tol_bisect:
        mid = math.sqrt(lo_t * hi_t)
        n_solves += 1
        vm = check(mid)
        if vm.holds == high_side:
            hi_t = mid
        else:
            lo_t = mid
        if vm.holds:
            v_true = vm

    value = math.sqrt(lo_t * hi_t)
    n_solves += 1
    v_final = check(value)

    # Thread a trial value whose test matrix clears half the slack, not
    # one sitting exactly at the threshold: later steps judge the
    # inherited field at the same tolerance, and a threshold-resonant
    # deficit would leave their predicate false for every t.
    def cleared(v):
        return v.lambda_min >= -0.5 * tol * v.scale

    t_v = hi_t if high_side else lo_t
    v_v = v_true
    if not cleared(v_v):
        t_bad = t_v
        while True:
            nxt = min(t_v * 2.0, cap_hi) if high_side else max(t_v / 2.0, cap_lo)
            if nxt == t_v:
                break  # cap reached; thread the best available value
            t_bad, t_v = t_v, nxt
            n_solves += 1
            v_v = check(t_v)
            if cleared(v_v):
                # pull the cleared point back toward the flip
                for _ in range(4):
                    mid = math.sqrt(t_bad * t_v)
                    n_solves += 1
                    vm = check(mid)
                    if cleared(vm):
                        t_v, v_v = mid, vm
                    else:
                        t_bad = mid
                break

    return PixelResult(
        pixel=pixel,
        value=value,
        t_lo=lo_t,
        t_hi=hi_t,
        lambda_min=v_final.lambda_min,
        flips=flips,
        status=CONVERGED,
        n_solves=n_solves,
        t_verified=t_v,
    )


def reconstruct(problem):
    """Run the sequential sweep over the problem's ordering.

    Each step's verified bracket end feeds the next step's known region
    (see PixelResult.t_verified).  The first bracket-cap hit aborts the
    sweep (later pixels depend on the failed one); unreached pixels are
    reported as Inconsistent with no value.
    """
    known = []
    results = []
    status = CONVERGED
    order = problem.order
    for m in range(1, len(order) + 1):
        start = known[-1] if known else None
        res = pixel_bisect(problem, m, known, start=start)
        results.append(res)
        if res.status != CONVERGED:
            status = CAP_HIT
            for pos in range(m, len(order)):
                results.append(
                    PixelResult(
                        pixel=order[pos],
                        value=None,
                        t_lo=math.nan,
                        t_hi=math.nan,
                        lambda_min=math.nan,
                        flips=0,
                        status=INCONSISTENT,
                    )
                )
            break
        known.append(res.t_verified)
    return ReconResult(order=order, pixels=tuple(results), status=status)


def m_sweep(problem, m, t, m_list, known):
    """Smallest eigenvalue of the projected test difference as M grows.

    For the upper variant this is ``lambda_min`` of the leading M-by-M
    block of (measured - test(t)); for the lower variant of
    (test(t) - measured).  Exposes how many boundary functions are
    needed before a too-small (upper) or too-large (lower) trial value
    is rejected.

    Returns a list of (M, lambda_min, scale) rows, where scale is the
    reference for the relative tolerance.
    """
    m_list = sorted(set(int(v) for v in m_list))
    if not m_list:
        raise DataError("empty M list")
    if m_list[0] < 1:
        raise DataError("M values must be positive")
    if m_list[-1] > problem.measured.m:
        raise DataError(
            f"M={m_list[-1]} exceeds the measured data order {problem.measured.m}"
        )
    b = test_matrix(problem, m, t, known)
    a = problem.measured.entries
    diff = a - b.entries if problem.variant == UPPER else b.entries - a
    diff = 0.5 * (diff + diff.T)
    rows = []
    for mm in m_list:
        sub = diff[:mm, :mm]
        lam = float(np.linalg.eigvalsh(sub)[0])
        sa = float(np.abs(np.linalg.eigvalsh(a[:mm, :mm])).max())
        sb = float(np.abs(np.linalg.eigvalsh(b.entries[:mm, :mm])).max())
        rows.append((mm, lam, max(sa, sb)))
    return rows


# ---------------------------------------------------------------------------
# plain-text result format
#
#   # header comments (config echo)
#   p <pixel> <value> <t_lo> <t_hi> <lambda_min> <status>


def write_recon(path, result, header_lines=()):
    """Write a reconstruction result file (one 'p' line per pixel)."""
    with open(path, "w") as f:
        for line in header_lines:
            f.write(f"# {line}\n")
        f.write(f"# order: {','.join(str(p) for p in result.order)}\n")
        f.write(f"# status: {result.status}\n")
        for r in result.pixels:
            value = "nan" if r.value is None else f"{r.value:.17g}"
            f.write(
                f"p {r.pixel} {value} {r.t_lo:.17g} {r.t_hi:.17g} "
                f"{r.lambda_min:.17g} {r.status}\n"
            )


def read_recon(path):
    """Parse a result file back into a ReconResult (values and diagnostics)."""
    pixels = []
    order = []
    status = CONVERGED
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line.startswith("# order:"):
                order = [int(tok) for tok in line[len("# order:"):].split(",") if tok.strip()]
                continue
            if line.startswith("# status:"):
                status = line[len("# status:"):].strip()
                continue
            if not line or line.startswith("#"):
                continue
            tok = line.split()
            if tok[0] != "p" or len(tok) != 7:
                raise DataError(f"{path}: malformed result line {line!r}")
            value = float(tok[2])
            pixels.append(
                PixelResult(
                    pixel=int(tok[1]),
                    value=None if math.isnan(value) else value,
                    t_lo=float(tok[3]),
                    t_hi=float(tok[4]),
                    lambda_min=float(tok[5]),
                    flips=0,
                    status=tok[6],
                )
            )
    return ReconResult(order=tuple(order), pixels=tuple(pixels), status=status)
