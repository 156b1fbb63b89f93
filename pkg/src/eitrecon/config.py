"""Run configuration: flat ``key = value`` text files plus overrides.

Lines starting with ``#`` are comments; lists are comma-separated.  The
same config file drives every command; each command reads the keys it
needs and validates them.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .errors import ConfigError

_LIST_KEYS = {"gamma", "phantom", "roi", "order", "t_list", "M_list"}


def _parse_scalar(text):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def parse_config_text(text):
    """Parse config text into a key -> raw string mapping."""
    items = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        items[key] = value
    return items


def apply_overrides(items, overrides):
    """Apply ``key=value`` strings on top of the parsed file."""
    items = dict(items)
    for ov in overrides:
        if "=" not in ov:
            raise ConfigError(f"override {ov!r} is not of the form key=value")
        key, value = (part.strip() for part in ov.split("=", 1))
        items[key] = value
    return items


@dataclass
class RunConfig:
    """Validated run parameters for the command-line workflow."""

    grid_rows: int = None
    grid_cols: int = None
    h: float = None
    gamma: tuple = ()
    mesh_file: str = None
    phantom: tuple = None
    data: str = None
    M: int = None
    variant: str = "upper"
    tol_loewner: float = None
    tol_bisect: float = 1e-4
    noise: float = 0.0
    seed: int = 0
    data_refinement: int = 1
    roi: tuple = None
    order: tuple = None
    out_prefix: str = "eitrecon_out"
    m: int = None
    t_list: tuple = None
    M_list: tuple = None

    @classmethod
    def from_items(cls, items):
        known = {f.name for f in fields(cls)}
        unknown = set(items) - known
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        kwargs = {}
        for key, raw in items.items():
            if key in _LIST_KEYS:
                parts = [p.strip() for p in raw.split(",") if p.strip()]
                kwargs[key] = tuple(_parse_scalar(p) for p in parts)
            else:
                kwargs[key] = _parse_scalar(raw)
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def validate(self):
        if self.mesh_file is None:
            if self.grid_rows is None or self.grid_cols is None or self.h is None:
                raise ConfigError("either mesh_file or grid_rows/grid_cols/h must be set")
            if not self.gamma:
                raise ConfigError("gamma must name at least one side")
        if self.M is not None and self.M < 1:
            raise ConfigError("M must be at least 1")
        if self.noise < 0:
            raise ConfigError("noise must be nonnegative")
        if self.data_refinement < 0:
            raise ConfigError("data_refinement must be nonnegative")
        if self.variant not in ("upper", "lower"):
            raise ConfigError("variant must be 'upper' or 'lower'")
        if self.tol_bisect is not None and self.tol_bisect <= 0:
            raise ConfigError("tol_bisect must be positive")
        if self.tol_loewner is not None and self.tol_loewner <= 0:
            raise ConfigError("tol_loewner must be positive")
        if self.phantom is not None:
            if not self.phantom:
                raise ConfigError("phantom must list at least one value")
            if any(not isinstance(v, (int, float)) or v <= 0 for v in self.phantom):
                raise ConfigError("phantom values must be strictly positive numbers")

    def echo_lines(self):
        """Deterministic key=value echo for output file headers."""
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if isinstance(v, tuple):
                if not v:
                    continue
                v = ",".join(str(x) for x in v)
            out.append(f"{f.name} = {v}")
        return out


def load_config(path, overrides=()):
    with open(path) as f:
        items = parse_config_text(f.read())
    return RunConfig.from_items(apply_overrides(items, overrides))
