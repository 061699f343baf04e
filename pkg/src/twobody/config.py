"""Default numerical tolerances and the flat ``key=value`` config format."""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path


@dataclass(frozen=True)
class Tolerances:
    """Tolerances shared across modules.

    Values are absolute unless the consumer states a scale.
    """

    fiber: float = 1e-9  # Point vs Ellipse on fiber_rhs
    sphere: float = 1e-10  # Casimir-sphere membership checks
    variety: float = 1e-8  # compactified residual precondition
    rank: float = 1e-9  # singular values relative to the largest
    root_refine: float = 1e-12  # width of refined simple-root intervals
    root_cluster: float = 1e-8  # width below which a multi-root interval is a cluster
    bifurcation: float = 1e-6  # implicit curve residual for membership in the locus
    trace: float = 1e-10  # bisection width on h when tracing the locus
    energy: float = 1e-9  # level-set residual, relative to the term scale
    blowup: float = 1e12  # |xi| beyond which integration stops


DEFAULT_TOLERANCES = Tolerances()


@dataclass
class RunConfig:
    """Settings for one CLI invocation.

    Built from defaults, then a config file, then command-line flags, each
    overriding the previous.
    """

    tolerances: dict[str, float] = field(
        default_factory=lambda: {f.name: getattr(DEFAULT_TOLERANCES, f.name) for f in fields(Tolerances)}
    )
    grid: dict[str, int] = field(default_factory=lambda: {"n_theta": 512, "n_phi": 1024, "f_theta": 10_000})
    seed: int = 0
    out: str | None = None
    fmt: str = "json"

    def validate(self) -> None:
        for name, value in self.tolerances.items():
            if not value > 0:
                raise ValueError(f"tolerance {name!r} must be positive, got {value}")
        for name, value in self.grid.items():
            if value < 16:
                raise ValueError(f"grid size {name!r} must be at least 16, got {value}")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"format must be 'csv' or 'json', got {self.fmt!r}")

    def tolerance_set(self) -> Tolerances:
        known = {f.name for f in fields(Tolerances)}
        return replace(DEFAULT_TOLERANCES, **{k: v for k, v in self.tolerances.items() if k in known})


def parse_config_text(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse flat ``key=value`` lines into a :class:`RunConfig`.

    Recognised keys are ``seed``, ``out``, ``format``, ``tol.<name>`` and
    ``grid.<name>``.  Blank lines and ``#`` comments are ignored.

    >>> cfg = parse_config_text("seed = 7\\ntol.fiber=1e-8\\ngrid.n_theta=256")
    >>> cfg.seed, cfg.tolerances["fiber"], cfg.grid["n_theta"]
    (7, 1e-08, 256)
    """
    cfg = base if base is not None else RunConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "seed":
            cfg.seed = int(value)
        elif key == "out":
            cfg.out = value
        elif key == "format":
            cfg.fmt = value
        elif key.startswith("tol."):
            cfg.tolerances[key[4:]] = float(value)
        elif key.startswith("grid."):
            cfg.grid[key[5:]] = int(value)
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    cfg.validate()
    return cfg


def load_config(path: str | Path, base: RunConfig | None = None) -> RunConfig:
    return parse_config_text(Path(path).read_text(), base)
