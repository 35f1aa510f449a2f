"""Scenario files: flat line-oriented key = value format with [sections].

Field literals are lists of (frequency-vector, cos-coefficient,
sin-coefficient) triples, one per line.  The format is documented in the
README grammar; parse errors carry line numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from pathlib import Path

from .fields import TrigField

KNOWN_CHECKS = (
    "obstruction",
    "solve",
    "splitting",
    "tangency",
    "foliation",
    "invariant-form",
    "frobenius",
    "contact",
    "reeb",
    "charfol",
)

# checks that cannot run unless another check ran first
CHECK_DEPENDENCIES = {
    "tangency": ("solve", "splitting"),
    "foliation": ("solve",),
    "invariant-form": ("solve",),
    "charfol": ("solve",),
}

_FIELD_SECTIONS = ("transfer", "gamma", "surface", "alpha.dx", "alpha.dy", "alpha.dt")
_KV_SECTIONS = ("scenario", "grids", "tolerances", "expect")

DEFAULT_TOLERANCES = {"zero": 1e-10, "nonvanishing": 1e-6, "obstruction": 1e-10}
DEFAULT_GRIDS = {"base": (256, 256), "volume": (128, 128, 64), "plot": (64, 64, 16)}


class ScenarioError(ValueError):
    """Parse or validation failure, with file/line context when available."""


@dataclass
class Scenario:
    name: str
    matrix: list
    checks: list
    order: int = 50
    seed: int = 0
    m_max: int = 8
    blocks: int = 3
    theta_grid: int = 64
    samples: int = 10000
    newton_seeds: int = 64
    grids: dict = dfield(default_factory=lambda: dict(DEFAULT_GRIDS))
    tolerances: dict = dfield(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    expect: dict = dfield(default_factory=dict)
    transfer: TrigField | None = None
    gamma: TrigField | None = None
    surface: TrigField | None = None
    alpha: OneFormSpec | None = None

    def to_dict(self):
        """Canonical representation; hashed to fingerprint the inputs."""

        def field_dict(f):
            if f is None:
                return None
            return {
                ",".join(map(str, k)): [c.real, c.imag]
                for k, c in sorted(f.coeffs.items())
            }

        return {
            "name": self.name,
            "matrix": self.matrix,
            "checks": list(self.checks),
            "order": self.order,
            "seed": self.seed,
            "m_max": self.m_max,
            "blocks": self.blocks,
            "theta_grid": self.theta_grid,
            "samples": self.samples,
            "newton_seeds": self.newton_seeds,
            "grids": {k: list(v) for k, v in sorted(self.grids.items())},
            "tolerances": dict(sorted(self.tolerances.items())),
            "expect": dict(sorted(self.expect.items())),
            "transfer": field_dict(self.transfer),
            "gamma": field_dict(self.gamma),
            "surface": field_dict(self.surface),
            "alpha": None
            if self.alpha is None
            else {
                "dx": field_dict(self.alpha.dx),
                "dy": field_dict(self.alpha.dy),
                "dt": field_dict(self.alpha.dt),
            },
        }


@dataclass
class OneFormSpec:
    dx: TrigField
    dy: TrigField
    dt: TrigField


def _parse_field_rows(rows, dim, label):
    coeffs = {}
    f = TrigField.zero(dim)
    for lineno, parts in rows:
        if len(parts) != dim + 2:
            raise ScenarioError(
                f"line {lineno}: field row in [{label}] needs {dim} integers "
                f"and 2 coefficients, got {len(parts)} tokens"
            )
        try:
            k = tuple(int(v) for v in parts[:dim])
            cos, sin = float(parts[dim]), float(parts[dim + 1])
        except ValueError as exc:
            raise ScenarioError(f"line {lineno}: {exc}") from None
        f = f + TrigField.harmonic(dim, k, cos=cos, sin=sin)
    return f


def parse_scenario(path) -> Scenario:
    path = Path(path)
    kv = {s: {} for s in _KV_SECTIONS}
    rows = {s: [] for s in _FIELD_SECTIONS}
    section = None
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _KV_SECTIONS + _FIELD_SECTIONS:
                raise ScenarioError(f"{path.name} line {lineno}: unknown section [{section}]")
            continue
        if section is None:
            raise ScenarioError(f"{path.name} line {lineno}: content before any [section]")
        if section in _KV_SECTIONS:
            if "=" not in line:
                raise ScenarioError(f"{path.name} line {lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            kv[section][key] = (lineno, value)
        else:
            rows[section].append((lineno, line.split()))

    sc = kv["scenario"]

    def need(key):
        if key not in sc:
            raise ScenarioError(f"{path.name}: missing required key '{key}' in [scenario]")
        return sc[key][1]

    def opt_int(key, default):
        if key not in sc:
            return default
        lineno, value = sc[key]
        try:
            return int(value)
        except ValueError:
            raise ScenarioError(f"{path.name} line {lineno}: '{key}' must be an integer") from None

    matrix_tokens = need("matrix").split()
    if len(matrix_tokens) != 4:
        raise ScenarioError(f"{path.name}: 'matrix' must have 4 integer entries (row-major 2x2)")
    matrix = [[int(matrix_tokens[0]), int(matrix_tokens[1])],
              [int(matrix_tokens[2]), int(matrix_tokens[3])]]

    checks = need("checks").split()
    for c in checks:
        if c not in KNOWN_CHECKS:
            raise ScenarioError(f"{path.name}: unknown check '{c}' (known: {', '.join(KNOWN_CHECKS)})")
    for c in checks:
        for dep in CHECK_DEPENDENCIES.get(c, ()):
            if dep not in checks:
                raise ScenarioError(f"{path.name}: check '{c}' requires check '{dep}'")

    grids = dict(DEFAULT_GRIDS)
    for key, (lineno, value) in kv["grids"].items():
        if key not in DEFAULT_GRIDS:
            raise ScenarioError(f"{path.name} line {lineno}: unknown grid '{key}'")
        try:
            dims = tuple(int(v) for v in value.split())
        except ValueError:
            raise ScenarioError(f"{path.name} line {lineno}: grid sizes must be integers") from None
        if len(dims) != len(DEFAULT_GRIDS[key]):
            raise ScenarioError(
                f"{path.name} line {lineno}: grid '{key}' needs {len(DEFAULT_GRIDS[key])} sizes"
            )
        grids[key] = dims

    tolerances = dict(DEFAULT_TOLERANCES)
    for key, (lineno, value) in kv["tolerances"].items():
        if key not in DEFAULT_TOLERANCES:
            raise ScenarioError(f"{path.name} line {lineno}: unknown tolerance '{key}'")
        tolerances[key] = float(value)

    expect = {key: value for key, (_, value) in kv["expect"].items()}
    for key in expect:
        if key not in checks:
            raise ScenarioError(f"{path.name}: expectation for '{key}' but the check is not requested")

    transfer = _parse_field_rows(rows["transfer"], 2, "transfer") if rows["transfer"] else None
    gamma = _parse_field_rows(rows["gamma"], 2, "gamma") if rows["gamma"] else None
    if transfer is not None and gamma is not None:
        raise ScenarioError(f"{path.name}: [transfer] and [gamma] are mutually exclusive")
    surface = _parse_field_rows(rows["surface"], 2, "surface") if rows["surface"] else None

    alpha = None
    if any(rows[s] for s in ("alpha.dx", "alpha.dy", "alpha.dt")):
        alpha = OneFormSpec(
            dx=_parse_field_rows(rows["alpha.dx"], 3, "alpha.dx"),
            dy=_parse_field_rows(rows["alpha.dy"], 3, "alpha.dy"),
            dt=_parse_field_rows(rows["alpha.dt"], 3, "alpha.dt"),
        )

    cocycle_checks = {"obstruction", "solve", "splitting", "tangency", "foliation",
                      "invariant-form", "charfol"}
    if any(c in cocycle_checks for c in checks) and transfer is None and gamma is None:
        raise ScenarioError(f"{path.name}: requested checks need a [transfer] or [gamma] section")
    if "charfol" in checks and surface is None:
        raise ScenarioError(f"{path.name}: check 'charfol' needs a [surface] section")
    if ("frobenius" in checks or "contact" in checks) and alpha is None and "splitting" not in checks:
        raise ScenarioError(
            f"{path.name}: 'frobenius'/'contact' need either [alpha.*] sections or the "
            f"'splitting' check to build the joint-bundle form"
        )
    if "reeb" in checks and alpha is None:
        raise ScenarioError(f"{path.name}: check 'reeb' needs [alpha.*] sections")

    return Scenario(
        name=need("name"),
        matrix=matrix,
        checks=checks,
        order=opt_int("order", 50),
        seed=opt_int("seed", 0),
        m_max=opt_int("m-max", 8),
        blocks=opt_int("blocks", 3),
        theta_grid=opt_int("theta-grid", 64),
        samples=opt_int("samples", 10000),
        newton_seeds=opt_int("newton-seeds", 64),
        grids=grids,
        tolerances=tolerances,
        expect=expect,
        transfer=transfer,
        gamma=gamma,
        surface=surface,
        alpha=alpha,
    )
