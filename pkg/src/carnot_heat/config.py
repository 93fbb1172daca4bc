"""Run configuration: a flat ``section.key = value`` text format.

Example::

    # 1-D reaction-diffusion run
    problem.group = euclidean:1
    problem.lower = 0
    problem.upper = 1
    problem.n_cells = 128
    problem.p = 2
    problem.u0 = product-sine
    solver.output_stride = 100
    output.emit_plots = true

Blank lines and ``#`` comments are ignored.  Every key is optional; unknown
keys are errors.  List values are comma separated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvalidArgument
from .group import by_name
from .grid import Grid, GridFunction, read_csv
from .solver import ProblemSpec, SolverConfig

__all__ = ["RunConfig", "parse_config", "load_config", "build_problem", "build_solver_config", "initial_data"]


def _bool(s: str) -> bool:
    low = s.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(x) for x in s.split(","))


def _ints(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in s.split(","))


# key -> (parser, default)
SCHEMA = {
    "problem.group": (str, "euclidean:1"),
    "problem.lower": (_floats, (0.0,)),
    "problem.upper": (_floats, (1.0,)),
    "problem.n_cells": (_ints, (128,)),
    "problem.p": (float, 2.0),
    "problem.beta": (float, 2.5),
    "problem.q": (float, 2.0),
    "problem.gamma": (float, 1.0),
    "problem.alpha": (float, 1.0),
    "problem.T": (float, 0.5),
    "problem.u0": (str, "product-sine"),
    "problem.u0_amplitude": (float, 1.0),
    "solver.eps_reg": (float, SolverConfig.eps_reg),
    "solver.cfl_safety": (float, SolverConfig.cfl_safety),
    "solver.output_stride": (int, 1000),
    "solver.max_steps": (int, SolverConfig.max_steps),
    "solver.blowup_threshold": (float, SolverConfig.blowup_threshold),
    "solver.compare_atol": (float, SolverConfig.compare_atol),
    "solver.compare_rtol": (float, SolverConfig.compare_rtol),
    "barrier.eps": (float, 0.5),
    "barrier.samples": (int, 1000),
    "output.directory": (str, "out"),
    "output.stride": (int, 1),
    "output.emit_plots": (_bool, False),
    "verify.group": (str, "heisenberg:1"),
    "verify.n_coarse": (int, 64),
    "verify.samples": (int, 100_000),
}


@dataclass(frozen=True)
class RunConfig:
    values: dict
    # raw strings as written, for echoing into manifests
    echo: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    def __getitem__(self, key):
        return self.values[key]


def parse_config(text: str, base_dir=".") -> RunConfig:
    values = {k: d for k, (_, d) in SCHEMA.items()}
    echo = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'", field=None)
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}", field=key)
        if key in echo:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}", field=key)
        try:
            values[key] = SCHEMA[key][0](raw)
        except ValueError as e:
            raise ConfigError(f"{key}: cannot parse {raw!r} ({e})", field=key) from None
        echo[key] = raw
    return RunConfig(values, echo, Path(base_dir))


def load_config(path) -> RunConfig:
    """Read a config file; ``None`` gives the built-in defaults."""
    if path is None:
        return parse_config("")
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror}", field="config") from None
    return parse_config(text, path.parent)


def _grid(rc: RunConfig, refine: int) -> Grid:
    lower, upper, n = rc["problem.lower"], rc["problem.upper"], rc["problem.n_cells"]
    dim = max(len(lower), len(upper), len(n))
    try:
        grid = Grid.uniform(np.broadcast_to(lower, dim), np.broadcast_to(upper, dim), np.broadcast_to(n, dim))
    except (InvalidArgument, ValueError) as e:
        raise ConfigError(f"problem.lower/upper/n_cells: {e}", field="problem.n_cells") from None
    return grid.refine(refine) if refine else grid


def initial_data(rc: RunConfig, grid: Grid, seed: int = 0) -> GridFunction:
    """Resolve the ``problem.u0`` descriptor on ``grid``.

    ``product-sine``: ``A prod_k sin(pi (x_k - a_k) / (b_k - a_k))``.
    ``bump``: smooth compactly supported bump centred in the box, scaled so
    its largest nodal value is ``A``.  ``random``: product-sine times a
    seeded factor in ``[0.75, 1]``.  ``csv:<path>``: nodal values from a file.
    A number gives a constant.
    """
    desc = rc["problem.u0"]
    A = rc["problem.u0_amplitude"]
    lo = np.array(grid.domain.lower).reshape((-1,) + (1,) * grid.dim)
    hi = np.array(grid.domain.upper).reshape((-1,) + (1,) * grid.dim)
    X = (grid.nodes - lo) / (hi - lo)  # unit-box coordinates
    if desc in ("product-sine", "random"):
        vals = A * np.prod(np.sin(np.pi * X), axis=0)
        if desc == "random":
            vals = vals * np.random.default_rng(seed).uniform(0.75, 1.0, grid.shape)
    elif desc == "bump":
        rho2 = np.sum(((X - 0.5) / 0.45) ** 2, axis=0)
        inside = rho2 < 1
        vals = np.zeros(grid.shape)
        vals[inside] = np.exp(1 - 1 / (1 - rho2[inside]))
        vals = A * vals / vals.max()
    elif desc.startswith("csv:"):
        path = rc.base_dir / desc[4:]
        if not path.exists():
            raise ConfigError(f"problem.u0: file {path} does not exist", field="problem.u0")
        try:
            return read_csv(path, grid)
        except (InvalidArgument, ValueError) as e:
            raise ConfigError(f"problem.u0: {e}", field="problem.u0") from None
    else:
        try:
            c = float(desc)
        except ValueError:
            raise ConfigError(f"problem.u0: unknown descriptor {desc!r}", field="problem.u0") from None
        vals = np.full(grid.shape, c)
    return GridFunction(grid, vals)


def build_problem(rc: RunConfig, seed: int = 0, refine: int = 0) -> ProblemSpec:
    try:
        g = by_name(rc["problem.group"])
    except (InvalidArgument, ValueError) as e:
        raise ConfigError(f"problem.group: {e}", field="problem.group") from None
    grid = _grid(rc, refine)
    if grid.dim != g.total_dim:
        raise ConfigError(
            f"problem.lower/upper: box is {grid.dim}-d but {g.name} has dimension {g.total_dim}", field="problem.lower"
        )
    u0 = initial_data(rc, grid, seed)
    try:
        return ProblemSpec(
            g, rc["problem.p"], rc["problem.beta"], rc["problem.q"], rc["problem.gamma"],
            rc["problem.alpha"], rc["problem.T"], u0,
        )
    except InvalidArgument as e:
        raise ConfigError(f"problem: {e}", field="problem") from None


def build_solver_config(rc: RunConfig) -> SolverConfig:
    try:
        return SolverConfig(
            eps_reg=rc["solver.eps_reg"],
            cfl_safety=rc["solver.cfl_safety"],
            output_stride=rc["solver.output_stride"],
            max_steps=rc["solver.max_steps"],
            blowup_threshold=rc["solver.blowup_threshold"],
            compare_atol=rc["solver.compare_atol"],
            compare_rtol=rc["solver.compare_rtol"],
        )
    except InvalidArgument as e:
        raise ConfigError(f"solver: {e}", field="solver") from None
