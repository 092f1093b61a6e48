# autocat/schemas/run_config.py
"""
Run configuration for `solve`, `branch` and `shoot`.

Either JSON or INI-style text with [problem], [domain], [solver],
[continuation], [shoot] and [output] blocks of `key = value` lines. Unknown
keys are rejected in every block. AUTOCAT_OUTPUT_DIR overrides
[output] directory.
"""

import configparser
import json
import os
import re
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..errors import ConfigError
from ..programs.models_branch import ContinuationConfig
from ..programs.models_grid import Domain
from ..programs.models_problem import ProblemParams
from ..programs.models_solve import ShootConfig, SolveMethod, SolverConfig

OUTPUT_DIR_ENV = "AUTOCAT_OUTPUT_DIR"
INTEGER = re.compile(r"[+-]?\d+")
BLOCKS = ("problem", "domain", "solver", "continuation", "shoot", "output")


def _split(value: Any) -> Any:
    if isinstance(value, str):
        return [x.strip() for x in value.split(",") if x.strip()]
    if isinstance(value, (int, float)):
        return [value]
    return value


class ProblemBlock(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    m: float = Field(..., gt=0, le=1)
    n: float = Field(..., gt=0)
    lam: float = Field(0.0, alias="lambda")
    dim: int = Field(1, ge=1)
    lambdas: List[float] = Field(default_factory=list)

    @field_validator("lambdas", mode="before")
    @classmethod
    def _split_lambdas(cls, v: Any) -> Any:
        return _split(v)

    def params(self) -> ProblemParams:
        return ProblemParams(m=self.m, n=self.n, lam=self.lam, dim=self.dim)


class DomainBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["interval", "radial_ball"] = "interval"
    size: float = Field(1.0, gt=0)  # interval length or ball radius
    cells: int = Field(128, ge=4)

    def domain(self, dim: int) -> Domain:
        if self.kind == "interval":
            if dim != 1:
                raise ConfigError(f"[domain] kind = interval needs dim = 1, got {dim}")
            return Domain.interval(0.0, self.size)
        return Domain.radial_ball(dim, self.size)


class SolverBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    method: SolveMethod = "monotone_iteration"
    tol: float = Field(1e-10, gt=0, lt=1)
    max_iter: int = Field(500, gt=0)
    eps_reg: float = Field(1e-12, gt=0)
    damping: float = Field(1.0, gt=0, le=1)

    @field_validator("method")
    @classmethod
    def _solving_method(cls, v: str) -> str:
        if v == "euler_lagrange":
            raise ValueError("euler_lagrange computes functional constants, not solutions")
        return v

    def solver_config(self) -> SolverConfig:
        return SolverConfig(tol=self.tol, max_iter=self.max_iter, eps_reg=self.eps_reg, damping=self.damping)


class ShootBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    a: Optional[float] = Field(None, gt=0)
    a_lo: Optional[float] = Field(None, gt=0)
    a_hi: Optional[float] = Field(None, gt=0)
    rtol: float = Field(1e-11, gt=0)
    atol: float = Field(1e-13, gt=0)
    r_max: float = Field(200.0, gt=0)
    samples: int = Field(401, ge=3)
    slope_tol: float = Field(1e-8, gt=0)

    def shoot_config(self) -> ShootConfig:
        return ShootConfig(
            rtol=self.rtol, atol=self.atol, r_max=self.r_max, samples=self.samples, slope_tol=self.slope_tol
        )


class OutputBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: str = "autocat_out"
    formats: List[Literal["csv", "json"]] = Field(default_factory=lambda: ["csv", "json"])

    @field_validator("formats", mode="before")
    @classmethod
    def _split_formats(cls, v: Any) -> Any:
        return _split(v)


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    problem: ProblemBlock
    domain: DomainBlock = Field(default_factory=DomainBlock)
    solver: SolverBlock = Field(default_factory=SolverBlock)
    continuation: ContinuationConfig = Field(default_factory=ContinuationConfig)
    shoot: ShootBlock = Field(default_factory=ShootBlock)
    output: OutputBlock = Field(default_factory=OutputBlock)


# --------------------------------------------------
# Loading
# --------------------------------------------------


def _read_ini(text: str) -> Dict[str, Dict[str, str]]:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep key case
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    unknown = [s for s in parser.sections() if s not in BLOCKS]
    if unknown:
        raise ConfigError(f"unknown config block(s): {', '.join(unknown)}")
    # integer-looking values go in as ints so Literal[1, -1] fields accept them
    return {
        section: {k: int(v) if INTEGER.fullmatch(v.strip()) else v for k, v in parser.items(section)}
        for section in parser.sections()
    }


def _format_errors(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        where = ".".join(str(x) for x in err["loc"])
        parts.append(f"{where}: {err['msg']}")
    return "; ".join(parts)


def parse_run_config(text: str, fmt: Literal["ini", "json"] = "ini") -> RunConfig:
    if fmt == "json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"cannot parse config: {exc}") from exc
    else:
        raw = _read_ini(text)
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping of blocks")

    env_dir = os.environ.get(OUTPUT_DIR_ENV)
    if env_dir:
        raw.setdefault("output", {})
        raw["output"]["directory"] = env_dir
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc)) from exc


def load_run_config(path: str) -> RunConfig:
    """Read a config file; JSON when the name ends in .json, INI otherwise."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_run_config(text, "json" if path.lower().endswith(".json") else "ini")
