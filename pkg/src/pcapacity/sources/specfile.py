"""
Manifold spec files.

A spec file is a JSON document describing either a warped product or a
radially fibered submersion. Unknown keys are rejected and every
validation error names the key it concerns.

Example (the plane as a model manifold):

    {"kind": "warped_product", "base_dim": 2, "sigma": "t",
     "warp": "1", "fiber_dim": 0, "fiber_volume": 1}
"""

import json
import logging
from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..errors import ManifoldError, ProfileError, SpecFileError
from ..models.geometry import ModelManifold, SubmersionSpec
from ..profiles import parse

logger = logging.getLogger(__name__)


class SpecOptions(BaseModel):
    """Per-file overrides of the numerical defaults"""

    model_config = ConfigDict(extra="forbid")

    T_max: Optional[float] = Field(default=None, gt=1)
    rel_tol: Optional[float] = Field(default=None, gt=0)
    margin: Optional[float] = Field(default=None, gt=0)
    grid_size: Optional[int] = Field(default=None, ge=2)


class ManifoldSpecFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["warped_product", "submersion"]
    name: Optional[str] = None
    base_dim: int = Field(ge=1)
    sigma: str
    warp: Optional[str] = None
    fiber_dim: Optional[int] = Field(default=None, ge=0)
    fiber_volume: Optional[float] = Field(default=None, gt=0)
    fiber_volume_fn: Optional[str] = None
    claimed_bound: Optional[float] = Field(default=None, gt=0)
    inner_radius: float = Field(default=1.0, gt=0)
    options: SpecOptions = Field(default_factory=SpecOptions)

    @field_validator("sigma", "warp", "fiber_volume_fn")
    @classmethod
    def _must_parse(cls, value: Optional[str]) -> Optional[str]:
        if value is None:
            return value
        try:
            parse(value)
        except ProfileError as e:
            raise ValueError(f"invalid expression '{value}': {e}") from e
        return value

    @model_validator(mode="after")
    def _check_kind(self) -> "ManifoldSpecFile":
        if self.kind == "submersion":
            if self.fiber_volume_fn is None:
                raise ValueError("fiber_volume_fn is required for kind submersion")
            for key in ("warp", "fiber_dim", "fiber_volume"):
                if getattr(self, key) is not None:
                    raise ValueError(f"{key} is not allowed for kind submersion")
        else:
            if self.fiber_volume_fn is not None:
                raise ValueError("fiber_volume_fn is only allowed for kind submersion")
            if self.claimed_bound is not None:
                raise ValueError("claimed_bound is only allowed for kind submersion")
        return self

    def to_manifold(self) -> ModelManifold:
        if self.kind != "warped_product":
            raise SpecFileError(f"expected kind warped_product, got {self.kind}")
        try:
            return ModelManifold.from_text(
                base_dim=self.base_dim,
                sigma=self.sigma,
                warp=self.warp or "1",
                fiber_dim=0 if self.fiber_dim is None else self.fiber_dim,
                fiber_volume=1.0 if self.fiber_volume is None else self.fiber_volume,
                inner_radius=self.inner_radius,
                name=self.name,
            )
        except ManifoldError as e:
            raise SpecFileError(str(e)) from e

    def to_submersion(self) -> SubmersionSpec:
        if self.kind != "submersion":
            raise SpecFileError(f"expected kind submersion, got {self.kind}")
        try:
            return SubmersionSpec.from_text(
                base_dim=self.base_dim,
                sigma=self.sigma,
                fiber_volume_fn=self.fiber_volume_fn,
                claimed_bound=self.claimed_bound,
                inner_radius=self.inner_radius,
                name=self.name,
            )
        except ManifoldError as e:
            raise SpecFileError(str(e)) from e

    def build(self) -> Union[ModelManifold, SubmersionSpec]:
        return self.to_submersion() if self.kind == "submersion" else self.to_manifold()


def _describe(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        key = ".".join(str(part) for part in item["loc"]) or "<document>"
        parts.append(f"{key}: {item['msg']}")
    return "; ".join(parts)


def parse_spec(document: dict, source: str = "<spec>") -> ManifoldSpecFile:
    try:
        return ManifoldSpecFile.model_validate(document)
    except ValidationError as e:
        raise SpecFileError(f"{source}: {_describe(e)}") from e


def load_spec(path: Union[str, Path]) -> ManifoldSpecFile:
    """Read and validate a spec file"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SpecFileError(f"cannot read spec file {path}: {e}") from e
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecFileError(f"{path}: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(document, dict):
        raise SpecFileError(f"{path}: top level must be a JSON object")
    spec = parse_spec(document, str(path))
    logger.info(f"Loaded {spec.kind} spec from {path}")
    return spec
