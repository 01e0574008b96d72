"""JSON run configuration for the command-line front end.

Complex matrix entries are written as ``[re, im]`` pairs; plain numbers are
accepted as real entries. Unknown keys are rejected at every level.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .distinguishability import GaussianPulseModel, gaussian_overlap, homogeneous_overlap
from .model import Scenario, beamsplitter_unitary, haar_random_unitary, tritter_unitary, validate_scenario

Entry = Union[float, tuple[float, float]]
Matrix = list[list[Entry]]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class HaarSpec(_Strict):
    M: int = Field(ge=1)
    seed: int


class HaarUnitary(_Strict):
    haar: HaarSpec


class GaussianSpec(_Strict):
    """Gaussian pulses; give explicit ``delays`` or an equal step ``delta_t``."""

    delays: list[float] | None = None
    delta_t: float | None = None
    sigma_t: float = Field(default=1.0, gt=0)
    omega0: float = 0.0

    @model_validator(mode="after")
    def _one_source(self):
        if (self.delays is None) == (self.delta_t is None):
            raise ValueError("gaussian overlap needs exactly one of 'delays' or 'delta_t'")
        return self


class GaussianOverlap(_Strict):
    gaussian: GaussianSpec


class HomogeneousOverlap(_Strict):
    homogeneous: float = Field(ge=0, le=1)


class ScenarioConfig(_Strict):
    unitary: Union[Literal["beamsplitter", "tritter"], HaarUnitary, Matrix]
    squeezing: list[float]
    phases: list[float] | None = None
    overlap: Union[Literal["ones", "identity"], HomogeneousOverlap, GaussianOverlap, Matrix] = "ones"
    efficiencies: list[float] | None = None


class ScanConfig(_Strict):
    grid: list[float]
    omega0s: list[float] = [0.0]
    sigma_t: float = Field(default=1.0, gt=0)
    patterns: list[list[int]] | None = None
    max_total: int | None = Field(default=None, ge=0)


class ValidateConfig(_Strict):
    tolerances: dict[Literal["hafnian", "oracle", "zero_events", "normalization", "decomposition", "closed_form"], float] = {}
    randomized: int = Field(default=4, ge=0)


class RunConfig(_Strict):
    scenario: ScenarioConfig | None = None
    patterns: list[list[int]] | None = None
    max_total: int | None = Field(default=None, ge=0)
    clicks: list[list[int]] | None = None
    scan: ScanConfig | None = None
    validate_: ValidateConfig | None = Field(default=None, alias="validate")
    seed: int = 0
    format: Literal["csv", "json"] = "csv"
    out: str | None = None

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


def complex_matrix(rows: Matrix) -> np.ndarray:
    out = []
    for row in rows:
        out.append([complex(*e) if isinstance(e, (tuple, list)) else complex(e) for e in row])
    return np.array(out, dtype=complex)


def matrix_entries(A) -> Matrix:
    """Inverse of :func:`complex_matrix`; every entry becomes an ``(re, im)`` pair."""
    A = np.asarray(A, dtype=complex)
    return [[(float(z.real), float(z.imag)) for z in row] for row in A]


def _unitary(spec) -> np.ndarray:
    if spec == "beamsplitter":
        return beamsplitter_unitary()
    if spec == "tritter":
        return tritter_unitary()
    if isinstance(spec, HaarUnitary):
        return haar_random_unitary(spec.haar.M, spec.haar.seed)
    return complex_matrix(spec)


def _overlap(spec, M: int) -> np.ndarray:
    if spec == "ones":
        return np.ones((M, M))
    if spec == "identity":
        return np.eye(M)
    if isinstance(spec, HomogeneousOverlap):
        return homogeneous_overlap(spec.homogeneous, M)
    if isinstance(spec, GaussianOverlap):
        g = spec.gaussian
        delays = g.delays if g.delays is not None else [-k * g.delta_t for k in range(M)]
        return gaussian_overlap(GaussianPulseModel(tuple(delays), g.sigma_t, g.omega0))
    return complex_matrix(spec)


def build_scenario(cfg: ScenarioConfig) -> Scenario:
    """Turn a parsed scenario block into a validated :class:`Scenario`.

    Raises the domain errors of :mod:`sqzdist.model` on invalid content.
    """
    U = _unitary(cfg.unitary)
    M = U.shape[0]
    return validate_scenario(U, cfg.squeezing, cfg.phases, _overlap(cfg.overlap, M), cfg.efficiencies)


def scenario_config(scenario: Scenario) -> ScenarioConfig:
    """Literal config block reproducing ``scenario``."""
    return ScenarioConfig(
        unitary=matrix_entries(scenario.U),
        squeezing=[float(r) for r in scenario.squeeze.r],
        phases=[float(t) for t in scenario.squeeze.theta],
        overlap=matrix_entries(scenario.V),
        efficiencies=[float(e) for e in scenario.eta],
    )


def homogeneous_epsilon(cfg: ScenarioConfig) -> float | None:
    return cfg.overlap.homogeneous if isinstance(cfg.overlap, HomogeneousOverlap) else None


def parse_config(text: str) -> RunConfig:
    """Parse JSON text; raises ``json.JSONDecodeError`` or ``pydantic.ValidationError``."""
    return RunConfig.model_validate(json.loads(text))


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def dump_config(cfg: RunConfig) -> str:
    return cfg.model_dump_json(by_alias=True, exclude_none=True, indent=2)
