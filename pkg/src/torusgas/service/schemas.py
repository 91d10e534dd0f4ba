"""Pydantic request/response models of the evaluation service."""

from __future__ import annotations

from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import ConfigurationError
from ..potential import DualPotential, GaussianPotential, TabulatedPotential, ZeroPotential
from ..series import TruncationPolicy
from ..thermal import DEFAULT_THETA_TOL, SystemParams


class SystemModel(BaseModel):
    n: int = Field(ge=1)
    d: int = Field(ge=1)
    box_length: float = Field(gt=0)
    beta: float = Field(gt=0)
    lambda_beta: Optional[float] = Field(default=None, gt=0)
    mass: Optional[float] = Field(default=None, gt=0)
    hbar: float = Field(default=1.0, gt=0)
    statistics: Literal["bose", "fermi"] = "bose"

    @model_validator(mode="after")
    def _one_wavelength_source(self):
        if (self.lambda_beta is None) == (self.mass is None):
            raise ValueError("provide exactly one of lambda_beta or mass")
        return self

    def to_params(self) -> SystemParams:
        if self.lambda_beta is not None:
            return SystemParams(N=self.n, d=self.d, L=self.box_length, beta=self.beta,
                                lambda_beta=self.lambda_beta, statistics=self.statistics)
        return SystemParams.from_mass(N=self.n, d=self.d, L=self.box_length,
                                      beta=self.beta, mass=self.mass, hbar=self.hbar,
                                      statistics=self.statistics)


class PotentialModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    kind: Literal["zero", "gaussian", "tabulated"]
    strength: Optional[float] = None
    range_: Optional[float] = Field(default=None, alias="range", gt=0)
    entries: Optional[List[List[float]]] = None
    decay_exponent: Optional[float] = None

    @model_validator(mode="after")
    def _fields_for_kind(self):
        if self.kind == "gaussian" and (self.strength is None or self.range_ is None):
            raise ValueError("gaussian potential needs strength and range")
        if self.kind == "tabulated" and not self.entries:
            raise ValueError("tabulated potential needs entries")
        return self

    def to_potential(self, d: int, L: float) -> DualPotential:
        if self.kind == "zero":
            return ZeroPotential(d=d, decay_exponent=self.decay_exponent)
        if self.kind == "gaussian":
            return GaussianPotential(strength=self.strength, range=self.range_,
                                     d=d, decay_exponent=self.decay_exponent)
        entries = {}
        for row in self.entries:
            if len(row) != d + 1:
                raise ConfigurationError("potential.entries",
                                         f"rows need {d} lattice components and a value")
            entries[tuple(int(c) for c in row[:-1])] = float(row[-1])
        return TabulatedPotential(entries, L=L, d=d, decay_exponent=self.decay_exponent)

    def is_zero(self) -> bool:
        if self.kind == "zero":
            return True
        if self.kind == "gaussian":
            return self.strength == 0
        return all(row[-1] == 0 for row in self.entries)


class PolicyModel(BaseModel):
    alpha_max: int = Field(default=2, ge=0)
    z_radius: int = Field(default=3, ge=0)
    coeff_bound: int = Field(default=3, ge=0)
    quad_nodes: int = Field(default=16, ge=1)
    theta_tol: float = Field(default=DEFAULT_THETA_TOL, gt=0, lt=1)

    def to_policy(self) -> TruncationPolicy:
        return TruncationPolicy(alpha_max=self.alpha_max, z_radius=self.z_radius,
                                coeff_bound=self.coeff_bound, quad_nodes=self.quad_nodes,
                                theta_tol=self.theta_tol)


class BreakdownRow(BaseModel):
    p: int
    alpha: int
    value: float


class IdealGasCheck(BaseModel):
    oracle_q: float
    rel_diff: float
    passed: bool


class EvaluateRequest(BaseModel):
    system: SystemModel
    potential: PotentialModel
    policy: PolicyModel = PolicyModel()
    threads: int = Field(default=1, ge=1)


class EvaluateResponse(BaseModel):
    q: float
    log_q: Optional[float]
    free_energy: Optional[float]
    breakdown: List[BreakdownRow]
    term_count: int
    skipped_invalid_alpha: int
    tail_bound: float
    ideal_gas_check: Optional[IdealGasCheck]


class OracleIdealGasRequest(BaseModel):
    system: SystemModel
    tol: float = Field(default=1e-12, gt=0)


class OracleIdealGasResponse(BaseModel):
    oracle_q: float
    series_q: float
    rel_diff: float
    tol: float
    passed: bool


class Discrete2Options(BaseModel):
    m_list: List[int] = Field(default=[8, 16, 32], min_length=1)
    z_cutoff: int = Field(default=3, ge=1)
    alpha_max: int = Field(default=2, ge=0)
    partition: List[int] = Field(default=[2])


class OracleDiscrete2Request(BaseModel):
    system: SystemModel
    potential: PotentialModel
    policy: PolicyModel = PolicyModel()
    discrete: Discrete2Options = Discrete2Options()
    tol: float = Field(default=3.0, gt=0, description="final gap allowance, in units of the last increment")


class Discrete2Row(BaseModel):
    m: int
    discrete: float
    continuous: float
    abs_diff: float


class OracleDiscrete2Response(BaseModel):
    rows: List[Discrete2Row]
    differences_shrink: bool
    final_within_allowance: bool
    passed: bool


class OracleExactDiagRequest(BaseModel):
    system: SystemModel
    potential: PotentialModel
    policy: PolicyModel = PolicyModel()
    momentum_cutoff: int = Field(default=8, ge=1)
    tol: float = Field(default=0.01, gt=0)


class OracleExactDiagResponse(BaseModel):
    exact_q2: float
    series_q: float
    rel_diff: float
    tail_bound: float
    tolerance_used: float
    cutoff_cauchy_diff: float
    passed: bool


class OracleMatrixARequest(BaseModel):
    m: int = Field(ge=2)


class OracleMatrixAResponse(BaseModel):
    m: int
    inverse_identity_exact: bool
    eigenpairs_ok: bool
    max_eigen_residual: float
    degeneracy_ok: bool
    passed: bool


class GraphValidateRequest(BaseModel):
    edges: List[Tuple[int, int]] = Field(min_length=1)


class GraphValidateResponse(BaseModel):
    valid: bool
    vertices: int
    edge_count: int
    k: int
    m: int
    n_i: int
    solution: Optional[List[List[int]]]


class UnityCheckRequest(BaseModel):
    n: int = Field(ge=1)


class UnityCheckResponse(BaseModel):
    n: int
    partition_sum: str
    composition_sum: str
    exact: bool


class ThetaRequest(BaseModel):
    c: float = Field(gt=0)
    d: int = Field(default=1, ge=1)
    shift: Optional[List[float]] = None
    tol: float = Field(default=DEFAULT_THETA_TOL, gt=0, lt=1)


class ThetaResponse(BaseModel):
    value: float
    truncation_radius: int
