"""Pydantic request/response models for the HTTP service."""
from __future__ import annotations

from pydantic import BaseModel, Field

from .hamiltonian import Hamiltonian, hamiltonian_from_dict


class PauliTermModel(BaseModel):
    coeff: float
    word: str


class ExcitationsModel(BaseModel):
    singles: list[list[int]] = Field(default_factory=list)
    doubles: list[list[int]] = Field(default_factory=list)


class HamiltonianModel(BaseModel):
    """Mirrors the Hamiltonian JSON file schema."""

    name: str = ""
    n_qubits: int
    hf_occupation: list[int]
    terms: list[PauliTermModel]
    ground_energy_hint: float | None = None
    excitations: ExcitationsModel | None = None

    def to_hamiltonian(self) -> Hamiltonian:
        return hamiltonian_from_dict(self.model_dump())


class ExactRequest(BaseModel):
    hamiltonian: HamiltonianModel


class ExactResponse(BaseModel):
    name: str
    n_qubits: int
    ground_energy: float
    hf_energy: float
    ground_energy_hint: float | None = None


class PoolRequest(BaseModel):
    """Pool from a full Hamiltonian or from bare (n_electrons, n_qubits)."""

    hamiltonian: HamiltonianModel | None = None
    n_electrons: int | None = None
    n_qubits: int | None = None
    angles: list[float] | None = None
    list_tokens: bool = False


class TokenModel(BaseModel):
    token: int
    kind: str
    wires: list[int]
    angle: float


class PoolResponse(BaseModel):
    size: int
    n_singles: int
    n_doubles: int
    angle_set: list[float]
    tokens: list[TokenModel] | None = None


class HybridModel(BaseModel):
    capacity: int = 0
    reuse: int = 0
    start: int = 0
    enabled: bool = False


class TrainRequest(BaseModel):
    hamiltonian: HamiltonianModel
    loss: str = "pdpo"
    beta: float = 0.1
    alpha: float = 0.5
    seed: int = 42
    steps: int = 300
    samples_per_step: int = 10
    sequence_length: int = 12
    learning_rate: float = 1e-3
    weight_decay: float = 0.01
    temperature_initial: float = 1.5
    temperature_final: float = 0.7
    embed_dim: int = 64
    ff_dim: int = 256
    n_heads: int = 4
    n_layers: int = 2
    dropout: float = 0.0
    grad_clip: float | None = None
    hybrid: HybridModel | None = None


class TrainSubmitResponse(BaseModel):
    job_id: str


class RunSummaryModel(BaseModel):
    best_energy: float
    best_sequence: list[int]
    seed: int
    config_digest: str
    wall_time_s: float


class JobStatusResponse(BaseModel):
    job_id: str
    status: str  # queued | running | done | failed
    steps_done: int
    n_steps: int
    summary: RunSummaryModel | None = None
    error: str | None = None


class AggregateRequest(BaseModel):
    csv_texts: list[str]
    block: int | None = None


class AggregatePointModel(BaseModel):
    step: int
    mean: float
    min: float
    max: float


class BlockMinimumModel(BaseModel):
    run: int
    block_start: int
    block_end: int
    block_min: float


class AggregateResponse(BaseModel):
    points: list[AggregatePointModel]
    blocks: list[BlockMinimumModel] | None = None
