"""End-to-end training loop.

Each step: sample M sequences at the scheduled temperature, evaluate their
energies exactly, assemble the update batch through the replay buffer,
pair best-vs-others, take one AdamW step on the configured preference
loss.  The reference model is a frozen copy of the freshly initialized
model; its per-sequence log-probabilities are cached on the samples.

Three named RNG streams (model init, sampling, replay draws) derive from
the single config seed, so a (config, seed) pair reproduces its run
bit-for-bit on the same build.
"""
from __future__ import annotations

import copy
import csv
import hashlib
import io
import json
import math
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import torch

from .errors import EmptyBatchError, NumericError
from .hamiltonian import Hamiltonian, load_hamiltonian
from .losses import LossConfig, PreferenceBatch, batch_loss, pair_best_vs_others, z_value
from .model import DecoderModel, ModelConfig, init_model, sample_sequences, sequence_log_probs
from .pool import OperatorPool, pool_for_hamiltonian
from .replay import EnergySample, HybridConfig, ReplayBuffer
from .simulator import evaluate_sequence

RUN_CSV_HEADER = "step,temperature,batch_min_energy,min_energy_so_far,loss,n_pairs,buffer_size"

GRADCHECK_MAX_PARAMS = 10_000
SINGLE_THREAD_PARAM_LIMIT = 2_000_000


@dataclass(frozen=True)
class ScheduleConfig:
    t_initial: float = 1.5
    t_final: float = 0.7
    n_steps: int = 300

    def __post_init__(self) -> None:
        if self.t_initial <= 0 or self.t_final <= 0:
            raise ValueError("temperatures must be > 0")
        if self.n_steps < 2:
            raise ValueError("n_steps must be >= 2")


def temperature(t: int, sched: ScheduleConfig) -> float:
    """Linear anneal from t_initial at step 0 to t_final at step n_steps-1."""
    if not 0 <= t <= sched.n_steps - 1:
        raise ValueError(f"step {t} outside [0, {sched.n_steps - 1}]")
    return sched.t_initial - (sched.t_initial - sched.t_final) * t / (sched.n_steps - 1)


@dataclass(frozen=True)
class TrainConfig:
    hamiltonian_path: str
    model: ModelConfig = ModelConfig(vocab_size=0, max_len=12)
    loss: LossConfig = LossConfig()
    hybrid: HybridConfig = HybridConfig()
    schedule: ScheduleConfig = ScheduleConfig()
    samples_per_step: int = 10
    learning_rate: float = 8e-5
    weight_decay: float = 0.01
    seed: int = 42
    output_path: str | None = None
    angle_set: tuple[float, ...] | None = None
    grad_clip: float | None = None  # off by default
    debug_checks: bool = False

    def __post_init__(self) -> None:
        if self.samples_per_step < 2:
            raise ValueError("samples_per_step must be >= 2 (pairing needs two)")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")


@dataclass(frozen=True)
class StepRecord:
    step: int
    temperature: float
    batch_min_energy: float
    min_energy_so_far: float
    loss: float
    n_pairs: int
    buffer_size: int


@dataclass
class RunLog:
    records: list[StepRecord]
    best_energy: float
    best_sequence: tuple[int, ...]
    seed: int
    config_digest: str
    wall_time_s: float


def config_digest(cfg: TrainConfig) -> str:
    payload = json.dumps(asdict(cfg), sort_keys=True, default=str)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _derived_seeds(seed: int) -> tuple[int, int, np.random.SeedSequence]:
    init_ss, sample_ss, replay_ss = np.random.SeedSequence(seed).spawn(3)
    mask = (1 << 63) - 1
    init_seed = int(init_ss.generate_state(1, np.uint64)[0]) & mask
    sample_seed = int(sample_ss.generate_state(1, np.uint64)[0]) & mask
    return init_seed, sample_seed, replay_ss


def preference_loss(
    model: DecoderModel, pairs: PreferenceBatch, loss_cfg: LossConfig
) -> tuple[torch.Tensor, torch.Tensor]:
    """Configured loss over a pair batch via a fresh differentiable forward
    pass; reference log-probs come cached on the samples.  Returns
    (loss, detached z values)."""
    if not pairs:
        raise EmptyBatchError("cannot compute a loss over zero pairs")
    sequences = [p.winner.sequence for p in pairs] + [p.loser.sequence for p in pairs]
    log_probs = sequence_log_probs(model, sequences)
    k = len(pairs)
    ref_w = torch.tensor([p.winner.ref_logp for p in pairs], dtype=torch.float64)
    ref_l = torch.tensor([p.loser.ref_logp for p in pairs], dtype=torch.float64)
    z = z_value(log_probs[:k], ref_w, log_probs[k:], ref_l, loss_cfg.beta)
    return batch_loss(z, loss_cfg), z.detach()


def gradcheck(
    model: DecoderModel,
    pairs: PreferenceBatch,
    loss_cfg: LossConfig,
    step_size: float = 1e-4,
) -> float:
    """Max relative error between the analytic parameter gradient of the
    batch loss and central finite differences over every parameter.

    Per-component denominators are floored at 1e-3 of the gradient's
    infinity norm so that numerically-zero components cannot dominate.
    """
    params = [p for p in model.parameters() if p.requires_grad]
    n_params = sum(p.numel() for p in params)
    if n_params > GRADCHECK_MAX_PARAMS:
        raise ValueError(f"gradcheck is for tiny models; got {n_params} parameters")

    loss, _ = preference_loss(model, pairs, loss_cfg)
    analytic = torch.cat(
        [g.reshape(-1) for g in torch.autograd.grad(loss, params)]
    ).detach()

    original = torch.nn.utils.parameters_to_vector(params).detach().clone()
    numeric = torch.zeros_like(original)
    with torch.no_grad():
        for i in range(original.numel()):
            probe = original.clone()
            probe[i] = original[i] + step_size
            torch.nn.utils.vector_to_parameters(probe, params)
            plus, _ = preference_loss(model, pairs, loss_cfg)
            probe[i] = original[i] - step_size
            torch.nn.utils.vector_to_parameters(probe, params)
            minus, _ = preference_loss(model, pairs, loss_cfg)
            numeric[i] = (plus - minus) / (2.0 * step_size)
        torch.nn.utils.vector_to_parameters(original, params)

    scale = max(analytic.abs().max().item(), numeric.abs().max().item(), 1e-12)
    denom = torch.clamp(
        torch.maximum(analytic.abs(), numeric.abs()), min=1e-3 * scale
    )
    return float(((analytic - numeric).abs() / denom).max())


class Trainer:
    """Owns the mutable training state; the loop is single-threaded."""

    def __init__(self, cfg: TrainConfig, hamiltonian: Hamiltonian | None = None):
        self.cfg = cfg
        self.hamiltonian = hamiltonian or load_hamiltonian(cfg.hamiltonian_path)
        self.pool: OperatorPool = pool_for_hamiltonian(self.hamiltonian, cfg.angle_set)

        if cfg.model.vocab_size == 0:
            model_cfg = replace(cfg.model, vocab_size=self.pool.size)
        elif cfg.model.vocab_size != self.pool.size:
            raise ValueError(
                f"model vocab_size {cfg.model.vocab_size} != pool size {self.pool.size}"
            )
        else:
            model_cfg = cfg.model
        self.model_config = model_cfg

        init_seed, sample_seed, replay_ss = _derived_seeds(cfg.seed)
        self.model = init_model(model_cfg, init_seed)
        self.ref_model = copy.deepcopy(self.model)
        self.ref_model.eval()
        for p in self.ref_model.parameters():
            p.requires_grad_(False)

        self.sample_generator = torch.Generator().manual_seed(sample_seed)
        self.replay_rng = np.random.default_rng(replay_ss)
        self.buffer = ReplayBuffer(cfg.hybrid)
        self.optimizer = torch.optim.AdamW(
            self.model.parameters(),
            lr=cfg.learning_rate,
            betas=(0.9, 0.999),
            eps=1e-8,
            weight_decay=cfg.weight_decay,
        )

        self.records: list[StepRecord] = []
        self.best_energy = math.inf
        self.best_sequence: tuple[int, ...] = ()

    def _ref_log_probs(self, sequences: Sequence[tuple[int, ...]]) -> list[float]:
        with torch.no_grad():
            return [float(v) for v in sequence_log_probs(self.ref_model, sequences)]

    def _debug_check_batch(self, batch: list[EnergySample], t: int) -> None:
        # replayed samples carry cached values; recompute both and compare
        for sample in batch:
            if sample.created_step == t:
                continue
            energy = evaluate_sequence(self.pool, sample.sequence, self.hamiltonian)
            if abs(energy - sample.energy) > 1e-12:
                raise NumericError(
                    f"cached energy {sample.energy} != recomputed {energy}"
                )
            ref_lp = self._ref_log_probs([sample.sequence])[0]
            if abs(ref_lp - sample.ref_logp) > 1e-10:
                raise NumericError(
                    f"cached ref log-prob {sample.ref_logp} != recomputed {ref_lp}"
                )

    def step(self, t: int) -> StepRecord:
        cfg = self.cfg
        temp = temperature(t, cfg.schedule)

        sequences = sample_sequences(
            self.model, cfg.samples_per_step, temp, self.sample_generator
        )
        energies = [
            evaluate_sequence(self.pool, seq, self.hamiltonian) for seq in sequences
        ]
        ref_lps = self._ref_log_probs(sequences)
        online = [
            EnergySample(sequence=seq, energy=e, created_step=t, ref_logp=lp)
            for seq, e, lp in zip(sequences, energies, ref_lps)
        ]

        batch = self.buffer.assemble_step(online, t, self.replay_rng)
        if cfg.debug_checks:
            self._debug_check_batch(batch, t)

        batch_min = min(energies)
        if batch_min < self.best_energy:
            self.best_energy = batch_min
            self.best_sequence = online[int(np.argmin(energies))].sequence

        try:
            pairs = pair_best_vs_others(batch)
        except EmptyBatchError:
            pairs = []

        if pairs:
            self.model.train()
            loss, _ = preference_loss(self.model, pairs, cfg.loss)
            loss_val = float(loss.detach())
            if not math.isfinite(loss_val):
                raise NumericError(
                    f"non-finite loss {loss_val} at step {t} "
                    f"(variant={cfg.loss.variant}, beta={cfg.loss.beta}, "
                    f"alpha={cfg.loss.alpha})"
                )
            self.optimizer.zero_grad()
            loss.backward()
            if cfg.grad_clip is not None:
                torch.nn.utils.clip_grad_norm_(self.model.parameters(), cfg.grad_clip)
            self.optimizer.step()
            self.model.eval()
        else:
            loss_val = math.nan  # all-tied batch: update skipped

        record = StepRecord(
            step=t,
            temperature=temp,
            batch_min_energy=batch_min,
            min_energy_so_far=self.best_energy,
            loss=loss_val,
            n_pairs=len(pairs),
            buffer_size=len(self.buffer),
        )
        self.records.append(record)
        return record

    def run(self, on_step: Callable[[StepRecord], None] | None = None) -> RunLog:
        start = time.perf_counter()
        # desk-sized models lose badly to intra-op thread sync; big ones don't
        n_params = sum(p.numel() for p in self.model.parameters())
        prev_threads = torch.get_num_threads()
        if n_params < SINGLE_THREAD_PARAM_LIMIT:
            torch.set_num_threads(1)
        try:
            for t in range(self.cfg.schedule.n_steps):
                record = self.step(t)
                if on_step is not None:
                    on_step(record)
        finally:
            torch.set_num_threads(prev_threads)
        log = RunLog(
            records=self.records,
            best_energy=self.best_energy,
            best_sequence=self.best_sequence,
            seed=self.cfg.seed,
            config_digest=config_digest(self.cfg),
            wall_time_s=time.perf_counter() - start,
        )
        if self.cfg.output_path is not None:
            write_run_csv(log.records, self.cfg.output_path)
            write_run_summary(log, summary_path(self.cfg.output_path))
        return log


def train(
    cfg: TrainConfig, on_step: Callable[[StepRecord], None] | None = None
) -> RunLog:
    """Run a full training job from a config."""
    return Trainer(cfg).run(on_step=on_step)


def summary_path(csv_path: str) -> str:
    return str(Path(csv_path).with_suffix(".summary.json"))


def run_csv_text(records: Sequence[StepRecord]) -> str:
    """Byte-stable CSV: fixed header, repr() floats, LF line endings."""
    out = io.StringIO()
    out.write(RUN_CSV_HEADER + "\n")
    writer = csv.writer(out, lineterminator="\n")
    for r in records:
        writer.writerow(
            [
                r.step,
                repr(r.temperature),
                repr(r.batch_min_energy),
                repr(r.min_energy_so_far),
                repr(r.loss),
                r.n_pairs,
                r.buffer_size,
            ]
        )
    return out.getvalue()


def write_run_csv(records: Sequence[StepRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(run_csv_text(records))


def write_run_summary(log: RunLog, path: str) -> None:
    payload = {
        "best_energy": log.best_energy,
        "best_sequence": list(log.best_sequence),
        "seed": log.seed,
        "config_digest": log.config_digest,
        "wall_time_s": log.wall_time_s,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


# Desk-scale profile: small enough that a 5-seed study runs in minutes.
DESK_MODEL = dict(embed_dim=64, ff_dim=256, n_heads=4, n_layers=2)
DESK_SEQUENCE_LENGTH = 12
DESK_STEPS = 300
DESK_LEARNING_RATE = 1e-3

# Full-scale profile (~85M parameters; hours of compute).
PAPER_MODEL = dict(embed_dim=768, ff_dim=3072, n_heads=12, n_layers=12)
PAPER_SEQUENCE_LENGTH = 40
PAPER_STEPS = 3000
PAPER_LEARNING_RATE = 8e-5


def desk_config(
    hamiltonian_path: str,
    output_path: str | None = None,
    seed: int = 42,
    loss: LossConfig | None = None,
    hybrid: HybridConfig | None = None,
    n_steps: int = DESK_STEPS,
) -> TrainConfig:
    """Desk-scale defaults: tiny model, short sequences, 300 steps."""
    return TrainConfig(
        hamiltonian_path=hamiltonian_path,
        model=ModelConfig(vocab_size=0, max_len=DESK_SEQUENCE_LENGTH, **DESK_MODEL),
        loss=loss or LossConfig(),
        hybrid=hybrid or HybridConfig(),
        schedule=ScheduleConfig(n_steps=n_steps),
        learning_rate=DESK_LEARNING_RATE,
        seed=seed,
        output_path=output_path,
    )


def paper_config(
    hamiltonian_path: str,
    output_path: str | None = None,
    seed: int = 42,
    loss: LossConfig | None = None,
    hybrid: HybridConfig | None = None,
) -> TrainConfig:
    """Full-scale defaults (use only if you mean it: ~85M parameters)."""
    return TrainConfig(
        hamiltonian_path=hamiltonian_path,
        model=ModelConfig(vocab_size=0, max_len=PAPER_SEQUENCE_LENGTH, **PAPER_MODEL),
        loss=loss or LossConfig(),
        hybrid=hybrid or HybridConfig(),
        schedule=ScheduleConfig(n_steps=PAPER_STEPS),
        learning_rate=PAPER_LEARNING_RATE,
        seed=seed,
        output_path=output_path,
    )
