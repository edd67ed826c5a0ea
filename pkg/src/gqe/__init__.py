"""Generative quantum eigensolver training stack.

Trains a small autoregressive decoder to emit excitation-gate circuits
that minimize a molecular Hamiltonian's expectation value, using
preference losses over winner/loser circuit pairs and an optional
replay-backed hybrid update scheme.
"""

from .errors import CapabilityError, EmptyBatchError, NumericError
from .hamiltonian import Hamiltonian, PauliTerm, load_hamiltonian, save_hamiltonian
from .losses import (
    LossConfig,
    PreferencePair,
    dpo_loss,
    gradient_weight,
    pair_best_vs_others,
    pdpo_loss,
    z_value,
)
from .model import (
    DecoderModel,
    LogProbResult,
    ModelConfig,
    init_model,
    load_checkpoint,
    next_token_logits,
    sample_sequences,
    save_checkpoint,
    sequence_log_prob,
    sequence_log_probs,
)
from .pool import (
    OperatorPool,
    build_pool,
    default_angle_set,
    enumerate_excitations,
    pool_for_hamiltonian,
    token_to_gate,
)
from .replay import EnergySample, HybridConfig, ReplayBuffer
from .simulator import (
    GateKind,
    GateSpec,
    StateVector,
    apply_gate,
    evaluate_sequence,
    exact_ground_energy,
    expectation,
    hartree_fock_state,
)
from .trainer import (
    RunLog,
    ScheduleConfig,
    StepRecord,
    TrainConfig,
    Trainer,
    desk_config,
    gradcheck,
    paper_config,
    preference_loss,
    temperature,
    train,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
