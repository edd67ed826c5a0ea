"""Decoder-only autoregressive model over pool tokens.

Small GPT-style architecture: learned token and position embeddings,
pre-LayerNorm blocks with causal self-attention and a GELU MLP, final
LayerNorm and a linear head.  A reserved begin-of-sequence embedding row
(index == vocab_size) feeds the first step and is never a legal output.

All parameters are float64: the loss tolerances and finite-difference
gradient checks in this package need the headroom, and the models are
small enough that it costs nothing.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import torch
import torch.nn as nn
import torch.nn.functional as F

from .errors import NumericError

DTYPE = torch.float64
CHECKPOINT_VERSION = 1
INIT_STD = 0.02


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int          # = pool size L
    max_len: int             # = sequence length N
    embed_dim: int = 64
    ff_dim: int = 256
    n_heads: int = 4
    n_layers: int = 2
    use_bias: bool = False
    dropout: float = 0.0

    def __post_init__(self) -> None:
        # vocab_size 0 is a placeholder meaning "derive from the pool later"
        if self.vocab_size < 0:
            raise ValueError("vocab_size must be >= 0")
        if self.max_len < 1:
            raise ValueError("max_len must be >= 1")
        if self.embed_dim % self.n_heads != 0:
            raise ValueError(
                f"embed_dim {self.embed_dim} not divisible by n_heads {self.n_heads}"
            )
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")


@dataclass
class LogProbResult:
    total: torch.Tensor      # 0-dim
    per_token: torch.Tensor  # (N,)


class CausalSelfAttention(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.n_heads = config.n_heads
        self.head_dim = config.embed_dim // config.n_heads
        self.qkv = nn.Linear(config.embed_dim, 3 * config.embed_dim, bias=config.use_bias)
        self.proj = nn.Linear(config.embed_dim, config.embed_dim, bias=config.use_bias)
        self.attn_dropout = nn.Dropout(config.dropout)
        self.resid_dropout = nn.Dropout(config.dropout)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        b, t, c = x.shape
        q, k, v = self.qkv(x).split(c, dim=2)
        q = q.view(b, t, self.n_heads, self.head_dim).transpose(1, 2)
        k = k.view(b, t, self.n_heads, self.head_dim).transpose(1, 2)
        v = v.view(b, t, self.n_heads, self.head_dim).transpose(1, 2)

        att = (q @ k.transpose(-2, -1)) / math.sqrt(self.head_dim)
        mask = torch.triu(torch.ones(t, t, dtype=torch.bool, device=x.device), 1)
        att = att.masked_fill(mask, float("-inf"))
        att = self.attn_dropout(F.softmax(att, dim=-1))

        y = (att @ v).transpose(1, 2).reshape(b, t, c)
        return self.resid_dropout(self.proj(y))


class Block(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.ln1 = nn.LayerNorm(config.embed_dim)
        self.attn = CausalSelfAttention(config)
        self.ln2 = nn.LayerNorm(config.embed_dim)
        self.mlp = nn.Sequential(
            nn.Linear(config.embed_dim, config.ff_dim, bias=config.use_bias),
            nn.GELU(),
            nn.Linear(config.ff_dim, config.embed_dim, bias=config.use_bias),
            nn.Dropout(config.dropout),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = x + self.attn(self.ln1(x))
        return x + self.mlp(self.ln2(x))


class DecoderModel(nn.Module):
    """Autoregressive decoder; inputs are shifted token ids with the BOS
    row (index vocab_size) at position 0."""

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.bos_id = config.vocab_size
        self.wte = nn.Embedding(config.vocab_size + 1, config.embed_dim)
        self.wpe = nn.Embedding(config.max_len, config.embed_dim)
        self.drop = nn.Dropout(config.dropout)
        self.blocks = nn.ModuleList(Block(config) for _ in range(config.n_layers))
        self.ln_f = nn.LayerNorm(config.embed_dim)
        self.head = nn.Linear(config.embed_dim, config.vocab_size, bias=config.use_bias)
        self.to(DTYPE)

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        t = ids.shape[1]
        if t > self.config.max_len:
            raise ValueError(f"input length {t} exceeds max_len {self.config.max_len}")
        pos = torch.arange(t, device=ids.device)
        x = self.drop(self.wte(ids) + self.wpe(pos))
        for block in self.blocks:
            x = block(x)
        return self.head(self.ln_f(x))


def init_model(config: ModelConfig, seed: int) -> DecoderModel:
    """Build a model with normal(0, 0.02) weights, unit norm gains, zero
    offsets; deterministic per (config, seed)."""
    if config.vocab_size < 1:
        raise ValueError("vocab_size must be >= 1 to build a model")
    model = DecoderModel(config)
    generator = torch.Generator().manual_seed(seed)
    with torch.no_grad():
        for module in model.modules():
            if isinstance(module, (nn.Linear, nn.Embedding)):
                module.weight.normal_(0.0, INIT_STD, generator=generator)
                if getattr(module, "bias", None) is not None:
                    module.bias.zero_()
            elif isinstance(module, nn.LayerNorm):
                module.weight.fill_(1.0)
                module.bias.zero_()
    return model


def _validate_tokens(model: DecoderModel, tokens: Sequence[int]) -> None:
    vocab = model.config.vocab_size
    for tok in tokens:
        if not 0 <= tok < vocab:
            raise ValueError(f"token {tok} out of range [0, {vocab})")


def next_token_logits(model: DecoderModel, prefix: Sequence[int]) -> torch.Tensor:
    """Logits over the vocabulary for the step following `prefix`."""
    if len(prefix) >= model.config.max_len:
        raise ValueError(
            f"prefix length {len(prefix)} must be < max_len {model.config.max_len}"
        )
    _validate_tokens(model, prefix)
    ids = torch.tensor([[model.bos_id, *prefix]], dtype=torch.long)
    model.eval()
    with torch.no_grad():
        logits = model(ids)[0, -1]
    return logits


def sample_sequences(
    model: DecoderModel,
    count: int,
    temperature: float,
    generator: torch.Generator,
) -> list[tuple[int, ...]]:
    """Draw full-length sequences token-by-token at the given temperature."""
    if temperature <= 0:
        raise ValueError("temperature must be > 0")
    if count < 1:
        raise ValueError("count must be >= 1")
    model.eval()
    ids = torch.full((count, 1), model.bos_id, dtype=torch.long)
    with torch.no_grad():
        for _ in range(model.config.max_len):
            logits = model(ids)[:, -1, :]
            if not torch.isfinite(logits).all():
                raise NumericError(
                    "non-finite logits during sampling; model parameters may "
                    "have diverged"
                )
            probs = F.softmax(logits / temperature, dim=-1)
            next_tok = torch.multinomial(probs, num_samples=1, generator=generator)
            ids = torch.cat([ids, next_tok], dim=1)
    return [tuple(row) for row in ids[:, 1:].tolist()]


def sequence_log_probs(
    model: DecoderModel, sequences: Sequence[Sequence[int]]
) -> torch.Tensor:
    """Total log-probabilities of full-length sequences, differentiable;
    shape (len(sequences),)."""
    n = model.config.max_len
    for seq in sequences:
        if len(seq) != n:
            raise ValueError(f"sequence length {len(seq)} != max_len {n}")
        _validate_tokens(model, seq)
    targets = torch.tensor(sequences, dtype=torch.long).reshape(len(sequences), n)
    ids = torch.cat(
        [torch.full((len(sequences), 1), model.bos_id, dtype=torch.long), targets[:, :-1]],
        dim=1,
    )
    log_probs = F.log_softmax(model(ids), dim=-1)
    per_token = log_probs.gather(2, targets.unsqueeze(2)).squeeze(2)
    return per_token.sum(dim=1)


def sequence_log_prob(model: DecoderModel, sequence: Sequence[int]) -> LogProbResult:
    """Log-probability of one sequence with its per-token breakdown."""
    n = model.config.max_len
    if len(sequence) != n:
        raise ValueError(f"sequence length {len(sequence)} != max_len {n}")
    _validate_tokens(model, sequence)
    targets = torch.tensor([list(sequence)], dtype=torch.long)
    ids = torch.cat([torch.tensor([[model.bos_id]]), targets[:, :-1]], dim=1)
    log_probs = F.log_softmax(model(ids), dim=-1)
    per_token = log_probs[0, torch.arange(n), targets[0]]
    return LogProbResult(total=per_token.sum(), per_token=per_token)


def save_checkpoint(model: DecoderModel, path: str) -> None:
    torch.save(
        {
            "format_version": CHECKPOINT_VERSION,
            "config": asdict(model.config),
            "state_dict": model.state_dict(),
        },
        path,
    )


def load_checkpoint(path: str) -> DecoderModel:
    payload = torch.load(path, weights_only=True)
    if payload.get("format_version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {payload.get('format_version')}")
    model = DecoderModel(ModelConfig(**payload["config"]))
    model.load_state_dict(payload["state_dict"])
    return model
