"""Preference losses over winner/loser circuit pairs.

Per pair, with log-ratio difference
    z = beta * [(log p(w) - log p_ref(w)) - (log p(l) - log p_ref(l))],
the plain preference loss is -log sigmoid(z) and the persistent variant is
-[alpha*z + (1-alpha)*log sigmoid(z)], whose gradient weight
w(z) = alpha + (1-alpha)*sigmoid(-z) stays above alpha for large z.

Loss functions accept a float sequence (returning a float) or a float64
tensor (returning a 0-dim tensor through which gradients flow).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import torch
import torch.nn.functional as F

from .errors import EmptyBatchError
from .replay import EnergySample

LOSS_VARIANTS = ("dpo", "pdpo")


@dataclass(frozen=True)
class LossConfig:
    variant: str = "pdpo"
    beta: float = 0.1
    alpha: float = 0.5  # ignored by the plain dpo variant

    def __post_init__(self) -> None:
        if self.variant not in LOSS_VARIANTS:
            raise ValueError(f"variant must be one of {LOSS_VARIANTS}")
        if not self.beta > 0:
            raise ValueError("beta must be > 0")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")


@dataclass(frozen=True)
class PreferencePair:
    winner: EnergySample
    loser: EnergySample

    def __post_init__(self) -> None:
        if not self.winner.energy < self.loser.energy:
            raise ValueError(
                f"winner energy {self.winner.energy} must be strictly below "
                f"loser energy {self.loser.energy}"
            )


PreferenceBatch = list[PreferencePair]


def pair_best_vs_others(samples: Sequence[EnergySample]) -> PreferenceBatch:
    """Pair the minimum-energy sample against every strictly worse sample.

    Samples tied with the best are excluded (no self-pairs, no ties); a
    batch with no strictly worse sample raises EmptyBatchError and the
    caller skips the update step.
    """
    if len(samples) < 2:
        raise EmptyBatchError(f"need >= 2 samples to pair, got {len(samples)}")
    best = min(samples, key=lambda s: s.energy)
    losers = [s for s in samples if s.energy > best.energy]
    if not losers:
        raise EmptyBatchError("all sample energies are equal; no valid pairs")
    return [PreferencePair(winner=best, loser=loser) for loser in losers]


def z_value(
    logp_w_theta, logp_w_ref, logp_l_theta, logp_l_ref, beta: float
):
    """beta-scaled difference of winner/loser log-probability ratios.

    Works elementwise on floats or tensors.
    """
    if not beta > 0:
        raise ValueError("beta must be > 0")
    for v in (logp_w_theta, logp_w_ref, logp_l_theta, logp_l_ref):
        if not torch.is_tensor(v) and not math.isfinite(v):
            raise ValueError("log-probabilities must be finite")
    return beta * ((logp_w_theta - logp_w_ref) - (logp_l_theta - logp_l_ref))


def _as_batch(z_values) -> tuple[torch.Tensor, bool]:
    is_tensor = torch.is_tensor(z_values)
    z = torch.as_tensor(z_values, dtype=None if is_tensor else torch.float64)
    if z.numel() == 0:
        raise ValueError("batch of z-values must be non-empty")
    return z, is_tensor


def dpo_loss(z_values):
    """Mean of -log sigmoid(z), via the stable softplus identity."""
    z, is_tensor = _as_batch(z_values)
    loss = F.softplus(-z).mean()
    return loss if is_tensor else float(loss)


def pdpo_loss(z_values, alpha: float):
    """Mean of -[alpha*z + (1-alpha)*log sigmoid(z)]; alpha=0 recovers
    dpo_loss exactly."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    z, is_tensor = _as_batch(z_values)
    loss = (alpha * (-z) + (1.0 - alpha) * F.softplus(-z)).mean()
    return loss if is_tensor else float(loss)


def batch_loss(z_values, config: LossConfig):
    if config.variant == "dpo":
        return dpo_loss(z_values)
    return pdpo_loss(z_values, config.alpha)


def gradient_weight(z, alpha: float):
    """w(z) = alpha + (1-alpha)*sigmoid(-z); bounded to [alpha, 1].

    Exposed for testing; training gradients flow through the loss itself.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    if torch.is_tensor(z):
        return alpha + (1.0 - alpha) * torch.sigmoid(-z)
    return alpha + (1.0 - alpha) * float(torch.sigmoid(torch.tensor(-z, dtype=torch.float64)))
