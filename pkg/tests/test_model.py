from __future__ import annotations

import math

import numpy as np
import pytest
import torch

from gqe.model import (
    ModelConfig,
    init_model,
    load_checkpoint,
    next_token_logits,
    sample_sequences,
    save_checkpoint,
    sequence_log_prob,
    sequence_log_probs,
)

TINY = ModelConfig(
    vocab_size=5, max_len=4, embed_dim=8, ff_dim=16, n_heads=2, n_layers=1
)


def params_equal(a, b) -> bool:
    return all(
        torch.equal(pa, pb) for pa, pb in zip(a.state_dict().values(), b.state_dict().values())
    )


# --- init_model -------------------------------------------------------------


def test_init_deterministic():
    assert params_equal(init_model(TINY, 7), init_model(TINY, 7))


def test_init_seed_changes_params():
    assert not params_equal(init_model(TINY, 7), init_model(TINY, 8))


def test_init_distribution_shape():
    model = init_model(ModelConfig(vocab_size=50, max_len=8), 3)
    std = model.wte.weight.std().item()
    assert std == pytest.approx(0.02, rel=0.15)
    for name, param in model.named_parameters():
        if "ln" in name and name.endswith("weight"):
            assert torch.all(param == 1.0)
        assert torch.isfinite(param).all()


def test_init_divisibility_error():
    with pytest.raises(ValueError):
        ModelConfig(vocab_size=5, max_len=4, embed_dim=6, n_heads=4)


def test_no_bias_by_default():
    model = init_model(TINY, 0)
    assert all("bias" not in n or "ln" in n for n, _ in model.named_parameters())


# --- next_token_logits ------------------------------------------------------


def test_logits_shape_and_finite():
    model = init_model(TINY, 1)
    logits = next_token_logits(model, [])
    assert logits.shape == (5,)
    assert torch.isfinite(logits).all()


def test_causality():
    model = init_model(TINY, 2)
    prefix = [1, 4, 0]
    ids = torch.tensor([[model.bos_id, *prefix]])
    with torch.no_grad():
        full = model(ids)[0]
    for k in range(len(prefix) + 1):
        stepwise = next_token_logits(model, prefix[:k])
        assert torch.max(torch.abs(stepwise - full[k])).item() < 1e-9


def test_prefix_too_long():
    model = init_model(TINY, 3)
    with pytest.raises(ValueError):
        next_token_logits(model, [0, 1, 2, 3])


def test_prefix_invalid_token():
    model = init_model(TINY, 3)
    with pytest.raises(ValueError):
        next_token_logits(model, [5])


# --- sample_sequences -------------------------------------------------------


def test_sampling_deterministic():
    model = init_model(TINY, 4)
    a = sample_sequences(model, 6, 1.0, torch.Generator().manual_seed(11))
    b = sample_sequences(model, 6, 1.0, torch.Generator().manual_seed(11))
    assert a == b
    assert all(len(seq) == 4 for seq in a)
    assert all(0 <= tok < 5 for seq in a for tok in seq)


def test_sampling_temperature_validation():
    model = init_model(TINY, 4)
    with pytest.raises(ValueError):
        sample_sequences(model, 2, 0.0, torch.Generator())
    with pytest.raises(ValueError):
        sample_sequences(model, 2, -1.0, torch.Generator())


def _frequency_check(model, temperature: float, probs: np.ndarray, n_draws: int):
    seqs = sample_sequences(
        model, n_draws, temperature, torch.Generator().manual_seed(99)
    )
    counts = np.bincount([s[0] for s in seqs], minlength=len(probs))
    for k, p in enumerate(probs):
        sigma = math.sqrt(n_draws * p * (1 - p))
        assert abs(counts[k] - n_draws * p) <= 3 * sigma, (
            f"token {k}: count {counts[k]}, expected {n_draws * p:.1f} +- {3 * sigma:.1f}"
        )


def test_sampling_frequencies_match_softmax_oracle():
    # L=3, N=1 frozen model; expected frequencies from softmax computed by hand
    config = ModelConfig(vocab_size=3, max_len=1, embed_dim=8, ff_dim=16, n_heads=2, n_layers=1)
    model = init_model(config, 5)
    logits = next_token_logits(model, []).numpy()
    exp = np.exp(logits - logits.max())
    _frequency_check(model, 1.0, exp / exp.sum(), n_draws=100_000)


def test_sampling_high_temperature_uniform():
    config = ModelConfig(vocab_size=3, max_len=1, embed_dim=8, ff_dim=16, n_heads=2, n_layers=1)
    model = init_model(config, 5)
    _frequency_check(model, 1e6, np.full(3, 1 / 3), n_draws=100_000)


def test_temperature_monotonicity():
    model = init_model(TINY, 6)
    logits = next_token_logits(model, [2])
    last = None
    for temp in (0.5, 1.0, 2.0, 5.0):
        peak = torch.softmax(logits / temp, dim=-1).max().item()
        if last is not None:
            assert peak < last
        last = peak


# --- sequence_log_prob ------------------------------------------------------


def test_uniform_model_log_prob():
    model = init_model(TINY, 9)
    with torch.no_grad():
        model.head.weight.zero_()
    result = sequence_log_prob(model, (0, 1, 2, 3))
    assert float(result.total) == pytest.approx(4 * math.log(1 / 5), abs=1e-12)


def test_log_prob_nonpositive_and_consistent():
    model = init_model(TINY, 10)
    seq = (3, 0, 4, 2)
    result = sequence_log_prob(model, seq)
    assert float(result.total) <= 0.0
    assert torch.all(result.per_token <= 0)
    assert float(result.total) == pytest.approx(
        float(result.per_token.sum()), abs=1e-9
    )
    # chain rule against the per-step softmax probabilities
    manual = 0.0
    for k in range(len(seq)):
        logits = next_token_logits(model, seq[:k])
        manual += float(torch.log_softmax(logits, dim=-1)[seq[k]])
    assert float(result.total) == pytest.approx(manual, abs=1e-9)


def test_log_prob_batch_matches_single():
    model = init_model(TINY, 12)
    seqs = [(0, 1, 2, 3), (4, 4, 0, 1)]
    batch = sequence_log_probs(model, seqs)
    for i, seq in enumerate(seqs):
        assert float(batch[i]) == pytest.approx(
            float(sequence_log_prob(model, seq).total), abs=1e-12
        )


def test_log_prob_differentiable():
    model = init_model(TINY, 13)
    result = sequence_log_prob(model, (1, 2, 3, 4))
    result.total.backward()
    grads = [p.grad for p in model.parameters() if p.grad is not None]
    assert grads and any(g.abs().sum() > 0 for g in grads)


def test_log_prob_invalid_input():
    model = init_model(TINY, 14)
    with pytest.raises(ValueError):
        sequence_log_prob(model, (0, 1))  # wrong length
    with pytest.raises(ValueError):
        sequence_log_prob(model, (0, 1, 2, 9))  # bad token


def test_normalization():
    model = init_model(TINY, 15)
    for prefix in ([], [1], [2, 0, 1]):
        logits = next_token_logits(model, prefix)
        log_probs = logits - torch.logsumexp(logits, dim=-1)
        assert abs(float(torch.logsumexp(log_probs, dim=-1))) < 1e-9
        assert float(torch.softmax(logits, -1).sum()) == pytest.approx(1.0, abs=1e-12)


def test_frozen_reference_stability():
    model = init_model(TINY, 16)
    model.eval()
    seq = (2, 2, 1, 0)
    first = sequence_log_prob(model, seq)
    for _ in range(3):
        again = sequence_log_prob(model, seq)
        assert torch.equal(first.total, again.total)


# --- checkpointing ----------------------------------------------------------


def test_checkpoint_round_trip_bit_exact(tmp_path):
    model = init_model(TINY, 17)
    path = tmp_path / "model.pt"
    save_checkpoint(model, str(path))
    loaded = load_checkpoint(str(path))
    assert loaded.config == model.config
    assert params_equal(model, loaded)


def test_checkpoint_version_check(tmp_path):
    model = init_model(TINY, 18)
    path = tmp_path / "model.pt"
    torch.save({"format_version": 99, "config": {}, "state_dict": {}}, path)
    with pytest.raises(ValueError):
        load_checkpoint(str(path))
