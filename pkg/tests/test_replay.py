from __future__ import annotations

import json
import math

import numpy as np
import pytest

from gqe.replay import EnergySample, HybridConfig, ReplayBuffer


def sample(energy: float, step: int = 0, seq=(0,)) -> EnergySample:
    return EnergySample(sequence=tuple(seq), energy=energy, created_step=step, ref_logp=0.0)


def buffer(capacity=10, reuse=2, start=0, enabled=True) -> ReplayBuffer:
    return ReplayBuffer(HybridConfig(capacity, reuse, start, enabled))


def test_store_evicts_highest_energy():
    buf = buffer(capacity=2)
    buf.store([sample(-1.0), sample(-0.5), sample(-0.9)])
    assert sorted(s.energy for s in buf.samples) == [-1.0, -0.9]


def test_zero_capacity_stays_empty():
    buf = buffer(capacity=0, reuse=0)
    buf.store([sample(-1.0), sample(-2.0)])
    assert len(buf) == 0


def test_equal_energy_eviction_keeps_newer():
    buf = buffer(capacity=1, reuse=1)
    buf.store([sample(-1.0, step=0)])
    buf.store([sample(-1.0, step=5)])
    assert len(buf) == 1
    assert buf.samples[0].created_step == 5


def test_full_tie_evicts_earliest_arrival():
    buf = buffer(capacity=1, reuse=1)
    buf.store([sample(-1.0, step=3, seq=(1,)), sample(-1.0, step=3, seq=(2,))])
    assert buf.samples[0].sequence == (2,)


def test_draw_without_replacement():
    buf = buffer(capacity=5, reuse=2)
    buf.store([sample(-float(k), seq=(k,)) for k in range(5)])
    drawn = buf.draw(2, np.random.default_rng(0))
    assert len(drawn) == 2
    assert drawn[0].sequence != drawn[1].sequence


def test_draw_underfull_returns_all():
    buf = buffer(capacity=5, reuse=4)
    buf.store([sample(-1.0)])
    assert len(buf.draw(4, np.random.default_rng(0))) == 1


def test_draw_deterministic():
    buf = buffer(capacity=20, reuse=3)
    buf.store([sample(-float(k), seq=(k,)) for k in range(20)])
    a = buf.draw(3, np.random.default_rng(42))
    b = buf.draw(3, np.random.default_rng(42))
    assert [s.sequence for s in a] == [s.sequence for s in b]


def test_assemble_before_start_returns_online_only():
    buf = buffer(capacity=10, reuse=2, start=5)
    online = [sample(-1.0), sample(-2.0)]
    out = buf.assemble_step(online, t=4, rng=np.random.default_rng(0))
    assert out == online
    assert len(buf) == 2  # stored even before the start step


def test_assemble_at_start_adds_reuse():
    buf = buffer(capacity=10, reuse=2, start=5)
    for t in range(5):
        buf.assemble_step([sample(-1.0 - t, step=t, seq=(t,))], t, np.random.default_rng(t))
    online = [sample(-9.0, step=5, seq=(9, 9))] * 10
    out = buf.assemble_step(online, t=5, rng=np.random.default_rng(5))
    assert len(out) == 12  # M + R
    assert out[:10] == online


def test_assemble_disabled_passthrough():
    buf = ReplayBuffer(HybridConfig(capacity=10, reuse=2, start=0, enabled=False))
    online = [sample(-1.0), sample(-2.0)]
    out = buf.assemble_step(online, t=100, rng=np.random.default_rng(0))
    assert out == online


def test_draw_happens_before_store():
    # a sample generated this step must not be drawn back in the same step
    buf = buffer(capacity=10, reuse=5, start=0)
    online = [sample(-1.0, step=0, seq=(k,)) for k in range(3)]
    out = buf.assemble_step(online, t=0, rng=np.random.default_rng(0))
    assert out == online  # buffer was empty at draw time
    out2 = buf.assemble_step(
        [sample(-2.0, step=1, seq=(7,))], t=1, rng=np.random.default_rng(1)
    )
    assert len(out2) == 1 + 3  # draw saw only step-0 samples


def test_hybrid_config_validation():
    with pytest.raises(ValueError):
        HybridConfig(capacity=2, reuse=5, start=0, enabled=True)
    HybridConfig(capacity=2, reuse=5, start=0, enabled=False)  # ok when disabled
    with pytest.raises(ValueError):
        HybridConfig(capacity=-1, reuse=0, start=0)


def test_energy_sample_validation():
    with pytest.raises(ValueError):
        EnergySample(sequence=(0,), energy=float("nan"), created_step=0, ref_logp=0.0)
    with pytest.raises(ValueError):
        EnergySample(sequence=(0,), energy=-1.0, created_step=-1, ref_logp=0.0)


def test_min_energy_monotone_over_steps():
    rng = np.random.default_rng(7)
    buf = buffer(capacity=8, reuse=2, start=3)
    minima = []
    for t in range(60):
        online = [
            sample(float(e), step=t, seq=(t, i))
            for i, e in enumerate(rng.normal(size=4))
        ]
        buf.assemble_step(online, t, rng)
        minima.append(buf.min_energy())
    assert all(b <= a + 1e-15 for a, b in zip(minima, minima[1:]))


def test_randomized_replay_laws():
    # shadow-model check of capacity, eviction, inclusion and size laws
    rng = np.random.default_rng(123)
    for trial in range(200):
        capacity = int(rng.integers(0, 12))
        reuse = int(rng.integers(0, capacity + 1)) if capacity else 0
        start = int(rng.integers(0, 8))
        buf = ReplayBuffer(HybridConfig(capacity, reuse, start, enabled=True))
        for t in range(int(rng.integers(1, 12))):
            m = int(rng.integers(1, 6))
            online = [
                sample(float(rng.normal()), step=t, seq=(trial, t, i))
                for i in range(m)
            ]
            before = buf.samples
            out = buf.assemble_step(online, t, rng)

            assert len(buf) <= capacity
            # output: online always included, in order, at the front
            assert out[: len(online)] == online
            expected_extra = min(reuse, len(before)) if t >= start else 0
            assert len(out) == len(online) + expected_extra
            for extra in out[len(online):]:
                assert extra in before
            # eviction law: every retained energy <= every evicted energy
            survivors = buf.samples
            evicted = [s for s in before + online if s not in survivors]
            if evicted and survivors:
                assert max(s.energy for s in survivors) <= min(
                    s.energy for s in evicted
                ) + 1e-15


def test_dump_jsonl(tmp_path):
    buf = buffer(capacity=4)
    buf.store([sample(-1.5, step=2, seq=(1, 2, 3))])
    path = tmp_path / "buffer.jsonl"
    buf.dump_jsonl(str(path))
    lines = path.read_text().splitlines()
    assert len(lines) == 1
    row = json.loads(lines[0])
    assert row == {"sequence": [1, 2, 3], "energy": -1.5, "created_step": 2}


def test_min_energy_empty():
    assert buffer().min_energy() == math.inf
