from __future__ import annotations

import json
import subprocess
import sys

import pytest

from gqe.cli import main
from gqe.hamiltonian import Hamiltonian, PauliTerm, save_hamiltonian
from gqe.trainer import RUN_CSV_HEADER

TINY_TRAIN = [
    "--steps", "12", "--seq-len", "6", "--samples-per-step", "4",
    "--embed-dim", "16", "--ff-dim", "32", "--n-heads", "2", "--n-layers", "1",
    "--log-every", "0",
]


def run_cli(*argv: str) -> int:
    return main(list(argv))


# --- exact -----------------------------------------------------------------


def test_exact_h2(h2_path, capsys):
    assert run_cli("exact", "--hamiltonian", h2_path) == 0
    out = capsys.readouterr().out
    ground = float(out.split("exact ground energy")[1].split("Ha")[0])
    hf = float(out.split("hartree-fock energy")[1].split("Ha")[0])
    assert ground == pytest.approx(-1.137, abs=1e-3)
    assert hf == pytest.approx(-1.117, abs=2e-3)


def test_exact_single_z_file(tmp_path, capsys):
    h = Hamiltonian(1, [PauliTerm(1.0, "Z")], [0], name="z-test")
    path = tmp_path / "z.json"
    save_hamiltonian(h, str(path))
    assert run_cli("exact", "--hamiltonian", str(path)) == 0
    assert "-1.0000000000" in capsys.readouterr().out


def test_exact_missing_file(capsys):
    assert run_cli("exact", "--hamiltonian", "/no/such/file.json") == 2
    assert "error" in capsys.readouterr().err


def test_exact_too_large(tmp_path, capsys):
    h = Hamiltonian(17, [PauliTerm(1.0, "Z" * 17)], [0] * 17)
    path = tmp_path / "big.json"
    save_hamiltonian(h, str(path))
    assert run_cli("exact", "--hamiltonian", str(path)) == 2
    assert "limited to 16 qubits" in capsys.readouterr().err


# --- pool ---------------------------------------------------------------------


def test_pool_beh2(beh2_path, capsys):
    assert run_cli("pool", "--hamiltonian", beh2_path) == 0
    out = capsys.readouterr().out
    assert "pool size L = 1633" in out
    assert "n_singles = 24" in out
    assert "n_doubles = 180" in out


def test_pool_h2_list(h2_path, capsys):
    assert run_cli("pool", "--hamiltonian", h2_path, "--list") == 0
    out = capsys.readouterr().out
    assert "pool size L = 25" in out
    token_lines = [l for l in out.splitlines() if l and l[0].isdigit() and "\t" in l]
    assert len(token_lines) == 25
    assert token_lines[0].split("\t")[1] == "identity"


# --- train ----------------------------------------------------------------------


def test_train_writes_csv_and_summary(h2_path, tmp_path, capsys):
    out = tmp_path / "run.csv"
    code = run_cli(
        "train", "--hamiltonian", h2_path, "--out", str(out),
        "--loss", "pdpo", "--alpha", "0.5", "--beta", "0.1", "--seed", "42",
        *TINY_TRAIN,
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == RUN_CSV_HEADER
    assert len(lines) == 13
    summary = json.loads((tmp_path / "run.summary.json").read_text())
    assert summary["seed"] == 42
    assert len(summary["best_sequence"]) == 6


def test_train_missing_hamiltonian(tmp_path, capsys):
    code = run_cli(
        "train", "--hamiltonian", str(tmp_path / "nope.json"),
        "--out", str(tmp_path / "r.csv"), *TINY_TRAIN,
    )
    assert code == 2


def test_train_requires_out(h2_path, capsys):
    assert run_cli("train", "--hamiltonian", h2_path) == 2
    assert "output path" in capsys.readouterr().err


def test_train_hybrid_respects_capacity(h2_path, tmp_path, capsys):
    out = tmp_path / "hybrid.csv"
    code = run_cli(
        "train", "--hamiltonian", h2_path, "--out", str(out),
        "--hybrid", "C=25,R=2,S=5", *TINY_TRAIN,
    )
    assert code == 0
    rows = out.read_text().splitlines()[1:]
    buffer_sizes = [int(r.split(",")[-1]) for r in rows]
    assert all(size <= 25 for size in buffer_sizes)
    assert buffer_sizes[-1] > 0


def test_train_determinism_byte_identical(h2_path, tmp_path):
    outs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        assert run_cli(
            "train", "--hamiltonian", h2_path, "--out", str(out),
            "--seed", "777", *TINY_TRAIN,
        ) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_train_config_file_and_flag_precedence(h2_path, tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text(
        "# desk-ish settings\n"
        f"hamiltonian = {h2_path}\n"
        "loss = dpo\n"
        "seed = 5\n"
        "steps = 12\n"
        "seq_len = 6\n"
        "samples_per_step = 4\n"
        "embed_dim = 16\n"
        "ff_dim = 32\n"
        "n_heads = 2\n"
        "n_layers = 1\n"
        "log_every = 0\n"
    )
    out = tmp_path / "cfg.csv"
    # --seed on the command line overrides the file's seed = 5
    assert run_cli("train", "--config", str(config), "--out", str(out), "--seed", "9") == 0
    summary = json.loads((tmp_path / "cfg.summary.json").read_text())
    assert summary["seed"] == 9


def test_train_bad_hybrid_spec(h2_path, tmp_path, capsys):
    # argparse rejects the malformed value itself, exiting with code 2
    with pytest.raises(SystemExit) as exc:
        run_cli(
            "train", "--hamiltonian", h2_path, "--out", str(tmp_path / "x.csv"),
            "--hybrid", "C=1,R=", *TINY_TRAIN,
        )
    assert exc.value.code == 2


def test_paper_scale_profile_resolves():
    from gqe.cli import _train_config_from

    cfg, _ = _train_config_from(
        {"paper_scale": True, "hamiltonian": "beh2.json", "out": "run.csv"}
    )
    assert cfg.model.embed_dim == 768
    assert cfg.model.ff_dim == 3072
    assert cfg.model.n_heads == 12
    assert cfg.model.n_layers == 12
    assert cfg.model.max_len == 40
    assert cfg.schedule.n_steps == 3000
    assert cfg.learning_rate == 8e-5
    assert cfg.weight_decay == 0.01
    assert cfg.samples_per_step == 10


def test_unknown_config_key(h2_path, tmp_path, capsys):
    config = tmp_path / "bad.cfg"
    config.write_text("frobnicate = 3\n")
    code = run_cli("train", "--config", str(config), "--out", str(tmp_path / "x.csv"))
    assert code == 2
    assert "unknown config entry" in capsys.readouterr().err


# --- aggregate --------------------------------------------------------------------


def _make_runs(h2_path, tmp_path, seeds) -> list[str]:
    paths = []
    for seed in seeds:
        out = tmp_path / f"run{seed}.csv"
        assert run_cli(
            "train", "--hamiltonian", h2_path, "--out", str(out),
            "--seed", str(seed), *TINY_TRAIN,
        ) == 0
        paths.append(str(out))
    return paths


def test_aggregate_runs(h2_path, tmp_path, capsys):
    paths = _make_runs(h2_path, tmp_path, [1, 2, 3])
    out = tmp_path / "agg.csv"
    assert run_cli("aggregate", *paths, "--out", str(out), "--block", "4") == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "step,mean,min,max"
    assert len(lines) == 13
    for line in lines[1:]:
        _, mean, mn, mx = line.split(",")
        assert float(mn) <= float(mean) <= float(mx)
    blocks = (tmp_path / "agg.blocks.csv").read_text().splitlines()
    assert len(blocks) == 1 + 3 * 3  # header + 3 blocks for each of 3 runs


def test_aggregate_header_mismatch(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("step,foo\n0,1\n")
    assert run_cli("aggregate", str(bad), "--out", str(tmp_path / "agg.csv")) == 2


# --- entry point -------------------------------------------------------------------


def test_installed_entry_point(h2_path):
    result = subprocess.run(
        [sys.executable, "-m", "gqe.cli", "exact", "--hamiltonian", h2_path],
        capture_output=True, text=True,
    )
    assert result.returncode == 0
    assert "exact ground energy" in result.stdout
