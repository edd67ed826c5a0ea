"""Command-line interface.

Subcommands: train, exact, pool, aggregate, serve.  Exit codes: 0 on
success, 2 on usage/input errors, 3 on numeric aborts.  Train settings
resolve as: built-in profile defaults, overridden by --config file
entries, overridden by explicit flags.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import aggregate as agg
from .errors import NumericError
from .hamiltonian import load_hamiltonian
from .losses import LOSS_VARIANTS, LossConfig
from .model import ModelConfig
from .pool import pool_for_hamiltonian
from .replay import HybridConfig
from .simulator import exact_ground_energy, expectation, hartree_fock_state
from .trainer import (
    DESK_LEARNING_RATE,
    DESK_MODEL,
    DESK_SEQUENCE_LENGTH,
    DESK_STEPS,
    PAPER_LEARNING_RATE,
    PAPER_MODEL,
    PAPER_SEQUENCE_LENGTH,
    PAPER_STEPS,
    ScheduleConfig,
    TrainConfig,
    Trainer,
    summary_path,
)


def _parse_hybrid(text: str) -> HybridConfig:
    """Parse 'C=25,R=2,S=50' (or 'off') into a hybrid config."""
    if text.strip().lower() in ("off", "none", "disabled"):
        return HybridConfig()
    values: dict[str, int] = {}
    for part in text.split(","):
        key, _, raw = part.partition("=")
        key = key.strip().upper()
        if key not in ("C", "R", "S") or not raw.strip():
            raise ValueError(f"bad --hybrid entry {part!r}; expected C=..,R=..,S=..")
        values[key] = int(raw)
    missing = {"C", "R", "S"} - values.keys()
    if missing:
        raise ValueError(f"--hybrid is missing {sorted(missing)}")
    return HybridConfig(
        capacity=values["C"], reuse=values["R"], start=values["S"], enabled=True
    )


def _str2bool(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")


# option name -> converter, shared by flags and --config files
_TRAIN_OPTIONS: dict[str, type | object] = {
    "hamiltonian": str,
    "out": str,
    "loss": str,
    "beta": float,
    "alpha": float,
    "seed": int,
    "steps": int,
    "samples_per_step": int,
    "seq_len": int,
    "lr": float,
    "weight_decay": float,
    "temperature_initial": float,
    "temperature_final": float,
    "hybrid": _parse_hybrid,
    "embed_dim": int,
    "ff_dim": int,
    "n_heads": int,
    "n_layers": int,
    "dropout": float,
    "grad_clip": float,
    "paper_scale": _str2bool,
    "debug_checks": _str2bool,
    "log_every": int,
}


def _read_config_file(path: str) -> dict:
    """Parse 'key = value' lines; '#' starts a comment."""
    values: dict[str, object] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().lower().replace("-", "_")
            if not sep or key not in _TRAIN_OPTIONS:
                raise ValueError(f"{path}:{lineno}: unknown config entry {line!r}")
            values[key] = _TRAIN_OPTIONS[key](value.strip())
    return values


def _add_train_parser(subparsers) -> None:
    p = subparsers.add_parser("train", help="run a training job")
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--hamiltonian", help="Hamiltonian JSON file")
    p.add_argument("--out", help="output CSV path (summary JSON written next to it)")
    p.add_argument("--loss", choices=LOSS_VARIANTS)
    p.add_argument("--beta", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--samples-per-step", type=int, dest="samples_per_step")
    p.add_argument("--seq-len", type=int, dest="seq_len")
    p.add_argument("--lr", type=float)
    p.add_argument("--weight-decay", type=float, dest="weight_decay")
    p.add_argument("--temperature-initial", type=float, dest="temperature_initial")
    p.add_argument("--temperature-final", type=float, dest="temperature_final")
    p.add_argument("--hybrid", type=_parse_hybrid, help="C=25,R=2,S=50 or 'off'")
    p.add_argument("--embed-dim", type=int, dest="embed_dim")
    p.add_argument("--ff-dim", type=int, dest="ff_dim")
    p.add_argument("--n-heads", type=int, dest="n_heads")
    p.add_argument("--n-layers", type=int, dest="n_layers")
    p.add_argument("--dropout", type=float)
    p.add_argument("--grad-clip", type=float, dest="grad_clip")
    p.add_argument("--paper-scale", action="store_const", const=True, dest="paper_scale")
    p.add_argument("--debug-checks", action="store_const", const=True, dest="debug_checks")
    p.add_argument("--log-every", type=int, dest="log_every")


def _train_config_from(values: dict) -> tuple[TrainConfig, int]:
    if values.get("paper_scale"):
        profile = dict(
            seq_len=PAPER_SEQUENCE_LENGTH, steps=PAPER_STEPS,
            lr=PAPER_LEARNING_RATE, **PAPER_MODEL,
        )
    else:
        profile = dict(
            seq_len=DESK_SEQUENCE_LENGTH, steps=DESK_STEPS,
            lr=DESK_LEARNING_RATE, **DESK_MODEL,
        )
    merged = {**profile, **values}
    if not merged.get("hamiltonian"):
        raise ValueError("a Hamiltonian file is required (--hamiltonian)")
    if not merged.get("out"):
        raise ValueError("an output path is required (--out)")

    model = ModelConfig(
        vocab_size=0,
        max_len=merged["seq_len"],
        embed_dim=merged["embed_dim"],
        ff_dim=merged["ff_dim"],
        n_heads=merged["n_heads"],
        n_layers=merged["n_layers"],
        dropout=merged.get("dropout", 0.0),
    )
    loss = LossConfig(
        variant=merged.get("loss", "pdpo"),
        beta=merged.get("beta", 0.1),
        alpha=merged.get("alpha", 0.5),
    )
    schedule = ScheduleConfig(
        t_initial=merged.get("temperature_initial", 1.5),
        t_final=merged.get("temperature_final", 0.7),
        n_steps=merged["steps"],
    )
    cfg = TrainConfig(
        hamiltonian_path=merged["hamiltonian"],
        model=model,
        loss=loss,
        hybrid=merged.get("hybrid", HybridConfig()),
        schedule=schedule,
        samples_per_step=merged.get("samples_per_step", 10),
        learning_rate=merged["lr"],
        weight_decay=merged.get("weight_decay", 0.01),
        seed=merged.get("seed", 42),
        output_path=merged["out"],
        grad_clip=merged.get("grad_clip"),
        debug_checks=bool(merged.get("debug_checks", False)),
    )
    return cfg, merged.get("log_every", 50)


def _cmd_train(args: argparse.Namespace) -> int:
    values = _read_config_file(args.config) if args.config else {}
    for key in _TRAIN_OPTIONS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    cfg, log_every = _train_config_from(values)

    def report(record) -> None:
        if log_every > 0 and (record.step % log_every == 0
                              or record.step == cfg.schedule.n_steps - 1):
            print(
                f"step {record.step:5d}  T={record.temperature:.4f}  "
                f"min_so_far={record.min_energy_so_far:.8f}  "
                f"pairs={record.n_pairs}  buffer={record.buffer_size}",
                file=sys.stderr,
            )

    trainer = Trainer(cfg)
    log = trainer.run(on_step=report)
    print(f"wrote {cfg.output_path} and {summary_path(cfg.output_path)}")
    print(f"best energy {log.best_energy:.10f} Ha over {len(log.records)} steps")
    hint = trainer.hamiltonian.ground_energy_hint
    if hint is not None:
        print(f"exact ground energy hint {hint:.10f} Ha "
              f"(gap {log.best_energy - hint:.3e})")
    return 0


def _cmd_exact(args: argparse.Namespace) -> int:
    h = load_hamiltonian(args.hamiltonian)
    ground = exact_ground_energy(h)
    hf = expectation(hartree_fock_state(h.n_qubits, h.hf_occupation), h)
    print(f"{h.name or args.hamiltonian}: {h.n_qubits} qubits, {len(h.terms)} terms")
    print(f"exact ground energy {ground:.10f} Ha")
    print(f"hartree-fock energy {hf:.10f} Ha")
    if h.ground_energy_hint is not None:
        print(f"file hint           {h.ground_energy_hint:.10f} Ha")
    return 0


def _cmd_pool(args: argparse.Namespace) -> int:
    h = load_hamiltonian(args.hamiltonian)
    pool = pool_for_hamiltonian(h)
    print(f"pool size L = {pool.size}")
    print(f"n_singles = {len(pool.singles)}")
    print(f"n_doubles = {len(pool.doubles)}")
    print(f"angle set = {list(pool.angle_set)}")
    if args.list:
        for token, gate in enumerate(pool.gates):
            wires = ",".join(str(w) for w in gate.wires)
            print(f"{token}\t{gate.kind.value}\t[{wires}]\t{gate.angle:+.4f}")
    return 0


def _cmd_aggregate(args: argparse.Namespace) -> int:
    curves = [agg.read_run_csv(path) for path in args.csvs]
    points = agg.aggregate_curves(curves)
    agg.write_aggregate_csv(points, args.out)
    written = [args.out]
    if args.block:
        blocks_path = str(Path(args.out).with_suffix(".blocks.csv"))
        agg.write_blocks_csv(curves, args.block, blocks_path)
        written.append(blocks_path)
    print(f"aggregated {len(curves)} runs -> {', '.join(written)}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gqe",
        description="Train a generative circuit model against a molecular Hamiltonian.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    _add_train_parser(subparsers)

    p_exact = subparsers.add_parser("exact", help="print exact and HF energies")
    p_exact.add_argument("--hamiltonian", required=True)

    p_pool = subparsers.add_parser("pool", help="inspect the operator pool")
    p_pool.add_argument("--hamiltonian", required=True)
    p_pool.add_argument("--list", action="store_true", help="dump every token")

    p_aggr = subparsers.add_parser("aggregate", help="aggregate run CSVs")
    p_aggr.add_argument("csvs", nargs="+", help="training-log CSV files")
    p_aggr.add_argument("--out", required=True)
    p_aggr.add_argument("--block", type=int, help="also emit per-block minima")

    p_serve = subparsers.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    return parser


_COMMANDS = {
    "train": _cmd_train,
    "exact": _cmd_exact,
    "pool": _cmd_pool,
    "aggregate": _cmd_aggregate,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except NumericError as exc:
        print(f"gqe: numeric abort: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"gqe: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
