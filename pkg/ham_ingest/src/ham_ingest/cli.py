"""Command-line entry point: ham-ingest."""
from __future__ import annotations

import argparse
import sys

from .generate import MOLECULES, generate


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ham-ingest",
        description="Generate a qubit-Hamiltonian JSON file for a small molecule.",
    )
    parser.add_argument("--molecule", required=True, choices=sorted(MOLECULES))
    parser.add_argument("--bond-length", type=float, required=True, help="in Angstrom")
    parser.add_argument("--basis", default="sto-3g")
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)

    if args.basis.lower() != "sto-3g":
        parser.error(f"unsupported basis {args.basis!r} (only sto-3g)")

    try:
        gen = generate(args.molecule, args.bond_length, args.out)
    except Exception as exc:  # noqa: BLE001 - one-shot tool, report and exit
        print(f"ham-ingest: error: {exc}", file=sys.stderr)
        return 1
    print(
        f"wrote {args.out}: {gen.name}, {gen.n_qubits} qubits, "
        f"{len(gen.terms)} terms, {len(gen.singles)} singles, "
        f"{len(gen.doubles)} doubles"
    )
    print(f"  HF energy     {gen.hf_energy:.8f} Ha")
    print(f"  ground energy {gen.ground_energy:.8f} Ha")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
