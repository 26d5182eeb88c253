#!/usr/bin/env python3
"""Fock-state preparation by photon-number filtration.

Compares the Gaussian-plus-comb default schedule against pure binary comb
schedules of increasing depth, reporting success probability and fidelity.
"""

import argparse

from fockmet import (
    binary_fock_schedule,
    default_fock_schedule,
    default_spec,
    prepare_fock,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--target", type=int, default=10)
    parser.add_argument("--max-depth", type=int, default=5)
    args = parser.parse_args()

    spec = default_spec(args.target)
    print(f"target |{args.target}>  (dim = {spec.dim}, guard = {spec.guard})")
    print(f"{'schedule':>16} {'p_success':>10} {'fidelity':>12}")

    _, p, fid = prepare_fock(args.target, default_fock_schedule(args.target), spec)
    print(f"{'gaussian+comb':>16} {p:>10.4f} {fid:>12.8f}")
    for m in range(1, args.max_depth + 1):
        _, p, fid = prepare_fock(args.target, binary_fock_schedule(args.target, m), spec)
        print(f"{f'binary m={m}':>16} {p:>10.4f} {fid:>12.8f}")


if __name__ == "__main__":
    main()
