"""Lower bounds on the halting probability of the prefix machines along a horizon ladder."""

import argparse

from aitlab.bitvm import BaseMachine, PrefixMachine
from aitlab.complexity import Horizon
from aitlab.dispatch import DispatchMachine
from aitlab.omega import omega_lower


def main(max_len: int, fuel: int):
    machines = {"prefix-base": PrefixMachine(BaseMachine()),
                "prefix-dispatch": DispatchMachine(prefix=True)}
    for name, m in machines.items():
        for L in range(1, max_len + 1):
            w = omega_lower(m, Horizon(L, fuel))
            print(f"machine={name} max_len={L} fuel={fuel} omega_lower={w} "
                  f"approx={w.num / 2 ** w.exp:.6g}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-len", type=int, default=20)
    ap.add_argument("--fuel", type=int, default=1000)
    args = ap.parse_args()
    main(args.max_len, args.fuel)
