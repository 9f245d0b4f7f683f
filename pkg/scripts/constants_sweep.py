"""Check every dispatch inequality over a range of horizons and report timings."""

import argparse
import time
from dataclasses import dataclass

from aitlab.dispatch import DEFAULT_CONDS, DispatchMachine, verify_constants


@dataclass
class Config:
    lengths: str = "12,14,16,18"
    fuel: int = 10_000
    conds: str = ",".join(DEFAULT_CONDS)
    shards: int = 1


def main(cfg: Config):
    conds = tuple(cfg.conds.split(","))
    for L in (int(t) for t in cfg.lengths.split(",")):
        t0 = time.perf_counter()
        checks = verify_constants(DispatchMachine(), L, cfg.fuel, conds, shards=cfg.shards)
        dt = time.perf_counter() - t0
        for c in checks:
            print(f"max_len={L} {c.line()}")
        ok = all(c.ok for c in checks)
        print(f"SUMMARY max_len={L} fuel={cfg.fuel} all_pass={ok} seconds={dt:.1f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(Config()).items():
        ap.add_argument("--" + name.replace("_", "-"), type=type(default), default=default)
    main(Config(**vars(ap.parse_args())))
