"""Compare sampled output frequencies with bounded-horizon complexity estimates.

Programs are drawn at random (length uniform in [0, max_len]) and run on the
chosen machine; each observed output is listed with its frequency and K_hat.
A Spearman rank correlation between -log2(frequency) and K_hat is reported.
"""

import argparse
import math
from dataclasses import dataclass

from aitlab.cli import build_machine
from aitlab.complexity import Horizon, empirical_a_priori, frequency_lines, k_table


@dataclass
class Config:
    machine: str = "direct"
    samples: int = 200_000
    max_len: int = 20
    fuel: int = 1000
    seed: int = 0


def _ranks(xs):
    order = sorted(range(len(xs)), key=xs.__getitem__)
    ranks = [0.0] * len(xs)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and xs[order[j + 1]] == xs[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2
        i = j + 1
    return ranks


def spearman(a, b):
    try:
        from scipy.stats import spearmanr
        return float(spearmanr(a, b).statistic)
    except ImportError:
        ra, rb = _ranks(a), _ranks(b)
        ma, mb = sum(ra) / len(ra), sum(rb) / len(rb)
        cov = sum((x - ma) * (y - mb) for x, y in zip(ra, rb))
        va = math.sqrt(sum((x - ma) ** 2 for x in ra))
        vb = math.sqrt(sum((y - mb) ** 2 for y in rb))
        return cov / (va * vb) if va and vb else float("nan")


def main(cfg: Config):
    m = build_machine(cfg.machine)
    freq = empirical_a_priori(m, cfg.samples, cfg.max_len, cfg.fuel, cfg.seed)
    table = k_table(m, "", Horizon(cfg.max_len, cfg.fuel))
    for line in frequency_lines(freq, table):
        print(line)
    common = [x for x in freq if x in table]
    if len(common) >= 3:
        rho = spearman([-math.log2(freq[x]) for x in common],
                       [table[x].value for x in common])
        print(f"SUMMARY outputs={len(freq)} with_estimate={len(common)} spearman={rho:.4f}")
    else:
        print(f"SUMMARY outputs={len(freq)} with_estimate={len(common)} spearman=nan")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(Config()).items():
        ap.add_argument("--" + name.replace("_", "-"), type=type(default), default=default)
    main(Config(**vars(ap.parse_args())))
