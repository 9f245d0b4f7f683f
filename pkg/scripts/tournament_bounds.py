"""Exact transitive-subtournament counts against the encoding bound, n = 2..6."""

import argparse

from aitlab.combinatorics import tournament_bound_check


def main(max_n: int):
    for n in range(2, max_n + 1):
        for line in tournament_bound_check(n).lines():
            print(line)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=6)
    main(ap.parse_args().max_n)
