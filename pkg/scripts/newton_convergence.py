"""Tabulate Newton convergence for the concentration estimate.

For a grid of mean resultant lengths, prints the iteration count from each
starting value and the relative error left after a fixed two steps.

    python3 scripts/newton_convergence.py
"""
import numpy as np

from vmforient.vmf import initial_kappa, invert_a3, newton_a3


def main():
    print(f"{'rbar':>5} {'kappa':>10} | {'k0 (1-R)':>9} {'iters':>5} {'2-step err':>10} | "
          f"{'k0 (1-R2)':>9} {'iters':>5} {'2-step err':>10}")
    for r in np.round(np.concatenate([[0.01, 0.05], np.arange(0.1, 0.91, 0.1), [0.95, 0.99]]), 2):
        r = float(r)
        exact = invert_a3(r)
        cells = []
        for start in ("one_minus_r", "one_minus_r2"):
            _, iters = newton_a3(r, start=start)
            two = newton_a3(r, steps=2, start=start)[0]
            cells.append(f"{initial_kappa(r, start):9.4f} {iters:5d} {abs(two - exact) / exact:10.2e}")
        print(f"{r:5.2f} {exact:10.5f} | {cells[0]} | {cells[1]}")


if __name__ == "__main__":
    main()
