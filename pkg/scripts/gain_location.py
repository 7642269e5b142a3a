"""Locate the disturbance where the coherent pair-success gain over two incoherent attacks peaks."""
import argparse

import numpy as np

from bb84eve import incoherent, optimizer


def relative_gain(D, opts):
    _, P2 = optimizer.maximize_pair_success(D, opts)
    P1 = incoherent.eve_success(incoherent.optimal_attack(D)) ** 2
    return (P2 - P1) / P1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d-min", type=float, default=0.001)
    ap.add_argument("--d-max", type=float, default=0.15)
    ap.add_argument("--steps", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    opts = optimizer.OptimizationOptions(seed=args.seed)

    grid = np.linspace(args.d_min, args.d_max, args.steps)
    gains = [relative_gain(D, opts) for D in grid]
    for D, g in zip(grid, gains):
        print(f"{D:.5f},{g:.6f}")
    k = int(np.argmax(gains))
    # golden-section refinement on the bracketing cell
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    phi = (np.sqrt(5) - 1) / 2
    for _ in range(25):
        a, b = hi - phi * (hi - lo), lo + phi * (hi - lo)
        if relative_gain(a, opts) > relative_gain(b, opts):
            hi = b
        else:
            lo = a
    D_star = 0.5 * (lo + hi)
    print(f"# peak D={D_star:.5f} relative_gain={relative_gain(D_star, opts):.6f}")


if __name__ == "__main__":
    main()
