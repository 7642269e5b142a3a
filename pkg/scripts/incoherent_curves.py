"""Optimal single-qubit attack: Eve's and Bob's information and success versus disturbance."""
import argparse
import sys

from bb84eve.cli import cmd_incoherent

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--steps", type=int, default=101)
ap.add_argument("--out", default=None)
args = ap.parse_args()

text = cmd_incoherent(0.0, 0.5, args.steps)
if args.out:
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
else:
    sys.stdout.write(text)
