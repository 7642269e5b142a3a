"""Ratio I_e/D of the optimal single-qubit attack as D -> 0, against its limit 2/ln 2."""
import math

from bb84eve.incoherent import small_d_slope

limit = 2 / math.log(2)
print("D,slope,limit_minus_slope")
for k in range(1, 9):
    D = 10.0**-k
    s = small_d_slope(D)
    print(f"{D:.0e},{s:.12f},{limit - s:.3e}")
