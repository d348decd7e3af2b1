"""Periodic vs chaotic Lorenz: count the loops that stand out in each diagram.

100 Hz for 100 s, last 20 s kept, n = 6 and tau = 17.
"""

from wopn.dynsys import integrate, lookup, trim
from wopn.graphdist import METHODS, distance_matrix
from wopn.opn import ordinal_network
from wopn.persistence import count_significant, max_lifetime, rips_persistence

for label in ("periodic", "chaotic"):
    sig = trim(integrate(lookup("lorenz"), 100.0, 100.0, label=label), 0.2)
    net = ordinal_network(sig, 6, 17)
    print(f"{label}: {net.n_vertices} permutations, {len(net.edges())} edges")
    for m in METHODS:
        dg = rips_persistence(distance_matrix(net, m).values)
        print(f"  {m:5s} significant={count_significant(dg):3d}  max lifetime={max_lifetime(dg):.4g}")
