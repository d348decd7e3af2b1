"""A heavy cycle with one light chord, seen through each distance.

The chord splits the loop into two under hop counts, but the weighted
distances route around it, so they still see one loop.
"""

from wopn.graphdist import METHODS, distance_matrix
from wopn.opn import cut_cycle, cycle_graph
from wopn.persistence import rips_persistence

n = 17
for name, net in (("cycle", cycle_graph(n, weight=10)), ("cycle + chord", cut_cycle(n))):
    print(name)
    for m in METHODS:
        dg = rips_persistence(distance_matrix(net, m).values)
        pts = ", ".join(f"({b:.3g}, {d:.3g})" for b, d in dg.significant(1))
        print(f"  {m:5s} D1 significant: {pts}")
