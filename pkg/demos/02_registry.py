"""Check each registry regime by the sign of its largest Lyapunov exponent.

Two copies of the state are stepped with the same RK4 the simulations use; the
separation is renormalized every half second (Benettin's method).  Periodic
regimes should come out near zero or below, chaotic ones clearly positive.
Takes a minute or two.
"""

import math

import numpy as np

from wopn.dynsys import registry, rk4_step


def largest_exponent(spec, transient=200.0, span=400.0, d0=1e-8):
    fs = spec.default_fs
    h = 1.0 / fs
    y = np.array(spec.initial_state, dtype=float)
    t = 0.0
    for _ in range(int(transient * fs)):
        y = rk4_step(spec.rhs, y, t, h, spec.params)
        t += h
    yp = y + d0 / math.sqrt(y.size)
    every = max(1, int(fs / 2))
    total, steps = 0.0, int(span * fs) // every * every
    for i in range(steps):
        y, yp = rk4_step(spec.rhs, y, t, h, spec.params), rk4_step(spec.rhs, yp, t, h, spec.params)
        t += h
        if (i + 1) % every == 0:
            d = np.linalg.norm(yp - y)
            total += math.log(d / d0)
            yp = y + (yp - y) * d0 / d
    return total / (steps / fs)


for spec in registry():
    for label in ("periodic", "chaotic"):
        s = spec.with_label(label)
        active = ", ".join(f"{k}={v:g}" for k, v in s.params.items())
        print(f"{spec.name:20s} {label:9s} {active:40s} LE = {largest_exponent(s):+.3f}")
