"""Continuous dynamical systems, fixed-step RK4 simulation and bounded additive noise.

Registry parameter sources
--------------------------
Every entry carries one ``periodic`` and one ``chaotic`` parameter set.  The
equations of motion are the published ones; the sources are recorded on each
``SystemSpec.source`` and repeated here.

lorenz
    E. N. Lorenz, "Deterministic nonperiodic flow", J. Atmos. Sci. 20 (1963).
    x' = sigma (y - x), y' = x (rho - z) - y, z' = x y - beta z.
    sigma = 10, beta = 8/3; periodic rho = 181.0, chaotic rho = 180.1.  The
    periodic window around rho = 181 spans roughly [180.7, 181.6]; rho = 180.1
    lies just below it and is chaotic (largest Lyapunov exponent ~ +1.7).
rossler
    O. E. Rossler, "An equation for continuous chaos", Phys. Lett. A 57 (1976).
    x' = -y - z, y' = x + a y, z' = b + z (x - c).
    a = b = 0.2; periodic c = 2.5 (period-1 cycle), chaotic c = 5.7.
chen
    G. Chen and T. Ueta, "Yet another chaotic attractor", Int. J. Bifurc.
    Chaos 9 (1999).  x' = a (y - x), y' = (c - a) x - x z + c y, z' = x y - b z.
    a = 35, b = 3; chaotic c = 28; periodic c = 30 (period-1 cycle beyond the
    chaotic range).
rucklidge
    A. M. Rucklidge, "Chaos in models of double convection", J. Fluid Mech.
    237 (1992).  x' = -kappa x + lam y - y z, y' = x, z' = -z + y^2.
    lam = 6.7; chaotic kappa = 2.0; periodic kappa = 1.1.
driven_van_der_pol
    U. Parlitz and W. Lauterborn, "Period-doubling cascades and devil's
    staircases of the driven van der Pol oscillator", Phys. Rev. A 36 (1987).
    x' = y, y' = mu (1 - x^2) y - x + A cos(omega t).
    mu = 5, A = 5; chaotic omega = 2.466; periodic omega = 2.45.
forced_brusselator
    K. Tomita and T. Kai, "Stroboscopic phase portrait and strange attractors",
    Phys. Lett. A 66 (1978); T. Kai and K. Tomita, Prog. Theor. Phys. 61 (1979).
    x' = A + x^2 y - (B + 1) x + a cos(omega t), y' = B x - x^2 y.
    A = 0.4, B = 1.2, omega = 0.81; chaotic a = 0.05; periodic a = 0.2 (1:1
    entrainment).

The periodic/chaotic parameter choices that are not quoted directly in the
sources were confirmed by the sign of the largest Lyapunov exponent of the
RK4-integrated flow at the registry sample rate (see ``demos/02_registry.py``).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import DegenerateError, DivergenceError, NotFoundError, ParameterError, SignalLengthError

LABELS = ("periodic", "chaotic")


@dataclass(frozen=True)
class Signal:
    """Uniformly sampled scalar series."""

    samples: np.ndarray
    fs: float
    label: Optional[str] = None

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float)
        if x.ndim != 1:
            raise SignalLengthError("signal samples must be one-dimensional")
        if x.size < 2:
            raise SignalLengthError(f"signal needs at least 2 samples, got {x.size}")
        if not self.fs > 0:
            raise ParameterError(f"sample rate must be positive, got {self.fs}")
        if not np.all(np.isfinite(x)):
            raise ParameterError("signal contains non-finite samples")
        object.__setattr__(self, "samples", x)

    def __len__(self):
        return self.samples.size

    @property
    def time(self):
        return np.arange(self.samples.size) / self.fs

    def to_csv(self, path):
        """Two columns, ``time,value``."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["time", "value"])
            for t, v in zip(self.time, self.samples):
                w.writerow([repr(float(t)), repr(float(v))])

    @classmethod
    def from_csv(cls, path, label=None):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if data.shape[0] < 2:
            raise SignalLengthError("signal CSV needs at least two rows")
        fs = round(1.0 / (data[1, 0] - data[0, 0]), 6)
        return cls(data[:, 1], fs, label)


@dataclass(frozen=True)
class NoiseSpec:
    snr_db: float = math.inf
    truncation: float = 3.0
    seed: int = 0

    def __post_init__(self):
        if not self.truncation > 0:
            raise ParameterError("truncation must be positive")
        if math.isnan(self.snr_db):
            raise ParameterError("snr_db is NaN")

    @property
    def sigma(self):
        """Noise standard deviation relative to a unit-std signal."""
        if math.isinf(self.snr_db) and self.snr_db > 0:
            return 0.0
        return 10.0 ** (-self.snr_db / 20.0)

    @property
    def amplitude_bound(self):
        """Total peak-to-peak noise bound, epsilon = 2 * truncation * sigma."""
        return 2.0 * self.truncation * self.sigma


@dataclass(frozen=True)
class SystemSpec:
    """A registry entry.

    ``rhs(state, t, params)`` returns the state derivative.  ``regimes`` maps a
    dynamic-state label to the parameter set producing it; ``params`` is the
    active set (defaults to the periodic one).
    """

    name: str
    dimension: int
    params: Mapping[str, float]
    rhs: Callable[[np.ndarray, float, Mapping[str, float]], np.ndarray]
    regimes: Mapping[str, Mapping[str, float]]
    initial_state: tuple
    default_tau: int = 50
    default_fs: float = 100.0
    drive: Optional[str] = None
    observe: int = 0
    source: str = ""
    label: Optional[str] = None

    def __post_init__(self):
        if self.dimension < 2:
            raise ParameterError("systems must have dimension >= 2")
        if len(self.initial_state) != self.dimension:
            raise ParameterError("initial state does not match dimension")

    def with_label(self, label):
        """Return a copy with the parameter set of regime ``label`` active."""
        if label not in self.regimes:
            raise ParameterError(f"{self.name} has no {label!r} regime; has {sorted(self.regimes)}")
        return replace(self, params=dict(self.regimes[label]), label=label)

    @property
    def default_duration(self):
        """750 delays' worth of samples, in seconds."""
        return 750.0 * self.default_tau / self.default_fs

    def to_json(self):
        return {
            "name": self.name,
            "dimension": self.dimension,
            "params": {k: float(v) for k, v in self.params.items()},
            "regimes": {lab: {k: float(v) for k, v in p.items()} for lab, p in self.regimes.items()},
            "initial_state": [float(v) for v in self.initial_state],
            "tau": self.default_tau,
            "fs": self.default_fs,
            "drive": self.drive,
            "observe": self.observe,
            "labels": sorted(self.regimes),
            "source": self.source,
        }


# ---------------------------------------------------------------- integration


def rk4_step(f, y, t, h, params):
    k1 = f(y, t, params)
    k2 = f(y + 0.5 * h * k1, t + 0.5 * h, params)
    k3 = f(y + 0.5 * h * k2, t + 0.5 * h, params)
    k4 = f(y + h * k3, t + h, params)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4(f, y0, t0, h, n_steps, params=None):
    """Integrate ``y' = f(y, t, params)`` for ``n_steps`` fixed steps.

    Returns an ``(n_steps + 1, dim)`` trajectory including ``y0``.
    """
    y = np.array(y0, dtype=float)
    out = np.empty((n_steps + 1, y.size))
    out[0] = y
    t = t0
    for i in range(1, n_steps + 1):
        y = rk4_step(f, y, t, h, params)
        t = t0 + i * h
        if not np.all(np.isfinite(y)):
            raise DivergenceError(t)
        out[i] = y
    return out


def integrate(spec, duration_s, fs, initial_state=None, seed=None, label=None):
    """Simulate ``spec`` at step ``1/fs`` and return the observed coordinate.

    The sample count is ``round(duration_s * fs)``.  ``seed`` (if given)
    perturbs the initial state by a small Gaussian offset.
    """
    if label is not None:
        spec = spec.with_label(label)
    if not duration_s > 0 or not fs > 0:
        raise ParameterError("duration and sample rate must be positive")
    y0 = np.array(spec.initial_state if initial_state is None else initial_state, dtype=float)
    if y0.shape != (spec.dimension,):
        raise ParameterError(f"initial state must have {spec.dimension} components")
    if seed is not None:
        y0 = y0 + 1e-3 * np.random.default_rng(seed).standard_normal(y0.size)
    n = int(round(duration_s * fs))
    if n < 1:
        raise SignalLengthError(f"duration {duration_s} s at {fs} Hz yields no samples")
    traj = rk4(spec.rhs, y0, 0.0, 1.0 / fs, n - 1, spec.params)
    x = traj[:, spec.observe]
    if x.size < 2:
        raise SignalLengthError(f"duration {duration_s} s at {fs} Hz yields a single sample")
    return Signal(x, fs, spec.label)


def simulate(name_or_spec, label, seed=None):
    """Run the registry protocol: ``750*tau/fs`` seconds, keep the last fifth."""
    spec = lookup(name_or_spec) if isinstance(name_or_spec, str) else name_or_spec
    sig = integrate(spec, spec.default_duration, spec.default_fs, seed=seed, label=label)
    return trim(sig, 0.2)


def trim(signal, keep_fraction):
    """Keep the trailing ``ceil(keep_fraction * N)`` samples."""
    if not 0 < keep_fraction <= 1:
        raise ParameterError("keep_fraction must be in (0, 1]")
    n = len(signal)
    keep = math.ceil(keep_fraction * n - 1e-9)
    if keep < 1:
        raise SignalLengthError("trim leaves no samples")
    x = signal.samples[n - keep:]
    if x.size < 2:
        raise SignalLengthError(f"trim leaves {x.size} sample(s); a signal needs 2")
    return Signal(x, signal.fs, signal.label)


def standardize(x):
    x = np.asarray(x, dtype=float)
    sd = x.std()
    if sd == 0:
        raise DegenerateError("cannot standardize a constant signal")
    return (x - x.mean()) / sd


def truncated_normal(rng, size, sigma, truncation):
    """Zero-mean Gaussian draws, each redrawn until ``|draw| <= truncation*sigma``."""
    out = rng.standard_normal(size)
    bad = np.abs(out) > truncation
    while bad.any():
        out[bad] = rng.standard_normal(int(bad.sum()))
        bad = np.abs(out) > truncation
    return sigma * out


def add_noise(signal, noise):
    """Standardize ``signal`` to unit std and add truncated Gaussian noise at ``noise.snr_db``."""
    x = signal.samples
    if x.std() == 0:
        raise DegenerateError("constant signal has no defined SNR")
    z = standardize(x)
    sigma = noise.sigma
    if sigma > 0:
        rng = np.random.default_rng(noise.seed)
        z = z + truncated_normal(rng, z.size, sigma, noise.truncation)
    return Signal(z, signal.fs, signal.label)


# ---------------------------------------------------------------- systems


def _lorenz(s, t, p):
    x, y, z = s
    return np.array([p["sigma"] * (y - x), x * (p["rho"] - z) - y, x * y - p["beta"] * z])


def _rossler(s, t, p):
    x, y, z = s
    return np.array([-y - z, x + p["a"] * y, p["b"] + z * (x - p["c"])])


def _chen(s, t, p):
    x, y, z = s
    a, b, c = p["a"], p["b"], p["c"]
    return np.array([a * (y - x), (c - a) * x - x * z + c * y, x * y - b * z])


def _rucklidge(s, t, p):
    x, y, z = s
    return np.array([-p["kappa"] * x + p["lam"] * y - y * z, x, -z + y * y])


def _driven_van_der_pol(s, t, p):
    x, y = s
    return np.array([y, p["mu"] * (1.0 - x * x) * y - x + p["A"] * math.cos(p["omega"] * t)])


def _forced_brusselator(s, t, p):
    x, y = s
    x2y = x * x * y
    return np.array([
        p["A"] + x2y - (p["B"] + 1.0) * x + p["a"] * math.cos(p["omega"] * t),
        p["B"] * x - x2y,
    ])


def _entry(name, dimension, rhs, periodic, chaotic, initial_state, fs, source, drive=None):
    return SystemSpec(
        name=name,
        dimension=dimension,
        params=dict(periodic),
        rhs=rhs,
        regimes={"periodic": dict(periodic), "chaotic": dict(chaotic)},
        initial_state=tuple(initial_state),
        default_tau=50,
        default_fs=fs,
        drive=drive,
        source=source,
    )


_REGISTRY = (
    _entry(
        "lorenz", 3, _lorenz,
        {"sigma": 10.0, "beta": 8.0 / 3.0, "rho": 181.0},
        {"sigma": 10.0, "beta": 8.0 / 3.0, "rho": 180.1},
        (10.0**-10, 0.0, 1.0), 300.0,
        "Lorenz, J. Atmos. Sci. 20 (1963)",
    ),
    _entry(
        "rossler", 3, _rossler,
        {"a": 0.2, "b": 0.2, "c": 2.5},
        {"a": 0.2, "b": 0.2, "c": 5.7},
        (-0.4, 0.6, 1.0), 30.0,
        "Rossler, Phys. Lett. A 57 (1976)",
    ),
    _entry(
        "chen", 3, _chen,
        {"a": 35.0, "b": 3.0, "c": 30.0},
        {"a": 35.0, "b": 3.0, "c": 28.0},
        (-10.0, 0.0, 37.0), 400.0,
        "Chen and Ueta, Int. J. Bifurc. Chaos 9 (1999)",
    ),
    _entry(
        "rucklidge", 3, _rucklidge,
        {"kappa": 1.1, "lam": 6.7},
        {"kappa": 2.0, "lam": 6.7},
        (1.0, 0.0, 4.5), 50.0,
        "Rucklidge, J. Fluid Mech. 237 (1992)",
    ),
    _entry(
        "driven_van_der_pol", 2, _driven_van_der_pol,
        {"mu": 5.0, "A": 5.0, "omega": 2.45},
        {"mu": 5.0, "A": 5.0, "omega": 2.466},
        (1.9, 0.0), 25.0,
        "Parlitz and Lauterborn, Phys. Rev. A 36 (1987)",
        drive="A cos(omega t) added to the velocity equation",
    ),
    _entry(
        "forced_brusselator", 2, _forced_brusselator,
        {"A": 0.4, "B": 1.2, "a": 0.2, "omega": 0.81},
        {"A": 0.4, "B": 1.2, "a": 0.05, "omega": 0.81},
        (0.3, 2.0), 30.0,
        "Kai and Tomita, Prog. Theor. Phys. 61 (1979)",
        drive="a cos(omega t) added to the x equation",
    ),
)


def registry():
    """All registered systems, each with its periodic parameter set active."""
    return list(_REGISTRY)


def lookup(name):
    for spec in _REGISTRY:
        if spec.name == name:
            return spec
    raise NotFoundError(name, [s.name for s in _REGISTRY])


def registry_json():
    return [s.to_json() for s in _REGISTRY]
