import math

import numpy as np
import pytest
from scipy.stats import truncnorm
from hypothesis import given, settings, strategies as st

from wopn.dynsys import (
    LABELS,
    NoiseSpec,
    Signal,
    add_noise,
    integrate,
    lookup,
    registry,
    registry_json,
    rk4,
    simulate,
    standardize,
    trim,
    truncated_normal,
)
from wopn.errors import DegenerateError, DivergenceError, NotFoundError, ParameterError, SignalLengthError


def test_rk4_linear_decay():
    h = 0.01
    traj = rk4(lambda y, t, p: -y, np.array([1.0]), 0.0, h, 1000)
    t = np.arange(1001) * h
    rel = np.abs(traj[:, 0] - np.exp(-t)) / np.exp(-t)
    assert rel.max() < 1e-6


def test_rk4_reports_blowup_time():
    with pytest.raises(DivergenceError) as info, np.errstate(over="ignore", invalid="ignore"):
        rk4(lambda y, t, p: y * y, np.array([1.0]), 0.0, 0.1, 100)
    assert 0.5 < info.value.time < 2.0
    assert "t=" in str(info.value)


def test_integrate_sample_count():
    sig = integrate(lookup("lorenz"), 100.0, 100.0, label="chaotic")
    assert len(sig) == 10000
    assert sig.fs == 100.0 and sig.label == "chaotic"


def test_integrate_minimal_run_is_length_error():
    with pytest.raises(SignalLengthError):
        integrate(lookup("rossler"), 0.1, 10.0)


def test_integrate_bad_initial_state():
    with pytest.raises(ParameterError):
        integrate(lookup("lorenz"), 1.0, 10.0, initial_state=[1.0, 2.0])


def test_trim_examples():
    sig = Signal(np.arange(10000.0), 100.0, "periodic")
    out = trim(sig, 0.2)
    assert len(out) == 2000 and out.samples[0] == 8000 and out.label == "periodic"
    assert np.array_equal(trim(sig, 1.0).samples, sig.samples)


def test_trim_single_sample_is_length_error():
    # ceil(0.2 * 5) = 1 sample, below the two a signal needs
    with pytest.raises(SignalLengthError):
        trim(Signal(np.arange(5.0), 1.0), 0.2)


def test_trim_bounds():
    with pytest.raises(ParameterError):
        trim(Signal(np.arange(5.0), 1.0), 0.0)


def test_signal_validation():
    with pytest.raises(SignalLengthError):
        Signal(np.array([1.0]), 1.0)
    with pytest.raises(ParameterError):
        Signal(np.array([1.0, np.nan]), 1.0)
    with pytest.raises(ParameterError):
        Signal(np.array([1.0, 2.0]), 0.0)


def test_signal_csv_roundtrip(tmp_path):
    sig = Signal(np.sin(np.arange(50) / 3.0), 30.0)
    sig.to_csv(tmp_path / "s.csv")
    back = Signal.from_csv(tmp_path / "s.csv")
    assert np.array_equal(back.samples, sig.samples) and back.fs == 30.0


def test_noise_infinite_snr_is_standardized_input():
    sig = Signal(3.0 + 2.0 * np.sin(np.arange(500) / 7.0), 10.0)
    out = add_noise(sig, NoiseSpec())
    assert np.array_equal(out.samples, standardize(sig.samples))
    assert abs(out.samples.std() - 1.0) < 1e-12


def test_noise_bounds_over_many_draws():
    rng = np.random.default_rng(123)
    draws = truncated_normal(rng, 100_000, 0.1, 3.0)
    assert np.all(np.abs(draws) <= 0.3)
    assert abs(draws.std() - 0.1 * truncnorm(-3, 3).std()) < 2e-3


def test_noise_sigma_and_bound():
    spec = NoiseSpec(snr_db=20)
    assert spec.sigma == pytest.approx(0.1)
    assert spec.amplitude_bound == pytest.approx(0.6)


def test_noise_deterministic_and_bounded():
    sig = Signal(np.sin(np.arange(20_000) / 11.0), 10.0)
    a = add_noise(sig, NoiseSpec(snr_db=20, seed=5))
    b = add_noise(sig, NoiseSpec(snr_db=20, seed=5))
    assert np.array_equal(a.samples, b.samples)
    noise = a.samples - standardize(sig.samples)
    assert np.abs(noise).max() <= 0.3 + 1e-12


def test_noise_constant_signal():
    with pytest.raises(DegenerateError):
        add_noise(Signal(np.ones(10), 1.0), NoiseSpec(snr_db=10))


def test_noise_spec_validation():
    with pytest.raises(ParameterError):
        NoiseSpec(truncation=0)


@settings(max_examples=30, deadline=None)
@given(st.floats(-20, 60), st.integers(0, 2**32 - 1))
def test_noise_hard_truncation(snr, seed):
    sig = Signal(np.cos(np.arange(300) / 4.0), 10.0)
    spec = NoiseSpec(snr_db=snr, seed=seed)
    noise = add_noise(sig, spec).samples - standardize(sig.samples)
    assert np.all(np.abs(noise) <= 3 * spec.sigma * (1 + 1e-12))


def test_registry_contents():
    names = [s.name for s in registry()]
    assert len(names) == len(set(names)) >= 6
    for s in registry():
        assert set(LABELS) <= set(s.regimes)
        assert s.default_tau == 50 and s.dimension >= 2
        y = s.rhs(np.array(s.initial_state, dtype=float), 0.0, s.params)
        assert y.shape == (s.dimension,)
    lor = lookup("lorenz")
    assert lor.dimension == 3 and set(lor.params) == {"sigma", "beta", "rho"}


def test_lookup_unknown_lists_registry():
    with pytest.raises(NotFoundError) as info:
        lookup("nope")
    assert "lorenz" in str(info.value)


def test_registry_json_fields():
    for entry in registry_json():
        assert {"name", "dimension", "params", "initial_state", "tau", "fs", "labels", "source"} <= set(entry)
        assert entry["source"]


def test_simulate_protocol_length():
    spec = lookup("rossler")
    sig = simulate("rossler", "chaotic")
    n = round(spec.default_duration * spec.default_fs)
    assert len(sig) == math.ceil(0.2 * n)
    assert sig.label == "chaotic"


def test_simulate_seed_perturbs_initial_state():
    a = simulate("rossler", "periodic", seed=1)
    b = simulate("rossler", "periodic", seed=1)
    c = simulate("rossler", "periodic", seed=2)
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)
