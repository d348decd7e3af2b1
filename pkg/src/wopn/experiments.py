"""Batch experiments: pipeline, state detection, noise stability, cycle graphs, t sweep.

Every runner takes an :class:`ExperimentConfig`, writes CSV/JSON under
``config.out`` and returns its rows.  Per-item work runs in a bounded process
pool; rows are sorted afterwards so output never depends on scheduling.
"""

from __future__ import annotations

import contextlib
import csv
import hashlib
import json
import math
import os
import platform
import tempfile
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import mds_embed, separation_accuracy
from .diagmetric import normalized_bottleneck, pairwise_bottleneck
from .dynsys import LABELS, NoiseSpec, add_noise, lookup, registry, simulate
from .errors import ConfigError, WopnError
from .graphdist import METHODS, diameter, distance_matrix, normalize
from .opn import build_network, cycle_graph, embed
from .persistence import count_pairs, count_significant, max_lifetime, rips_persistence

DEFAULT_SNR = (math.inf, 40.0, 35.0, 30.0, 25.0, 20.0, 15.0)


def _snr_from_json(v):
    if v is None or (isinstance(v, str) and v.lower() in ("inf", "infinity", "+inf")):
        return math.inf
    return float(v)


def _snr_to_json(v):
    return "inf" if math.isinf(v) else v


@dataclass
class ExperimentConfig:
    systems: list = field(default_factory=lambda: [s.name for s in registry()])
    labels: list = field(default_factory=lambda: list(LABELS))
    n: int = 6
    tau: object = None  # None -> registry default; int; or {system: int}
    methods: list = field(default_factory=lambda: list(METHODS))
    normalized: object = "both"  # True, False or "both"
    t_multiplier: float = 2.0
    snr_db: list = field(default_factory=lambda: list(DEFAULT_SNR))
    noise_seed: int = 0
    seeds: list = field(default_factory=lambda: list(range(100)))
    ratios: list = field(default_factory=lambda: [1.0, 2.0, 3.0, 4.0, 5.0])
    n_min: int = 3
    n_max: int = 100
    workers: int = 1
    out: str = "results"

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not self.methods:
            raise ConfigError("methods must be nonempty")
        self.methods = [m.upper() for m in self.methods]
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ConfigError(f"unknown methods {bad}; choose from {list(METHODS)}")
        if int(self.n) != self.n or self.n < 2:
            raise ConfigError("n must be an integer >= 2")
        if not self.t_multiplier > 0:
            raise ConfigError("t_multiplier must be positive")
        if self.normalized not in (True, False, "both"):
            raise ConfigError("normalized must be true, false or \"both\"")
        if not self.systems:
            raise ConfigError("systems must be nonempty")
        for s in self.systems:
            lookup(s)  # NotFoundError lists the registry
        bad = [lab for lab in self.labels if lab not in LABELS]
        if bad or not self.labels:
            raise ConfigError(f"labels must be a nonempty subset of {list(LABELS)}")
        self.snr_db = [_snr_from_json(v) for v in self.snr_db]
        if not self.snr_db:
            raise ConfigError("noise grid must be nonempty")
        if not self.seeds or any(int(s) != s or s < 0 for s in self.seeds):
            raise ConfigError("seeds must be a nonempty list of unsigned integers")
        if not self.ratios or any(not 1 <= r <= 5 for r in self.ratios):
            raise ConfigError("ratios must be a nonempty list within [1, 5]")
        if not 3 <= self.n_min <= self.n_max:
            raise ConfigError("need 3 <= n_min <= n_max")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if isinstance(self.tau, dict):
            for s, t in self.tau.items():
                lookup(s)
                if int(t) != t or t < 1:
                    raise ConfigError(f"tau for {s} must be a positive integer")
        elif self.tau is not None and (int(self.tau) != self.tau or self.tau < 1):
            raise ConfigError("tau must be a positive integer")

    @property
    def normalizations(self):
        return [False, True] if self.normalized == "both" else [bool(self.normalized)]

    def tau_for(self, system):
        if isinstance(self.tau, dict):
            return int(self.tau.get(system, lookup(system).default_tau))
        return lookup(system).default_tau if self.tau is None else int(self.tau)

    def to_json(self):
        d = asdict(self)
        d["snr_db"] = [_snr_to_json(v) for v in self.snr_db]
        return d

    def digest(self):
        text = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        extra = sorted(set(d) - known)
        if extra:
            raise ConfigError(f"unknown config keys {extra}")
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            try:
                return cls.from_dict(json.load(fh))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from exc


# ------------------------------------------------------------------ output


@contextlib.contextmanager
def atomic_path(path):
    """Yield a temporary path next to ``path``; move it into place on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix="." + path.name, suffix=".tmp")
    os.close(fd)
    try:
        yield tmp
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return "inf" if math.isinf(v) else repr(float(v))
    return str(v)


def write_rows(path, header, rows):
    with atomic_path(path) as tmp, open(tmp, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(r[h]) for h in header])


def write_json(path, obj):
    with atomic_path(path) as tmp, open(tmp, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _export(obj, path, *args):
    with atomic_path(path) as tmp:
        obj.to_csv(tmp, *args)


def versions():
    import numba
    import scipy

    return {
        "wopn": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "numba": numba.__version__,
    }


def write_manifest(config, command, outputs, errors=()):
    out = Path(config.out)
    write_json(
        out / "manifest.json",
        {
            "command": command,
            "config": config.to_json(),
            "config_sha256": config.digest(),
            "versions": versions(),
            "outputs": sorted(str(Path(p).relative_to(out)) for p in outputs),
            "errors": list(errors),
        },
    )


def _map(fn, items, workers):
    """Apply ``fn`` to each item; returns ``(item, result, error)`` in input order."""

    def wrap(results):
        return list(zip(items, *zip(*results))) if results else []

    if workers <= 1 or len(items) <= 1:
        return wrap([_guard(fn, it) for it in items])
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return wrap(list(pool.map(_guard, [fn] * len(items), items)))


def _guard(fn, item):
    try:
        return fn(item), None
    except Exception as exc:  # collected and reported by the caller
        return None, {"item": list(item) if isinstance(item, tuple) else item,
                      "type": type(exc).__name__, "message": str(exc),
                      "traceback": traceback.format_exc(limit=3)}


# ---------------------------------------------------------------- pipeline


def _diagrams(net, methods, normalizations, t_multiplier, t=None):
    out = {}
    for m in methods:
        d = distance_matrix(net, m, t=t, t_multiplier=t_multiplier)
        for nz in normalizations:
            dd = normalize(d) if nz else d
            out[(m, nz)] = (dd, rips_persistence(dd.values))
    return out


def _variant(method, normalized):
    return f"{method}_norm" if normalized else method


def _pipeline_item(args):
    system, label, cfg_dict, write = args
    cfg = ExperimentConfig.from_dict(cfg_dict)
    sig = simulate(system, label)
    seq = embed(sig, cfg.n, cfg.tau_for(system))
    net = build_network(seq)
    res = _diagrams(net, cfg.methods, cfg.normalizations, cfg.t_multiplier)
    written = []
    if write:
        base = Path(cfg.out) / "pipeline" / f"{system}_{label}"
        _export(sig, base / "signal.csv")
        _export(seq, base / "sequence.csv")
        with atomic_path(base / "edges.csv") as te, atomic_path(base / "vertices.csv") as tv:
            net.to_csv(te, tv)
        written += [base / "signal.csv", base / "sequence.csv", base / "edges.csv", base / "vertices.csv"]
        for (m, nz), (dm, dg) in res.items():
            v = _variant(m, nz)
            _export(dm, base / f"distance_{v}.csv")
            _export(dg, base / f"diagram_{v}.csv")
            written += [base / f"distance_{v}.csv", base / f"diagram_{v}.csv"]
    diagrams = {k: dg for k, (_, dg) in res.items()}
    return {"n_vertices": net.n_vertices, "diagrams": diagrams, "written": [str(p) for p in written]}


@dataclass
class PipelineResult:
    diagrams: dict  # (system, label) -> {(method, normalized): PersistenceDiagram}
    summary: list
    errors: list
    outputs: list


def run_pipeline(config, write=True):
    """simulate -> trim -> embed -> network -> distances -> diagrams, per system and label.

    Failures are collected per item; the rest of the run continues.
    """
    items = [(s, lab, config.to_json(), write) for s in config.systems for lab in config.labels]
    diagrams, summary, errors, outputs = {}, [], [], []
    for item, res, err in _map(_pipeline_item, items, config.workers):
        system, label = item[0], item[1]
        if err is not None:
            err["item"] = [system, label]
            errors.append(err)
            continue
        diagrams[(system, label)] = res["diagrams"]
        outputs += res["written"]
        for (m, nz), dg in res["diagrams"].items():
            summary.append({
                "system": system, "label": label, "method": m, "normalized": nz,
                "n_vertices": res["n_vertices"], "max_l1": max_lifetime(dg, 1),
                "n_pairs": count_pairs(dg, 1), "n_significant": count_significant(dg, 1),
            })
    summary.sort(key=lambda r: (r["system"], r["label"], METHODS.index(r["method"]), r["normalized"]))
    if write:
        path = Path(config.out) / "pipeline" / "summary.csv"
        write_rows(path, ["system", "label", "method", "normalized", "n_vertices",
                          "max_l1", "n_pairs", "n_significant"], summary)
        outputs.append(str(path))
    return PipelineResult(diagrams, summary, errors, outputs)


# ----------------------------------------------------------- state detection


def majority_baseline(labels):
    _, counts = np.unique(np.asarray(labels), return_counts=True)
    return float(counts.max() / counts.sum())


def run_state_detection(config, pipeline=None, write=True):
    """Bottleneck matrix -> MDS -> SVM accuracy for every method x normalization.

    Returns ``(rows, pipeline_result)``.
    """
    pipe = pipeline if pipeline is not None else run_pipeline(config, write=write)
    keys = sorted(pipe.diagrams)
    both = {s for s, _ in keys if all((s, lab) in pipe.diagrams for lab in LABELS)}
    if len(both) < 2:
        raise ConfigError("state detection needs at least two systems with both labels")
    keys = [k for k in keys if k[0] in both]
    labels = [lab for _, lab in keys]
    names = [f"{s}:{lab}" for s, lab in keys]
    baseline = majority_baseline(labels)
    rows, outputs = [], []
    for m in config.methods:
        for nz in config.normalizations:
            dm = pairwise_bottleneck([pipe.diagrams[k][(m, nz)] for k in keys], labels, dim=1)
            mean, std = separation_accuracy(dm, config.seeds)
            rows.append({"method": m, "normalized": nz, "mean": mean, "std": std,
                         "n_seeds": len(config.seeds), "baseline": baseline})
            if write:
                path = Path(config.out) / "detect" / f"bottleneck_{_variant(m, nz)}.csv"
                with atomic_path(path) as tmp:
                    _bottleneck_csv(tmp, names, dm.values)
                emb_path = path.with_name(f"embedding_{_variant(m, nz)}.csv")
                _export(mds_embed(dm, seed=config.seeds[0]), emb_path, names)
                outputs += [str(path), str(emb_path)]
    if write:
        out = Path(config.out) / "detect"
        write_rows(out / "accuracy.csv", ["method", "normalized", "mean", "std", "n_seeds", "baseline"], rows)
        write_json(out / "accuracy.json", [
            {"method": r["method"], "normalized": r["normalized"], "mean": r["mean"],
             "std": r["std"], "seeds": list(config.seeds)} for r in rows])
        outputs += [str(out / "accuracy.csv"), str(out / "accuracy.json")]
    pipe.outputs.extend(outputs)
    return rows, pipe


def _bottleneck_csv(path, names, values):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in values:
            w.writerow([repr(float(v)) for v in row])


# ----------------------------------------------------------------- stability


def _stability_item(args):
    system, cfg_dict = args
    cfg = ExperimentConfig.from_dict(cfg_dict)
    sig = simulate(system, "periodic")
    tau = cfg.tau_for(system)
    ref = None
    rows = []
    cache = {}
    for snr in cfg.snr_db:
        noisy = add_noise(sig, NoiseSpec(snr_db=snr, seed=cfg.noise_seed))
        net = build_network(embed(noisy, cfg.n, tau))
        cache[snr] = _diagrams(net, cfg.methods, [False], cfg.t_multiplier)
    clean = (
        cache[math.inf]
        if math.inf in cache
        else _diagrams(build_network(embed(add_noise(sig, NoiseSpec()), cfg.n, tau)),
                       cfg.methods, [False], cfg.t_multiplier)
    )
    for m in cfg.methods:
        ref = clean[(m, False)][1]
        for snr in cfg.snr_db:
            rows.append({"system": system, "method": m, "snr_db": snr,
                         "d_star_b": normalized_bottleneck(ref, cache[snr][(m, False)][1], 1)})
    return rows


def run_stability(config, write=True):
    """Normalized bottleneck distance from the clean to the noisy D1, per SNR.

    Uses each system's periodic signal.  One noise draw per SNR, seeded by
    ``config.noise_seed``.  Distances are always the raw ones: max-normalizing
    would divide the clean and noisy matrices by different maxima, while the
    score already divides out the reference diagram's scale.
    Returns ``(rows, errors)``.
    """
    items = [(s, config.to_json()) for s in config.systems]
    rows, errors = [], []
    for item, res, err in _map(_stability_item, items, config.workers):
        if err is not None:
            err["item"] = item[0]
            errors.append(err)
        else:
            rows += res
    order = {v: i for i, v in enumerate(config.snr_db)}
    rows.sort(key=lambda r: (r["system"], METHODS.index(r["method"]), order[r["snr_db"]]))
    if write:
        write_rows(Path(config.out) / "stability.csv", ["system", "method", "snr_db", "d_star_b"], rows)
    return rows, errors


# ------------------------------------------------------------- cycle graphs


def cycle_row(n):
    net = cycle_graph(n)
    dd = rips_persistence(distance_matrix(net, "DD").values)
    supd = rips_persistence(distance_matrix(net, "SUPD").values)
    return {"n": n, "dd_maxL1": max_lifetime(dd, 1), "supd_maxL1": max_lifetime(supd, 1)}


def run_cycle_analysis(n_min=3, n_max=100, out=None, workers=1):
    """Max D1 lifetime of the uniform cycle ``C_n`` under DD (t = 2d) and SUPD."""
    if not 3 <= n_min <= n_max:
        raise ConfigError("need 3 <= n_min <= n_max")
    ns = list(range(int(n_min), int(n_max) + 1))
    rows = []
    for n, res, err in _map(cycle_row, ns, workers):
        if err is not None:
            raise RuntimeError(err["message"])
        rows.append(res)
    if out is not None:
        write_rows(Path(out) / "cycle.csv", ["n", "dd_maxL1", "supd_maxL1"], rows)
    return rows


# ------------------------------------------------------------------- t sweep


def _tsweep_item(args):
    system, label, cfg_dict = args
    cfg = ExperimentConfig.from_dict(cfg_dict)
    net = build_network(embed(simulate(system, label), cfg.n, cfg.tau_for(system)))
    d = diameter(net)
    rows = []
    for r in cfg.ratios:
        t = int(math.ceil(r * d))
        dg = rips_persistence(distance_matrix(net, "DD", t=t).values)
        rows.append({"system": system, "label": label, "ratio": float(r), "t": t, "diameter": d,
                     "max_l1": max_lifetime(dg, 1), "n_pairs": count_pairs(dg, 1)})
    return rows


def run_t_sweep(config, write=True):
    """DD diagrams at ``t = ceil(ratio * diameter)`` for every system and label.

    Also appends one ``system="mean"`` row per label and ratio.  Returns ``(rows, errors)``.
    """
    items = [(s, lab, config.to_json()) for s in config.systems for lab in config.labels]
    rows, errors = [], []
    for item, res, err in _map(_tsweep_item, items, config.workers):
        if err is not None:
            err["item"] = [item[0], item[1]]
            errors.append(err)
        else:
            rows += res
    rows.sort(key=lambda r: (r["system"], r["label"], r["ratio"]))
    means = []
    for lab in config.labels:
        for ratio in sorted(set(config.ratios)):
            sel = [r for r in rows if r["label"] == lab and r["ratio"] == ratio]
            if sel:
                means.append({"system": "mean", "label": lab, "ratio": float(ratio), "t": "",
                              "diameter": "", "max_l1": float(np.mean([r["max_l1"] for r in sel])),
                              "n_pairs": float(np.mean([r["n_pairs"] for r in sel]))})
    rows += means
    if write:
        write_rows(Path(config.out) / "tsweep.csv",
                   ["system", "label", "ratio", "t", "diameter", "max_l1", "n_pairs"], rows)
    return rows, errors


# ------------------------------------------------------------------ simulate


def _simulate_item(args):
    system, label, out = args
    sig = simulate(system, label)
    path = Path(out) / "signals" / f"{system}_{label}.csv"
    _export(sig, path)
    return str(path)


def run_simulate(config):
    """Write every configured signal plus the registry JSON.  Returns ``(paths, errors)``."""
    items = [(s, lab, config.out) for s in config.systems for lab in config.labels]
    paths, errors = [], []
    for item, res, err in _map(_simulate_item, items, config.workers):
        if err is not None:
            err["item"] = [item[0], item[1]]
            errors.append(err)
        else:
            paths.append(res)
    from .dynsys import registry_json

    reg = Path(config.out) / "registry.json"
    write_json(reg, registry_json())
    return paths + [str(reg)], errors


__all__ = [
    "ExperimentConfig", "run_pipeline", "run_state_detection", "run_stability",
    "run_cycle_analysis", "run_t_sweep", "run_simulate", "majority_baseline", "WopnError",
]
