"""Scenario configuration and the paired full/reduced experiment runners.

A scenario is a YAML (or JSON) document::

    name: three_layer_sync
    layers:                      # or a list of per-layer generator mappings
      count: 3
      generator: {type: ring, N: 100, k: 10, w: 1.0}
    inter: {type: complete, epsilon: 0.05}   # complete | ring | explicit (matrix: ...)
    omega: 0.0
    initial: {type: random, seed: 1}         # random | twisted (p) | explicit (theta)
    perturbation: {amplitude: 0.0, seed: 0, mode: reduced}   # mode: reduced | full
    integration: {dt: 0.01, T: 50, record_every: 10, backend: auto}
    outputs: {dir: out, phases: false}
    sweep: {param: amplitude, values: [0.001, 0.01, 0.1]}   # only for `sweep`

Only ``layers``, ``inter`` and ``initial`` are required.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .dynamics import (SimulationParams, integrate_multilayer, integrate_reduced,
                       integrate_rk4, max_wrapped_deviation, order_parameter, perturb,
                       random_phases, twisted_state)
from .errors import ConfigError
from .network import (MultilayerNetwork, assemble_full, complete_inter, make_complete,
                      make_random_connected, make_ring_circulant, ring_inter)
from .reduction import broadcast, layer_spreads, reduce, wrap
from .stability import (CrossCheck, SpectrumReport, simulation_cross_check,
                        spectrum_reduced, spectrum_via_join)

DENSE_LIMIT = 1500
SWEEP_PARAMS = ("amplitude", "epsilon")


@dataclass(frozen=True)
class LayerSpec:
    type: str
    N: int
    k: int = 1
    w: float = 1.0
    p: float = 0.1
    seed: int = 0

    def build(self, label: str = ""):
        if self.type == "ring":
            g = make_ring_circulant(self.N, self.k, self.w)
        elif self.type == "complete":
            g = make_complete(self.N, self.w)
        else:
            g = make_random_connected(self.N, self.p, self.w, self.seed)
        return g if not label else type(g)(g.adjacency, label=f"{label}:{g.label}")


@dataclass(frozen=True)
class InterSpec:
    type: str
    epsilon: float = 0.0
    matrix: tuple | None = None

    def build(self, M: int) -> np.ndarray:
        if self.type == "complete":
            return complete_inter(M, self.epsilon)
        if self.type == "ring":
            return ring_inter(M, self.epsilon)
        return np.array(self.matrix, dtype=np.float64)


@dataclass(frozen=True)
class InitialSpec:
    type: str
    seed: int = 0
    p: int = 0
    theta: tuple | None = None


@dataclass(frozen=True)
class PerturbationSpec:
    amplitude: float = 0.0
    seed: int = 0
    mode: str = "reduced"


@dataclass(frozen=True)
class IntegrationSpec:
    dt: float = 0.01
    T: float = 50.0
    record_every: int = 10
    backend: str = "auto"


@dataclass(frozen=True)
class OutputSpec:
    dir: str = "out"
    phases: bool = False


@dataclass(frozen=True)
class SweepSpec:
    param: str
    values: tuple


@dataclass(frozen=True)
class ScenarioConfig:
    layers: tuple
    inter: InterSpec
    initial: InitialSpec
    name: str = "scenario"
    omega: float = 0.0
    perturbation: PerturbationSpec = PerturbationSpec()
    integration: IntegrationSpec = IntegrationSpec()
    outputs: OutputSpec = OutputSpec()
    sweep: SweepSpec | None = None

    @property
    def M(self) -> int:
        return len(self.layers)

    def params(self) -> SimulationParams:
        i = self.integration
        return SimulationParams(dt=i.dt, T=i.T, omega=self.omega, record_every=i.record_every)

    def build_network(self) -> MultilayerNetwork:
        layers = [spec.build(label=f"layer{l}") for l, spec in enumerate(self.layers)]
        return MultilayerNetwork(tuple(layers), self.inter.build(self.M), self.omega)

    def with_seed(self, seed: int) -> "ScenarioConfig":
        """Every seed in the scenario replaced; random layers get ``seed + l``."""
        layers = tuple(replace(s, seed=seed + l) for l, s in enumerate(self.layers))
        return replace(self, layers=layers, initial=replace(self.initial, seed=seed),
                       perturbation=replace(self.perturbation, seed=seed))

    def seeds(self) -> dict:
        return {
            "layers": [s.seed for s in self.layers if s.type == "random"],
            "initial": self.initial.seed if self.initial.type == "random" else None,
            "perturbation": self.perturbation.seed if self.perturbation.amplitude > 0 else None,
        }


# --- parsing -------------------------------------------------------------

def _mapping(node, path, allowed, required=()):
    if not isinstance(node, dict):
        raise ConfigError(path, f"expected a mapping, got {type(node).__name__}")
    unknown = sorted(set(node) - set(allowed))
    if unknown:
        raise ConfigError(path, f"unknown keys {unknown}; allowed {sorted(allowed)}")
    missing = [k for k in required if k not in node]
    if missing:
        raise ConfigError(path, f"missing required fields {missing}")
    return node


def _num(node, key, path, default, kind=float, lo=None, lo_strict=False):
    if key not in node:
        return default
    v = node[key]
    p = f"{path}.{key}" if path else key
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(p, f"expected a number, got {v!r}")
    if kind is int:
        if int(v) != v:
            raise ConfigError(p, f"expected an integer, got {v!r}")
        v = int(v)
    else:
        v = float(v)
        if not np.isfinite(v):
            raise ConfigError(p, "must be finite")
    if lo is not None and (v <= lo if lo_strict else v < lo):
        raise ConfigError(p, f"must be {'>' if lo_strict else '>='} {lo}, got {v}")
    return v


def _choice(node, key, path, options, default=None):
    if key not in node:
        if default is None:
            raise ConfigError(f"{path}.{key}", f"required; one of {list(options)}")
        return default
    v = node[key]
    if v not in options:
        raise ConfigError(f"{path}.{key}", f"expected one of {list(options)}, got {v!r}")
    return v


def _vector(v, path):
    if not isinstance(v, (list, tuple)) or not v:
        raise ConfigError(path, "expected a nonempty list of numbers")
    out = []
    for i, x in enumerate(v):
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not np.isfinite(x):
            raise ConfigError(f"{path}[{i}]", f"expected a finite number, got {x!r}")
        out.append(float(x))
    return tuple(out)


def _layer(node, path) -> LayerSpec:
    node = _mapping(node, path, {"type", "N", "k", "w", "p", "seed"}, ("type", "N"))
    kind = _choice(node, "type", path, ("ring", "complete", "random"))
    N = _num(node, "N", path, None, int, lo=1)
    w = _num(node, "w", path, 1.0, lo=0, lo_strict=True)
    k = _num(node, "k", path, min(1, (N - 1) // 2), int, lo=0)
    if kind == "ring" and k > (N - 1) // 2:
        raise ConfigError(f"{path}.k", f"must be <= {(N - 1) // 2} for N={N}, got {k}")
    p = _num(node, "p", path, 0.1, lo=0, lo_strict=True)
    if p > 1:
        raise ConfigError(f"{path}.p", f"must be <= 1, got {p}")
    seed = _num(node, "seed", path, 0, int)
    return LayerSpec(kind, N, k, w, p, seed)


def _layers(node) -> tuple:
    if isinstance(node, list):
        if not node:
            raise ConfigError("layers", "needs at least one layer")
        return tuple(_layer(x, f"layers[{i}]") for i, x in enumerate(node))
    node = _mapping(node, "layers", {"count", "generator"}, ("count", "generator"))
    M = _num(node, "count", "layers", None, int, lo=1)
    base = _layer(node["generator"], "layers.generator")
    # random layers get distinct seeds derived from the base seed
    return tuple(replace(base, seed=base.seed + l) if base.type == "random" else base
                 for l in range(M))


def default_epsilon(M: int) -> float:
    """Coupling used when ``inter.epsilon`` is omitted."""
    return 0.05 if M <= 10 else 0.01


def _inter(node, M) -> InterSpec:
    node = _mapping(node, "inter", {"type", "epsilon", "matrix"}, ("type",))
    kind = _choice(node, "type", "inter", ("complete", "ring", "explicit"))
    if kind != "explicit":
        eps = _num(node, "epsilon", "inter", default_epsilon(M), lo=0)
        return InterSpec(kind, eps)
    if "matrix" not in node:
        raise ConfigError("inter.matrix", "required for explicit inter-layer coupling")
    rows = node["matrix"]
    if not isinstance(rows, list) or len(rows) != M:
        raise ConfigError("inter.matrix", f"expected {M} rows")
    mat = tuple(_vector(r, f"inter.matrix[{i}]") for i, r in enumerate(rows))
    for i, r in enumerate(mat):
        if len(r) != M:
            raise ConfigError(f"inter.matrix[{i}]", f"expected {M} entries, got {len(r)}")
    a = np.array(mat)
    for i in range(M):
        if a[i, i] != 0:
            raise ConfigError(f"inter.matrix[{i}][{i}]", "diagonal must be zero")
        for j in range(M):
            if a[i, j] < 0:
                raise ConfigError(f"inter.matrix[{i}][{j}]", "must be >= 0")
            if a[i, j] != a[j, i]:
                raise ConfigError(
                    f"inter.matrix[{i}][{j}]",
                    f"asymmetric pair ({i}, {j}): {a[i, j]} != {a[j, i]}",
                )
    return InterSpec("explicit", 0.0, mat)


def _initial(node, M, total) -> InitialSpec:
    node = _mapping(node, "initial", {"type", "seed", "p", "theta"}, ("type",))
    kind = _choice(node, "type", "initial", ("random", "twisted", "explicit", "broadcast"))
    seed = _num(node, "seed", "initial", 0, int)
    p = _num(node, "p", "initial", 1 if kind == "twisted" else 0, int)
    theta = None
    if kind in ("explicit", "broadcast"):
        if "theta" not in node:
            raise ConfigError("initial.theta", f"required for {kind} initial conditions")
        theta = _vector(node["theta"], "initial.theta")
        ok = (M,) if kind == "broadcast" else (M, total)
        if len(theta) not in ok:
            raise ConfigError("initial.theta", f"expected length in {list(ok)}, got {len(theta)}")
        kind = "explicit"
    return InitialSpec(kind, seed, p, theta)


def _perturbation(node) -> PerturbationSpec:
    node = _mapping(node, "perturbation", {"amplitude", "seed", "mode"})
    return PerturbationSpec(
        _num(node, "amplitude", "perturbation", 0.0, lo=0),
        _num(node, "seed", "perturbation", 0, int),
        _choice(node, "mode", "perturbation", ("reduced", "full"), "reduced"),
    )


def _integration(node) -> IntegrationSpec:
    node = _mapping(node, "integration", {"dt", "T", "record_every", "backend"})
    return IntegrationSpec(
        _num(node, "dt", "integration", 0.01, lo=0, lo_strict=True),
        _num(node, "T", "integration", 50.0, lo=0),
        _num(node, "record_every", "integration", 10, int, lo=1),
        _choice(node, "backend", "integration", ("auto", "dense", "layered"), "auto"),
    )


def _outputs(node) -> OutputSpec:
    node = _mapping(node, "outputs", {"dir", "phases"})
    d = node.get("dir", "out")
    if not isinstance(d, str):
        raise ConfigError("outputs.dir", "expected a string")
    phases = node.get("phases", False)
    if not isinstance(phases, bool):
        raise ConfigError("outputs.phases", "expected true or false")
    return OutputSpec(d, phases)


def _sweep(node) -> SweepSpec:
    node = _mapping(node, "sweep", {"param", "values"}, ("param", "values"))
    param = _choice(node, "param", "sweep", SWEEP_PARAMS)
    values = _vector(node["values"], "sweep.values")
    if any(v < 0 for v in values):
        raise ConfigError("sweep.values", "values must be nonnegative")
    return SweepSpec(param, values)


TOP_KEYS = {"name", "layers", "inter", "omega", "initial", "perturbation", "integration",
            "outputs", "sweep"}
REQUIRED = ("layers", "inter", "initial")


def config_from_dict(doc) -> ScenarioConfig:
    if doc is None:
        doc = {}
    _mapping(doc, "", TOP_KEYS, REQUIRED)
    layers = _layers(doc["layers"])
    M = len(layers)
    total = sum(s.N for s in layers)
    name = doc.get("name", "scenario")
    if not isinstance(name, str) or not name:
        raise ConfigError("name", "expected a nonempty string")
    return ScenarioConfig(
        layers=layers,
        inter=_inter(doc["inter"], M),
        initial=_initial(doc["initial"], M, total),
        name=name,
        omega=_num(doc, "omega", "", 0.0),
        perturbation=_perturbation(doc.get("perturbation", {})),
        integration=_integration(doc.get("integration", {})),
        outputs=_outputs(doc.get("outputs", {})),
        sweep=_sweep(doc["sweep"]) if "sweep" in doc else None,
    )


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a YAML/JSON scenario document."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("", f"malformed document: {exc}") from exc
    return config_from_dict(doc)


def load_config(path) -> ScenarioConfig:
    return parse_config(Path(path).read_text())


# --- running -------------------------------------------------------------

@dataclass
class RunReport:
    times: np.ndarray
    R_full: np.ndarray
    R_reduced: np.ndarray
    spread: np.ndarray
    final_full: np.ndarray
    final_reduced: np.ndarray
    max_deviation: float | None
    broadcast_ic: bool
    seeds: dict
    duration: float
    label: str = ""
    sweep_value: float | None = None
    spectrum: SpectrumReport | None = None
    full_trajectory: object = field(default=None, repr=False)
    reduced_trajectory: object = field(default=None, repr=False)

    def first_time_above(self, level: float, series: str = "R_full") -> float:
        """Earliest sample time with R above ``level``; inf if never reached."""
        r = getattr(self, series)
        hit = np.flatnonzero(r > level)
        return float(self.times[hit[0]]) if hit.size else float("inf")

    def summary(self) -> dict:
        return {
            "label": self.label,
            "sweep_value": self.sweep_value,
            "samples": int(len(self.times)),
            "final_R_full": float(self.R_full[-1]),
            "final_R_reduced": float(self.R_reduced[-1]),
            "max_R_difference": float(np.max(np.abs(self.R_full - self.R_reduced))),
            "max_broadcast_spread": float(self.spread.max()),
            "max_deviation": self.max_deviation,
            "broadcast_ic": self.broadcast_ic,
            "final_full": [float(x) for x in wrap(self.final_full)],
            "final_reduced": [float(x) for x in wrap(self.final_reduced)],
            "seeds": self.seeds,
            "duration_s": self.duration,
            "spectrum": self.spectrum.to_dict() if self.spectrum else None,
        }


def reduced_initial(cfg: ScenarioConfig, net: MultilayerNetwork):
    """Reduced initial phases, plus the explicit full state when one was given."""
    ic = cfg.initial
    M = cfg.M
    if ic.type == "random":
        return random_phases(M, ic.seed), None
    if ic.type == "twisted":
        return twisted_state(M, ic.p), None
    theta = np.asarray(ic.theta, dtype=np.float64)
    if theta.shape[0] == M:
        return theta, None
    # a full state: reduce each layer to its circular mean
    bar = np.array([np.angle(np.exp(1j * theta[net.layer_slice(l)]).mean())
                    for l in range(M)])
    return bar, theta


def _use_dense(cfg: ScenarioConfig, n: int) -> bool:
    b = cfg.integration.backend
    return b == "dense" or (b == "auto" and n <= DENSE_LIMIT)


def run_compare(cfg: ScenarioConfig, keep_trajectories: bool = False,
                sweep_value: float | None = None) -> RunReport:
    """Integrate the multilayer network and its reduction side by side."""
    start = time.perf_counter()
    net = cfg.build_network()
    red = reduce(net)
    params = cfg.params()
    bar0, full0 = reduced_initial(cfg, net)
    pert = cfg.perturbation
    if full0 is None:
        if pert.amplitude > 0 and pert.mode == "reduced":
            bar0 = perturb(bar0, pert.amplitude, pert.seed)
        full0 = broadcast(bar0, net.layer_sizes)
        if pert.amplitude > 0 and pert.mode == "full":
            full0 = perturb(full0, pert.amplitude, pert.seed)
    elif pert.amplitude > 0:
        full0 = perturb(full0, pert.amplitude, pert.seed)
    is_bcast = bool(np.array_equal(full0, broadcast(bar0, net.layer_sizes)))

    red_traj = integrate_reduced(red, bar0, params, seed=cfg.initial.seed)
    if _use_dense(cfg, net.total_size):
        full_traj = integrate_rk4(assemble_full(net), full0, params, label="full",
                                  seed=cfg.initial.seed)
    else:
        full_traj = integrate_multilayer(net, full0, params, label="full",
                                         seed=cfg.initial.seed)

    max_dev = None
    if is_bcast:
        max_dev = max_wrapped_deviation(full_traj.thetas,
                                        broadcast(red_traj.thetas, net.layer_sizes))
    spread = layer_spreads(full_traj.thetas, net.layer_sizes).max(axis=1)
    report = RunReport(
        times=full_traj.times,
        R_full=order_parameter(full_traj.thetas),
        R_reduced=order_parameter(red_traj.thetas),
        spread=spread,
        final_full=full_traj.thetas[-1],
        final_reduced=red_traj.thetas[-1],
        max_deviation=max_dev,
        broadcast_ic=is_bcast,
        seeds=cfg.seeds(),
        duration=time.perf_counter() - start,
        label=cfg.name,
        sweep_value=sweep_value,
    )
    if keep_trajectories:
        report.full_trajectory = full_traj
        report.reduced_trajectory = red_traj
    return report


def sweep_configs(cfg: ScenarioConfig, param: str, values) -> list:
    if param not in SWEEP_PARAMS:
        raise ConfigError("sweep.param", f"unsupported sweep parameter {param!r}; "
                                         f"expected one of {list(SWEEP_PARAMS)}")
    out = []
    for v in values:
        v = float(v)
        if not np.isfinite(v) or v < 0:
            raise ConfigError("sweep.values", f"values must be finite and >= 0, got {v}")
        if param == "amplitude":
            out.append(replace(cfg, perturbation=replace(cfg.perturbation, amplitude=v)))
        else:
            if cfg.inter.type == "explicit":
                raise ConfigError("sweep.param", "epsilon sweeps need a uniform inter-layer coupling")
            out.append(replace(cfg, inter=replace(cfg.inter, epsilon=v)))
    return out


def run_sweep(cfg: ScenarioConfig, param: str, values, workers: int | None = None,
              keep_trajectories: bool = False) -> list:
    """One ``run_compare`` per value with identical seeds, in input order."""
    cfgs = sweep_configs(cfg, param, values)
    jobs = list(zip(cfgs, [float(v) for v in values]))
    if workers is None:
        workers = min(len(jobs), os.cpu_count() or 1)
    if workers <= 1 or len(jobs) <= 1:
        return [run_compare(c, keep_trajectories, v) for c, v in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: run_compare(job[0], keep_trajectories, job[1]), jobs))


@dataclass
class StabilityOutcome:
    full: SpectrumReport
    reduced: SpectrumReport
    theta_bar_star: np.ndarray
    cross_check: CrossCheck | None = None

    @property
    def verdict(self) -> str:
        return self.full.verdict

    @property
    def agree(self) -> bool:
        return self.full.verdict == self.reduced.verdict

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "reduced_verdict": self.reduced.verdict,
            "verdicts_agree": self.agree,
            "theta_bar_star": [float(x) for x in self.theta_bar_star],
            "full": self.full.to_dict(),
            "reduced": self.reduced.to_dict(),
            "cross_check": asdict(self.cross_check) if self.cross_check else None,
        }


def run_stability(cfg: ScenarioConfig, cross_check: bool = False,
                  cross_check_T: float = 200.0) -> StabilityOutcome:
    """Certify the broadcast equilibrium given by a twisted or explicit reduced state."""
    if cfg.initial.type not in ("twisted", "explicit"):
        raise ConfigError("initial.type", "stability needs a twisted or explicit reduced equilibrium")
    net = cfg.build_network()
    if cfg.initial.type == "twisted":
        bar = twisted_state(cfg.M, cfg.initial.p)
    else:
        bar = np.asarray(cfg.initial.theta, dtype=np.float64)
        if bar.shape[0] != cfg.M:
            raise ConfigError("initial.theta", f"expected a reduced state of length {cfg.M}")
    full = spectrum_via_join(net, bar)
    red = spectrum_reduced(reduce(net), bar)
    check = None
    if cross_check:
        amp = cfg.perturbation.amplitude if cfg.perturbation.amplitude > 0 else 0.01
        check = simulation_cross_check(net, bar, full.verdict, amplitude=amp,
                                       seed=cfg.perturbation.seed, T=cross_check_T,
                                       dt=cfg.integration.dt)
    return StabilityOutcome(full, red, bar, check)


# --- output --------------------------------------------------------------

def _fmt_value(v) -> str:
    return format(float(v), "g").replace("-", "m")


def output_stem(cfg: ScenarioConfig, sweep_param: str | None = None, value=None) -> str:
    parts = [cfg.name]
    if sweep_param is not None:
        parts.append(f"{sweep_param}{_fmt_value(value)}")
    seed = cfg.initial.seed if cfg.initial.type == "random" else cfg.perturbation.seed
    parts.append(f"seed{seed}")
    return "_".join(parts)


def write_csv(path, header, columns) -> None:
    data = np.column_stack([np.asarray(c, dtype=np.float64) for c in columns])
    np.savetxt(path, data, delimiter=",", fmt="%.17g", header=",".join(header), comments="")


def write_phases(path, traj) -> None:
    n = traj.thetas.shape[1]
    header = ["t"] + [f"theta_{i}" for i in range(n)]
    write_csv(path, header, [traj.times] + list(traj.thetas.T))


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, default=float) + "\n")


def write_run(report: RunReport, out_dir, stem: str, phases: bool = False,
              sweep: bool = False) -> list:
    """Write CSV series and JSON metadata; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if sweep:
        p = out_dir / f"{stem}_R.csv"
        write_csv(p, ["t", "R"], [report.times, report.R_full])
    else:
        p = out_dir / f"{stem}_compare.csv"
        write_csv(p, ["t", "R_full", "R_reduced"], [report.times, report.R_full, report.R_reduced])
    written.append(p)
    if phases and report.full_trajectory is not None:
        for tag, traj in (("full", report.full_trajectory), ("reduced", report.reduced_trajectory)):
            p = out_dir / f"{stem}_{tag}_phases.csv"
            write_phases(p, traj)
            written.append(p)
    p = out_dir / f"{stem}_run.json"
    write_json(p, report.summary())
    written.append(p)
    return written


def describe(cfg: ScenarioConfig) -> dict:
    """Plain-data view of a validated config, defaults filled in."""
    d = asdict(cfg)
    d["layers"] = [asdict(s) for s in cfg.layers]
    return d

