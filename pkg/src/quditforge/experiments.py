"""Experiment grids that turn library calls into CSV tables."""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from typing import Callable

from .benchmarks import GENERATORS, toffoli_count
from .constructions import generalized_toffoli, incrementer
from .errors import ForgeError, ValidationError
from .io import atomic_write, render_csv
from .ir import Circuit, ccx, metrics
from .noise import estimate_fidelity, preset
from .trios import compile_circuit, default_device, report, topology

log = logging.getLogger("quditforge")

# The 35 Johannesburg triplets of the Toffoli routing experiment.
ROUTING_TRIPLETS = [
    (6, 17, 3), (16, 1, 8), (7, 18, 3), (17, 4, 11), (19, 2, 6), (1, 19, 8), (3, 15, 14),
    (7, 3, 19), (15, 0, 9), (19, 1, 7), (1, 2, 18), (6, 13, 2), (14, 5, 15), (16, 1, 18),
    (19, 10, 6), (0, 12, 15), (5, 3, 9), (9, 3, 5), (13, 10, 1), (19, 15, 13), (0, 6, 11),
    (8, 6, 19), (11, 15, 8), (14, 13, 16), (18, 7, 8), (2, 5, 3), (5, 1, 3), (8, 10, 6),
    (11, 7, 9), (17, 10, 5), (1, 3, 4), (9, 12, 14), (10, 11, 0), (3, 1, 2), (17, 16, 18),
]

# benchmark name -> generator argument for the compile experiment
DEFAULT_BENCHMARKS = {
    "cuccaro_adder": 20, "cnx_logancilla": 10, "grovers": 6,
    "bv": 20, "qaoa_complete": 10, "qft_adder": 16,
}


@dataclass
class ExperimentConfig:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int | None = None
    out: str | None = None

    def as_dict(self) -> dict:
        return {"kind": self.kind, "params": self.params, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if "kind" not in d:
            raise ValidationError("experiment config needs 'kind'")
        return cls(d["kind"], dict(d.get("params", {})), d.get("seed"), d.get("out"))


@dataclass
class ExperimentResult:
    columns: list[str]
    rows: list[dict]

    @property
    def failed(self) -> int:
        return sum(1 for r in self.rows if r.get("error"))


def _controls(p: dict) -> list[int]:
    if "n_controls" in p:
        return [int(n) for n in p["n_controls"]]
    lo, hi = int(p.get("min", 4)), int(p.get("max", 200))
    return list(range(lo, hi + 1, int(p.get("step", 1))))


def _guard(row: dict, fn: Callable[[], dict]) -> dict:
    try:
        row.update(fn())
        row["error"] = ""
    except ForgeError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _depth_curve(cfg: ExperimentConfig) -> ExperimentResult:
    kind = cfg.params.get("construction", "generalized_toffoli")
    make = {"generalized_toffoli": generalized_toffoli, "incrementer": incrementer}.get(kind)
    if make is None:
        raise ValidationError(f"unknown construction {kind!r}")
    cols = ["construction", "n", "depth", "n1", "n2", "error"]
    rows = []
    for n in _controls(cfg.params):
        def one(n=n):
            m = metrics(make(n))
            return {"depth": m.depth, "n1": m.n1, "n2": m.n2}
        rows.append(_guard({"construction": kind, "n": n}, one))
    return ExperimentResult(cols, rows)


def _gate_count_curve(cfg: ExperimentConfig) -> ExperimentResult:
    cols = ["n_controls", "n2", "n1", "n2_per_control", "error"]
    rows = []
    for n in _controls(cfg.params):
        def one(n=n):
            m = metrics(generalized_toffoli(n))
            return {"n2": m.n2, "n1": m.n1, "n2_per_control": m.n2 / n}
        rows.append(_guard({"n_controls": n}, one))
    return ExperimentResult(cols, rows)


def _fidelity_sweep(cfg: ExperimentConfig, jobs: int) -> ExperimentResult:
    if cfg.seed is None:
        raise ValidationError("fidelity sweeps need a seed")
    p = cfg.params
    models = p.get("models", ["SC", "SC+T1", "SC+GATES", "SC+T1+GATES",
                              "BARE_QUTRIT", "DRESSED_QUTRIT"])
    trials = int(p.get("trials", 200))
    cols = ["model", "n_controls", "trials", "seed", "mean_fidelity", "stderr", "error"]
    rows = []
    for name in models:
        for n in [int(v) for v in p.get("n_controls", [13])]:
            log.info("fidelity %s n=%d (%d trials)", name, n, trials)

            def one(name=name, n=n):
                model = preset(name)
                if model.d != 3:
                    raise ValidationError(f"{name} is a d={model.d} model; the sweep runs the qutrit tree")
                circ = generalized_toffoli(n)
                est = estimate_fidelity(circ, model, trials, cfg.seed, jobs=jobs)
                return {"mean_fidelity": est.mean, "stderr": est.stderr}
            rows.append(_guard({"model": name, "n_controls": n, "trials": trials, "seed": cfg.seed}, one))
    return ExperimentResult(cols, rows)


def _routing(cfg: ExperimentConfig) -> ExperimentResult:
    p = cfg.params
    graph = topology(p.get("topology", "ibmq-johannesburg"))
    device = default_device(graph.name)
    triplets = [tuple(t) for t in p.get("triplets", ROUTING_TRIPLETS)]
    pipelines = p.get("pipelines", ["trios", "baseline"])
    cols = ["topology", "triplet", "hop_sum", "pipeline", "two_qubit_gates", "swaps",
            "estimated_success", "error"]
    rows = []
    for trip in triplets:
        for pipe in pipelines:
            def one(trip=trip, pipe=pipe):
                a, b, c = trip
                circ = Circuit(graph.n_nodes, 2, [ccx(a, b, c)])
                res = compile_circuit(circ, graph, pipe)
                rep = report(res, device)
                hops = graph.hops
                return {"hop_sum": int(hops[a, b] + hops[b, c] + hops[a, c]),
                        "two_qubit_gates": rep.two_qubit_gates, "swaps": rep.swaps_inserted,
                        "estimated_success": rep.estimated_success}
            rows.append(_guard({"topology": graph.name, "triplet": "-".join(map(str, trip)),
                                "pipeline": pipe}, one))
    return ExperimentResult(cols, rows)


def _benchmark_compile(cfg: ExperimentConfig) -> ExperimentResult:
    p = cfg.params
    benches = p.get("benchmarks", DEFAULT_BENCHMARKS)
    tops = p.get("topologies", ["ibmq-johannesburg", "grid-5x4", "line-20", "clusters-5x4"])
    pipelines = p.get("pipelines", ["trios", "baseline"])
    cols = ["benchmark", "arg", "topology", "pipeline", "qubits", "toffolis", "two_qubit_gates",
            "swaps", "depth", "duration", "estimated_success", "error"]
    rows = []
    for name, arg in benches.items():
        for top in tops:
            for pipe in pipelines:
                def one(name=name, arg=arg, top=top, pipe=pipe):
                    if name not in GENERATORS:
                        raise ValidationError(f"unknown benchmark {name!r}")
                    circ = GENERATORS[name](int(arg))
                    device = default_device(top)
                    res = compile_circuit(circ, device.graph, pipe)
                    rep = report(res, device)
                    return {"qubits": circ.width, "toffolis": toffoli_count(circ),
                            "two_qubit_gates": rep.two_qubit_gates, "swaps": rep.swaps_inserted,
                            "depth": rep.depth, "duration": rep.duration,
                            "estimated_success": rep.estimated_success}
                rows.append(_guard({"benchmark": name, "arg": arg, "topology": top, "pipeline": pipe}, one))
    return ExperimentResult(cols, rows)


KINDS = {
    "depth-curve": _depth_curve,
    "gate-count-curve": _gate_count_curve,
    "fidelity-sweep": _fidelity_sweep,
    "toffoli-routing": _routing,
    "benchmark-compile": _benchmark_compile,
}


def run_experiment(cfg: ExperimentConfig, jobs: int | None = None) -> ExperimentResult:
    if cfg.kind not in KINDS:
        raise ValidationError(f"unknown experiment kind {cfg.kind!r}")
    fn = KINDS[cfg.kind]
    if cfg.kind == "fidelity-sweep":
        return fn(cfg, jobs or os.cpu_count() or 1)
    return fn(cfg)


def write_result(cfg: ExperimentConfig, result: ExperimentResult, path) -> None:
    atomic_write(path, render_csv(result.columns, result.rows, cfg.as_dict(), cfg.seed))


def geomean(values) -> float:
    values = list(values)
    return math.exp(sum(math.log(v) for v in values) / len(values))
