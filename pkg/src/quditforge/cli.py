"""The ``forge`` command line."""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .benchmarks import BENCHMARKS, GENERATORS, toffoli_count, two_qubit_count
from .constructions import (
    AdderParams, block_adder, compress_unit, draper_adder2, generalized_toffoli, incrementer,
    plus_k_adder, qutrit_toffoli,
)
from .errors import ForgeError
from .experiments import ExperimentConfig, run_experiment, write_result
from .io import atomic_write, load_circuit, save_circuit
from .ir import Circuit, Kind, metrics
from .noise import estimate_fidelity, load_model, preset
from .statevec import classical_batch, sparse_run
from .trios import compile_circuit, default_device, load_device, report, validate_connectivity

log = logging.getLogger("quditforge")

EXIT_OK, EXIT_INVALID, EXIT_PARTIAL = 0, 1, 2


def _params(pairs) -> dict:
    out = {}
    for p in pairs:
        if "=" not in p:
            raise click.BadParameter(f"expected key=value, got {p!r}")
        k, v = p.split("=", 1)
        try:
            out[k] = json.loads(v)
        except json.JSONDecodeError:
            out[k] = v
    return out


def _adder_params(p: dict) -> AdderParams:
    return AdderParams(int(p["n"]), int(p.get("c", 5)), str(p.get("scheme", "2-3-1")),
                       bool(p.get("carry_in", False)), bool(p.get("carry_out", False)))


CONSTRUCTIONS = {
    "qutrit_toffoli": lambda p: qutrit_toffoli(),
    "generalized_toffoli": lambda p: generalized_toffoli(int(p.get("n", 13)), int(p.get("top", 1)),
                                                         str(p.get("target", "X"))),
    "incrementer": lambda p: incrementer(int(p.get("n", 8))),
    "compress": lambda p: compress_unit(str(p.get("scheme", "2-3-1"))),
    "draper_adder": lambda p: draper_adder2(int(p.get("n", 4)), bool(p.get("carry_in", False)),
                                            bool(p.get("carry_out", True)))[0],
    "block_adder": lambda p: block_adder(_adder_params(p)),
    "plus_k": lambda p: plus_k_adder(int(p["n"]), int(p["k"]), _adder_params(p)),
}


class Settings:
    def __init__(self, **kw):
        self.__dict__.update(kw)

    def device(self):
        if self.device_path:
            return load_device(self.device_path)
        return default_device(self.topology)

    def model(self):
        if self.model_name and Path(self.model_name).is_file():
            return load_model(self.model_name)
        return preset(self.model_name or "SC")


def _emit(settings: Settings, text: str) -> None:
    if settings.out:
        atomic_write(settings.out, text)
    else:
        click.echo(text, nl=False)


@click.group()
@click.version_option(__version__, prog_name="forge")
@click.option("--seed", type=int, default=None, help="Seed for stochastic steps.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file.")
@click.option("--device", "device_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Device JSON (overrides --topology).")
@click.option("--model", "model_name", default=None, help="Noise preset name or model JSON.")
@click.option("--trials", type=int, default=200, show_default=True)
@click.option("--topology", default="ibmq-johannesburg", show_default=True)
@click.option("--pipeline", type=click.Choice(["trios", "baseline"]), default="trios", show_default=True)
@click.option("-v", "--verbose", is_flag=True)
@click.pass_context
def main(ctx, seed, out, device_path, model_name, trials, topology, pipeline, verbose):
    """Qudit circuit constructions, noise simulation and Toffoli-aware routing."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, stream=sys.stderr,
                        format="%(message)s")
    ctx.obj = Settings(seed=seed, out=out, device_path=device_path, model_name=model_name,
                       trials=trials, topology=topology, pipeline=pipeline)


def _run(fn):
    """Map library errors to exit status 1."""
    try:
        return fn()
    except (ForgeError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INVALID)


@main.command()
@click.argument("name", type=click.Choice(sorted(CONSTRUCTIONS)))
@click.option("-p", "--param", "pairs", multiple=True, help="key=value construction parameter.")
@click.pass_obj
def gen(settings, name, pairs):
    """Write a construction circuit as JSON."""
    def go():
        circ = CONSTRUCTIONS[name](_params(pairs))
        if settings.out:
            save_circuit(circ, settings.out)
        else:
            from .io import dumps_circuit
            click.echo(dumps_circuit(circ), nl=False)
        m = metrics(circ)
        click.echo(f"{name}: width={circ.width} gates={len(circ.gates)} n1={m.n1} n2={m.n2} depth={m.depth}",
                   err=True)
    _run(go)


@main.command()
@click.argument("name", type=click.Choice(sorted(GENERATORS)))
@click.option("--size", type=int, default=None, help="Generator argument (defaults to the table size).")
@click.pass_obj
def bench(settings, name, size):
    """Write a benchmark circuit plus a sidecar of expected counts."""
    def go():
        spec = BENCHMARKS[name]
        circ = spec.make() if size is None else GENERATORS[name](size)
        counts = {"name": name, "qubits": circ.width, "toffolis": toffoli_count(circ),
                  "two_qubit_gates": two_qubit_count(circ)}
        if size is None:
            counts["table"] = {"qubits": spec.qubits, "toffolis": spec.toffolis,
                               "two_qubit_gates": spec.two_qubit}
        side = json.dumps(counts, indent=1) + "\n"
        if settings.out:
            save_circuit(circ, settings.out)
            atomic_write(Path(settings.out).with_suffix(".expected.json"), side)
        else:
            click.echo(side, nl=False)
    _run(go)


@main.command()
@click.argument("circuit", type=click.Path(exists=True, dir_okay=False))
@click.option("--jobs", type=int, default=None, help="Worker processes (default: all cores).")
@click.pass_obj
def simulate(settings, circuit, jobs):
    """Estimate noisy fidelity of a circuit from random input states."""
    def go():
        circ = load_circuit(circuit)
        model = settings.model()
        seed = 0 if settings.seed is None else settings.seed
        est = estimate_fidelity(circ, model, settings.trials, seed, jobs=jobs)
        _emit(settings, json.dumps({"model": model.label, "trials": est.trials, "seed": est.seed,
                                    "mean_fidelity": est.mean, "stderr": est.stderr}) + "\n")
    _run(go)


@main.command(name="compile")
@click.argument("circuit", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def compile_cmd(settings, circuit):
    """Route and decompose a qubit circuit onto a device."""
    def go():
        circ = load_circuit(circuit)
        device = settings.device()
        res = compile_circuit(circ, device.graph, settings.pipeline)
        rep = report(res, device)
        if settings.out:
            save_circuit(res.circuit, settings.out)
        summary = {"pipeline": res.pipeline, "device": device.graph.name,
                   "two_qubit_gates": rep.two_qubit_gates, "swaps": rep.swaps_inserted,
                   "depth": rep.depth, "duration_s": rep.duration,
                   "estimated_success": rep.estimated_success,
                   "initial": list(res.initial), "final": list(res.final)}
        click.echo(json.dumps(summary))
    _run(go)


def _outputs(circ: Circuit, levels):
    body = circ.with_gates(g for g in circ.gates if g.kind is not Kind.MEASURE)
    return sparse_run(body, levels, 1e-9)


@main.command()
@click.argument("circuit", type=click.Path(exists=True, dir_okay=False))
@click.option("--against", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Reference circuit that must act identically on basis inputs.")
@click.option("--inputs", type=int, default=1000, show_default=True)
@click.option("--connectivity", is_flag=True, help="Also check two-qubit gates against the device.")
@click.pass_obj
def verify(settings, circuit, against, inputs, connectivity):
    """Check a circuit file; exit 1 on any violation or mismatch."""
    def go():
        circ = load_circuit(circuit)
        problems = []
        if connectivity:
            problems += validate_connectivity(circ, settings.device().graph)
        if against:
            ref = load_circuit(against)
            if (ref.width, ref.radix) != (circ.width, circ.radix):
                problems.append("width or radix differs from reference")
            else:
                rng = np.random.default_rng(settings.seed)
                levels = rng.integers(0, circ.radix, size=(inputs, circ.width))
                classical = all(g.kind in (Kind.FLIP, Kind.INC, Kind.SWAP) for g in ref.gates + circ.gates)
                if classical:
                    bad = np.flatnonzero((classical_batch(ref, levels) != classical_batch(circ, levels)).any(1))
                    problems += [f"input {tuple(levels[i])} differs" for i in bad[:10]]
                else:
                    for lv in levels:
                        a, b = _outputs(ref, list(lv)), _outputs(circ, list(lv))
                        if any(abs(a.get(k, 0) - b.get(k, 0)) > 1e-7 for k in set(a) | set(b)):
                            problems.append(f"input {tuple(lv)} differs")
                            break
        for p in problems:
            click.echo(p, err=True)
        if problems:
            sys.exit(EXIT_INVALID)
        click.echo("ok")
    _run(go)


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("--jobs", type=int, default=None, help="Worker processes for fidelity sweeps.")
@click.pass_obj
def sweep(settings, config, jobs):
    """Run an experiment config and write its CSV table."""
    def go():
        try:
            raw = json.loads(Path(config).read_text())
        except json.JSONDecodeError as exc:
            from .errors import ParseError
            raise ParseError(f"{config}: line {exc.lineno}: {exc.msg}") from None
        cfg = ExperimentConfig.from_dict(raw)
        if settings.seed is not None:
            cfg.seed = settings.seed
        out = settings.out or cfg.out
        if not out:
            from .errors import ValidationError
            raise ValidationError("sweep needs --out or an 'out' entry in the config")
        result = run_experiment(cfg, jobs)
        write_result(cfg, result, out)
        log.info("%d rows written to %s", len(result.rows), out)
        return result.failed
    failed = _run(go)
    if failed:
        click.echo(f"{failed} rows failed; see the error column", err=True)
        sys.exit(EXIT_PARTIAL)


if __name__ == "__main__":
    main()
