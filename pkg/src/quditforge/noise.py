"""Quantum-trajectory noise simulation.

Each trial draws a random input, runs the ideal circuit for reference, then
replays the moment schedule with stochastic errors: a generalized-Pauli
depolarizing draw after every gate, and one amplitude-damping draw per qudit
at the end of every moment. The trial's score is the overlap with the ideal
output.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ParseError, UnknownPreset, ValidationError
from .ir import Circuit, Kind, schedule_moments
from .statevec import StateVector, apply_inplace, check_size, random_state, run_ideal


@dataclass(frozen=True)
class NoiseModel:
    label: str
    d: int
    p1: float  # per channel, single-qudit gates
    p2: float  # per channel, two-qudit gates
    t1: float  # seconds; math.inf disables idle damping
    dt1: float  # short moment, seconds
    dt2: float  # long moment, seconds

    def __post_init__(self):
        if self.d < 2:
            raise ValidationError("radix must be >= 2")
        if self.p1 < 0 or self.p2 < 0:
            raise ValidationError("error probabilities must be non-negative")
        if (self.d ** 2 - 1) * self.p1 >= 1 or (self.d ** 4 - 1) * self.p2 >= 1:
            raise ValidationError("error probabilities leave no room for the identity")
        if not self.t1 > 0:
            raise ValidationError("T1 must be positive")
        if not 0 < self.dt1 <= self.dt2:
            raise ValidationError("durations must satisfy 0 < dt1 <= dt2")

    def to_json(self) -> dict:
        out = {"label": self.label, "d": self.d, "p1": self.p1, "p2": self.p2,
               "t1_s": None if math.isinf(self.t1) else self.t1,
               "dt1_s": self.dt1, "dt2_s": self.dt2}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "NoiseModel":
        try:
            t1 = data["t1_s"]
            return cls(
                label=str(data["label"]),
                d=int(data["d"]),
                p1=float(data["p1"]),
                p2=float(data["p2"]),
                t1=math.inf if t1 is None else float(t1),
                dt1=float(data["dt1_s"]),
                dt2=float(data["dt2_s"]),
            )
        except KeyError as exc:
            raise ParseError(f"noise model missing field {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ParseError(f"bad noise model value: {exc}") from None


def load_model(path) -> NoiseModel:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    return NoiseModel.from_json(data)


_SC = dict(d=3, dt1=100e-9, dt2=300e-9)
_TI = dict(dt1=1e-6, dt2=200e-6, t1=math.inf)

# Superconducting rows are tabulated as 3*p1 and 15*p2.
PRESETS = {
    "SC": NoiseModel("SC", p1=1e-4 / 3, p2=1e-3 / 15, t1=1e-3, **_SC),
    "SC+T1": NoiseModel("SC+T1", p1=1e-4 / 3, p2=1e-3 / 15, t1=10e-3, **_SC),
    "SC+GATES": NoiseModel("SC+GATES", p1=1e-5 / 3, p2=1e-4 / 15, t1=1e-3, **_SC),
    "SC+T1+GATES": NoiseModel("SC+T1+GATES", p1=1e-5 / 3, p2=1e-4 / 15, t1=10e-3, **_SC),
    "TI_QUBIT": NoiseModel("TI_QUBIT", d=2, p1=6.4e-4, p2=1.3e-4, **_TI),
    "BARE_QUTRIT": NoiseModel("BARE_QUTRIT", d=3, p1=2.2e-4, p2=4.3e-4, **_TI),
    "DRESSED_QUTRIT": NoiseModel("DRESSED_QUTRIT", d=3, p1=1.5e-4, p2=3.1e-4, **_TI),
}


def preset(name: str) -> NoiseModel:
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPreset(name) from None


def lambdas_from_T1(dt: float, t1: float, d: int) -> np.ndarray:
    """Decay probabilities for levels 1..d-1 over an idle window ``dt``.

    Level j relaxes at rate j/T1.
    """
    j = np.arange(1, d, dtype=float)
    return -np.expm1(-j * dt / t1)


# ------------------------------------------------------------- gate errors

def sample_gate_error(d: int, arity: int, p: float, rng) -> tuple | None:
    """Draw a generalized Pauli X^a Z^b per qudit, or None for identity.

    Every one of the d^(2*arity) - 1 non-identity labels has probability p.
    """
    n_labels = d ** (2 * arity)
    u = rng.random()
    if u >= (n_labels - 1) * p:
        return None
    code = 1 + min(int(u / p), n_labels - 2)
    out = []
    for _ in range(arity):
        code, ab = divmod(code, d * d)
        out.append(divmod(ab, d))
    return tuple(reversed(out))


def apply_pauli(tensor: np.ndarray, qudit: int, a: int, b: int) -> None:
    """Apply X^a Z^b to one qudit of a state tensor in place."""
    d = tensor.shape[qudit]
    if b:
        omega = np.exp(2j * np.pi * b * np.arange(d) / d)
        shape = [1] * tensor.ndim
        shape[qudit] = d
        tensor *= omega.reshape(shape)
    if a:
        tensor[...] = np.roll(tensor, a, axis=qudit)


def _error_slots(gate, model: NoiseModel) -> list[tuple[tuple[int, ...], float]]:
    qs = gate.qudits
    if len(qs) == 1:
        return [(qs, model.p1)]
    if len(qs) == 2:
        return [(qs, model.p2)]
    if len(qs) == 3:
        c1, c2, tq = qs
        pairs = [(c1, c2), (c2, tq), (c1, tq)] * 2
        singles = [c1, c2, tq, c1, c2, tq, tq]
        return [(p, model.p2) for p in pairs] + [((q,), model.p1) for q in singles]
    raise ValidationError(f"no noise model for {len(qs)}-qudit gate")


# -------------------------------------------------------------- trajectories

@dataclass(frozen=True)
class FidelityEstimate:
    mean: float
    stderr: float
    trials: int
    seed: int


class Trajectory:
    """Pre-scheduled circuit ready for repeated noisy trials."""

    def __init__(self, circuit: Circuit, model: NoiseModel, allow_large: bool = False):
        if model.d != circuit.radix:
            raise ValidationError(f"model radix {model.d} != circuit radix {circuit.radix}")
        for g in circuit.gates:
            if g.kind in (Kind.MEASURE, Kind.RESET):
                raise ValidationError("noisy trials need a measurement-free circuit")
        check_size(circuit.width, circuit.radix, allow_large)
        self.circuit = circuit
        self.model = model
        self.allow_large = allow_large
        self.steps = []
        for m in schedule_moments(circuit):
            ops = [(g, _error_slots(g, model)) for g in m.gates]
            dt = m.duration(model.dt1, model.dt2)
            lam = np.concatenate([[0.0], lambdas_from_T1(dt, model.t1, model.d)])
            self.steps.append((ops, lam if lam.any() else None))

    def run(self, rng, initial: StateVector | None = None) -> float:
        c, d = self.circuit, self.circuit.radix
        if initial is None:
            initial = random_state(c.width, d, rng, self.allow_large)
        ideal = run_ideal(c, initial).amplitudes
        psi = initial.amplitudes.copy()
        tensor = psi.reshape((d,) * c.width)
        for ops, lam in self.steps:
            for gate, slots in ops:
                apply_inplace(tensor, gate)
                for qs, p in slots:
                    if p == 0.0:
                        continue
                    err = sample_gate_error(d, len(qs), p, rng)
                    if err is not None:
                        for q, (a, b) in zip(qs, err):
                            apply_pauli(tensor, q, a, b)
            if lam is not None:
                kernels.damp_idle(psi, c.width, d, lam, rng.random(c.width))
        return float(min(1.0, abs(np.vdot(ideal, psi)) ** 2))


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def run_noisy_trial(circuit: Circuit, model: NoiseModel, seed, initial: StateVector | None = None) -> float:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return Trajectory(circuit, model).run(rng, initial)


def _run_chunk(args):
    circuit, model, seed, indices, initial = args
    traj = Trajectory(circuit, model)
    return [traj.run(trial_rng(seed, i), initial) for i in indices]


def trial_fidelities(circuit: Circuit, model: NoiseModel, trials: int, seed: int,
                     jobs: int = 1, initial: StateVector | None = None) -> np.ndarray:
    if trials < 1:
        raise ValidationError("need at least one trial")
    jobs = max(1, min(jobs or os.cpu_count() or 1, trials))
    if jobs == 1:
        return np.array(_run_chunk((circuit, model, seed, range(trials), initial)))
    chunks = [range(k, trials, jobs) for k in range(jobs)]
    out = np.empty(trials)
    with ProcessPoolExecutor(jobs) as pool:
        for idx, vals in zip(chunks, pool.map(_run_chunk, [(circuit, model, seed, ch, initial) for ch in chunks])):
            out[list(idx)] = vals
    return out


def estimate_fidelity(circuit: Circuit, model: NoiseModel, trials: int, seed: int,
                      jobs: int = 1, initial: StateVector | None = None) -> FidelityEstimate:
    f = trial_fidelities(circuit, model, trials, seed, jobs, initial)
    err = float(f.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return FidelityEstimate(float(f.mean()), err, trials, seed)
