"""Grover reflections and search runs on qudit registers.

Both reflections are applied as rank-1 updates on the amplitude vector; no
``d**n x d**n`` operator is ever formed.

The diffusion step reflects about a caller-chosen reference state,
``P = 2|ref><ref| - 1``. With the uniform reference this is the usual
inversion about the mean amplitude; for any other reference the two notions
differ and the reflection about ``ref`` is what gets applied.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange
from .qudit import QuditRegisterState, uniform_state
from .trace import EvolutionTrace, TraceRecord


@dataclass(frozen=True)
class GroverConfig:
    marked: int
    iterations: int
    record_half_steps: bool = True

    def __post_init__(self):
        if self.marked < 0:
            raise IndexOutOfRange(f"marked index {self.marked} is negative")
        if self.iterations < 0:
            raise ValueError(f"iterations must be >= 0, got {self.iterations}")

    def validate(self, d: int, n: int) -> None:
        if self.marked >= d**n:
            raise IndexOutOfRange(f"marked index {self.marked} outside 0..{d ** n - 1}")


def _check_marked(state: QuditRegisterState, marked: int) -> None:
    if not 0 <= marked < state.dim:
        raise IndexOutOfRange(f"marked index {marked} outside 0..{state.dim - 1}")


def oracle_reflect(state: QuditRegisterState, marked: int) -> QuditRegisterState:
    """Apply ``1 - 2|W><W|``: negate the marked amplitude."""
    _check_marked(state, marked)
    amps = state.amplitudes.copy()
    amps[marked] = -amps[marked]
    return state.with_amplitudes(amps)


def diffusion_reflect(state: QuditRegisterState, reference: QuditRegisterState) -> QuditRegisterState:
    """Apply ``2|ref><ref| - 1``."""
    if state.d != reference.d or state.n != reference.n:
        raise DimensionMismatch("state and reference live in different spaces")
    r = reference.amplitudes
    return state.with_amplitudes(2 * r * np.vdot(r, state.amplitudes) - state.amplitudes)


def grover_iterate(
    state: QuditRegisterState,
    config: GroverConfig,
    reference: QuditRegisterState | None = None,
) -> QuditRegisterState:
    """Apply ``config.iterations`` full Grover iterations (oracle, then diffusion)."""
    if reference is None:
        reference = uniform_state(state.d, state.n)
    config.validate(state.d, state.n)
    for _ in range(config.iterations):
        state = diffusion_reflect(oracle_reflect(state, config.marked), reference)
    return state


def success_probability(state: QuditRegisterState, marked: int) -> float:
    _check_marked(state, marked)
    return float(abs(state.amplitudes[marked]) ** 2)


def optimal_iterations(d: int, n: int, max_scan: int | None = None) -> int:
    """Iteration count maximising ``sin^2((2m+1) asin(N**-0.5))`` for ``N = d**n``.

    The sine law is periodic in ``m`` and later periods can peak marginally
    higher, so the scan covers the first half period only, ``m <= pi/(2 theta)``,
    which is where the first amplitude maximum lies. Ties go to the smaller ``m``.
    """
    N = d**n
    if N < 2:
        raise ValueError("search space needs at least two elements")
    theta = math.asin(1 / math.sqrt(N))
    if max_scan is None:
        max_scan = int(math.floor(math.pi / (2 * theta)))
    best_m, best_p = 0, -1.0
    for m in range(max_scan + 1):
        p = math.sin((2 * m + 1) * theta) ** 2
        if p > best_p + 1e-15:
            best_m, best_p = m, p
    return best_m


def half_steps(start: QuditRegisterState, config: GroverConfig, reference: QuditRegisterState):
    """Yield ``(label, state)`` after the start and after every recorded operator."""
    yield "init", start
    state = start
    for k in range(1, config.iterations + 1):
        state = oracle_reflect(state, config.marked)
        if config.record_half_steps:
            yield f"iter{k}:PW", state
        state = diffusion_reflect(state, reference)
        yield f"iter{k}:Ppsi", state


def run_search(
    d: int,
    n: int,
    config: GroverConfig,
    start: QuditRegisterState | None = None,
    reference: QuditRegisterState | None = None,
) -> EvolutionTrace:
    """Run Grover search and record the marked-state success probability.

    ``start`` and ``reference`` both default to the uniform superposition.
    Only success probabilities are filled in; see
    :mod:`groverian.evolution` for entanglement along the way.
    """
    config.validate(d, n)
    if start is None:
        start = uniform_state(d, n)
    if reference is None:
        reference = uniform_state(d, n)
    if (start.d, start.n) != (d, n) or (reference.d, reference.n) != (d, n):
        raise DimensionMismatch("start/reference do not match d, n")
    trace = EvolutionTrace(d=d, n=n, marked=config.marked)
    for label, state in half_steps(start, config, reference):
        trace.append(TraceRecord(label, success_probability(state, config.marked)))
    return trace
