"""Entanglement of the register along a Grover run, step by step."""
from __future__ import annotations

from .entropy import von_neumann_entropy
from .grover import GroverConfig, half_steps, success_probability
from .measure import OptimizerConfig, pmax_numeric
from .qudit import QuditRegisterState, uniform_state
from .trace import EvolutionTrace, TraceRecord

REAL_AGREEMENT_TOL = 1e-6


def trace_general(
    d: int,
    n: int,
    marked: int,
    m: int,
    optimizer: OptimizerConfig | None = None,
    start: QuditRegisterState | None = None,
    reference: QuditRegisterState | None = None,
    check_real: bool = False,
) -> EvolutionTrace:
    """Record success probability, Groverian G and (for n=2) entropy after every operator.

    ``start`` and the diffusion ``reference`` default to the uniform
    superposition. With ``check_real`` every real intermediate state is also
    measured in real-only mode and a ``RuntimeError`` is raised if the two
    optimisations disagree.
    """
    optimizer = optimizer or OptimizerConfig()
    config = GroverConfig(marked=marked, iterations=m, record_half_steps=True)
    config.validate(d, n)
    start = uniform_state(d, n) if start is None else start
    reference = uniform_state(d, n) if reference is None else reference
    trace = EvolutionTrace(d=d, n=n, marked=marked)
    for label, state in half_steps(start, config, reference):
        g = pmax_numeric(state, optimizer).g
        if check_real and state.is_real():
            real_cfg = OptimizerConfig(
                restarts=optimizer.restarts, max_sweeps=optimizer.max_sweeps,
                tolerance=optimizer.tolerance, seed=optimizer.seed, real_only=True,
                threads=optimizer.threads,
            )
            g_real = pmax_numeric(state, real_cfg).g
            if abs(g - g_real) > REAL_AGREEMENT_TOL:
                raise RuntimeError(f"{label}: real-mode G={g_real} disagrees with full-mode G={g}")
        s = von_neumann_entropy(state) if n == 2 else None
        trace.append(TraceRecord(label, success_probability(state, marked), g, s))
    return trace


def trace_two_qutrit(marked: int = 0, optimizer: OptimizerConfig | None = None) -> EvolutionTrace:
    """Two Grover iterations on two qutrits from the uniform product state (5 records)."""
    return trace_general(3, 2, marked, 2, optimizer, check_real=True)
