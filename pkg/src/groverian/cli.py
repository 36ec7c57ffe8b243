"""Command-line entry point: ``groverian measure|evolve|search|verify``.

Exit codes: 0 success, 1 verification breach, 2 bad arguments or unparsable
input, 3 method inapplicable, 4 non-convergence under ``--strict``,
5 unwritable output.
"""
from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import __version__
from .errors import GroverianError, StateFileError
from .evolution import trace_general
from .grover import GroverConfig, optimal_iterations, run_search
from .measure import (
    MethodInapplicable,
    OptimizerConfig,
    measure,
    pmax_closed_form_two_qutrit_real,
    pmax_numeric,
    pmax_schmidt_bipartite,
)
from .qudit import MAX_AMPLITUDES, format_state, random_state, read_state_file
from .trace import fmt_float

EXIT_BREACH = 1
EXIT_USAGE = 2
EXIT_INAPPLICABLE = 3
EXIT_NOT_CONVERGED = 4
EXIT_UNWRITABLE = 5
VERIFY_TOL = 1e-6

METHOD_CHOICES = {
    "numeric": "numeric",
    "closed-form": "closed_form_2qutrit",
    "schmidt": "schmidt",
    "grid": "grid",
}


def _round(x):
    """Round floats (recursively) to 12 significant digits for stable output."""
    if isinstance(x, float):
        return float(fmt_float(x))
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    return x


def _dump(doc) -> str:
    return json.dumps(_round(doc), indent=2, sort_keys=False)


def _optimizer(seed, restarts, threads, real_only=False) -> OptimizerConfig:
    return OptimizerConfig(restarts=restarts, seed=seed, threads=threads, real_only=real_only)


def _check_dims(d, n, marked=None):
    if d < 2 or n < 1:
        raise click.UsageError(f"need --d >= 2 and --n >= 1, got d={d}, n={n}")
    if d**n > MAX_AMPLITUDES:
        raise click.UsageError(f"d**n = {d ** n} exceeds the dense limit {MAX_AMPLITUDES}")
    if marked is not None and not 0 <= marked < d**n:
        raise click.UsageError(f"--marked must lie in 0..{d ** n - 1}")


def common_options(f):
    f = click.option("--json", "as_json", is_flag=True, help="Emit structured JSON.")(f)
    f = click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True,
                     envvar="GROVERIAN_THREADS", help="Worker threads for optimizer restarts.")(f)
    f = click.option("--restarts", type=click.IntRange(min=1), default=64, show_default=True)(f)
    f = click.option("--seed", type=int, default=0, show_default=True)(f)
    return f


@click.group()
@click.version_option(__version__, prog_name="groverian")
def cli():
    """Groverian entanglement and Grover search on qudit registers."""


@cli.command("measure")
@click.argument("state_file", type=click.Path(dir_okay=False))
@click.option("--method", type=click.Choice(list(METHOD_CHOICES) + ["all"]), default="numeric",
              show_default=True)
@click.option("--resolution", type=click.IntRange(min=2), default=40, show_default=True,
              help="Grid points per angle for --method grid.")
@click.option("--real-only", is_flag=True, help="Restrict numeric search to real product states.")
@click.option("--strict", is_flag=True, help="Exit 4 if the numeric optimizer did not converge.")
@common_options
def measure_cmd(state_file, method, resolution, real_only, strict, seed, restarts, threads, as_json):
    """Compute P_max and G for the state in STATE_FILE."""
    try:
        psi = read_state_file(state_file)
    except (OSError, StateFileError) as exc:
        click.echo(f"error: cannot read state file: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    config = _optimizer(seed, restarts, threads, real_only)
    wanted = list(METHOD_CHOICES.values()) if method == "all" else [METHOD_CHOICES[method]]
    results, skipped = [], []
    for m in wanted:
        try:
            rep = measure(psi, m, config, resolution=resolution)
        except (MethodInapplicable, GroverianError) as exc:
            if method != "all":
                click.echo(f"error: method {m} inapplicable: {exc}", err=True)
                sys.exit(EXIT_INAPPLICABLE)
            skipped.append({"method": m, "reason": str(exc)})
            continue
        results.append(rep)
    if as_json:
        doc = {"d": psi.d, "n": psi.n, "results": [r.to_dict() for r in results]}
        if skipped:
            doc["skipped"] = skipped
        click.echo(_dump(doc))
    else:
        for r in results:
            click.echo(f"method={r.method} p_max={fmt_float(r.p_max)} g={fmt_float(r.g)} "
                       f"converged={str(r.converged).lower()} restarts_used={r.restarts_used}")
        for s in skipped:
            click.echo(f"method={s['method']} skipped: {s['reason']}")
    if strict and any(not r.converged for r in results):
        click.echo("error: numeric optimizer did not converge", err=True)
        sys.exit(EXIT_NOT_CONVERGED)


@cli.command("evolve")
@click.option("--d", "d", type=int, required=True, help="Levels per qudit.")
@click.option("--n", "n", type=int, required=True, help="Number of qudits.")
@click.option("--marked", type=int, default=0, show_default=True, help="Flat index of the marked state.")
@click.option("--m", "m", type=click.IntRange(min=0), default=None,
              help="Grover iterations (default: optimal).")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
              help="CSV path; a .meta.json sidecar is written next to it. Default: stdout.")
@click.option("--start", "start_file", type=click.Path(dir_okay=False), default=None,
              help="Start state file (default: uniform superposition).")
@common_options
def evolve_cmd(d, n, marked, m, output, start_file, seed, restarts, threads, as_json):
    """Trace success probability, G and entropy across Grover half-steps."""
    _check_dims(d, n, marked)
    start = None
    if start_file is not None:
        try:
            start = read_state_file(start_file)
        except (OSError, StateFileError) as exc:
            click.echo(f"error: cannot read start state: {exc}", err=True)
            sys.exit(EXIT_USAGE)
        if (start.d, start.n) != (d, n):
            raise click.UsageError("start state dimensions do not match --d/--n")
    if m is None:
        m = optimal_iterations(d, n)
    trace = trace_general(d, n, marked, m, _optimizer(seed, restarts, threads), start=start)
    csv_text = trace.to_csv()
    meta = {
        "tool": "groverian",
        "version": __version__,
        "d": d, "n": n, "marked": marked, "m": m,
        "seed": seed, "restarts": restarts, "threads": threads,
        "start": "uniform" if start_file is None else "file",
        "rows": len(trace),
    }
    if output is not None:
        try:
            with open(output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(csv_text)
            with open(output + ".meta.json", "w", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps(meta, indent=2) + "\n")
        except OSError as exc:
            click.echo(f"error: cannot write output: {exc}", err=True)
            sys.exit(EXIT_UNWRITABLE)
    if as_json:
        records = [
            {"step_index": i, "step_label": r.step_label, "success_prob": r.success_prob,
             "g_groverian": r.g_groverian, "s_entropy": r.s_entropy}
            for i, r in enumerate(trace.records)
        ]
        click.echo(_dump({"metadata": meta, "records": records}))
    elif output is None:
        click.echo(csv_text, nl=False)


@cli.command("search")
@click.option("--d", "d", type=int, required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--marked", type=int, default=0, show_default=True)
@click.option("--m", "m", type=click.IntRange(min=0), default=None,
              help="Grover iterations (default: optimal).")
@click.option("--half-steps/--full-steps", default=False, help="Also report the state after each oracle.")
@click.option("--seed", type=int, default=0, show_default=True, help="Accepted for uniformity; search is deterministic.")
@click.option("--json", "as_json", is_flag=True)
def search_cmd(d, n, marked, m, half_steps, seed, as_json):
    """Run Grover search and print the success probability per step."""
    _check_dims(d, n, marked)
    chosen = optimal_iterations(d, n) if m is None else m
    trace = run_search(d, n, GroverConfig(marked, chosen, record_half_steps=half_steps))
    final = trace.records[-1].success_prob
    if as_json:
        doc = {
            "d": d, "n": n, "marked": marked, "m": chosen,
            "optimal_m": optimal_iterations(d, n),
            "steps": [{"step_label": r.step_label, "success_prob": r.success_prob} for r in trace.records],
            "final_success_prob": final,
        }
        click.echo(_dump(doc))
    else:
        click.echo(f"m={chosen}")
        for r in trace.records:
            click.echo(f"{r.step_label} success_prob={fmt_float(r.success_prob)}")
        click.echo(f"final success_prob={fmt_float(final)}")


def _pairs_real(psi, config):
    a = psi.amplitudes.real.reshape(3, 3)
    num = pmax_numeric(psi, config).p_max
    cf = pmax_closed_form_two_qutrit_real(a)
    sch = pmax_schmidt_bipartite(psi)
    return {"numeric-closed_form": abs(num - cf), "numeric-schmidt": abs(num - sch),
            "closed_form-schmidt": abs(cf - sch)}, {"numeric": num, "closed_form": cf, "schmidt": sch}


def _pairs_complex(psi, config):
    num = pmax_numeric(psi, config).p_max
    sch = pmax_schmidt_bipartite(psi)
    return {"numeric-schmidt": abs(num - sch)}, {"numeric": num, "schmidt": sch}


@cli.command("verify")
@click.option("--trials", type=click.IntRange(min=1), default=1000, show_default=True,
              help="Random states per family (real and complex).")
@common_options
def verify_cmd(trials, seed, restarts, threads, as_json):
    """Cross-check numeric, closed-form and Schmidt P_max on random two-qutrit states."""
    config = _optimizer(seed, restarts, threads)
    rng = np.random.default_rng(seed)
    families = {}
    for family, real, pairs in (("real", True, _pairs_real), ("complex", False, _pairs_complex)):
        worst = {}
        for t in range(trials):
            psi = random_state(3, 2, rng, real=real)
            diffs, values = pairs(psi, config)
            for pair, diff in diffs.items():
                if pair not in worst or diff > worst[pair]["disagreement"]:
                    worst[pair] = {"disagreement": diff, "trial": t, "values": values, "state": psi}
        families[family] = worst

    max_dis = max(w["disagreement"] for fam in families.values() for w in fam.values())
    passed = max_dis < VERIFY_TOL
    if as_json:
        doc = {
            "trials_per_family": trials, "seed": seed, "restarts": restarts, "tolerance": VERIFY_TOL,
            "max_disagreement": max_dis, "passed": passed,
            "families": {
                fam: {pair: {"max_disagreement": w["disagreement"], "worst_trial": w["trial"],
                             "values": w["values"]} for pair, w in worst.items()}
                for fam, worst in families.items()
            },
        }
        click.echo(_dump(doc))
    else:
        for fam, worst in families.items():
            for pair, w in worst.items():
                click.echo(f"{fam} {pair} max_disagreement={fmt_float(w['disagreement'])} "
                           f"worst_trial={w['trial']}")
        click.echo(f"max_disagreement={fmt_float(max_dis)} {'PASS' if passed else 'FAIL'}")
    if not passed:
        fam, pair, w = max(((f, p, w) for f, ws in families.items() for p, w in ws.items()),
                           key=lambda x: x[2]["disagreement"])
        vals = " ".join(f"{k}={fmt_float(v)}" for k, v in w["values"].items())
        comment = f"counterexample: {fam} trial {w['trial']}, {pair} disagreement {fmt_float(w['disagreement'])}\n{vals}"
        click.echo(format_state(w["state"], comment=comment), err=True, nl=False)
        sys.exit(EXIT_BREACH)


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="groverian", standalone_mode=True)
    except GroverianError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)


if __name__ == "__main__":
    main()
