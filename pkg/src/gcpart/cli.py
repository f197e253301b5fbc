"""Command-line front end: ``gcpart generate|partition|sweep|verify|graph-dump``."""
from __future__ import annotations

import logging
import sys
import time
from pathlib import Path

import click

from .circuit import CircuitError, parse_circuit, serialize_circuit
from .ga import GaConfig, static_baseline
from .generators import FAMILIES, generate
from .graph import GraphError, Mode, build_graph
from .network import QpuNetwork
from .sweep import METHODS, ExperimentPlan, best_of, format_summary, run_sweep, summarize
from .verify import run_verify


def _load_circuit(path: str):
    try:
        return parse_circuit(Path(path).read_text())
    except CircuitError as exc:
        raise click.ClickException(f"{path}: {exc}") from None


def _network(spec: str) -> QpuNetwork:
    try:
        return QpuNetwork.parse(spec)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--qpus") from None


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose: bool) -> None:
    """Partition quantum circuits over networked QPUs with joint state/gate teleportation."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")


@main.command("generate")
@click.argument("family", type=click.Choice(FAMILIES))
@click.option("--n", "n_q", type=int, required=True, help="Number of qubits.")
@click.option("--p", type=float, default=0.5, show_default=True, help="Two-qubit fraction (cp-fraction).")
@click.option("--d", type=int, default=None, help="Depth in rounds (cp-fraction; default n).")
@click.option("--edge-prob", type=float, default=0.5, show_default=True, help="Graph edge probability (qaoa).")
@click.option("--reps", type=int, default=1, show_default=True, help="QAOA repetitions.")
@click.option("--rounds", type=int, default=None, help="QV rounds (default n).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("-o", "--out", type=click.Path(dir_okay=False), default=None, help="Output file (default stdout).")
def generate_cmd(family, n_q, p, d, edge_prob, reps, rounds, seed, out):
    """Write a benchmark circuit in the text format."""
    try:
        circuit = generate(family, n_q, seed=seed, p=p, d=d, edge_prob=edge_prob, reps=reps, rounds=rounds)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    text = serialize_circuit(circuit)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)
    click.echo(
        f"n_q={circuit.n_q} d={circuit.depth} gates={len(circuit.gates)} two_qubit={circuit.n_two_qubit}",
        err=True,
    )


def _ga_options(f):
    for opt in reversed([
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                     help="GA key = value config file; flags below override it."),
        click.option("--population", type=int, default=None),
        click.option("--generations", type=int, default=None),
        click.option("--mutation-pairs", type=int, default=None),
        click.option("--mutation-interval", type=int, default=None),
        click.option("--elitism", type=int, default=None),
        click.option("--raw-softmax", is_flag=True, default=None,
                     help="Select by softmax of raw costs, favouring costly parents."),
        click.option("--seed", type=int, default=None),
    ]):
        f = opt(f)
    return f


def _ga_config(config_path, **overrides) -> GaConfig:
    cfg = GaConfig.from_text(Path(config_path).read_text()) if config_path else GaConfig()
    changes = {k: v for k, v in overrides.items() if v is not None}
    try:
        return cfg.replace(**changes)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None


@main.command("partition")
@click.argument("circuit_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--qpus", required=True, help="Capacities, e.g. '4,5', or 'COUNTxCAP' such as '4x8'.")
@click.option("--method", type=click.Choice(sorted(METHODS)), default="gcp-e", show_default=True)
@click.option("--restarts", type=int, default=1, show_default=True, help="Independent GA runs; best kept.")
@click.option("--target", type=float, default=None, help="Stop restarting once this cost is reached.")
@click.option("-o", "--out", type=click.Path(dir_okay=False), default=None, help="Write the JSON report here.")
@_ga_options
def partition_cmd(circuit_path, qpus, method, restarts, target, out, config_path, **ga_flags):
    """Partition a circuit file and report its e-bit cost."""
    circuit = _load_circuit(circuit_path)
    net = _network(qpus)
    cfg = _ga_config(config_path, **ga_flags)
    start = time.perf_counter()
    try:
        graph = build_graph(circuit, net, METHODS[method])
    except GraphError as exc:
        raise click.ClickException(str(exc)) from None
    if method == "static":
        report = static_baseline(graph, net, seed=cfg.seed)
    else:
        report = best_of(graph, net, cfg, restarts, target)
    wall_ms = (time.perf_counter() - start) * 1000
    if out:
        Path(out).write_text(report.to_json(indent=2))
    click.echo(
        f"method={method} ebits={report.total} two_qubit_gates={report.two_qubit_gates} "
        f"ratio={report.ratio:.4f} state_teleports={len(report.state_teleports)} "
        f"links={len(report.group_links)} wall_ms={wall_ms:.1f}"
    )


@main.command("sweep")
@click.argument("plan_path", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--out-dir", type=click.Path(file_okay=False), required=True)
@click.option("--jobs", type=int, default=None, help="Worker processes (default $GCPART_JOBS or 1).")
def sweep_cmd(plan_path, out_dir, jobs):
    """Run a benchmark plan and write results.csv, summary.csv and timing.csv."""
    try:
        plan = ExperimentPlan.load(plan_path)
    except ValueError as exc:
        raise click.ClickException(f"{plan_path}: {exc}") from None
    rows = run_sweep(plan, out_dir, jobs)
    failed = sum(1 for r in rows if r["error"])
    click.echo(format_summary(summarize(rows)))
    click.echo(f"{len(rows)} runs, {failed} failed -> {out_dir}")


@main.command("verify")
@click.option("--n-max", type=int, default=4, show_default=True)
@click.option("--d-max", type=int, default=3, show_default=True)
@click.option("--trials", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--qpus", default="2,2", show_default=True)
def verify_cmd(n_max, d_max, trials, seed, qpus):
    """Check cost-model invariants and solver bounds on random small instances."""
    if trials == 0:
        click.echo("warning: zero trials requested; passing vacuously", err=True)
    report = run_verify(n_max, d_max, trials, seed, net=_network(qpus))
    click.echo(report.summary())
    for line in report.failures[:20]:
        click.echo(line, err=True)
    sys.exit(0 if report.ok else 1)


@main.command("graph-dump")
@click.argument("circuit_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--qpus", required=True)
@click.option("--mode", type=click.Choice([m.value for m in Mode]), default="extended", show_default=True)
@click.option("-o", "--out", type=click.Path(dir_okay=False), default=None)
def graph_dump_cmd(circuit_path, qpus, mode, out):
    """Emit the interaction graph in DOT format."""
    circuit = _load_circuit(circuit_path)
    try:
        graph = build_graph(circuit, _network(qpus), mode)
    except GraphError as exc:
        raise click.ClickException(str(exc)) from None
    dot = graph.to_dot()
    if out:
        Path(out).write_text(dot)
    else:
        click.echo(dot, nl=False)


if __name__ == "__main__":
    main()
