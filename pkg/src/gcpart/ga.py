"""Genetic search over per-layer assignments.

Candidates are ``(depth, n_phys)`` label matrices. Every operator moves whole
rows (crossover) or swaps two slots' labels inside a layer range (mutation),
so per-layer QPU occupancy never changes and every candidate stays valid.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from .generators import make_rng
from .graph import InteractionGraph, Mode
from .model import EbitReport, cost, extract_schedule
from .network import QpuNetwork


@dataclass(frozen=True)
class GaConfig:
    population: int = 50
    generations: int = 300
    mutation_pairs: int = 10
    # None: a fresh interval length in 1..depth is drawn for every proposal
    mutation_interval: int | None = None
    elitism: int = 1
    temperature: float | None = None
    raw_softmax: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if self.population < 2 or self.population % 2:
            raise ValueError(f"population must be even and >= 2, got {self.population}")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if not 0 <= self.elitism < self.population:
            raise ValueError("elitism must lie in [0, population)")
        if self.mutation_pairs < 0:
            raise ValueError("mutation_pairs must be >= 0")
        if self.mutation_interval is not None and self.mutation_interval < 1:
            raise ValueError("mutation_interval must be >= 1")
        if self.temperature is not None and self.temperature <= 0:
            raise ValueError("temperature must be positive")

    def replace(self, **changes: Any) -> "GaConfig":
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            lines.append(f"{f.name} = {'none' if value is None else value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "GaConfig":
        known = {f.name: f for f in dataclasses.fields(cls)}
        kwargs: dict[str, Any] = {}
        for key, raw in values.items():
            key = key.replace("-", "_")
            if key not in known:
                raise ValueError(f"unknown GA option {key!r}")
            if isinstance(raw, str):
                raw = raw.strip()
                if raw.lower() == "none":
                    raw = None
                elif key == "raw_softmax":
                    raw = raw.lower() in ("1", "true", "yes")
                elif key == "temperature":
                    raw = float(raw)
                else:
                    raw = int(raw)
            kwargs[key] = raw
        return cls(**kwargs)

    @classmethod
    def from_text(cls, text: str) -> "GaConfig":
        values = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            values[key.strip()] = value
        return cls.from_mapping(values)


# -- static initialiser ------------------------------------------------------

def random_row(net: QpuNetwork, rng: np.random.Generator) -> np.ndarray:
    return rng.permutation(net.default_row())


def static_cut(row: np.ndarray, static_w: np.ndarray, w: np.ndarray) -> float:
    return float((static_w * w[row[:, None], row[None, :]]).sum() / 2)


def static_descent(row: np.ndarray, static_w: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Best-improvement pair swaps on the static interaction graph until none helps."""
    row = row.copy()
    n = len(row)
    if n < 2 or not static_w.any():
        return row
    # place_cost[i, q]: cut weight of slot i if it sat on QPU q
    place_cost = static_w @ w[:, row].T
    idx = np.arange(n)
    while True:
        here = place_cost[idx, row]
        there = place_cost[:, row]  # [i, j] -> cost of i placed on j's QPU
        delta = there + there.T - here[:, None] - here[None, :] + 2 * static_w * w[row[:, None], row[None, :]]
        i, j = np.unravel_index(np.argmin(delta), delta.shape)
        if delta[i, j] >= -1e-12:
            return row
        qi, qj = row[i], row[j]
        row[i], row[j] = qj, qi
        place_cost += np.outer(static_w[:, i], w[:, qj] - w[:, qi])
        place_cost += np.outer(static_w[:, j], w[:, qi] - w[:, qj])


def initialize_population(
    graph: InteractionGraph, net: QpuNetwork, cfg: GaConfig, rng: np.random.Generator
) -> np.ndarray:
    """Random static rows, each descended to a local min-cut, repeated over all layers."""
    static_w = graph.static_weights()
    w = net.weights
    rows = [static_descent(random_row(net, rng), static_w, w) for _ in range(cfg.population)]
    return np.repeat(np.stack(rows)[:, None, :], graph.depth, axis=1)


# -- selection and crossover ------------------------------------------------

def selection_probs(costs: np.ndarray, cfg: GaConfig) -> np.ndarray:
    costs = np.asarray(costs, dtype=float)
    if cfg.raw_softmax:
        logits = costs.copy()
    else:
        spread = costs.std()
        if cfg.temperature is not None:
            logits = -(costs - costs.mean()) / cfg.temperature
        elif spread > 0:
            logits = -(costs - costs.mean()) / spread
        else:
            logits = np.zeros_like(costs)
    logits -= logits.max()
    p = np.exp(logits)
    return p / p.sum()


def select_parents(
    population: np.ndarray, costs: np.ndarray, cfg: GaConfig, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    ia, ib = rng.choice(len(population), size=2, p=selection_probs(costs, cfg))
    return population[ia], population[ib]


def crossover(
    a: np.ndarray, b: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Single-point crossover on rows; the cut point lies strictly inside."""
    if a.shape != b.shape:
        raise ValueError("parents differ in shape")
    d = a.shape[0]
    if d < 2:
        return a.copy(), b.copy()
    rho = int(rng.integers(1, d))
    return np.concatenate([a[:rho], b[rho:]]), np.concatenate([b[:rho], a[rho:]])


def _crossover_batch(pa: np.ndarray, pb: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n, d = pa.shape[:2]
    if d < 2:
        return np.concatenate([pa, pb])
    rho = rng.integers(1, d, size=n)
    head = (np.arange(d)[None, :] < rho[:, None])[:, :, None]
    return np.concatenate([np.where(head, pa, pb), np.where(head, pb, pa)])


# -- mutation --------------------------------------------------------------

def _interval_lengths(cfg: GaConfig, d: int, size: int, rng: np.random.Generator) -> np.ndarray:
    if cfg.mutation_interval is None:
        return rng.integers(1, d + 1, size=size)
    return np.full(size, min(cfg.mutation_interval, d))


def _propose(
    pop: np.ndarray, cfg: GaConfig, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Draw one (interval, slot pair) per candidate; ``ok`` is False when no pair exists."""
    n, d, slots = pop.shape
    length = _interval_lengths(cfg, d, n, rng)
    l0 = rng.integers(0, d - length + 1)
    sa = rng.integers(0, slots, size=n)
    rows = np.arange(n)
    label_a = pop[rows, l0, sa]
    other = pop[rows, l0, :] != label_a[:, None]
    keys = np.where(other, rng.random((n, slots)), -1.0)
    sb = keys.argmax(axis=1)
    return l0, l0 + length, sa, sb, other.any(axis=1)


def _apply_swap(pop: np.ndarray, l0, l1, sa, sb) -> np.ndarray:
    n, d, _ = pop.shape
    rows = np.arange(n)[:, None]
    layers = np.arange(d)[None, :]
    inside = (layers >= l0[:, None]) & (layers < l1[:, None])
    out = pop.copy()
    col_a = pop[rows, layers, sa[:, None]]
    col_b = pop[rows, layers, sb[:, None]]
    out[rows, layers, sa[:, None]] = np.where(inside, col_b, col_a)
    out[rows, layers, sb[:, None]] = np.where(inside, col_a, col_b)
    return out


def mutate_population(
    pop: np.ndarray,
    costs: np.ndarray,
    graph: InteractionGraph,
    net: QpuNetwork,
    cfg: GaConfig,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Apply ``mutation_pairs`` swap proposals to every candidate, keeping strict improvements."""
    if graph.depth == 0 or pop.shape[2] < 2:
        return pop, costs
    for _ in range(cfg.mutation_pairs):
        l0, l1, sa, sb, ok = _propose(pop, cfg, rng)
        trial = _apply_swap(pop, l0, l1, sa, sb)
        trial_costs = cost(graph, trial, net)
        better = ok & (trial_costs < costs)
        pop = np.where(better[:, None, None], trial, pop)
        costs = np.where(better, trial_costs, costs)
    return pop, costs


def _lead_groups(graph: InteractionGraph) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for gi, grp in enumerate(graph.groups):
        out.setdefault(grp.lead, []).append(gi)
    return out


def _links_cost(graph: InteractionGraph, a: np.ndarray, w: np.ndarray, group_ids) -> float:
    total = 0.0
    for gi in group_ids:
        grp = graph.groups[gi]
        lead = grp.lead
        prev = None
        remote: set[int] = set()
        ctrl = -1
        for _, layer, partner in grp.members:
            if prev is None or np.any(a[prev + 1 : layer + 1, lead] != a[prev:layer, lead]):
                total += sum(w[ctrl, q] for q in remote)
                ctrl, remote = int(a[layer, lead]), set()
            if a[layer, partner] != ctrl:
                remote.add(int(a[layer, partner]))
            prev = layer
        total += sum(w[ctrl, q] for q in remote)
    return total


def swap_gain(
    graph: InteractionGraph,
    a: np.ndarray,
    net: QpuNetwork,
    slot_a: int,
    slot_b: int,
    l0: int,
    l1: int,
) -> float:
    """Cost reduction from swapping two slots' labels over layers ``[l0, l1)``.

    Only edges incident to the moved nodes are inspected: the boundary state
    edges (every state edge in the interval when a logical slot trades with a
    padding slot) and the gate edges in the interval (or, in extended mode, the
    groups those edges belong to plus groups led by either slot).
    """
    w = net.weights
    sw = graph.state_weight
    b = a.copy()
    b[l0:l1, [slot_a, slot_b]] = a[l0:l1, [slot_b, slot_a]]

    def local(m: np.ndarray) -> float:
        c = 0.0
        for s in (slot_a, slot_b):
            for lo in state_layers:
                c += sw[s] * w[m[lo, s], m[lo + 1, s]]
        if graph.mode is Mode.SIMPLE:
            for k in touched:
                layer = graph.gate_layer[k]
                c += w[m[layer, graph.gate_a[k]], m[layer, graph.gate_b[k]]]
        else:
            c += _links_cost(graph, m, w, groups)
        return c

    # interior state edges only cancel out when both slots carry the same weight
    if sw[slot_a] == sw[slot_b]:
        state_layers = [lo for lo in (l0 - 1, l1 - 1) if 0 <= lo < graph.depth - 1]
    else:
        state_layers = range(max(l0 - 1, 0), min(l1, graph.depth - 1))
    touched = set(graph.gate_at[l0:l1, [slot_a, slot_b]].ravel().tolist()) - {-1}
    groups: set[int] = set()
    if graph.mode is Mode.EXTENDED:
        groups = {int(graph.gate_group[k]) for k in touched}
        led = _lead_groups(graph)
        for s in (slot_a, slot_b):
            for gi in led.get(s, ()):
                first, last = graph.groups[gi].span
                if first < l1 and last >= l0 - 1:
                    groups.add(gi)
    return local(a) - local(b)


def mutate(
    a: np.ndarray,
    graph: InteractionGraph,
    net: QpuNetwork,
    cfg: GaConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Kernighan-Lin style mutation of one candidate using local gains."""
    a = a.copy()
    d, slots = a.shape
    if d == 0 or slots < 2:
        return a
    for _ in range(cfg.mutation_pairs):
        l0, l1, sa, sb, ok = _propose(a[None], cfg, rng)
        if not ok[0]:
            continue
        l0, l1, sa, sb = int(l0[0]), int(l1[0]), int(sa[0]), int(sb[0])
        if swap_gain(graph, a, net, sa, sb, l0, l1) > 0:
            a[l0:l1, [sa, sb]] = a[l0:l1, [sb, sa]]
    return a


# -- driver ----------------------------------------------------------------

@dataclass
class GaResult:
    population: np.ndarray
    costs: np.ndarray
    best_history: list[float]
    report: EbitReport
    config: GaConfig = field(repr=False)

    @property
    def best(self) -> np.ndarray:
        return self.population[0]

    @property
    def best_cost(self) -> float:
        return self.report.total


def run_ga(
    graph: InteractionGraph,
    net: QpuNetwork,
    cfg: GaConfig | None = None,
    trace: Callable[[int, np.ndarray, np.ndarray], None] | None = None,
) -> GaResult:
    """Evolve assignments for ``cfg.generations`` generations.

    ``trace(generation, population, costs)`` is called once per generation,
    including the initial one, and may inspect but must not modify its arguments.
    """
    cfg = cfg or GaConfig()
    rng = make_rng(cfg.seed)
    pop = initialize_population(graph, net, cfg, rng)
    costs = cost(graph, pop, net)
    history = [costs.min().item()]
    if trace:
        trace(0, pop, costs)
    n_children = cfg.population - cfg.elitism
    n_pairs = math.ceil(n_children / 2)
    for gen in range(1, cfg.generations):
        order = np.argsort(costs, kind="stable")
        probs = selection_probs(costs, cfg)
        ia = rng.choice(len(pop), size=n_pairs, p=probs)
        ib = rng.choice(len(pop), size=n_pairs, p=probs)
        children = _crossover_batch(pop[ia], pop[ib], rng)[:n_children]
        child_costs = cost(graph, children, net)
        children, child_costs = mutate_population(children, child_costs, graph, net, cfg, rng)
        elite = order[: cfg.elitism]
        pop = np.concatenate([pop[elite], children])
        costs = np.concatenate([costs[elite], child_costs])
        history.append(costs.min().item())
        if trace:
            trace(gen, pop, costs)
    order = np.argsort(costs, kind="stable")
    pop, costs = pop[order], costs[order]
    return GaResult(pop, costs, history, extract_schedule(graph, pop[0], net), cfg)


def static_baseline(
    graph: InteractionGraph, net: QpuNetwork, seed: int = 0, restarts: int = 10
) -> EbitReport:
    """Best of ``restarts`` greedy static min-cut rows, costed in the graph's mode."""
    rng = make_rng(seed)
    static_w = graph.static_weights()
    w = net.weights
    rows = [static_descent(random_row(net, rng), static_w, w) for _ in range(restarts)]
    cuts = [static_cut(r, static_w, w) for r in rows]
    best = rows[int(np.argmin(cuts))]
    return extract_schedule(graph, np.repeat(best[None, :], graph.depth, axis=0), net)
