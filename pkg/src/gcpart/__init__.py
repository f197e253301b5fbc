"""Partition quantum circuits across networked QPUs with state and gate teleportation."""
from .circuit import CP, HADAMARD, U, Circuit, CircuitError, Diagonality, Gate, classify_single_qubit, layer_circuit, parse_circuit, serialize_circuit
from .ga import GaConfig, GaResult, crossover, initialize_population, mutate, run_ga, select_parents, static_baseline
from .generators import gen_cp_fraction, gen_qaoa_maxcut, gen_qft, gen_quantum_volume, generate
from .graph import GateGroup, GraphError, InteractionGraph, Mode, build_graph, group_gates
from .model import (
    AssignmentError,
    EbitReport,
    brute_force_optimum,
    cost,
    cost_extended,
    cost_simple,
    extract_schedule,
    group_external_degree,
    validate_assignment,
)
from .network import QpuNetwork

__version__ = "0.1.0"
