import pytest

from conftest import GENERAL
from gcpart.circuit import CP, HADAMARD, U, layer_circuit
from gcpart.generators import gen_cp_fraction, gen_qaoa_maxcut, gen_qft, gen_quantum_volume
from gcpart.graph import GraphError, Mode, build_graph, group_gates
from gcpart.network import QpuNetwork
from gcpart.reference import audit_groups


def test_two_qubit_two_layer_graph():
    c = layer_circuit([(CP(0.5), (0, 1)), (HADAMARD, (0,))], 2)
    g = build_graph(c, QpuNetwork((1, 1)), Mode.SIMPLE)
    assert (g.n_phys, g.depth, g.n_state_edges, g.n_gate_edges) == (2, 2, 2, 1)


def test_qft8_graph_shape():
    g = build_graph(gen_qft(8), QpuNetwork((4, 5)), Mode.EXTENDED)
    assert g.n_phys == 9 and g.depth == 15
    assert g.n_state_edges == 9 * 14
    assert g.n_gate_edges == 28
    assert list(g.state_weight) == [1] * 8 + [0]


def test_empty_circuit_graph():
    g = build_graph(layer_circuit([], 3), QpuNetwork((2, 2)))
    assert g.n_state_edges == 0 and g.n_gate_edges == 0 and g.groups == ()


def test_circuit_wider_than_network():
    with pytest.raises(GraphError):
        build_graph(gen_qft(5), QpuNetwork((2, 2)))


def test_uninterrupted_chain_is_one_group():
    c = layer_circuit([(CP(0.1), (0, 1)), (CP(0.2), (0, 2)), (CP(0.3), (0, 3))], 4)
    groups = group_gates(c)
    assert len(groups) == 1 and len(groups[0]) == 3 and groups[0].lead == 0
    assert groups[0].original_control == (0, 0)


def test_general_gate_splits_chain(split_chain_circuit):
    groups = group_gates(split_chain_circuit)
    assert sorted(len(g) for g in groups) == [2, 3]
    assert all(g.lead == 0 for g in groups)


@pytest.mark.parametrize("between", [U(0.3, 0.0, 0.9), U(0.3, 3.141592653589793, 0.9)])
def test_diagonal_and_antidiagonal_gates_keep_chain(between):
    c = layer_circuit([(CP(0.1), (0, 1)), (between, (0,)), (CP(0.2), (0, 2))], 3)
    assert [len(g) for g in group_gates(c)] == [2]


def test_partner_side_gates_do_not_break_group():
    c = layer_circuit([(CP(0.1), (0, 1)), (GENERAL, (1,)), (CP(0.2), (0, 1))], 2)
    assert [len(g) for g in group_gates(c)] == [2]


def test_largest_group_wins_shared_gate():
    # q1 has a run of three CPs; the q0-q1 gate must go to it, not to q0's run of two
    c = layer_circuit(
        [(CP(0.1), (0, 1)), (CP(0.1), (0, 4)), (CP(0.1), (1, 2)), (CP(0.1), (1, 3))], 5
    )
    groups = group_gates(c)
    by_lead = {g.lead: len(g) for g in groups}
    assert by_lead[1] == 3 and by_lead[0] == 1


def test_ties_go_to_lower_qubit():
    c = layer_circuit([(CP(0.1), (2, 5))], 6)
    assert group_gates(c)[0].lead == 2


CIRCUITS = [
    gen_qft(7),
    gen_quantum_volume(6, seed=1),
    gen_qaoa_maxcut(9, 0.5, 2, seed=2),
    gen_cp_fraction(10, 10, 0.7, seed=3),
    gen_cp_fraction(9, 12, 0.9, seed=4),
]


@pytest.mark.parametrize("circuit", CIRCUITS)
def test_groups_partition_edges_and_pass_audit(circuit):
    groups = group_gates(circuit)
    assert sum(len(g) for g in groups) == circuit.n_two_qubit
    assert audit_groups(circuit, groups) == []


def test_audit_catches_illegal_group():
    c = layer_circuit([(CP(0.1), (0, 1)), (GENERAL, (0,)), (CP(0.2), (0, 2))], 3)
    from gcpart.graph import GateGroup

    bad = [GateGroup(0, ((0, 0, 1), (1, 2, 2)))]
    assert any("general gate" in p for p in audit_groups(c, bad))


@pytest.mark.parametrize("circuit", CIRCUITS)
def test_simple_mode_is_extended_with_singletons(circuit):
    net = QpuNetwork((8, 8))
    simple = build_graph(circuit, net, Mode.SIMPLE)
    ext = build_graph(circuit, net, Mode.EXTENDED)
    assert all(len(g) == 1 for g in simple.groups)

    def edges(graph):
        return sorted((layer, *sorted((grp.lead, partner))) for grp in graph.groups for _, layer, partner in grp.members)

    assert edges(simple) == edges(ext)


def test_doubling_the_circuit_doubles_gate_edges():
    c = gen_cp_fraction(8, 8, 0.6, seed=5)
    twice = layer_circuit(list(c.gates) + list(c.gates), c.n_q)
    net = QpuNetwork((4, 4))
    g1, g2 = build_graph(c, net), build_graph(twice, net)
    assert g2.n_gate_edges == 2 * g1.n_gate_edges
    assert g2.n_state_edges == net.n_phys * (twice.depth - 1)


def test_dot_dump_labels_and_colours():
    dot = build_graph(gen_qft(4), QpuNetwork((2, 2)), Mode.EXTENDED).to_dot()
    assert '"q0@l0"' in dot and "color=red" in dot
    simple = build_graph(gen_qft(4), QpuNetwork((2, 2)), Mode.SIMPLE).to_dot()
    assert "color=red" not in simple
