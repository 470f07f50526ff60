"""
Integration tests over exhaustively enumerated terms and graphs.
Covers encode/decode uniqueness, pointer safety under every policy, the
skeleton/type agreement, rebuild identity, ETG injectivity and unfolding,
and checks enumeration against a generate-and-filter oracle.
"""

from collections import defaultdict
from itertools import product

import pytest

from src.fold import (Truncated, etg_injectivity_check, fold, rebuild_algebra, skeleton,
                      to_etg, unfold)
from src.graph import decode, encode, enumerate_graphs, graph_isomorphic
from src.shape import EMPTY_CONTEXT, Position
from src.signature import Direction, builtin_bintree
from src.term import (FunNode, PtrNode, TermTypeError, enumerate_terms, parse_term, print_term,
                      resolve_pointers, term_positions, type_check)

DIRECTIONS = list(Direction)


def closed_terms(sig, max_nodes, payloads=(0, 1)):
    return [term for term, _ in enumerate_terms(sig, EMPTY_CONTEXT, max_nodes, payloads)]


def accepts(term, sig):
    try:
        type_check(term, EMPTY_CONTEXT, sig)
    except TermTypeError:
        return False
    return True


def is_prefix(cut, full):
    """True when `cut` equals `full` except where it holds Truncated."""
    if isinstance(cut, Truncated):
        return True
    if isinstance(full, Truncated):
        return False
    return (cut.symbol, cut.payload, len(cut.children)) == \
        (full.symbol, full.payload, len(full.children)) and \
        all(is_prefix(a, b) for a, b in zip(cut.children, full.children))


# ========== Brute-force graph oracle ==========

def canonical_form(labels, successors, root=0):
    """DFS-relabelled form of a labelled graph, or None when not connected."""
    order = {root: 0}

    def visit(node):
        for target in successors[node]:
            if target not in order:
                order[target] = len(order)
                visit(target)

    visit(root)
    if len(order) != len(labels):
        return None
    ranked = sorted(order, key=order.get)
    return tuple((labels[node], tuple(order[t] for t in successors[node])) for node in ranked)


def brute_force_forms(sig, max_nodes, payloads):
    """Every connected rooted graph by generating all labelled graphs and filtering."""
    label_choices = [(spec.name, payload, spec.arity)
                     for spec in sig.symbol_specs
                     for payload in (payloads if spec.valued else (None,))]
    forms = set()
    for count in range(1, max_nodes + 1):
        for labelling in product(label_choices, repeat=count):
            slots = [product(range(count), repeat=arity) for _, _, arity in labelling]
            for successors in product(*slots):
                form = canonical_form([label[:2] for label in labelling], successors)
                if form is not None:
                    forms.add(form)
    return forms


def graph_form(graph):
    ids = {node_id: int(node_id) for node_id in graph.nodes}
    labels = {ids[n]: (node.symbol, node.payload) for n, node in graph.nodes.items()}
    successors = {ids[n]: [ids[s] for s in node.successors] for n, node in graph.nodes.items()}
    return canonical_form(labels, successors, ids[graph.root])


# ========== Raw-term oracle ==========

# Every pointer a closed term of at most 3 nodes could use, plus ones that
# must be rejected (a second level up, a path two steps deep).
RAW_POINTERS = [PtrNode(Position(steps), index)
                for index in (1, 2) for steps in ((), (1,), (2,), (1, 1))]


def raw_terms(size, inner):
    """Every bin/lf/ptr term with exactly `size` nodes, well-typed or not."""
    slots = [None] + RAW_POINTERS if inner else [None]
    if size == 1:
        yield from RAW_POINTERS
        for payload in (0, 1):
            for slot in slots:
                yield FunNode("lf", (), payload, slot)
    for left_size in range(1, size - 1):
        for left in raw_terms(left_size, inner):
            for right in raw_terms(size - 1 - left_size, inner):
                for slot in slots:
                    yield FunNode("bin", (left, right), None, slot)


class TestEnumerationOracle:
    """enumerate_terms against generate-and-filter over raw terms."""

    @pytest.mark.parametrize("direction", DIRECTIONS, ids=lambda d: d.value)
    @pytest.mark.parametrize("indirect, inner", [(False, False), (True, False),
                                                 (False, True), (True, True)])
    def test_up_to_three_nodes(self, signature_for, direction, indirect, inner):
        sig = signature_for(direction, indirect=indirect, inner=inner)
        expected = {term for size in (1, 2, 3) for term in raw_terms(size, inner)
                    if accepts(term, sig)}
        found = closed_terms(sig, 3)
        assert len(found) == len(set(found))
        assert set(found) == expected


class TestUniqueness:
    """Right-to-left terms and graphs correspond one to one."""

    @pytest.mark.slow
    def test_encode_decode_terms_up_to_seven_nodes(self, bintree):
        """Test encode(decode(t)) == t for every closed term."""
        for term in closed_terms(bintree, 7):
            assert encode(decode(term), bintree) == term, print_term(term)

    def test_graphs_up_to_three_nodes(self, bintree):
        for graph in enumerate_graphs(bintree, 3):
            term = encode(graph, bintree)
            type_check(term, EMPTY_CONTEXT, bintree)
            assert graph_isomorphic(decode(term), graph)

    @pytest.mark.slow
    def test_graphs_up_to_four_nodes(self, bintree):
        for graph in enumerate_graphs(bintree, 4):
            assert graph_isomorphic(decode(encode(graph, bintree)), graph)

    @pytest.mark.slow
    def test_graphs_up_to_five_nodes(self, bintree):
        for graph in enumerate_graphs(bintree, 5, payloads=(0,)):
            assert graph_isomorphic(decode(encode(graph, bintree)), graph)

    def test_graph_enumeration_matches_oracle(self, bintree):
        """Test enumerate_graphs against generate-and-filter on 3 nodes."""
        found = [graph_form(graph) for graph in enumerate_graphs(bintree, 3)]
        assert len(found) == len(set(found))
        assert set(found) == brute_force_forms(bintree, 3, (0, 1))

    @pytest.mark.slow
    def test_graph_enumeration_matches_oracle_four_nodes(self, bintree):
        found = [graph_form(graph) for graph in enumerate_graphs(bintree, 4, payloads=(0,))]
        assert len(found) == len(set(found))
        assert set(found) == brute_force_forms(bintree, 4, (0,))

    def test_ternary_signature(self, ternary):
        """Test the correspondence beyond binary trees."""
        for term in closed_terms(ternary, 5):
            assert encode(decode(term), ternary) == term
        for graph in enumerate_graphs(ternary, 3, payloads=(0,)):
            assert graph_isomorphic(decode(encode(graph, ternary)), graph)


class TestSafety:
    """Well-typed pointers always land inside the term."""

    @pytest.mark.slow
    @pytest.mark.parametrize("direction", DIRECTIONS, ids=lambda d: d.value)
    def test_up_to_seven_nodes(self, signature_for, direction):
        sig = signature_for(direction)
        for term in closed_terms(sig, 7):
            nodes = term_positions(term)
            for target in resolve_pointers(term, sig).values():
                assert isinstance(nodes[target], FunNode)

    @pytest.mark.parametrize("direction", DIRECTIONS, ids=lambda d: d.value)
    @pytest.mark.parametrize("indirect, inner", [(True, False), (False, True), (True, True)])
    def test_toggles_up_to_five_nodes(self, signature_for, direction, indirect, inner):
        """Test indirect and inner pointers resolve to nodes of the term."""
        sig = signature_for(direction, indirect=indirect, inner=inner)
        for term in closed_terms(sig, 5):
            nodes = term_positions(term)
            for target in resolve_pointers(term, sig).values():
                assert target in nodes


class TestFoldProperties:
    """Properties of the recursion engine over enumerated terms."""

    @pytest.mark.slow
    @pytest.mark.parametrize("direction", DIRECTIONS, ids=lambda d: d.value)
    def test_skeleton_is_type(self, signature_for, direction):
        """Test the computed skeleton equals the checked type."""
        sig = signature_for(direction)
        for term, shape in enumerate_terms(sig, EMPTY_CONTEXT, 7):
            assert skeleton(term, sig) == type_check(term, EMPTY_CONTEXT, sig) == shape

    @pytest.mark.parametrize("direction", DIRECTIONS, ids=lambda d: d.value)
    def test_rebuild_is_identity(self, signature_for, direction):
        sig = signature_for(direction, inner=True)
        for term in closed_terms(sig, 5):
            assert fold(term, EMPTY_CONTEXT, rebuild_algebra(), sig) == term

    @pytest.mark.parametrize("direction", DIRECTIONS, ids=lambda d: d.value)
    def test_etg_injective_up_to_six_nodes(self, signature_for, direction):
        sig = signature_for(direction)
        assert etg_injectivity_check(closed_terms(sig, 6), sig)

    def test_etg_of_indirect_terms(self, signature_for):
        """Test ETGs stay closed when pointers lead to pointers."""
        sig = signature_for(Direction.SYMMETRIC, indirect=True)
        for term in closed_terms(sig, 5):
            assert to_etg(term, sig).is_closed()

    def test_unfold_is_monotone_in_depth(self, bintree):
        for term in closed_terms(bintree, 5):
            cuts = [unfold(term, depth) for depth in range(5)]
            for shallow, deep in zip(cuts, cuts[1:]):
                assert is_prefix(shallow, deep)


class TestPolicyVariants:
    """Relations between the pointer policies."""

    def test_accepted_terms_grow_with_the_mask(self, signature_for):
        """Test right-to-left ⊆ symmetric ⊆ unrestricted, and left-to-right ⊆ symmetric."""
        symmetric = signature_for(Direction.SYMMETRIC)
        unrestricted = signature_for(Direction.UNRESTRICTED)
        for direction in (Direction.RIGHT_TO_LEFT, Direction.LEFT_TO_RIGHT):
            for term in closed_terms(signature_for(direction), 6):
                assert accepts(term, symmetric)
                assert accepts(term, unrestricted)

    @pytest.mark.parametrize("indirect, inner", [(False, False), (True, False), (False, True)])
    def test_symmetric_terms_check_unrestricted(self, signature_for, indirect, inner):
        unrestricted = signature_for(Direction.UNRESTRICTED, indirect=indirect, inner=inner)
        for term in closed_terms(signature_for(Direction.SYMMETRIC, indirect, inner), 6):
            assert accepts(term, unrestricted), print_term(term)

    def test_symmetric_terms_are_not_unique(self, signature_for):
        """Test two distinct symmetric terms can denote the same graph."""
        rtl = builtin_bintree()
        sig = signature_for(Direction.SYMMETRIC)
        groups = defaultdict(list)
        for term in closed_terms(sig, 6):
            groups[encode(decode(term), rtl)].append(term)
        witnesses = [terms for terms in groups.values() if len(terms) > 1]
        assert witnesses
        first, second = witnesses[0][:2]
        assert first != second
        assert graph_isomorphic(decode(first), decode(second))

    def test_known_symmetric_witness(self, signature_for):
        """Test both leaves-shared readings of one graph."""
        sig = signature_for(Direction.SYMMETRIC)
        left = parse_term("bin(lf(0),ptr(1,1))", sig)
        right = parse_term("bin(ptr(1,2),lf(0))", sig)
        type_check(left, EMPTY_CONTEXT, sig)
        type_check(right, EMPTY_CONTEXT, sig)
        assert left != right
        assert graph_isomorphic(decode(left), decode(right))
