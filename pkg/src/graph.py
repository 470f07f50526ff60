"""
Graph Module
Rooted, edge-ordered, symbol-labelled directed graphs and their
conversion to and from cyclic sharing terms.

encode walks the graph depth-first in successor order. The first visit of
a node becomes a function node; any other edge becomes a pointer that
climbs to the nearest ancestor whose subtree holds the target and descends
from there. Under right-to-left pointers this term is the only one
representing the graph.

Graph file format (JSON):

    {"root": "x",
     "nodes": [{"id": "x", "symbol": "bin", "children": ["y", "u"]},
               {"id": "u", "symbol": "lf", "value": 6, "children": []}, ...]}
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .config import ENUM_PAYLOADS
from .shape import EPSILON, Position
from .signature import Direction, Signature, SymbolSpec
from .term import FunNode, PtrNode, Term, resolve_pointers, term_positions


class GraphErrorKind(Enum):
    UNDECLARED_SYMBOL = "UndeclaredSymbol"
    ARITY_MISMATCH = "ArityMismatch"
    PAYLOAD_MISMATCH = "PayloadMismatch"
    UNKNOWN_NODE = "UnknownNode"
    UNREACHABLE = "Unreachable"
    INNER_POINTER = "InnerPointer"
    BLACK_HOLE = "BlackHole"
    UNSUPPORTED_POLICY = "UnsupportedPolicy"
    FORMAT = "Format"


class GraphError(ValueError):
    """Invalid graph, or a term that has no graph reading."""

    def __init__(self, kind: GraphErrorKind, message: str, node: Optional[str] = None):
        super().__init__(f"{kind.value}: {message}")
        self.kind = kind
        self.node = node


@dataclass(frozen=True)
class GraphNode:
    symbol: str
    payload: Optional[int] = None
    successors: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "successors", tuple(self.successors))


@dataclass(frozen=True)
class RootedGraph:
    """Nodes keyed by id; successor order is significant."""

    root: str
    nodes: Dict[str, GraphNode] = field(default_factory=dict)


@dataclass
class EdgeClassification:
    """Edges `(source, slot, target)` split by the depth-first traversal."""

    tree: List[Tuple[str, int, str]] = field(default_factory=list)
    back: List[Tuple[str, int, str]] = field(default_factory=list)
    cross: List[Tuple[str, int, str]] = field(default_factory=list)


def validate_graph(graph: RootedGraph, sig: Signature):
    """
    Check arities, payloads, successor ids and reachability.

    Raises:
        GraphError: describing the first violation found
    """
    if graph.root not in graph.nodes:
        raise GraphError(GraphErrorKind.UNKNOWN_NODE, f"root {graph.root!r} is not a node",
                         graph.root)
    for node_id, node in graph.nodes.items():
        spec = sig.get(node.symbol)
        if spec is None:
            raise GraphError(GraphErrorKind.UNDECLARED_SYMBOL,
                             f"node {node_id!r} uses undeclared symbol {node.symbol!r}", node_id)
        if len(node.successors) != spec.arity:
            raise GraphError(GraphErrorKind.ARITY_MISMATCH,
                             f"node {node_id!r}: {node.symbol} expects {spec.arity} "
                             f"successors, got {len(node.successors)}", node_id)
        if spec.valued != (node.payload is not None):
            raise GraphError(GraphErrorKind.PAYLOAD_MISMATCH,
                             f"node {node_id!r}: payload does not match {node.symbol}", node_id)
        for successor in node.successors:
            if successor not in graph.nodes:
                raise GraphError(GraphErrorKind.UNKNOWN_NODE,
                                 f"node {node_id!r} points to unknown node {successor!r}", node_id)
    reached = _discovery_order(graph)
    for node_id in graph.nodes:
        if node_id not in reached:
            raise GraphError(GraphErrorKind.UNREACHABLE,
                             f"node {node_id!r} is not reachable from the root", node_id)


def _depth_first(graph: RootedGraph) -> Tuple[Dict[str, Position], List[Tuple[str, int, str, bool]]]:
    """
    Depth-first traversal from the root with an explicit stack.

    Returns:
        The tree position of every reached node in discovery order, and
        every edge as (source, slot, target, is_tree_edge) in traversal order
    """
    found: Dict[str, Position] = {graph.root: EPSILON}
    edges: List[Tuple[str, int, str, bool]] = []
    stack = [(graph.root, iter(enumerate(graph.nodes[graph.root].successors, start=1)))]
    while stack:
        node_id, pending = stack[-1]
        step = next(pending, None)
        if step is None:
            stack.pop()
            continue
        slot, successor = step
        if successor in found:
            edges.append((node_id, slot, successor, False))
            continue
        found[successor] = found[node_id].child(slot)
        edges.append((node_id, slot, successor, True))
        stack.append((successor, iter(enumerate(graph.nodes[successor].successors, start=1))))
    return found, edges


def _discovery_order(graph: RootedGraph) -> Dict[str, Position]:
    """Tree position of every node reached by the depth-first traversal."""
    return _depth_first(graph)[0]


def classify_edges(graph: RootedGraph) -> EdgeClassification:
    """
    Split edges into tree edges (first visits), back edges (to an ancestor
    or the node itself) and cross edges (to a finished node on the left).
    """
    edges = EdgeClassification()
    found, walked = _depth_first(graph)
    for source, slot, target, is_tree in walked:
        if is_tree:
            edges.tree.append((source, slot, target))
        elif found[target].is_prefix_of(found[source]):
            edges.back.append((source, slot, target))
        else:
            edges.cross.append((source, slot, target))
    return edges


def encode(graph: RootedGraph, sig: Signature) -> Term:
    """
    The cyclic sharing term of a graph under right-to-left pointers.

    Args:
        graph: connected rooted graph over the signature
        sig: signature whose symbols all use right-to-left pointers

    Returns:
        A closed term that type-checks and decodes back to the graph

    Raises:
        GraphError: invalid graph or a non right-to-left policy
    """
    validate_graph(graph, sig)
    for node in graph.nodes.values():
        if sig.policy(node.symbol).direction is not Direction.RIGHT_TO_LEFT:
            raise GraphError(GraphErrorKind.UNSUPPORTED_POLICY,
                             f"{node.symbol} does not use right-to-left pointers")
    found, walked = _depth_first(graph)
    tree_slots = {(source, slot) for source, slot, _, is_tree in walked if is_tree}
    built: Dict[str, Term] = {}
    # reverse discovery order finishes every child before its parent
    for node_id in reversed(list(found)):
        node = graph.nodes[node_id]
        path = found[node_id]
        children: List[Term] = []
        for slot, successor in enumerate(node.successors, start=1):
            if (node_id, slot) in tree_slots:
                children.append(built.pop(successor))
                continue
            here = path.child(slot)
            target = found[successor]
            anchor = here.common_prefix(target)
            children.append(PtrNode(target.suffix_after(anchor), len(here) - len(anchor)))
        built[node_id] = FunNode(node.symbol, tuple(children), node.payload)
    return built[graph.root]


def successor_table(term: Term) -> Dict[Position, Tuple[str, Optional[int], Tuple[Position, ...]]]:
    """
    Graph reading of a term: each function-node position maps to its
    symbol, payload and successor positions, with pointers replaced by the
    function node they lead to. Inner pointer slots are not edges.

    Raises:
        GraphError: BlackHole when pointers only lead to pointers
        TermTypeError: when a pointer escapes the term
    """
    nodes = term_positions(term)
    targets = resolve_pointers(term)

    def landing(path: Position) -> Position:
        seen = set()
        while isinstance(nodes[path], PtrNode):
            if path in seen:
                raise GraphError(GraphErrorKind.BLACK_HOLE,
                                 f"pointer at {path} never reaches a function node", str(path))
            seen.add(path)
            path = targets[path]
        return path

    table = {}
    for path, node in nodes.items():
        if isinstance(node, FunNode):
            successors = tuple(landing(path.child(slot))
                               for slot in range(1, len(node.children) + 1))
            table[path] = (node.symbol, node.payload, successors)
    return table


def decode(term: Term) -> RootedGraph:
    """
    Graph represented by a closed well-typed term; node ids are the
    positions of its function nodes.

    Reads structure only, so no signature is taken; checking the term
    against one (type_check) is the caller's job.

    Raises:
        GraphError: InnerPointer for terms using inner pointer slots,
            BlackHole for pointer-only cycles, UnknownNode for a bare pointer
    """
    if isinstance(term, PtrNode):
        raise GraphError(GraphErrorKind.UNKNOWN_NODE, "a bare pointer has no graph")
    for path, node in term_positions(term).items():
        if isinstance(node, FunNode) and node.inner is not None:
            raise GraphError(GraphErrorKind.INNER_POINTER,
                             f"node at {path} carries an inner pointer", str(path))
    nodes = {
        str(path): GraphNode(symbol, payload, tuple(str(target) for target in successors))
        for path, (symbol, payload, successors) in successor_table(term).items()
    }
    return RootedGraph(str(EPSILON), nodes)


def graph_isomorphic(first: RootedGraph, second: RootedGraph) -> bool:
    """
    Rooted edge-ordered isomorphism by a simultaneous depth-first walk.

    Edge order fixes the only possible correspondence, so this is linear.
    """
    forward: Dict[str, str] = {first.root: second.root}
    backward: Dict[str, str] = {second.root: first.root}
    stack = [(first.root, second.root)]
    while stack:
        left_id, right_id = stack.pop()
        left = first.nodes.get(left_id)
        right = second.nodes.get(right_id)
        if left is None or right is None:
            return False
        if (left.symbol, left.payload, len(left.successors)) != \
                (right.symbol, right.payload, len(right.successors)):
            return False
        for left_next, right_next in zip(left.successors, right.successors):
            if left_next in forward or right_next in backward:
                if forward.get(left_next) != right_next or backward.get(right_next) != left_next:
                    return False
                continue
            forward[left_next] = right_next
            backward[right_next] = left_next
            stack.append((left_next, right_next))
    return len(forward) == len(first.nodes) and len(backward) == len(second.nodes)


# ========== Files ==========

def load_graph(text: str) -> RootedGraph:
    """
    Read a graph file.

    Raises:
        GraphError: FORMAT for malformed documents or duplicate ids
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(GraphErrorKind.FORMAT, f"not valid JSON ({exc.msg})") from exc
    if not isinstance(document, dict) or "root" not in document \
            or not isinstance(document.get("nodes"), list):
        raise GraphError(GraphErrorKind.FORMAT, "expected an object with 'root' and 'nodes'")
    nodes: Dict[str, GraphNode] = {}
    for entry in document["nodes"]:
        if not isinstance(entry, dict) or "id" not in entry or "symbol" not in entry:
            raise GraphError(GraphErrorKind.FORMAT, f"node entry needs 'id' and 'symbol': {entry!r}")
        node_id = str(entry["id"])
        if node_id in nodes:
            raise GraphError(GraphErrorKind.FORMAT, f"duplicate node id {node_id!r}", node_id)
        value = entry.get("value")
        if value is not None and (isinstance(value, bool) or not isinstance(value, int)):
            raise GraphError(GraphErrorKind.FORMAT, f"value of {node_id!r} must be an integer",
                             node_id)
        children = entry.get("children", [])
        if not isinstance(children, list):
            raise GraphError(GraphErrorKind.FORMAT, f"children of {node_id!r} must be a list",
                             node_id)
        nodes[node_id] = GraphNode(str(entry["symbol"]), value,
                                   tuple(str(child) for child in children))
    return RootedGraph(str(document["root"]), nodes)


def dump_graph(graph: RootedGraph) -> str:
    """Render a graph in the graph file format."""
    entries = []
    for node_id, node in graph.nodes.items():
        entry = {"id": node_id, "symbol": node.symbol}
        if node.payload is not None:
            entry["value"] = node.payload
        entry["children"] = list(node.successors)
        entries.append(entry)
    return json.dumps({"root": graph.root, "nodes": entries}, indent=2, ensure_ascii=False) + "\n"


def _node_label(node: GraphNode) -> str:
    return node.symbol if node.payload is None else f"{node.symbol}({node.payload})"


def to_dot(graph: RootedGraph) -> str:
    """DOT text: solid tree edges, dashed back and cross edges."""
    edges = classify_edges(graph)
    tree = set(edges.tree)
    lines = ["digraph G {"]
    for node_id, node in graph.nodes.items():
        lines.append(f'  "{node_id}" [label="{_node_label(node)}"];')
    for node_id, node in graph.nodes.items():
        for slot, successor in enumerate(node.successors, start=1):
            style = "solid" if (node_id, slot, successor) in tree else "dashed"
            lines.append(f'  "{node_id}" -> "{successor}" [style={style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ========== Enumeration ==========

def enumerate_graphs(sig: Signature, max_nodes: int,
                     payloads: Sequence[int] = ENUM_PAYLOADS) -> Iterator[RootedGraph]:
    """
    Every connected rooted edge-ordered graph with at most `max_nodes`
    nodes, one per isomorphism class.

    Nodes are numbered in depth-first discovery order while the graph is
    grown slot by slot, so no class is produced twice.
    """
    labels: List[Tuple[SymbolSpec, Optional[int]]] = [
        (spec, payload)
        for spec in sig.symbol_specs
        for payload in (payloads if spec.valued else (None,))
    ]
    labelled: List[Tuple[SymbolSpec, Optional[int]]] = []
    successors: List[List[int]] = []

    def snapshot() -> RootedGraph:
        return RootedGraph("0", {
            str(index): GraphNode(spec.name, payload, tuple(str(s) for s in successors[index]))
            for index, (spec, payload) in enumerate(labelled)
        })

    def grow(stack: Tuple[int, ...]) -> Iterator[RootedGraph]:
        while stack and len(successors[stack[-1]]) == labelled[stack[-1]][0].arity:
            stack = stack[:-1]
        if not stack:
            yield snapshot()
            return
        current = stack[-1]
        for target in range(len(labelled)):
            successors[current].append(target)
            yield from grow(stack)
            successors[current].pop()
        if len(labelled) < max_nodes:
            for label in labels:
                labelled.append(label)
                successors.append([])
                successors[current].append(len(labelled) - 1)
                yield from grow(stack + (len(labelled) - 1,))
                successors[current].pop()
                successors.pop()
                labelled.pop()

    for label in labels:
        labelled.append(label)
        successors.append([])
        yield from grow((0,))
        successors.pop()
        labelled.pop()
