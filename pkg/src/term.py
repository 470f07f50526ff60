"""
Term Module
Cyclic sharing terms in de Bruijn form, their parser and printer, and the
type checker for every pointer policy.

A pointer `ptr(i, p)` goes up i function nodes and then down along p.
Checking runs in two phases: the skeleton (shape) of every subterm is
computed first, then pointers are validated against the contexts the
signature's policies prescribe. The skeleton comes first because symmetric
and unrestricted contexts mention sibling shapes.
"""

from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

from .config import ENUM_PAYLOADS
from .shape import (EPSILON, PTR, Context, Position, ShapeTree, Sym,
                    enumerate_shapes, indirect_for, mask_context_entry, positions)
from .signature import Signature
from .syntax import SyntaxFailure, parse_term_syntax


@dataclass(frozen=True)
class PtrNode:
    """Pointer `p↑i`; `ε↑i` is a plain back edge."""

    position: Position
    index: int

    def __post_init__(self):
        if isinstance(self.index, bool) or not isinstance(self.index, int) or self.index < 1:
            raise ValueError(f"pointer index must be a positive integer, got {self.index!r}")


@dataclass(frozen=True)
class FunNode:
    """Function node with ordered children, optional payload and optional inner pointer."""

    symbol: str
    children: Tuple["Term", ...] = ()
    payload: Optional[int] = None
    inner: Optional[PtrNode] = None

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))


Term = Union[PtrNode, FunNode]


class ErrorKind(Enum):
    DANGLING_INDEX = "DanglingIndex"
    INVALID_POSITION = "InvalidPosition"
    ARITY_MISMATCH = "ArityMismatch"
    PAYLOAD_MISMATCH = "PayloadMismatch"
    INNER_PTR_FORBIDDEN = "InnerPtrForbidden"
    UNDECLARED_SYMBOL = "UndeclaredSymbol"
    PARSE_FAILURE = "ParseFailure"


class TermTypeError(ValueError):
    """
    A term that fails to parse or to type-check.

    Attributes:
        path: position of the offending subterm (ε for parse failures)
        kind: ErrorKind
        detail: human-readable message
        line, column: source location when the term came from text
    """

    def __init__(self, path: Position, kind: ErrorKind, detail: str,
                 line: Optional[int] = None, column: Optional[int] = None):
        super().__init__(f"{kind.value} at {path}: {detail}")
        self.path = path
        self.kind = kind
        self.detail = detail
        self.line = line
        self.column = column


# ========== Phase 1: skeletons ==========

def _node_skeleton(node: FunNode, sig: Signature, path: Position,
                   table: Dict[int, ShapeTree]) -> ShapeTree:
    spec = sig.get(node.symbol)
    if spec is None:
        raise TermTypeError(path, ErrorKind.UNDECLARED_SYMBOL,
                            f"symbol {node.symbol!r} is not declared")
    if len(node.children) != spec.arity:
        raise TermTypeError(path, ErrorKind.ARITY_MISMATCH,
                            f"{node.symbol} expects {spec.arity} children, got {len(node.children)}")
    if spec.valued and node.payload is None:
        raise TermTypeError(path, ErrorKind.PAYLOAD_MISMATCH,
                            f"{node.symbol} requires an integer payload")
    if not spec.valued and node.payload is not None:
        raise TermTypeError(path, ErrorKind.PAYLOAD_MISMATCH,
                            f"{node.symbol} carries no payload")
    return Sym(spec.shape_symbol, tuple(table[id(child)] for child in node.children))


def skeleton_table(term: Term, sig: Signature) -> Dict[int, ShapeTree]:
    """Skeleton of every subterm, keyed by `id(subterm)`; children before parents."""
    table: Dict[int, ShapeTree] = {}
    stack: List[Tuple[Term, Position, bool]] = [(term, EPSILON, False)]
    while stack:
        node, path, expanded = stack.pop()
        if isinstance(node, PtrNode):
            table[id(node)] = PTR
        elif expanded:
            table[id(node)] = _node_skeleton(node, sig, path, table)
        else:
            stack.append((node, path, True))
            for index in range(len(node.children), 0, -1):
                stack.append((node.children[index - 1], path.child(index), False))
    return table


def skeleton_of(term: Term, sig: Signature) -> ShapeTree:
    """
    Purely syntactic shape of a term: pointers become P and each function
    node becomes its shape symbol over the children's shapes.

    Raises:
        TermTypeError: ArityMismatch, PayloadMismatch or UndeclaredSymbol
    """
    return skeleton_table(term, sig)[id(term)]


# ========== Phase 2: pointers ==========

def _check_pointer(pointer: PtrNode, ctx: Context, sig: Signature, path: Position):
    entry = ctx.lookup(pointer.index)
    if entry is None:
        raise TermTypeError(path, ErrorKind.DANGLING_INDEX,
                            f"index {pointer.index} exceeds context length {len(ctx)}")
    if pointer.position not in positions(entry, indirect_for(entry, sig)):
        raise TermTypeError(path, ErrorKind.INVALID_POSITION,
                            f"{pointer.position} is not referable in context entry "
                            f"{pointer.index} = {entry}")


def _check(term: Term, ctx: Context, sig: Signature, table: Dict[int, ShapeTree]):
    # an inner slot is checked after the children of its node
    stack: List[Tuple[Term, Context, Position, bool]] = [(term, ctx, EPSILON, False)]
    while stack:
        node, here, path, slot_only = stack.pop()
        if isinstance(node, PtrNode):
            _check_pointer(node, here, sig, path)
            continue
        policy = sig.policy(node.symbol)
        if slot_only:
            if not policy.inner_pointers:
                raise TermTypeError(path, ErrorKind.INNER_PTR_FORBIDDEN,
                                    f"{node.symbol} does not allow an inner pointer")
            _check_pointer(node.inner, here, sig, path)
            continue
        if node.inner is not None:
            stack.append((node, here, path, True))
        shape_symbol = sig.get(node.symbol).shape_symbol
        child_shapes = table[id(node)].children
        for index in range(len(node.children), 0, -1):
            gamma = mask_context_entry(shape_symbol, child_shapes, index, policy)
            stack.append((node.children[index - 1], here.extend(gamma), path.child(index), False))


def type_check(term: Term, ctx: Context, sig: Signature) -> ShapeTree:
    """
    Type-check `term` in context `ctx`.

    Args:
        term: the term
        ctx: typing context (Context() for closed terms)
        sig: signature with per-symbol pointer policies

    Returns:
        The shape of the term, equal to skeleton_of(term, sig)

    Raises:
        TermTypeError: the first error in leftmost-innermost order
    """
    table = skeleton_table(term, sig)
    _check(term, ctx, sig, table)
    return table[id(term)]


# ========== Positions and pointer targets ==========

def term_positions(term: Term) -> Dict[Position, Term]:
    """Every node of the term keyed by its position, in preorder."""
    found: Dict[Position, Term] = {}
    stack: List[Tuple[Position, Term]] = [(EPSILON, term)]
    while stack:
        path, node = stack.pop()
        found[path] = node
        if isinstance(node, FunNode):
            for index in range(len(node.children), 0, -1):
                stack.append((path.child(index), node.children[index - 1]))
    return found


def count_nodes(term: Term) -> int:
    """Number of function and pointer nodes."""
    return len(term_positions(term))


def pointer_target(occurrence: Position, pointer: PtrNode) -> Optional[Position]:
    """Absolute target of a pointer found at `occurrence`; None if it climbs past the root."""
    base = occurrence.truncate(pointer.index)
    return None if base is None else base.concat(pointer.position)


def resolve_pointers(term: Term, sig: Optional[Signature] = None) -> Dict[Position, Position]:
    """
    Absolute target of every pointer occurrence.

    A pointer node is keyed by its own position; an inner pointer slot by
    the position of the node carrying it.

    Args:
        term: the term
        sig: when given, a pointer may land on another pointer only if the
            node it climbs to allows indirect references. Without it that
            rule is left to type_check.

    Raises:
        TermTypeError: when a pointer escapes the term, targets no node or
            targets a pointer its policy does not allow
    """
    nodes = term_positions(term)
    targets: Dict[Position, Position] = {}
    for path, node in nodes.items():
        pointer = node if isinstance(node, PtrNode) else node.inner
        if pointer is None:
            continue
        target = pointer_target(path, pointer)
        if target is None:
            raise TermTypeError(path, ErrorKind.DANGLING_INDEX,
                                f"index {pointer.index} climbs above the root")
        if target not in nodes:
            raise TermTypeError(path, ErrorKind.INVALID_POSITION,
                                f"target {target} is not a node of the term")
        if sig is not None and isinstance(nodes[target], PtrNode):
            owner = nodes[path.truncate(pointer.index)]
            if not sig.policy(owner.symbol).indirect_refs:
                raise TermTypeError(path, ErrorKind.INVALID_POSITION,
                                    f"target {target} is a pointer and {owner.symbol} "
                                    "does not allow indirect references")
        targets[path] = target
    return targets


# ========== Text ==========

def _print_pointer(pointer: PtrNode) -> str:
    if pointer.position == EPSILON:
        return f"ptr({pointer.index})"
    return f"ptr({pointer.index},{pointer.position})"


def print_term(term: Term) -> str:
    """Render term text, e.g. `bin(lf(5),ptr(1))`."""
    parts: List[str] = []
    stack: List[Union[Term, str]] = [term]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
            continue
        if isinstance(item, PtrNode):
            parts.append(_print_pointer(item))
            continue
        text = item.symbol
        if item.inner is not None:
            text += f"[{_print_pointer(item.inner)}]"
        if item.payload is not None:
            parts.append(f"{text}({item.payload})")
        elif not item.children:
            parts.append(text)
        else:
            parts.append(text + "(")
            stack.append(")")
            for index in range(len(item.children) - 1, -1, -1):
                stack.append(item.children[index])
                if index:
                    stack.append(",")
    return "".join(parts)


def _build_pointer(raw, path: Position) -> PtrNode:
    _, index, steps, location = raw
    try:
        return PtrNode(Position(steps), index)
    except ValueError as exc:
        raise TermTypeError(path, ErrorKind.PARSE_FAILURE, str(exc), *location) from exc


def _build(raw, sig: Signature, where: Dict[Position, Tuple[int, int]]) -> Term:
    """Raw parse tuples to a Term, checking symbols and payloads in preorder."""
    built: Dict[Position, Term] = {}
    stack: List[Tuple[Any, Position]] = [(raw, EPSILON)]
    while stack:
        item, path = stack.pop()
        if item[0] == "assemble":
            _, name, inner, arity = item
            children = tuple(built.pop(path.child(index)) for index in range(1, arity + 1))
            built[path] = FunNode(name, children, None, inner)
            continue
        if item[0] == "ptr":
            where[path] = item[3]
            built[path] = _build_pointer(item, path)
            continue
        if item[0] == "payload":
            raise TermTypeError(path, ErrorKind.PAYLOAD_MISMATCH,
                                "an integer cannot stand as a subterm", *item[2])
        _, name, inner_raw, args, location = item
        where[path] = location
        spec = sig.get(name)
        if spec is None:
            raise TermTypeError(path, ErrorKind.UNDECLARED_SYMBOL,
                                f"symbol {name!r} is not declared", *location)
        inner = None
        if inner_raw is not None:
            inner = _build_pointer(inner_raw, path)
        args = args or []
        if spec.valued:
            if len(args) != 1 or args[0][0] != "payload":
                raise TermTypeError(path, ErrorKind.PAYLOAD_MISMATCH,
                                    f"{name} takes exactly one integer", *location)
            built[path] = FunNode(name, (), args[0][1], inner)
            continue
        stack.append((("assemble", name, inner, len(args)), path))
        for index in range(len(args), 0, -1):
            stack.append((args[index - 1], path.child(index)))
    return built[EPSILON]


def parse_term(text: str, sig: Signature) -> Term:
    """
    Parse term text and check its structure (symbols, arities, payloads).

    Pointers are not checked here; use type_check.

    Raises:
        TermTypeError: ParseFailure with line/column, or a structural kind
    """
    try:
        raw = parse_term_syntax(text)
    except SyntaxFailure as exc:
        raise TermTypeError(EPSILON, ErrorKind.PARSE_FAILURE, str(exc),
                            exc.line, exc.column) from exc
    where: Dict[Position, Tuple[int, int]] = {}
    term = _build(raw, sig, where)
    try:
        skeleton_of(term, sig)
    except TermTypeError as exc:
        if exc.path in where:
            exc.line, exc.column = where[exc.path]
        raise
    return term


# ========== Enumeration ==========

def _pointers_into(ctx: Context, sig: Signature) -> List[PtrNode]:
    found = []
    for index, entry in enumerate(ctx.entries, start=1):
        for position in sorted(positions(entry, indirect_for(entry, sig))):
            found.append(PtrNode(position, index))
    return found


def terms_of_shape(shape: ShapeTree, ctx: Context, sig: Signature,
                   payloads: Tuple[int, ...] = ENUM_PAYLOADS) -> Iterator[Term]:
    """Every term whose skeleton is `shape` and which is well-typed in `ctx`."""
    if not isinstance(shape, Sym):
        if shape == PTR:
            yield from _pointers_into(ctx, sig)
        return
    spec = sig.symbol_for_shape(shape.symbol)
    policy = sig.policy(spec.name)
    inner_options: List[Optional[PtrNode]] = [None]
    if policy.inner_pointers:
        inner_options.extend(_pointers_into(ctx, sig))
    payload_options = list(payloads) if spec.valued else [None]
    child_options = [
        list(terms_of_shape(child, ctx.extend(
            mask_context_entry(spec.shape_symbol, shape.children, index, policy)), sig, payloads))
        for index, child in enumerate(shape.children, start=1)
    ]
    for inner in inner_options:
        for payload in payload_options:
            for children in product(*child_options):
                yield FunNode(spec.name, children, payload, inner)


def enumerate_terms(sig: Signature, ctx: Context, max_nodes: int,
                    payloads: Tuple[int, ...] = ENUM_PAYLOADS) -> Iterator[Tuple[Term, ShapeTree]]:
    """
    Every well-typed term with at most `max_nodes` nodes, paired with its shape.

    Terms are generated shape by shape, so each appears exactly once.
    Payloads are drawn from `payloads` to keep the space finite.
    """
    if max_nodes < 1:
        raise ValueError("max_nodes must be at least 1")
    return (
        (term, shape)
        for shape in enumerate_shapes(sig, max_nodes)
        for term in terms_of_shape(shape, ctx, sig, payloads)
    )
