"""
Fold Module
Structural recursion over cyclic sharing terms and the algebras built on it:
leaves, height, skeleton, size, rebuild, and the translation to equational
term graphs (ETGs). Also letrec rendering and reading, and bounded
unfolding of the infinite expansion.

The fold hands every child the context it is typed in (the masked entry
of its parent followed by the parent's context), so policy-aware algebras
see exactly what the type checker sees.
"""

import json
from dataclasses import dataclass
from typing import (Any, Callable, Dict, FrozenSet, Generic, Iterable, List, Optional,
                    Tuple, TypeVar, Union)

from .graph import GraphError, GraphErrorKind, successor_table
from .shape import (EMPTY_CONTEXT, EPSILON, PTR, Context, Position, ShapeTree, Sym,
                    mask_context_entry)
from .signature import Signature
from .syntax import SyntaxFailure, parse_letrec_syntax
from .term import FunNode, PtrNode, Term, skeleton_table

R = TypeVar("R")


@dataclass(frozen=True)
class Algebra(Generic[R]):
    """
    Carrier-agnostic handlers:
        on_pointer(ctx, position, index) -> R
        on_fun(ctx, symbol, payload, inner, child_results) -> R
    """

    on_pointer: Callable[[Context, Position, int], R]
    on_fun: Callable[[Context, str, Optional[int], Optional[PtrNode], List[R]], R]


def fold(term: Term, ctx: Context, alg: Algebra, sig: Signature) -> Any:
    """
    Evaluate `alg` over a term bottom-up, children left to right.

    Args:
        term: a term that type-checks in `ctx`
        ctx: context of the whole term
        alg: handlers, each called once per node
        sig: signature giving shape symbols and policies

    Returns:
        The algebra's value for the whole term
    """
    shapes = skeleton_table(term, sig)

    def go(node: Term, here: Context):
        if isinstance(node, PtrNode):
            return alg.on_pointer(here, node.position, node.index)
        spec = sig.get(node.symbol)
        policy = sig.policy(node.symbol)
        child_shapes = shapes[id(node)].children
        results = [
            go(child, here.extend(
                mask_context_entry(spec.shape_symbol, child_shapes, index, policy)))
            for index, child in enumerate(node.children, start=1)
        ]
        return alg.on_fun(here, node.symbol, node.payload, node.inner, results)

    return go(term, ctx)


# ========== Example algebras ==========

def counting_algebra() -> Algebra[int]:
    return Algebra(lambda ctx, position, index: 1,
                   lambda ctx, symbol, payload, inner, results: 1 + sum(results))


def rebuild_algebra() -> Algebra[Term]:
    """Reassembles the term it folds over."""
    return Algebra(
        lambda ctx, position, index: PtrNode(position, index),
        lambda ctx, symbol, payload, inner, results: FunNode(symbol, tuple(results),
                                                             payload, inner))


def _collect_leaves(ctx, symbol, payload, inner, results) -> FrozenSet[int]:
    found = frozenset().union(*results)
    return found | {payload} if payload is not None else found


def leaves_algebra() -> Algebra[FrozenSet[int]]:
    return Algebra(lambda ctx, position, index: frozenset(), _collect_leaves)


def height_algebra() -> Algebra[int]:
    return Algebra(lambda ctx, position, index: 1,
                   lambda ctx, symbol, payload, inner, results: 1 + max(results, default=0))


def skeleton_algebra(sig: Signature) -> Algebra[ShapeTree]:
    return Algebra(
        lambda ctx, position, index: PTR,
        lambda ctx, symbol, payload, inner, results: Sym(sig.get(symbol).shape_symbol,
                                                         tuple(results)))


def leaves(term: Term, sig: Signature, ctx: Context = EMPTY_CONTEXT) -> FrozenSet[int]:
    """Set of all leaf values; pointers contribute nothing."""
    return fold(term, ctx, leaves_algebra(), sig)


def height(term: Term, sig: Signature, ctx: Context = EMPTY_CONTEXT) -> int:
    """Height counting pointers and leaves as 1."""
    return fold(term, ctx, height_algebra(), sig)


def skeleton(term: Term, sig: Signature, ctx: Context = EMPTY_CONTEXT) -> ShapeTree:
    """Shape of a term computed by structural recursion."""
    return fold(term, ctx, skeleton_algebra(sig), sig)


def size(term: Term, sig: Signature, ctx: Context = EMPTY_CONTEXT) -> int:
    """Number of function and pointer nodes."""
    return fold(term, ctx, counting_algebra(), sig)


# ========== Equational term graphs ==========

class TranslationError(ValueError):
    """A term or ETG outside the domain of the ETG / letrec translations."""


class LetrecSyntaxError(ValueError):
    """Letrec text that cannot be read back."""


@dataclass(frozen=True)
class FunEq:
    """x = f(x1, …, xn) or x = f(k)"""

    symbol: str
    payload: Optional[int] = None
    args: Tuple[Position, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class CrossEq:
    """x = y: the node is the one at `target`."""

    target: Position


@dataclass(frozen=True)
class PointerEq:
    """A pointer still free in a partially assembled ETG."""

    position: Position
    index: int


Equation = Union[FunEq, CrossEq, PointerEq]


@dataclass(frozen=True)
class EquationalTermGraph:
    """
    Root variable plus equations in α-normal form: every left-hand variable
    is the position of its node in the whole term.
    """

    root: Position
    equations: Tuple[Tuple[Position, Equation], ...]

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))

    def as_dict(self) -> Dict[Position, Equation]:
        return dict(self.equations)

    def is_closed(self) -> bool:
        return not any(isinstance(eq, PointerEq) for _, eq in self.equations)


def _shift_equation(index: int, equation: Equation) -> Equation:
    if isinstance(equation, FunEq):
        return FunEq(equation.symbol, equation.payload,
                     tuple(arg.prepend(index) for arg in equation.args))
    if isinstance(equation, CrossEq):
        return CrossEq(equation.target.prepend(index))
    if equation.index > 1:
        return PointerEq(equation.position, equation.index - 1)
    return CrossEq(equation.position)


def shift(index: int, etg: EquationalTermGraph) -> EquationalTermGraph:
    """
    Move a child's ETG under slot `index` of its parent.

    Bound variables get `index` prepended. A free pointer climbs one level:
    its index drops by one, and at index 1 it becomes a plain reference
    relative to the parent.
    """
    return EquationalTermGraph(
        etg.root.prepend(index),
        tuple((variable.prepend(index), _shift_equation(index, equation))
              for variable, equation in etg.equations))


def _etg_pointer(ctx, position, index) -> EquationalTermGraph:
    return EquationalTermGraph(EPSILON, ((EPSILON, PointerEq(position, index)),))


def _etg_fun(ctx, symbol, payload, inner, results) -> EquationalTermGraph:
    if inner is not None:
        raise TranslationError(f"{symbol} carries an inner pointer, which has no equation form")
    equations = [(EPSILON, FunEq(symbol, payload,
                                 tuple(EPSILON.child(i) for i in range(1, len(results) + 1))))]
    for index, child in enumerate(results, start=1):
        equations.extend(shift(index, child).equations)
    return EquationalTermGraph(EPSILON, tuple(equations))


def etg_algebra() -> Algebra[EquationalTermGraph]:
    return Algebra(_etg_pointer, _etg_fun)


def to_etg(term: Term, sig: Signature) -> EquationalTermGraph:
    """
    Translate a closed term into its α-normal ETG.

    Raises:
        TranslationError: inner pointers, or a pointer left free (term not closed)
    """
    etg = fold(term, EMPTY_CONTEXT, etg_algebra(), sig)
    if not etg.is_closed():
        raise TranslationError("the term is not closed: a pointer escapes the root")
    return etg


def etg_injectivity_check(terms: Iterable[Term], sig: Signature) -> bool:
    """True iff distinct terms translate to distinct ETGs."""
    distinct = set(terms)
    return len({to_etg(term, sig) for term in distinct}) == len(distinct)


def dump_etg(etg: EquationalTermGraph) -> str:
    """Structured ETG dump with position-string ids, like the graph file."""
    entries = []
    for variable, equation in etg.equations:
        if isinstance(equation, FunEq):
            entry: Dict[str, Any] = {"id": str(variable), "symbol": equation.symbol}
            if equation.payload is not None:
                entry["value"] = equation.payload
            entry["children"] = [str(arg) for arg in equation.args]
        elif isinstance(equation, CrossEq):
            entry = {"id": str(variable), "cross": str(equation.target)}
        else:
            entry = {"id": str(variable), "pointer": str(equation.position),
                     "index": equation.index}
        entries.append(entry)
    return json.dumps({"root": str(etg.root), "equations": entries},
                      indent=2, ensure_ascii=False) + "\n"


# ========== letrec ==========

def letrec_variable(position: Position) -> str:
    """x_e for ε, x_1_2 for 1.2"""
    return "x_" + ("_".join(str(step) for step in position.steps) if position.steps else "e")


def _variable_position(name: str) -> Position:
    body = name[2:]
    return EPSILON if body == "e" else Position(tuple(int(step) for step in body.split("_")))


def _letrec_rhs(equation: Equation) -> str:
    if isinstance(equation, CrossEq):
        return letrec_variable(equation.target)
    if isinstance(equation, PointerEq):
        raise TranslationError("letrec needs a closed ETG")
    if equation.payload is not None:
        return f"{equation.symbol}({equation.payload})"
    if equation.args:
        return f"{equation.symbol}({', '.join(letrec_variable(arg) for arg in equation.args)})"
    return equation.symbol


def emit_letrec(etg: EquationalTermGraph) -> str:
    """
    Render a closed ETG as
    `letrec x_e = …; x_1 = …; … in x_e`, equations in position order.
    """
    body = "; ".join(f"{letrec_variable(variable)} = {_letrec_rhs(equation)}"
                     for variable, equation in sorted(etg.equations, key=lambda item: item[0]))
    return f"letrec {body} in {letrec_variable(etg.root)}"


def parse_letrec(text: str) -> EquationalTermGraph:
    """
    Read letrec text produced by emit_letrec back into an ETG.

    Raises:
        LetrecSyntaxError: malformed text, duplicate variables or mixed arguments
    """
    try:
        raw_equations, body = parse_letrec_syntax(text)
    except SyntaxFailure as exc:
        raise LetrecSyntaxError(str(exc)) from exc
    equations: Dict[Position, Equation] = {}
    for name, rhs in raw_equations:
        variable = _variable_position(name)
        if variable in equations:
            raise LetrecSyntaxError(f"variable {name} is defined twice")
        if rhs[0] == "cross":
            equations[variable] = CrossEq(_variable_position(rhs[1]))
            continue
        _, symbol, args = rhs
        payloads = [arg for arg in args if isinstance(arg, tuple)]
        if payloads and len(args) != 1:
            raise LetrecSyntaxError(f"{symbol} mixes a value with other arguments")
        if payloads:
            equations[variable] = FunEq(symbol, payloads[0][1])
        else:
            equations[variable] = FunEq(symbol, None,
                                        tuple(_variable_position(arg) for arg in args))
    return EquationalTermGraph(_variable_position(body), tuple(sorted(equations.items(),
                                                                      key=lambda item: item[0])))


# ========== Unfolding ==========

@dataclass(frozen=True)
class Truncated:
    """Marks a branch cut off by the unfolding depth."""

    def __str__(self) -> str:
        return "Truncated"


TRUNCATED = Truncated()

UnfoldedTree = Union[FunNode, Truncated]


def unfold(term: Term, max_depth: int) -> UnfoldedTree:
    """
    Finite prefix of the infinite expansion of a closed term.

    Every pointer is replaced by the node it leads to; the root is at depth
    0 and anything at depth `max_depth` or below becomes Truncated.
    The term is assumed to be well-typed already; no signature is consulted.

    Raises:
        ValueError: for a negative depth
        GraphError: BlackHole when pointers only lead to pointers
    """
    if max_depth < 0:
        raise ValueError("max_depth must be non-negative")
    if isinstance(term, PtrNode):
        raise GraphError(GraphErrorKind.UNKNOWN_NODE, "a bare pointer has no expansion")
    table = successor_table(term)

    def expand(path: Position, depth: int) -> UnfoldedTree:
        if depth >= max_depth:
            return TRUNCATED
        symbol, payload, successors = table[path]
        return FunNode(symbol, tuple(expand(target, depth + 1) for target in successors),
                       payload)

    return expand(EPSILON, 0)


def render_unfolded(tree: UnfoldedTree) -> str:
    """Term text with `Truncated` for cut branches."""
    if isinstance(tree, Truncated):
        return "Truncated"
    if tree.payload is not None:
        return f"{tree.symbol}({tree.payload})"
    if tree.children:
        return f"{tree.symbol}({','.join(render_unfolded(child) for child in tree.children)})"
    return tree.symbol
