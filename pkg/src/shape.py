"""
Shape Module
Shape trees, referable positions and typing contexts: the type language of
cyclic sharing terms.

Shape text syntax: `E` is the void shape, `P` the pointer shape and
`B(L,P)` an applied shape symbol; nullary shape symbols print bare.
"""

from dataclasses import dataclass
from itertools import product
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union

from .signature import Direction, PointerPolicy, Signature
from .syntax import SyntaxFailure, parse_shape_syntax


class ShapeSyntaxError(ValueError):
    """Shape text that does not parse or does not fit the signature."""


# ========== Positions ==========

@dataclass(frozen=True, order=True)
class Position:
    """
    A path of 1-based child indices from some node; the empty path is ε.

    Ordering is lexicographic on the steps, which is DFS preorder.
    """

    steps: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        for step in self.steps:
            if isinstance(step, bool) or not isinstance(step, int) or step < 1:
                raise ValueError(f"position steps must be positive integers, got {step!r}")

    @classmethod
    def parse(cls, text: str) -> "Position":
        """Parse `1.2.1`; `ε`, `e` and the empty string denote ε."""
        text = text.strip()
        if text in ("", "ε", "e"):
            return EPSILON
        try:
            return cls(tuple(int(part) for part in text.split(".")))
        except ValueError as exc:
            raise ValueError(f"invalid position {text!r}") from exc

    def __str__(self) -> str:
        return ".".join(str(step) for step in self.steps) if self.steps else "ε"

    def __len__(self) -> int:
        return len(self.steps)

    def concat(self, other: "Position") -> "Position":
        """p.q"""
        return Position(self.steps + other.steps)

    def child(self, index: int) -> "Position":
        """p.i"""
        return Position(self.steps + (index,))

    def prepend(self, index: int) -> "Position":
        """i.p"""
        return Position((index,) + self.steps)

    def truncate(self, count: int) -> Optional["Position"]:
        """Drop the last `count` steps; None when the path is too short."""
        if count > len(self.steps):
            return None
        return Position(self.steps[:len(self.steps) - count])

    def is_prefix_of(self, other: "Position") -> bool:
        return other.steps[:len(self.steps)] == self.steps

    def common_prefix(self, other: "Position") -> "Position":
        """Longest shared prefix of two positions."""
        shared = []
        for mine, theirs in zip(self.steps, other.steps):
            if mine != theirs:
                break
            shared.append(mine)
        return Position(tuple(shared))

    def suffix_after(self, prefix: "Position") -> "Position":
        """The q with prefix.q == self; `prefix` must be a prefix of self."""
        return Position(self.steps[len(prefix.steps):])


EPSILON = Position()


# ========== Shape trees ==========

@dataclass(frozen=True)
class Void:
    """The void shape; nothing below it is referable."""

    def __str__(self) -> str:
        return "E"


@dataclass(frozen=True)
class Ptr:
    """The shape of a pointer node."""

    def __str__(self) -> str:
        return "P"


@dataclass(frozen=True)
class Sym:
    """A shape symbol applied to child shapes."""

    symbol: str
    children: Tuple["ShapeTree", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))

    def __str__(self) -> str:
        return print_shape(self)


ShapeTree = Union[Void, Ptr, Sym]

VOID = Void()
PTR = Ptr()


def print_shape(shape: ShapeTree) -> str:
    """Render shape text, e.g. `B(B(L,L),B(P,L))`."""
    parts: List[str] = []
    stack: List[Union["ShapeTree", str]] = [shape]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
        elif isinstance(item, Void):
            parts.append("E")
        elif isinstance(item, Ptr):
            parts.append("P")
        elif not item.children:
            parts.append(item.symbol)
        else:
            parts.append(item.symbol + "(")
            stack.append(")")
            for index in range(len(item.children) - 1, -1, -1):
                stack.append(item.children[index])
                if index:
                    stack.append(",")
    return "".join(parts)


def _build_shape(raw, sig: Optional[Signature]) -> ShapeTree:
    name, children = raw
    if name in ("E", "P"):
        if children:
            raise ShapeSyntaxError(f"{name} takes no arguments")
        return VOID if name == "E" else PTR
    built = tuple(_build_shape(child, sig) for child in children)
    if sig is not None:
        spec = sig.symbol_for_shape(name)
        if spec is None:
            raise ShapeSyntaxError(f"unknown shape symbol {name!r}")
        if spec.arity != len(built):
            raise ShapeSyntaxError(
                f"shape symbol {name!r} expects {spec.arity} children, got {len(built)}")
    return Sym(name, built)


def parse_shape(text: str, sig: Optional[Signature] = None) -> ShapeTree:
    """
    Parse shape text.

    Args:
        text: e.g. "B(L,E)"
        sig: when given, shape symbols and their arities are validated

    Returns:
        The parsed ShapeTree

    Raises:
        ShapeSyntaxError: on malformed text or a signature mismatch
    """
    try:
        raw = parse_shape_syntax(text)
    except SyntaxFailure as exc:
        raise ShapeSyntaxError(str(exc)) from exc
    return _build_shape(raw, sig)


def resolve(shape: ShapeTree, position: Position) -> Optional[ShapeTree]:
    """Sub-shape at `position`, or None when the path leaves the shape."""
    current = shape
    for step in position.steps:
        if not isinstance(current, Sym) or step > len(current.children):
            return None
        current = current.children[step - 1]
    return current


def positions(shape: ShapeTree, indirect: bool = False) -> FrozenSet[Position]:
    """
    Referable positions Pos(shape).

    Void has none. Ptr has none, or only ε when indirect references are
    allowed. An applied symbol contributes ε plus i.p for every referable p
    of its i-th child.
    """
    found = set()
    stack = [(shape, EPSILON)]
    while stack:
        current, path = stack.pop()
        if isinstance(current, Void):
            continue
        if isinstance(current, Ptr):
            if indirect:
                found.add(path)
            continue
        found.add(path)
        for index, child in enumerate(current.children, start=1):
            stack.append((child, path.child(index)))
    return frozenset(found)


def mask_context_entry(shape_symbol: str, child_shapes: Sequence[ShapeTree],
                       child_index: int, policy: Union[PointerPolicy, Direction]) -> ShapeTree:
    """
    Context entry used to type child `child_index` of a node.

    Right-to-left masks children child_index..n with void, left-to-right
    masks 1..child_index, symmetric masks only child_index and
    unrestricted masks nothing.

    Raises:
        ValueError: when child_index is outside 1..len(child_shapes)
    """
    arity = len(child_shapes)
    if not 1 <= child_index <= arity:
        raise ValueError(f"child index {child_index} out of range 1..{arity}")
    direction = policy.direction if isinstance(policy, PointerPolicy) else policy
    return Sym(shape_symbol, tuple(
        VOID if _is_masked(direction, j, child_index) else child
        for j, child in enumerate(child_shapes, start=1)))


def _is_masked(direction: Direction, sibling: int, child_index: int) -> bool:
    if direction is Direction.RIGHT_TO_LEFT:
        return sibling >= child_index
    if direction is Direction.LEFT_TO_RIGHT:
        return sibling <= child_index
    if direction is Direction.SYMMETRIC:
        return sibling == child_index
    return False


# ========== Contexts ==========

@dataclass(frozen=True)
class Context:
    """De Bruijn typing context; entry 1 is the innermost enclosing node."""

    entries: Tuple[ShapeTree, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, index: int) -> Optional[ShapeTree]:
        """Entry `index` (1-based), or None when out of range."""
        if 1 <= index <= len(self.entries):
            return self.entries[index - 1]
        return None

    def extend(self, entry: ShapeTree) -> "Context":
        """γ, Γ"""
        return Context((entry,) + self.entries)

    def __str__(self) -> str:
        return "⟨" + ";".join(print_shape(entry) for entry in self.entries) + "⟩"


EMPTY_CONTEXT = Context()


def parse_context(text: str, sig: Optional[Signature] = None) -> Context:
    """Parse `S1;S2;…` (entry 1 first); blank text is the empty context."""
    parts = [part for part in text.split(";") if part.strip()]
    return Context(tuple(parse_shape(part, sig) for part in parts))


def indirect_for(entry: ShapeTree, sig: Signature) -> bool:
    """Indirect-reference flag applying to pointers into a context entry."""
    if isinstance(entry, Sym):
        spec = sig.symbol_for_shape(entry.symbol)
        if spec is not None:
            return sig.policy(spec.name).indirect_refs
    return sig.default_policy.indirect_refs


# ========== Enumeration ==========

def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Ordered ways to write `total` as `parts` positive integers."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_shapes(sig: Signature, max_nodes: int) -> Iterator[ShapeTree]:
    """
    Every term skeleton (Ptr or applied symbols, no Void) with at most
    `max_nodes` nodes, smaller shapes first.
    """
    exact: Dict[int, List[ShapeTree]] = {}

    def shapes_of_size(size: int) -> List[ShapeTree]:
        if size in exact:
            return exact[size]
        found: List[ShapeTree] = []
        if size == 1:
            found.append(PTR)
        for spec in sig.symbol_specs:
            if spec.arity == 0:
                if size == 1:
                    found.append(Sym(spec.shape_symbol))
                continue
            for split in _compositions(size - 1, spec.arity):
                for children in product(*(shapes_of_size(part) for part in split)):
                    found.append(Sym(spec.shape_symbol, children))
        exact[size] = found
        return found

    for size in range(1, max_nodes + 1):
        yield from shapes_of_size(size)
