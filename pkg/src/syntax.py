"""
Syntax Module
Lark grammars for the three textual formats of the project:
shape trees, cyclic sharing terms and letrec expressions.

The transformers here only build raw nested tuples; validation against a
signature happens in the shape, term and fold modules.
"""

from typing import Any, List, Tuple

from lark import Lark, Transformer_NonRecursive, v_args
from lark.exceptions import UnexpectedInput, VisitError

SHAPE_GRAMMAR = r"""
    ?start: shape

    shape: NAME ("(" shape ("," shape)* ")")?

    %import common.CNAME -> NAME
    %import common.WS
    %ignore WS
"""

TERM_GRAMMAR = r"""
    ?start: term

    ?term: pointer
         | node

    node: NAME inner? call?
    inner: "[" pointer "]"
    call: "(" arg ("," arg)* ")"
    ?arg: term
        | SIGNED_INT -> payload

    pointer: "ptr" "(" INT ("," position)? ")"
    position: INT ("." INT)*
            | EPSILON

    EPSILON: "ε"

    %import common.CNAME -> NAME
    %import common.INT
    %import common.SIGNED_INT
    %import common.WS
    %ignore WS
"""

LETREC_GRAMMAR = r"""
    start: "letrec" equation (";" equation)* "in" VAR

    equation: VAR "=" rhs
    ?rhs: VAR -> cross
        | NAME ("(" rhs_args ")")? -> fun
    rhs_args: rhs_arg ("," rhs_arg)*
    ?rhs_arg: VAR
            | SIGNED_INT -> payload

    VAR.2: /x_(e|[0-9]+(_[0-9]+)*)(?![A-Za-z0-9_])/

    %import common.CNAME -> NAME
    %import common.SIGNED_INT
    %import common.WS
    %ignore WS
"""

_shape_parser = Lark(SHAPE_GRAMMAR, parser="lalr")
_term_parser = Lark(TERM_GRAMMAR, parser="lalr", propagate_positions=True)
_letrec_parser = Lark(LETREC_GRAMMAR, parser="lalr")


class SyntaxFailure(Exception):
    """Raised when text does not match a grammar; carries line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(message)
        self.line = line
        self.column = column


class _ShapeTransformer(Transformer_NonRecursive):
    """Shape text to (name, children) tuples."""

    def shape(self, items):
        name = str(items[0])
        return (name, list(items[1:]))


@v_args(meta=True)
class _TermTransformer(Transformer_NonRecursive):
    """
    Term text to raw tuples:
        ("ptr", index, steps, (line, column))
        ("node", name, inner, args, (line, column))
        ("payload", value, (line, column))
    """

    def pointer(self, meta, items):
        steps = items[1] if len(items) > 1 else ()
        return ("ptr", int(items[0]), steps, (meta.line, meta.column))

    def position(self, meta, items):
        if len(items) == 1 and str(items[0]) == "ε":
            return ()
        return tuple(int(step) for step in items)

    def inner(self, meta, items):
        return items[0]

    def call(self, meta, items):
        return list(items)

    def payload(self, meta, items):
        return ("payload", int(items[0]), (meta.line, meta.column))

    def node(self, meta, items):
        name = str(items[0])
        inner = None
        args = None
        for item in items[1:]:
            if isinstance(item, tuple) and item and item[0] == "ptr":
                inner = item
            else:
                args = item
        return ("node", name, inner, args, (meta.line, meta.column))


class _LetrecTransformer(Transformer_NonRecursive):
    """Letrec text to (equations, body) with variable names left as strings."""

    def start(self, items):
        return (list(items[:-1]), str(items[-1]))

    def equation(self, items):
        return (str(items[0]), items[1])

    def cross(self, items):
        return ("cross", str(items[0]))

    def fun(self, items):
        args = items[1] if len(items) > 1 else []
        return ("fun", str(items[0]), args)

    def rhs_args(self, items):
        return [item if isinstance(item, tuple) else str(item) for item in items]

    def payload(self, items):
        return ("payload", int(items[0]))


def _run(parser: Lark, transformer: Transformer_NonRecursive, text: str) -> Any:
    try:
        tree = parser.parse(text)
    except UnexpectedInput as exc:
        line = getattr(exc, "line", -1)
        column = getattr(exc, "column", -1)
        if not line or line < 1:
            # end of input
            line = text.count("\n") + 1
            column = len(text) - text.rfind("\n")
        raise SyntaxFailure(
            f"unexpected input at line {line}, column {column}", line, column
        ) from exc
    try:
        return transformer.transform(tree)
    except VisitError as exc:
        raise SyntaxFailure(str(exc.orig_exc)) from exc


def parse_shape_syntax(text: str) -> Tuple[str, List]:
    """Parse shape text into nested (name, children) tuples."""
    return _run(_shape_parser, _ShapeTransformer(), text)


def parse_term_syntax(text: str) -> Tuple:
    """Parse term text into raw nested tuples (see _TermTransformer)."""
    return _run(_term_parser, _TermTransformer(), text)


def parse_letrec_syntax(text: str) -> Tuple[List, str]:
    """Parse letrec text into (equations, body variable)."""
    return _run(_letrec_parser, _LetrecTransformer(), text)
