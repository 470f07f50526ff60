"""
Term Manager Module
Front door to the library for the command line: one method per operation,
each taking and returning text and recording an audit-log entry.
"""

from typing import Iterator

from .config import DEFAULT_USER
from .fold import (dump_etg, emit_letrec, height, leaves, render_unfolded, size, skeleton,
                   to_etg, unfold)
from .graph import decode, dump_graph, encode, load_graph, to_dot
from .logger import LogManager
from .shape import EMPTY_CONTEXT, Context, print_shape
from .signature import Signature, builtin_bintree
from .storage import StorageManager
from .term import Term, enumerate_terms, parse_term, print_term, type_check

FOLD_ALGEBRAS = ("leaves", "height", "skeleton", "size")


class TermManager:
    """Runs term operations against one signature and logs each of them."""

    def __init__(self, signature: Signature = None, storage: StorageManager = None,
                 logger: LogManager = None, user: str = DEFAULT_USER):
        """
        Initialize term manager.

        Args:
            signature: Signature to work in (optional, defaults to binary trees)
            storage: StorageManager instance (optional)
            logger: LogManager instance (optional)
            user: Name recorded in the audit log
        """
        self.signature = signature or builtin_bintree()
        self.storage = storage or StorageManager()
        self.logger = logger or LogManager(self.storage)
        self.user = user

    def _logged(self, action: str, details: str, operation):
        try:
            result = operation()
        except ValueError as exc:
            self.logger.log_action(self.user, f"{action}_FAILED", f"{details} -> {exc}")
            raise
        self.logger.log_action(self.user, action, details)
        return result

    def _closed_term(self, text: str) -> Term:
        term = parse_term(text, self.signature)
        type_check(term, EMPTY_CONTEXT, self.signature)
        return term

    def check(self, text: str, ctx: Context = EMPTY_CONTEXT) -> str:
        """
        Type-check term text.

        Returns:
            Shape text of the term

        Raises:
            TermTypeError: if the term does not parse or type-check
        """
        def operation():
            term = parse_term(text, self.signature)
            return print_shape(type_check(term, ctx, self.signature))
        return self._logged("CHECK", text, operation)

    def encode(self, graph_text: str) -> str:
        """Term text of the graph described by a graph file."""
        def operation():
            return print_term(encode(load_graph(graph_text), self.signature))
        return self._logged("ENCODE", f"{len(graph_text)} bytes", operation)

    def decode(self, text: str, dot: bool = False) -> str:
        """Graph file (or DOT text) of a closed term."""
        def operation():
            graph = decode(self._closed_term(text))
            return to_dot(graph) if dot else dump_graph(graph)
        return self._logged("DECODE", text, operation)

    def etg(self, text: str) -> str:
        """Structured ETG dump of a closed term."""
        return self._logged("ETG", text,
                            lambda: dump_etg(to_etg(self._closed_term(text), self.signature)))

    def letrec(self, text: str) -> str:
        """letrec rendering of a closed term."""
        return self._logged("LETREC", text,
                            lambda: emit_letrec(to_etg(self._closed_term(text), self.signature)))

    def unfold(self, text: str, depth: int) -> str:
        """Expansion of a closed term cut at `depth`."""
        return self._logged("UNFOLD", f"{text} depth={depth}",
                            lambda: render_unfolded(unfold(self._closed_term(text), depth)))

    def fold(self, text: str, algebra: str) -> str:
        """
        Run one of the named folds on a closed term.

        Args:
            text: Term text
            algebra: One of FOLD_ALGEBRAS

        Returns:
            leaves as `{5,6,7}`, height/size as integers, skeleton as shape text
        """
        if algebra not in FOLD_ALGEBRAS:
            raise ValueError(f"unknown fold {algebra!r}; expected one of {', '.join(FOLD_ALGEBRAS)}")

        def operation():
            term = self._closed_term(text)
            if algebra == "leaves":
                values = sorted(leaves(term, self.signature))
                return "{" + ",".join(str(value) for value in values) + "}"
            if algebra == "height":
                return str(height(term, self.signature))
            if algebra == "size":
                return str(size(term, self.signature))
            return print_shape(skeleton(term, self.signature))
        return self._logged("FOLD", f"{text} alg={algebra}", operation)

    def enumerate(self, max_nodes: int, ctx: Context = EMPTY_CONTEXT) -> Iterator[str]:
        """
        Stream `term : shape` lines for every well-typed term up to `max_nodes` nodes.

        The ENUMERATE entry is logged once the stream is exhausted, with the
        number of terms produced; a failure part-way logs ENUMERATE_FAILED.
        """
        details = f"max={max_nodes} ctx={ctx}"
        produced = 0
        try:
            for term, shape in enumerate_terms(self.signature, ctx, max_nodes):
                produced += 1
                yield f"{print_term(term)} : {print_shape(shape)}"
        except ValueError as exc:
            self.logger.log_action(self.user, "ENUMERATE_FAILED", f"{details} -> {exc}")
            raise
        self.logger.log_action(self.user, "ENUMERATE", f"{details} terms={produced}")
