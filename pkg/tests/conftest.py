"""
Shared fixtures: signatures and a temporary audit-log database.
"""

import os
import tempfile

import pytest

from src.signature import Direction, PointerPolicy, Signature, SymbolSpec, builtin_bintree


@pytest.fixture
def bintree():
    """Builtin binary-tree signature (right-to-left pointers)."""
    return builtin_bintree()


@pytest.fixture
def signature_for():
    """Factory: binary trees under a uniform pointer policy."""
    def make(direction: Direction, indirect: bool = False, inner: bool = False) -> Signature:
        return builtin_bintree().with_policy_override(direction, indirect, inner)
    return make


@pytest.fixture
def ternary():
    """tri/3 with valued leaves, right-to-left pointers."""
    return Signature((
        SymbolSpec("tri", 3, shape_symbol="T"),
        SymbolSpec("lf", 0, valued=True, shape_symbol="L"),
    ), PointerPolicy())


@pytest.fixture
def temp_db():
    """Create temporary database for testing."""
    fd, path = tempfile.mkstemp(suffix='.sqlite')
    os.close(fd)
    yield path
    if os.path.exists(path):
        os.unlink(path)
