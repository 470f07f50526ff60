"""
Signature Module
Declares the term language: function symbols, arities, payload flags and
the pointer policy that governs each symbol's typing rule.

A signature file is a JSON document:

    {
      "default_policy": {"direction": "right-to-left", "indirect": false, "inner": false},
      "symbols": [
        {"name": "bin", "arity": 2, "shape": "B"},
        {"name": "lf", "arity": 0, "valued": true, "shape": "L"},
        {"name": "tri", "arity": 3, "policy": "symmetric"}
      ]
    }
"""

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from types import MappingProxyType
from typing import Any, Dict, Mapping, Optional, Tuple

RESERVED_SYMBOLS = frozenset({"ptr"})
RESERVED_SHAPE_SYMBOLS = frozenset({"E", "P"})


class SignatureError(ValueError):
    """Invalid signature content; `field` names the offending field."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


class Direction(Enum):
    """Which siblings a child's pointers may refer to."""

    RIGHT_TO_LEFT = "right-to-left"
    LEFT_TO_RIGHT = "left-to-right"
    SYMMETRIC = "symmetric"
    UNRESTRICTED = "unrestricted"

    @classmethod
    def parse(cls, keyword: str, field_name: str = "direction") -> "Direction":
        """
        Parse a direction keyword.

        Args:
            keyword: e.g. "right-to-left", "left_to_right", "Symmetric"
            field_name: field reported on error

        Returns:
            The matching Direction

        Raises:
            SignatureError: for an unknown keyword
        """
        if not isinstance(keyword, str):
            raise SignatureError(field_name, f"expected a policy keyword, got {keyword!r}")
        normalized = keyword.strip().lower().replace("_", "-")
        for direction in cls:
            if direction.value == normalized:
                return direction
        raise SignatureError(field_name, f"unknown policy keyword {keyword!r}")


@dataclass(frozen=True)
class PointerPolicy:
    """Context-masking direction plus the indirect-reference and inner-pointer toggles."""

    direction: Direction = Direction.RIGHT_TO_LEFT
    indirect_refs: bool = False
    inner_pointers: bool = False

    def with_overrides(self, direction: Optional[Direction] = None,
                       indirect: Optional[bool] = None,
                       inner: Optional[bool] = None) -> "PointerPolicy":
        """Return a copy with the given fields replaced (None keeps the current value)."""
        return PointerPolicy(
            direction=self.direction if direction is None else direction,
            indirect_refs=self.indirect_refs if indirect is None else indirect,
            inner_pointers=self.inner_pointers if inner is None else inner,
        )


DEFAULT_POLICY = PointerPolicy()


@dataclass(frozen=True)
class SymbolSpec:
    """One declared function symbol."""

    name: str
    arity: int
    valued: bool = False
    shape_symbol: Optional[str] = None
    policy: Optional[PointerPolicy] = None

    def __post_init__(self):
        if self.shape_symbol is None and isinstance(self.name, str):
            object.__setattr__(self, "shape_symbol", self.name.upper())


@dataclass(frozen=True)
class Signature:
    """
    Declared symbols with a signature-wide default pointer policy.

    A symbol without its own policy uses `default_policy`; this is how
    mixed pointer forms are expressed.
    """

    symbol_specs: Tuple[SymbolSpec, ...]
    default_policy: PointerPolicy = DEFAULT_POLICY
    _by_name: Dict[str, SymbolSpec] = field(
        init=False, repr=False, compare=False, hash=False, default=None)
    _by_shape: Dict[str, SymbolSpec] = field(
        init=False, repr=False, compare=False, hash=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "symbol_specs", tuple(self.symbol_specs))
        if not self.symbol_specs:
            raise SignatureError("symbols", "at least one symbol is required")
        by_name: Dict[str, SymbolSpec] = {}
        by_shape: Dict[str, SymbolSpec] = {}
        for spec in self.symbol_specs:
            _validate_spec(spec)
            if spec.name in by_name:
                raise SignatureError("name", f"duplicate symbol {spec.name!r}")
            if spec.shape_symbol in by_shape:
                raise SignatureError("shape", f"duplicate shape symbol {spec.shape_symbol!r}")
            by_name[spec.name] = spec
            by_shape[spec.shape_symbol] = spec
        object.__setattr__(self, "_by_name", by_name)
        object.__setattr__(self, "_by_shape", by_shape)

    @property
    def symbols(self) -> Mapping[str, SymbolSpec]:
        """Read-only map from symbol name to its declaration."""
        return MappingProxyType(self._by_name)

    def get(self, name: str) -> Optional[SymbolSpec]:
        """Declaration of `name`, or None when undeclared."""
        return self._by_name.get(name)

    def arity(self, name: str) -> int:
        """Arity of a declared symbol."""
        return self._by_name[name].arity

    def policy(self, name: str) -> PointerPolicy:
        """Pointer policy governing `name` (its own, else the default)."""
        spec = self._by_name[name]
        return spec.policy if spec.policy is not None else self.default_policy

    def symbol_for_shape(self, shape_symbol: str) -> Optional[SymbolSpec]:
        """Declaration whose shape symbol is `shape_symbol`, or None."""
        return self._by_shape.get(shape_symbol)

    def with_policy_override(self, direction: Optional[Direction] = None,
                             indirect: Optional[bool] = None,
                             inner: Optional[bool] = None) -> "Signature":
        """
        Override policy fields for every symbol and the default.

        Used by the CLI so one corpus can be checked under each variant.
        """
        specs = tuple(
            spec if spec.policy is None
            else replace(spec, policy=spec.policy.with_overrides(direction, indirect, inner))
            for spec in self.symbol_specs
        )
        return Signature(specs, self.default_policy.with_overrides(direction, indirect, inner))


def _validate_spec(spec: SymbolSpec):
    if not isinstance(spec.name, str) or not spec.name.isidentifier():
        raise SignatureError("name", f"invalid symbol name {spec.name!r}")
    if spec.name in RESERVED_SYMBOLS:
        raise SignatureError("name", f"symbol name {spec.name!r} is reserved")
    if not isinstance(spec.shape_symbol, str) or not spec.shape_symbol.isidentifier():
        raise SignatureError("shape", f"invalid shape symbol {spec.shape_symbol!r}")
    if spec.shape_symbol in RESERVED_SHAPE_SYMBOLS:
        raise SignatureError("shape", f"shape symbol {spec.shape_symbol!r} is reserved")
    if isinstance(spec.arity, bool) or not isinstance(spec.arity, int) or spec.arity < 0:
        raise SignatureError("arity", f"negative or non-integer arity for {spec.name!r}")
    if spec.valued and spec.arity != 0:
        raise SignatureError("valued", f"valued symbol {spec.name!r} must be nullary")


def builtin_bintree() -> Signature:
    """Binary trees with integer leaves: bin/2 and valued lf/0, right-to-left pointers."""
    return Signature(
        (
            SymbolSpec("bin", 2, valued=False, shape_symbol="B"),
            SymbolSpec("lf", 0, valued=True, shape_symbol="L"),
        ),
        DEFAULT_POLICY,
    )


# ========== Signature files ==========

def _read_bool(value: Any, field_name: str) -> bool:
    if not isinstance(value, bool):
        raise SignatureError(field_name, f"expected true/false, got {value!r}")
    return value


def _read_policy(value: Any, base: PointerPolicy, field_name: str) -> PointerPolicy:
    if isinstance(value, str):
        return base.with_overrides(direction=Direction.parse(value, field_name))
    if not isinstance(value, dict):
        raise SignatureError(field_name, f"expected a keyword or an object, got {value!r}")
    unknown = set(value) - {"direction", "indirect", "inner"}
    if unknown:
        raise SignatureError(field_name, f"unknown keys {sorted(unknown)}")
    direction = None
    if "direction" in value:
        direction = Direction.parse(value["direction"], f"{field_name}.direction")
    indirect = None
    if "indirect" in value:
        indirect = _read_bool(value["indirect"], f"{field_name}.indirect")
    inner = None
    if "inner" in value:
        inner = _read_bool(value["inner"], f"{field_name}.inner")
    return base.with_overrides(direction, indirect, inner)


def _read_symbol(entry: Any, default_policy: PointerPolicy) -> SymbolSpec:
    if not isinstance(entry, dict):
        raise SignatureError("symbols", f"expected an object per symbol, got {entry!r}")
    unknown = set(entry) - {"name", "arity", "valued", "shape", "policy"}
    if unknown:
        raise SignatureError("symbols", f"unknown keys {sorted(unknown)}")
    if "name" not in entry:
        raise SignatureError("name", "missing symbol name")
    if "arity" not in entry:
        raise SignatureError("arity", f"missing arity for {entry['name']!r}")
    policy = None
    if "policy" in entry:
        policy = _read_policy(entry["policy"], default_policy, "policy")
    return SymbolSpec(
        name=entry["name"],
        arity=entry["arity"],
        valued=_read_bool(entry.get("valued", False), "valued"),
        shape_symbol=entry.get("shape"),
        policy=policy,
    )


def load_signature(source: str) -> Signature:
    """
    Load and validate a signature document.

    Args:
        source: JSON text in the signature file format

    Returns:
        A validated Signature

    Raises:
        SignatureError: naming the offending field
    """
    try:
        document = json.loads(source)
    except json.JSONDecodeError as exc:
        raise SignatureError("document", f"not valid JSON ({exc.msg})") from exc
    if not isinstance(document, dict):
        raise SignatureError("document", "expected an object at top level")
    default_policy = DEFAULT_POLICY
    if "default_policy" in document:
        default_policy = _read_policy(document["default_policy"], DEFAULT_POLICY, "default_policy")
    entries = document.get("symbols")
    if not isinstance(entries, list):
        raise SignatureError("symbols", "expected a list of symbols")
    return Signature(tuple(_read_symbol(entry, default_policy) for entry in entries),
                     default_policy)


def _policy_document(policy: PointerPolicy) -> Dict[str, Any]:
    return {
        "direction": policy.direction.value,
        "indirect": policy.indirect_refs,
        "inner": policy.inner_pointers,
    }


def dump_signature(sig: Signature) -> str:
    """Render a signature in the file format; load_signature reads it back equal."""
    symbols = []
    for spec in sig.symbol_specs:
        entry: Dict[str, Any] = {"name": spec.name, "arity": spec.arity}
        if spec.valued:
            entry["valued"] = True
        entry["shape"] = spec.shape_symbol
        if spec.policy is not None:
            entry["policy"] = _policy_document(spec.policy)
        symbols.append(entry)
    document = {"default_policy": _policy_document(sig.default_policy), "symbols": symbols}
    return json.dumps(document, indent=2) + "\n"

