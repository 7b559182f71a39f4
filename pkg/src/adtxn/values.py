"""Tagged immutable values.

Every parameter that crosses an operation boundary is a Value: a tag plus a
payload. Rationals are exact (fractions.Fraction); floats are rejected
outright so that replaying a history can compare states with ==.

Report values carry a symbolic outcome name (Ok, EmptyStack, AlreadyIn, ...)
rather than an error channel: operations always return normally and the
outcome is data, which is what lets inverse selection and commutativity
conditions read it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction


class Tag(Enum):
    ITEM = "item"
    RATIONAL = "rational"
    BOOLEAN = "boolean"
    REPORT = "report"
    UNIT = "unit"
    SEQ = "seq"


_PAYLOAD_TYPE = {
    Tag.ITEM: str,
    Tag.RATIONAL: Fraction,
    Tag.BOOLEAN: bool,
    Tag.REPORT: str,
    Tag.UNIT: type(None),
    Tag.SEQ: tuple,
}


@dataclass(frozen=True)
class Value:
    tag: Tag
    payload: object

    def __post_init__(self):
        want = _PAYLOAD_TYPE[self.tag]
        if type(self.payload) is not want:
            raise TypeError(
                f"{self.tag.value} payload must be {want.__name__}, "
                f"got {type(self.payload).__name__}"
            )
        if self.tag is Tag.SEQ:
            for elem in self.payload:
                if not isinstance(elem, Value):
                    raise TypeError("seq elements must be Values")

    def __repr__(self):
        return f"Value({render(self)})"


UNIT = Value(Tag.UNIT, None)
TRUE = Value(Tag.BOOLEAN, True)
FALSE = Value(Tag.BOOLEAN, False)


def item(token: str) -> Value:
    return Value(Tag.ITEM, token)


def rational(x) -> Value:
    # Accepts int, Fraction, or a "p/q" string; never float.
    if isinstance(x, float):
        raise TypeError("rational values must be exact, not float")
    return Value(Tag.RATIONAL, Fraction(x))


def boolean(b: bool) -> Value:
    return TRUE if b else FALSE


def report(name: str) -> Value:
    return Value(Tag.REPORT, name)


def seq(values) -> Value:
    return Value(Tag.SEQ, tuple(values))


def render(v: Value) -> str:
    """Canonical single-token text form, used in traces and workload files."""
    if v.tag is Tag.UNIT:
        return "_"
    if v.tag is Tag.BOOLEAN:
        return "true" if v.payload else "false"
    if v.tag is Tag.RATIONAL:
        f: Fraction = v.payload
        return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
    if v.tag is Tag.SEQ:
        return "(" + ",".join(render(e) for e in v.payload) + ")"
    return str(v.payload)


def render_params(params) -> str:
    return "[" + ",".join(render(v) for v in params) + "]"


def is_item_token(text: str) -> bool:
    # commas and parens are structural in container literals and seq
    # renderings, so item names must stay clear of them
    return bool(text) and all(c.isalnum() or c in "_.-" for c in text)


def parse_token(tag: Tag, text: str) -> Value:
    """Inverse of render for the literal tags a workload file may contain."""
    if tag is Tag.RATIONAL:
        try:
            return rational(Fraction(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad rational literal {text!r}") from exc
    if tag is Tag.BOOLEAN:
        if text == "true":
            return TRUE
        if text == "false":
            return FALSE
        raise ValueError(f"bad boolean literal {text!r}")
    if tag is Tag.ITEM:
        if not is_item_token(text):
            raise ValueError(f"bad item literal {text!r}")
        return item(text)
    raise ValueError(f"no literal syntax for {tag.value} parameters")
