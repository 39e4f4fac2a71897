"""Parser and emitter for a documented subset of the DSS circuit format.

Supported directives (case-insensitive): New Circuit, New Line, New
Linecode, New Load, New Capacitor, New Reactor, New Transformer, New
Regcontrol, New Loadshape, Redirect/Compile, Set, Solve. Unknown
directive classes are collected as warnings, never failures, so real
files degrade gracefully. The full grammar is documented in
docs/dss_subset.md.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field


class DssSyntaxError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UnresolvedRedirectError(FileNotFoundError):
    pass


class UndefinedLineCodeError(KeyError):
    pass


# phase node suffix -> phase letter (".0" grounds/neutrals are dropped)
_NODE_PHASE = {"1": "a", "2": "b", "3": "c"}

UNIT_METERS = {
    "ft": 0.3048,
    "kft": 304.8,
    "mi": 1609.344,
    "m": 1.0,
    "km": 1000.0,
    "none": 1.0,
}


@dataclass
class Directive:
    kind: str
    name: str = ""
    params: dict = field(default_factory=dict)
    line_no: int = 0

    def emit(self) -> str:
        head = {
            "circuit": f"New Circuit.{self.name}",
            "line": f"New Line.{self.name}",
            "linecode": f"New Linecode.{self.name}",
            "load": f"New Load.{self.name}",
            "capacitor": f"New Capacitor.{self.name}",
            "reactor": f"New Reactor.{self.name}",
            "transformer": f"New Transformer.{self.name}",
            "regcontrol": f"New Regcontrol.{self.name}",
            "loadshape": f"New Loadshape.{self.name}",
            "redirect": f"Redirect {self.name}",
            "set": "Set",
            "solve": "Solve",
        }[self.kind]
        parts = [head]
        for key, val in self.params.items():
            parts.append(f"{key}={_emit_value(val)}")
        return " ".join(parts)


def _emit_value(val) -> str:
    if isinstance(val, list):
        if val and isinstance(val[0], list):
            rows = " | ".join(" ".join(_num(x) for x in row) for row in val)
            return f"({rows})"
        return "(" + " ".join(_num(x) for x in val) + ")"
    if isinstance(val, float):
        return _num(val)
    return str(val)


def _num(x) -> str:
    if isinstance(x, float) and x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x) if isinstance(x, float) else str(x)


@dataclass
class ParseResult:
    directives: list[Directive]
    warnings: list[str]


def parse_bus_ref(token: str) -> tuple[str, tuple[str, ...]]:
    """Split 'bus.1.2general' node syntax into (bus id, phase letters)."""
    parts = str(token).split(".")
    bus = parts[0].lower()
    phases = tuple(
        _NODE_PHASE[p] for p in parts[1:] if p in _NODE_PHASE
    )
    return bus, phases


def _strip_comment(line: str) -> str:
    # '!' and '//' start comments; we do not support them inside values
    for marker in ("//", "!"):
        pos = line.find(marker)
        if pos >= 0:
            line = line[:pos]
    return line.strip()


def _split_tokens(line: str, line_no: int) -> list[str]:
    """Whitespace tokens, keeping (...) and "..." groups intact."""
    tokens = []
    buf = []
    depth = 0
    quote = False
    for ch in line:
        if ch == '"':
            quote = not quote
            buf.append(ch)
            continue
        if not quote:
            if ch in "([":
                depth += 1
            elif ch in ")]":
                depth -= 1
                if depth < 0:
                    raise DssSyntaxError("unbalanced parenthesis", line_no)
            if ch.isspace() and depth == 0:
                if buf:
                    tokens.append("".join(buf))
                    buf = []
                continue
        buf.append(ch)
    if depth != 0:
        raise DssSyntaxError("unbalanced parenthesis", line_no)
    if quote:
        raise DssSyntaxError("unterminated quote", line_no)
    if buf:
        tokens.append("".join(buf))
    return tokens


def _parse_value(raw: str, line_no: int):
    raw = raw.strip()
    if raw.startswith('"') and raw.endswith('"'):
        return raw[1:-1]
    if raw.startswith("(") or raw.startswith("["):
        inner = raw[1:-1]
        rows = inner.split("|")
        parsed_rows = []
        for row in rows:
            entries = [e for e in re.split(r"[,\s]+", row.strip()) if e]
            parsed_rows.append([_parse_scalar(e, line_no) for e in entries])
        if len(parsed_rows) == 1:
            return parsed_rows[0]
        return parsed_rows
    return _parse_scalar(raw, line_no)


def _parse_scalar(raw: str, line_no: int):
    try:
        val = float(raw)
    except ValueError:
        return raw  # bare identifier (bus name, file name, ...)
    return val


_KNOWN_CLASSES = {
    "circuit",
    "line",
    "linecode",
    "load",
    "capacitor",
    "reactor",
    "transformer",
    "regcontrol",
    "loadshape",
}


def parse_dss_subset(text: str) -> ParseResult:
    """Parse DSS-subset text into circuit-building directives.

    Unknown directive classes yield a warning entry; '~' lines continue
    the previous New directive with more parameters.
    """
    directives: list[Directive] = []
    warnings: list[str] = []
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw_line)
        if not line:
            continue
        tokens = _split_tokens(line, line_no)
        if not tokens:
            continue
        head = tokens[0].lower()

        if head == "~":
            if not directives or directives[-1].kind in ("set", "solve", "redirect"):
                raise DssSyntaxError("continuation with no preceding directive", line_no)
            _merge_params(directives[-1], tokens[1:], line_no)
            continue

        if head in ("redirect", "compile"):
            if len(tokens) < 2:
                raise DssSyntaxError("redirect needs a file name", line_no)
            directives.append(
                Directive("redirect", tokens[1].strip('"'), line_no=line_no)
            )
            continue

        if head == "set":
            d = Directive("set", line_no=line_no)
            _merge_params(d, tokens[1:], line_no)
            directives.append(d)
            continue

        if head in ("solve", "calcvoltagebases", "calcv"):
            directives.append(Directive("solve", head, line_no=line_no))
            continue

        if head in ("new", "edit"):
            if len(tokens) < 2 or "." not in tokens[1]:
                raise DssSyntaxError("expected Class.Name after New", line_no)
            cls, _, name = tokens[1].partition(".")
            cls = cls.lower()
            if cls not in _KNOWN_CLASSES:
                warnings.append(
                    f"line {line_no}: unsupported directive class "
                    f"'{cls}' ignored"
                )
                continue
            d = Directive(cls, name.lower(), line_no=line_no)
            _merge_params(d, tokens[2:], line_no)
            directives.append(d)
            continue

        warnings.append(f"line {line_no}: unrecognized directive {tokens[0]!r} ignored")
    return ParseResult(directives, warnings)


def _merge_params(directive: Directive, tokens: list[str], line_no: int) -> None:
    for tok in tokens:
        if "=" not in tok:
            raise DssSyntaxError(f"expected key=value, got {tok!r}", line_no)
        key, _, val = tok.partition("=")
        directive.params[key.strip().lower()] = _parse_value(val, line_no)


def emit_dss(directives: list[Directive]) -> str:
    return "\n".join(d.emit() for d in directives) + "\n"
