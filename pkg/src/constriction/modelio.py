"""JSON model, assessment and opinion files; deterministic reports.

Every file carries ``"schema": 1``.  Probabilities are JSON integers or
strings holding exact rationals (``"1/2"``, ``"0.25"``); JSON floats are
rejected because their binary value is not the decimal the author wrote.

A model file::

    {"schema": 1,
     "atoms": ["HH", "HT", "TH", "TT"],
     "credal": [["0", "1/2", "1/2", "0"], ["1/2", "0", "0", "1/2"]],
     "events": {"H1": ["HH", "HT"], "H2": ["HH", "TH"]},
     "partitions": {"first": ["H1", "~H1"]}}

with exactly one of ``credal``, ``mass`` (``{"a|b": "1/2", ...}``) or
``measure``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .capacity import MassFunction
from .core import CredalSet, Event, Measure, Partition, ProbInterval, StateSpace, as_rational, format_rational, validate_partition
from .errors import ConstrictionError, ValidationError
from .extension import Assessment, general_position
from .pooling import WeightMatrix
from .updating import TransferFunction

SCHEMA = 1
REPRESENTATIONS = ("credal", "mass", "measure")


class ModelError(ValidationError):
    """Input file problem; ``field`` is a path such as ``credal[1][2]``."""


def _fail(path: str, message: str):
    raise ModelError(f"{path}: {message}", field=path)


def read_json(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}", field=f"line {exc.lineno}")
    if not isinstance(data, dict):
        _fail("$", "top level must be an object")
    if data.get("schema") != SCHEMA:
        _fail("schema", f"expected {SCHEMA}, got {data.get('schema')!r}")
    return data


def parse_rational(value, path: str) -> Fraction:
    if isinstance(value, float):
        _fail(path, f"float {value!r} is not exact; write it as a string such as \"1/2\"")
    try:
        return as_rational(value)
    except (ValidationError, ValueError, ZeroDivisionError) as exc:
        _fail(path, f"malformed rational {value!r} ({exc})")


def _labels(space: StateSpace, items, path: str) -> Event:
    if isinstance(items, str):
        items = [s for s in items.split("|") if s]
    unknown = [a for a in items if a not in space.atoms]
    if unknown:
        _fail(path, f"unknown atoms {unknown}")
    return space.event(items)


# -- event expressions --------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\()|(\))|(\|)|(&)|(~)|(\{[^}]*\})|([^\s()|&~{}]+))")


class _Parser:
    """``expr := term ('|' term)*``; ``term := factor ('&' factor)*``;
    ``factor := '~' factor | '(' expr ')' | '{a,b}' | name``."""

    def __init__(self, text: str, space: StateSpace, names: dict):
        self.tokens = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ValidationError(f"cannot parse event expression {text!r} at {pos}")
            self.tokens.append(next((i, g) for i, g in enumerate(m.groups()) if g is not None))
            pos = m.end()
        self.i = 0
        self.space = space
        self.names = names
        self.text = text

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> Event:
        ev = self.expr()
        if self.i != len(self.tokens):
            raise ValidationError(f"trailing input in event expression {self.text!r}")
        return ev

    def expr(self):
        ev = self.term()
        while self.peek() == 2:
            self.take()
            ev = ev | self.term()
        return ev

    def term(self):
        ev = self.factor()
        while self.peek() == 3:
            self.take()
            ev = ev & self.factor()
        return ev

    def factor(self):
        kind = self.peek()
        if kind is None:
            raise ValidationError(f"unexpected end of event expression {self.text!r}")
        kind, text = self.take()
        if kind == 4:
            return ~self.factor()
        if kind == 0:
            ev = self.expr()
            if self.peek() != 1:
                raise ValidationError(f"unbalanced parenthesis in {self.text!r}")
            self.take()
            return ev
        if kind == 5:
            items = [s.strip() for s in text[1:-1].split(",") if s.strip()]
            return _labels(self.space, items, "event")
        if kind == 6:
            if text in self.names:
                return self.names[text]
            if text in self.space.atoms:
                return self.space.event([text])
            raise ValidationError(f"unknown event or atom {text!r}")
        raise ValidationError(f"unexpected token {text!r} in {self.text!r}")


def parse_event(text: str, space: StateSpace, names: Optional[dict] = None) -> Event:
    """Parse ``H1 & ~H2``, ``{HH,TT}``, ``A|B`` and similar expressions."""
    return _Parser(text, space, names or {}).parse()


def parse_partition(text: str, space: StateSpace, names: Optional[dict] = None, partitions: Optional[dict] = None) -> Partition:
    """A named partition, or block expressions separated by ``;``."""
    if partitions and text in partitions:
        return partitions[text]
    blocks = [parse_event(b, space, names) for b in text.split(";") if b.strip()]
    return validate_partition(space, blocks)


# -- model files --------------------------------------------------------------


@dataclass
class ModelFile:
    space: StateSpace
    kind: str
    state: object
    events: dict = field(default_factory=dict)
    partitions: dict = field(default_factory=dict)

    def event(self, text: str) -> Event:
        return parse_event(text, self.space, self.events)

    def partition(self, text: str) -> Partition:
        return parse_partition(text, self.space, self.events, self.partitions)


def _space(data: dict) -> StateSpace:
    atoms = data.get("atoms")
    if not isinstance(atoms, list) or not atoms or not all(isinstance(a, str) for a in atoms):
        _fail("atoms", "must be a nonempty list of strings")
    try:
        return StateSpace(tuple(atoms))
    except ConstrictionError as exc:
        _fail("atoms", str(exc))


def _measure(space: StateSpace, row, path: str) -> Measure:
    if not isinstance(row, list) or len(row) != space.n:
        _fail(path, f"must list {space.n} probabilities")
    weights = [parse_rational(v, f"{path}[{i}]") for i, v in enumerate(row)]
    try:
        return Measure(space, tuple(weights))
    except ValidationError as exc:
        _fail(path, str(exc))


def _named(space: StateSpace, data: dict) -> tuple:
    events = {}
    for name, items in (data.get("events") or {}).items():
        events[name] = _labels(space, items, f"events.{name}")
    partitions = {}
    for name, blocks in (data.get("partitions") or {}).items():
        path = f"partitions.{name}"
        if not isinstance(blocks, list):
            _fail(path, "must be a list of blocks")
        parsed = []
        for j, b in enumerate(blocks):
            try:
                parsed.append(
                    parse_event(b, space, events) if isinstance(b, str) else _labels(space, b, f"{path}[{j}]")
                )
            except ValidationError as exc:
                _fail(f"{path}[{j}]", str(exc))
        try:
            partitions[name] = validate_partition(space, parsed)
        except ValidationError as exc:
            _fail(f"{path}[{exc.field}]" if isinstance(exc.field, int) else path, str(exc))
    return events, partitions


def load_model_data(data: dict) -> ModelFile:
    space = _space(data)
    present = [k for k in REPRESENTATIONS if k in data]
    if len(present) != 1:
        _fail("$", f"need exactly one of {', '.join(REPRESENTATIONS)}; found {present or 'none'}")
    kind = present[0]
    body = data[kind]
    if kind == "credal":
        if not isinstance(body, list) or not body:
            _fail("credal", "must be a nonempty list of vertices")
        state = CredalSet(space, tuple(_measure(space, r, f"credal[{j}]") for j, r in enumerate(body)))
    elif kind == "measure":
        state = CredalSet.singleton(_measure(space, body, "measure"))
    else:
        if not isinstance(body, dict):
            _fail("mass", "must map focal elements such as \"a|b\" to masses")
        masses = {}
        for key, v in body.items():
            ev = _labels(space, key, f"mass.{key}")
            if ev.mask in masses:
                _fail(f"mass.{key}", "focal element listed twice")
            masses[ev.mask] = parse_rational(v, f"mass.{key}")
        state = MassFunction(space, masses)
        problems = state.violations()
        if problems:
            label, msg = problems[0]
            raise ModelError(f"mass: property ({label}) violated: {msg}", field="mass")
    events, partitions = _named(space, data)
    return ModelFile(space, kind, state, events, partitions)


def parse_model(path) -> ModelFile:
    return load_model_data(read_json(path))


# -- assessments, opinions, weights, transfers --------------------------------


@dataclass
class AssessmentFile:
    space: StateSpace
    events: dict
    items: list  # (name, Fraction)
    target: Optional[str]

    def assessment(self, target: Optional[str] = None) -> Assessment:
        text = target or self.target
        if not text:
            raise ModelError("target: no target event given", field="target")
        return Assessment(
            tuple(self.events[n] for n, _ in self.items),
            tuple(p for _, p in self.items),
            parse_event(text, self.space, self.events),
        )


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def parse_assessment(path, target: Optional[str] = None) -> AssessmentFile:
    """Assessment file: ``{"schema": 1, "assessment": [{"event": "A", "prob": "2/5"}, ...]}``.

    With ``atoms`` and ``events`` the events are given explicitly; without
    them, the named events (those assessed and those in the target) are in
    general position and the atoms are their constituents.
    """
    data = read_json(path)
    rows = data.get("assessment")
    if not isinstance(rows, list):
        _fail("assessment", "must be a list of {event, prob} objects")
    items = []
    for j, row in enumerate(rows):
        if not isinstance(row, dict) or "event" not in row or "prob" not in row:
            _fail(f"assessment[{j}]", "needs 'event' and 'prob'")
        items.append((row["event"], parse_rational(row["prob"], f"assessment[{j}].prob")))
    target = target or data.get("target")
    if "atoms" in data:
        space = _space(data)
        events, _ = _named(space, data)
        for j, (name, _) in enumerate(items):
            if name not in events:
                try:
                    events[name] = parse_event(name, space, events)
                except ValidationError as exc:
                    _fail(f"assessment[{j}].event", str(exc))
    else:
        names = []
        for name, _ in items:
            names.extend(_NAME.findall(name))
        if target:
            names.extend(_NAME.findall(target))
        names = list(dict.fromkeys(names))
        space, evs = general_position(names)
        events = dict(zip(names, evs))
        for j, (name, _) in enumerate(items):
            if name not in events:
                events[name] = parse_event(name, space, events)
    if any(not 0 <= p <= 1 for _, p in items):
        j = next(j for j, (_, p) in enumerate(items) if not 0 <= p <= 1)
        _fail(f"assessment[{j}].prob", "must lie in [0, 1]")
    return AssessmentFile(space, events, items, target)


def parse_weights(path) -> WeightMatrix:
    data = read_json(path)
    rows = data.get("weights")
    if not isinstance(rows, list) or not rows:
        _fail("weights", "must be a nonempty list of rows")
    parsed = []
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            _fail(f"weights[{i}]", "must be a list")
        parsed.append([parse_rational(v, f"weights[{i}][{j}]") for j, v in enumerate(row)])
    try:
        return WeightMatrix(parsed)
    except ValidationError as exc:
        _fail(f"weights[{exc.field}]" if exc.field is not None else "weights", str(exc))


@dataclass
class OpinionFile:
    space: StateSpace
    opinions: tuple
    events: dict

    def event(self, text: str) -> Event:
        return parse_event(text, self.space, self.events)


def parse_opinions(path) -> OpinionFile:
    data = read_json(path)
    space = _space(data)
    rows = data.get("opinions")
    if not isinstance(rows, list) or not rows:
        _fail("opinions", "must be a nonempty list of measures")
    opinions = tuple(_measure(space, r, f"opinions[{i}]") for i, r in enumerate(rows))
    events, _ = _named(space, data)
    return OpinionFile(space, opinions, events)


def parse_transfer(path, space: StateSpace, evidence: Event) -> TransferFunction:
    """``{"schema": 1, "transfer": [{"from": "a|c", "to": "a", "value": "1"}, ...]}``.

    ``"from": ""`` denotes the empty set.  An optional ``"default"`` names a
    built-in transfer that supplies every source set not listed.
    """
    data = read_json(path)
    rows = data.get("transfer")
    if not isinstance(rows, list):
        _fail("transfer", "must be a list of {from, to, value} objects")
    table = {}
    for j, row in enumerate(rows):
        p = f"transfer[{j}]"
        if not isinstance(row, dict) or not {"from", "to", "value"} <= set(row):
            _fail(p, "needs 'from', 'to' and 'value'")
        x = _labels(space, row["from"], f"{p}.from").mask
        b = _labels(space, row["to"], f"{p}.to").mask
        table[(b, x)] = table.get((b, x), 0) + parse_rational(row["value"], f"{p}.value")
    default = data.get("default")
    if default is not None:
        try:
            base = TransferFunction.builtin(default, evidence)
        except ValidationError as exc:
            _fail("default", str(exc))
        listed = {x for _, x in table}
        for (b, x), v in base.table.items():
            if x not in listed:
                table[(b, x)] = v
    return TransferFunction(evidence, table)


# -- reports -------------------------------------------------------------------

DISPLAY_DIGITS = 12
DISPLAY_NOTE = "decimal renderings carry 12 significant digits, display only"


def decimal(value: Fraction) -> str:
    with localcontext() as ctx:
        ctx.prec = DISPLAY_DIGITS
        d = Decimal(value.numerator) / Decimal(value.denominator)
    if d == d.to_integral_value():
        return str(int(d))
    return format(d.normalize(), "g")


def rational(value: Fraction) -> dict:
    return {"exact": format_rational(value), "decimal": decimal(value)}


def interval(iv: ProbInterval) -> dict:
    return {"lo": rational(iv.lo), "hi": rational(iv.hi)}


def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
