"""Textual curriculum description language: parser and canonical serializer.

The language is line oriented; ``#`` starts a comment, blank lines are
ignored, and every declaration fits on one line:

    program "MSC-IS"
    module 50 level junior compulsory year 1 first
    module 60 level senior optional year 2
    constraint hard 50 -> 60
    constraint soft level:junior -> level:senior
    choose 2 of {60, 61, 62}
    rule max_per_year 2
    rule thesis_after 4

``level:`` endpoints expand to the pairwise constraints between all modules
of the two levels.  When the same edge ends up declared both hard and soft,
the hard one wins and the duplicate is dropped with a warning.

Parsing never aborts on the first problem: it recovers at line boundaries
and reports every error found, as :class:`ParseError` values with source
spans.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from .curriculum import (
    HARD,
    SOFT,
    ChoiceGroup,
    Curriculum,
    ModuleDef,
    PrecedenceConstraint,
    ProgramRules,
    curriculum_issues,
)

log = logging.getLogger(__name__)

__all__ = [
    "SourceSpan",
    "ParseError",
    "CurriculumSyntaxError",
    "ERROR_CODES",
    "parse_curriculum",
    "serialize_curriculum",
]

#: Every code a ParseError may carry.
ERROR_CODES = frozenset(
    {
        "missing-program",
        "unknown-keyword",
        "malformed-line",
        "bad-integer",
        "duplicate-module",
        "duplicate-rule",
        "undefined-module",
        "undefined-level",
        "no-modules",
        # validation findings surfaced through the same channel:
        "duplicate-code",
        "unknown-code",
        "self-precedence",
        "precedence-cycle",
        "compulsory-in-group",
        "bad-group-count",
        "bad-rule",
        "bad-year",
        "completion-arithmetic",
        "first-last-contradiction",
    }
)


@dataclass(frozen=True)
class SourceSpan:
    line: int  # 1-based
    column: int  # 1-based
    length: int


@dataclass(frozen=True)
class ParseError:
    span: SourceSpan
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.span.line}:{self.span.column}: {self.code}: {self.message}"


class CurriculumSyntaxError(ValueError):
    """Raised when a source text cannot be turned into a valid curriculum.

    ``errors`` holds every problem found, in source order.
    """

    def __init__(self, errors: list[ParseError]):
        self.errors = errors
        super().__init__("; ".join(str(e) for e in errors))


_TOKEN = re.compile(r'"[^"]*"|->|\{|\}|,|[A-Za-z0-9_.:\-]+')
_CODE = re.compile(r"[A-Za-z0-9_\-]+\Z")
_LEVEL_PREFIX = "level:"


@dataclass
class _Line:
    number: int
    text: str
    tokens: list[str]
    columns: list[int]

    def span(self, index: int | None = None) -> SourceSpan:
        if index is None or index >= len(self.tokens):
            return SourceSpan(self.number, 1, len(self.text))
        return SourceSpan(self.number, self.columns[index] + 1, len(self.tokens[index]))


def _tokenize(text: str) -> list[_Line]:
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        tokens, columns = [], []
        for match in _TOKEN.finditer(body):
            tokens.append(match.group(0))
            columns.append(match.start())
        if tokens:
            lines.append(_Line(number, raw.rstrip("\n"), tokens, columns))
    return lines


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.errors: list[ParseError] = []
        self.name: str | None = None
        self.modules: list[ModuleDef] = []
        self.module_lines: dict[str, int] = {}
        # raw declarations, resolved only after all modules are known so
        # forward references parse cleanly
        self.constraint_decls: list[tuple[str, str, str, _Line]] = []
        self.group_decls: list[tuple[list[str], int, _Line]] = []
        self.rules: dict[str, int] = {}

    def error(self, line: _Line | None, code: str, message: str, token: int | None = None):
        span = line.span(token) if line is not None else SourceSpan(1, 1, 0)
        self.errors.append(ParseError(span, code, message))

    # -- per-declaration parsers --------------------------------------------

    def parse_program(self, line: _Line):
        toks = line.tokens
        if len(toks) != 2 or not toks[1].startswith('"'):
            self.error(line, "malformed-line", 'expected: program "NAME"')
            return
        if self.name is not None:
            self.error(line, "malformed-line", "program declared twice")
            return
        self.name = toks[1].strip('"')

    def parse_module(self, line: _Line):
        toks = line.tokens
        if (
            len(toks) < 7
            or toks[2] != "level"
            or toks[4] not in ("compulsory", "optional")
            or toks[5] != "year"
        ):
            self.error(
                line,
                "malformed-line",
                "expected: module CODE level IDENT compulsory|optional year INT [first] [last]",
            )
            return
        code = toks[1]
        if not _CODE.match(code):
            self.error(line, "malformed-line", f"bad module code {code!r}", 1)
            return
        try:
            year = int(toks[6])
        except ValueError:
            self.error(line, "bad-integer", f"bad year {toks[6]!r}", 6)
            return
        flags = toks[7:]
        if any(f not in ("first", "last") for f in flags):
            self.error(line, "malformed-line", "trailing tokens must be 'first' or 'last'")
            return
        if code in self.module_lines:
            self.error(
                line,
                "duplicate-module",
                f"module {code!r} already declared on line {self.module_lines[code]}",
                1,
            )
            return
        self.module_lines[code] = line.number
        self.modules.append(
            ModuleDef(
                code=code,
                level=toks[3],
                compulsory=toks[4] == "compulsory",
                nominal_year=year,
                first_marker="first" in flags,
                last_marker="last" in flags,
            )
        )

    def parse_constraint(self, line: _Line):
        toks = line.tokens
        if len(toks) != 5 or toks[1] not in (HARD, SOFT) or toks[3] != "->":
            self.error(line, "malformed-line", "expected: constraint hard|soft FROM -> TO")
            return
        self.constraint_decls.append((toks[1], toks[2], toks[4], line))

    def parse_group(self, line: _Line):
        toks = line.tokens
        if len(toks) < 5 or toks[2] != "of" or toks[3] != "{" or toks[-1] != "}":
            self.error(line, "malformed-line", "expected: choose INT of {CODE, CODE, ...}")
            return
        try:
            count = int(toks[1])
        except ValueError:
            self.error(line, "bad-integer", f"bad count {toks[1]!r}", 1)
            return
        members = [t for t in toks[4:-1] if t != ","]
        if not members:
            self.error(line, "malformed-line", "empty choice group")
            return
        self.group_decls.append((members, count, line))

    def parse_rule(self, line: _Line):
        toks = line.tokens
        if len(toks) != 3 or toks[1] not in ("max_per_year", "thesis_after"):
            self.error(line, "malformed-line", "expected: rule max_per_year|thesis_after INT")
            return
        try:
            value = int(toks[2])
        except ValueError:
            self.error(line, "bad-integer", f"bad value {toks[2]!r}", 2)
            return
        if toks[1] in self.rules:
            self.error(line, "duplicate-rule", f"rule {toks[1]} declared twice", 1)
            return
        self.rules[toks[1]] = value

    # -- whole file ----------------------------------------------------------

    def expand_endpoint(self, endpoint: str, line: _Line, token: int) -> list[str]:
        if endpoint.startswith(_LEVEL_PREFIX):
            level = endpoint[len(_LEVEL_PREFIX):]
            codes = [m.code for m in self.modules if m.level == level]
            if not codes:
                self.error(line, "undefined-level", f"no modules with level {level!r}", token)
            return codes
        if endpoint not in self.module_lines:
            self.error(line, "undefined-module", f"unknown module {endpoint!r}", token)
            return []
        return [endpoint]

    def expand_constraints(self) -> tuple[PrecedenceConstraint, ...]:
        by_edge: dict[tuple[str, str], str] = {}
        order: list[tuple[str, str]] = []
        for kind, src, dst, line in self.constraint_decls:
            precedents = self.expand_endpoint(src, line, 2)
            antecedents = self.expand_endpoint(dst, line, 4)
            for p in precedents:
                for a in antecedents:
                    if p == a:
                        # level-to-same-level expansion skips self pairs
                        if src.startswith(_LEVEL_PREFIX) or dst.startswith(_LEVEL_PREFIX):
                            continue
                        self.error(line, "self-precedence", f"{p!r} cannot precede itself")
                        continue
                    edge = (p, a)
                    if edge in by_edge:
                        previous = by_edge[edge]
                        stronger = HARD if HARD in (previous, kind) else SOFT
                        if previous != stronger:
                            by_edge[edge] = stronger
                        log.warning(
                            "line %d: duplicate constraint %s -> %s; keeping %s",
                            line.number,
                            p,
                            a,
                            stronger,
                        )
                        continue
                    by_edge[edge] = kind
                    order.append(edge)
        return tuple(
            PrecedenceConstraint(kind=by_edge[e], precedent=e[0], antecedent=e[1])
            for e in order
        )

    def run(self) -> Curriculum:
        lines = _tokenize(self.text)
        handlers = {
            "program": self.parse_program,
            "module": self.parse_module,
            "constraint": self.parse_constraint,
            "choose": self.parse_group,
            "rule": self.parse_rule,
        }
        for line in lines:
            handler = handlers.get(line.tokens[0])
            if handler is None:
                self.error(line, "unknown-keyword", f"unknown keyword {line.tokens[0]!r}", 0)
                continue
            handler(line)

        if not lines or not self.modules:
            self.error(None, "no-modules", "no modules declared")
        if self.name is None:
            if lines:
                self.error(lines[0], "missing-program", 'missing program "NAME" declaration')
            self.name = ""

        constraints = self.expand_constraints()
        groups = []
        for members, count, line in self.group_decls:
            for m in members:
                if m not in self.module_lines:
                    self.error(line, "undefined-module", f"unknown module {m!r} in choice group")
            groups.append(ChoiceGroup(members=frozenset(members), required_count=count))
        curriculum = Curriculum(
            name=self.name,
            modules=tuple(sorted(self.modules, key=lambda m: m.code)),
            constraints=tuple(
                sorted(constraints, key=lambda c: (c.precedent, c.antecedent, c.kind))
            ),
            choice_groups=tuple(
                sorted(groups, key=lambda g: (sorted(g.members), g.required_count))
            ),
            rules=ProgramRules(
                max_modules_per_year=self.rules.get("max_per_year", 1),
                modules_required_for_thesis=self.rules.get(
                    "thesis_after", sum(1 for m in self.modules if m.compulsory)
                ),
            ),
        )

        if not self.errors:
            for issue in curriculum_issues(curriculum):
                if issue.severity == "warning":
                    log.warning("curriculum %s: %s: %s", self.name, issue.code, issue.message)
                    continue
                line = self.module_lines.get(issue.subject)
                span = SourceSpan(line, 1, 0) if line else SourceSpan(1, 1, 0)
                self.errors.append(ParseError(span, issue.code, issue.message))

        if self.errors:
            raise CurriculumSyntaxError(sorted(self.errors, key=lambda e: (e.span.line, e.span.column)))
        return curriculum


def parse_curriculum(text: str) -> Curriculum:
    """Parse source text into a validated curriculum.

    Raises :class:`CurriculumSyntaxError` carrying every lexical, syntactic,
    and validation error found; on success the returned curriculum is
    canonically ordered and passes :func:`validate_curriculum`.
    """
    return _Parser(text).run()


def serialize_curriculum(c: Curriculum) -> str:
    """Render a curriculum as canonical source text.

    Declarations come out sorted (modules, then constraints, then groups,
    then rules) so that serialization is idempotent and
    ``parse(serialize(c))`` structurally equals ``c``.
    """
    out = [f'program "{c.name}"']
    for m in sorted(c.modules, key=lambda m: m.code):
        parts = [
            "module",
            m.code,
            "level",
            m.level,
            "compulsory" if m.compulsory else "optional",
            "year",
            str(m.nominal_year),
        ]
        if m.first_marker:
            parts.append("first")
        if m.last_marker:
            parts.append("last")
        out.append(" ".join(parts))
    for con in sorted(c.constraints, key=lambda x: (x.precedent, x.antecedent, x.kind)):
        out.append(f"constraint {con.kind} {con.precedent} -> {con.antecedent}")
    for g in sorted(c.choice_groups, key=lambda g: (sorted(g.members), g.required_count)):
        members = ", ".join(sorted(g.members))
        out.append(f"choose {g.required_count} of {{{members}}}")
    out.append(f"rule max_per_year {c.rules.max_modules_per_year}")
    out.append(f"rule thesis_after {c.rules.modules_required_for_thesis}")
    return "\n".join(out) + "\n"
