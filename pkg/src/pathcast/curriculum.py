"""Domain model for degree programs: modules, precedence constraints, and
the admissibility rules that govern yearly enrollment choices.

A curriculum describes the taught modules of a program, hard/soft precedence
constraints between them, "choose k of" groups of optional modules, and two
global rules: the maximum number of modules a student may attend per year and
the number of modules that must be completed before the thesis.

All values are immutable after construction; every operation here is a pure
function, so concurrent use needs no synchronization.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

HARD = "hard"
SOFT = "soft"

__all__ = [
    "HARD",
    "SOFT",
    "ModuleDef",
    "PrecedenceConstraint",
    "ChoiceGroup",
    "ProgramRules",
    "Curriculum",
    "Violation",
    "InvalidCurriculumError",
    "UnknownModuleError",
    "curriculum_issues",
    "validate_curriculum",
    "completion_sets",
    "admissible_selections",
]


@dataclass(frozen=True)
class ModuleDef:
    """One taught module (the basic educational unit of the program)."""

    code: str
    level: str
    compulsory: bool
    nominal_year: int
    first_marker: bool = False
    last_marker: bool = False


@dataclass(frozen=True)
class PrecedenceConstraint:
    """Directed precedence between two modules.

    ``hard``: the precedent must be completed in a strictly earlier year
    before the antecedent may be enrolled.  ``soft``: the precedent must have
    started no later than the antecedent (same-year co-enrollment allowed).
    """

    kind: str  # HARD or SOFT
    precedent: str
    antecedent: str


@dataclass(frozen=True)
class ChoiceGroup:
    """Select exactly ``required_count`` modules out of ``members``."""

    members: frozenset[str]
    required_count: int


@dataclass(frozen=True)
class ProgramRules:
    max_modules_per_year: int
    modules_required_for_thesis: int


@dataclass(frozen=True)
class Violation:
    """One validation finding with a machine-readable code.

    ``severity`` is ``"error"`` for invariant violations and ``"warning"``
    for legal but suspicious configurations.
    """

    code: str
    message: str
    subject: str = ""
    severity: str = "error"


class InvalidCurriculumError(ValueError):
    """Raised when a curriculum violates a structural invariant.

    Carries the complete list of violations, not just the first one.
    """

    def __init__(self, errors: list[Violation]):
        self.errors = errors
        summary = "; ".join(f"{v.code}: {v.message}" for v in errors)
        super().__init__(f"invalid curriculum: {summary}")


class UnknownModuleError(ValueError):
    """Raised when a module code does not exist in the curriculum."""


@dataclass(frozen=True, eq=False)
class Curriculum:
    """A validated program description.

    Equality is structural and order-insensitive: two curricula are equal
    when they declare the same modules, constraints, groups, and rules,
    regardless of declaration order.
    """

    name: str
    modules: tuple[ModuleDef, ...]
    constraints: tuple[PrecedenceConstraint, ...]
    choice_groups: tuple[ChoiceGroup, ...]
    rules: ProgramRules

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Curriculum):
            return NotImplemented
        return (
            self.name == other.name
            and set(self.modules) == set(other.modules)
            and set(self.constraints) == set(other.constraints)
            and set(self.choice_groups) == set(other.choice_groups)
            and self.rules == other.rules
        )

    def __hash__(self) -> int:
        return hash(
            (
                self.name,
                frozenset(self.modules),
                frozenset(self.constraints),
                frozenset(self.choice_groups),
                self.rules,
            )
        )

    # -- convenience lookups -------------------------------------------------

    def module(self, code: str) -> ModuleDef:
        for m in self.modules:
            if m.code == code:
                return m
        raise UnknownModuleError(f"unknown module code {code!r}")

    @property
    def codes(self) -> frozenset[str]:
        return frozenset(m.code for m in self.modules)

    @property
    def compulsory_codes(self) -> frozenset[str]:
        return frozenset(m.code for m in self.modules if m.compulsory)

    @property
    def optional_codes(self) -> frozenset[str]:
        return frozenset(m.code for m in self.modules if not m.compulsory)

    @property
    def first_markers(self) -> frozenset[str]:
        return frozenset(m.code for m in self.modules if m.first_marker)

    @property
    def last_markers(self) -> frozenset[str]:
        return frozenset(m.code for m in self.modules if m.last_marker)

    def precedents(self, code: str, kind: str) -> frozenset[str]:
        return frozenset(
            c.precedent for c in self.constraints if c.kind == kind and c.antecedent == code
        )


def _constraint_cycle(c: Curriculum) -> list[str] | None:
    """Find one cycle in the combined hard+soft precedence graph, or None."""
    adjacency: dict[str, list[str]] = {m.code: [] for m in c.modules}
    for con in c.constraints:
        if con.precedent in adjacency and con.antecedent in adjacency:
            adjacency[con.precedent].append(con.antecedent)

    WHITE, GRAY, BLACK = 0, 1, 2
    color = {code: WHITE for code in adjacency}
    stack: list[str] = []

    def visit(node: str) -> list[str] | None:
        color[node] = GRAY
        stack.append(node)
        for nxt in adjacency[node]:
            if color[nxt] == GRAY:
                return stack[stack.index(nxt):]
            if color[nxt] == WHITE:
                cycle = visit(nxt)
                if cycle is not None:
                    return cycle
        stack.pop()
        color[node] = BLACK
        return None

    for code in sorted(adjacency):
        if color[code] == WHITE:
            cycle = visit(code)
            if cycle is not None:
                return cycle
    return None


def curriculum_issues(c: Curriculum) -> list[Violation]:
    """Check every structural invariant and return all findings.

    Errors make the curriculum unusable; warnings flag configurations that
    are permitted but likely unintended (e.g. overlapping choice groups).
    """
    issues: list[Violation] = []

    if not c.modules:
        issues.append(Violation("no-modules", "curriculum declares no modules"))
        return issues

    seen: set[str] = set()
    for m in c.modules:
        if m.code in seen:
            issues.append(
                Violation("duplicate-code", f"module code {m.code!r} declared twice", m.code)
            )
        seen.add(m.code)
        if m.first_marker and m.last_marker:
            issues.append(
                Violation(
                    "first-last-contradiction",
                    f"module {m.code!r} cannot be both a first and a last module",
                    m.code,
                )
            )
        if m.nominal_year < 1:
            issues.append(
                Violation("bad-year", f"module {m.code!r} has nominal year < 1", m.code)
            )

    codes = {m.code for m in c.modules}
    for con in c.constraints:
        for endpoint in (con.precedent, con.antecedent):
            if endpoint not in codes:
                issues.append(
                    Violation(
                        "unknown-code",
                        f"constraint references unknown module {endpoint!r}",
                        endpoint,
                    )
                )
        if con.precedent == con.antecedent:
            issues.append(
                Violation(
                    "self-precedence",
                    f"module {con.precedent!r} cannot precede itself",
                    con.precedent,
                )
            )

    cycle = _constraint_cycle(c)
    if cycle is not None:
        issues.append(
            Violation(
                "precedence-cycle",
                "precedence cycle: " + ",".join(sorted(cycle)),
                ",".join(sorted(cycle)),
            )
        )

    optional = {m.code for m in c.modules if not m.compulsory}
    for g in c.choice_groups:
        for member in g.members:
            if member not in codes:
                issues.append(
                    Violation(
                        "unknown-code",
                        f"choice group references unknown module {member!r}",
                        member,
                    )
                )
            elif member not in optional:
                issues.append(
                    Violation(
                        "compulsory-in-group",
                        f"choice group member {member!r} is a compulsory module",
                        member,
                    )
                )
        if g.required_count > len(g.members):
            issues.append(
                Violation(
                    "bad-group-count",
                    f"cannot choose {g.required_count} of {len(g.members)} modules",
                    ",".join(sorted(g.members)),
                )
            )
        if g.required_count < 0:
            issues.append(
                Violation("bad-group-count", "negative choice count", str(g.required_count))
            )

    for a, b in combinations(c.choice_groups, 2):
        overlap = a.members & b.members
        if overlap:
            issues.append(
                Violation(
                    "overlapping-groups",
                    "choice groups share modules "
                    + ",".join(sorted(overlap))
                    + "; optional-precedence waivers may behave unexpectedly",
                    ",".join(sorted(overlap)),
                    severity="warning",
                )
            )

    if c.rules.max_modules_per_year < 1:
        issues.append(Violation("bad-rule", "max modules per year must be >= 1"))
    if c.rules.modules_required_for_thesis < 1:
        issues.append(Violation("bad-rule", "thesis threshold must be >= 1"))

    n_compulsory = sum(1 for m in c.modules if m.compulsory)
    chosen = sum(g.required_count for g in c.choice_groups)
    if n_compulsory + chosen != c.rules.modules_required_for_thesis:
        issues.append(
            Violation(
                "completion-arithmetic",
                f"{n_compulsory} compulsory + {chosen} chosen modules != "
                f"thesis threshold {c.rules.modules_required_for_thesis}",
            )
        )

    if len(c.first_markers) > c.rules.max_modules_per_year:
        issues.append(
            Violation(
                "too-many-first",
                "more first-year-mandatory modules than the yearly limit allows",
                ",".join(sorted(c.first_markers)),
                severity="warning",
            )
        )

    return issues


def validate_curriculum(c: Curriculum) -> Curriculum:
    """Return ``c`` unchanged if valid, else raise InvalidCurriculumError
    carrying every error-severity violation."""
    errors = [v for v in curriculum_issues(c) if v.severity == "error"]
    if errors:
        raise InvalidCurriculumError(errors)
    return c


def completion_sets(c: Curriculum) -> frozenset[frozenset[str]]:
    """All module sets whose completion grants thesis eligibility.

    Each set is the compulsory modules plus exactly ``required_count``
    members of every choice group; all sets have exactly
    ``modules_required_for_thesis`` elements.
    """
    base = c.compulsory_codes
    per_group = [
        [frozenset(pick) for pick in combinations(sorted(g.members), g.required_count)]
        for g in c.choice_groups
    ]
    sets: set[frozenset[str]] = set()
    for picks in product(*per_group):
        candidate = base.union(*picks) if picks else base
        if len(candidate) == c.rules.modules_required_for_thesis:
            sets.add(candidate)
    return frozenset(sets)


def admissible_selections(
    completed: frozenset[str] | set[str],
    current_year_index: int,
    c: Curriculum,
) -> frozenset[frozenset[str]]:
    """Every module set a student with ``completed`` behind them may enroll
    in for year ``current_year_index``.

    A candidate selection D of not-yet-taken modules (1 <= |D| <= yearly
    limit) is admissible when:

    * hard precedents of every d in D are already completed;
    * soft precedents of every d in D are in ``completed`` or D itself,
      unless the precedent is optional and absent from the completion set
      being pursued (then both the precedent and the waiver vanish from the
      final selection);
    * in year 1, every first-year-mandatory module is part of D;
    * a last-marker module only appears once ``completed | D`` reaches the
      thesis threshold;
    * ``completed | D`` still fits inside at least one completion set.

    The soft waiver and the completion-set membership are checked jointly:
    one witness completion set must satisfy both.
    """
    completed = frozenset(completed)
    unknown = completed - c.codes
    if unknown:
        raise UnknownModuleError(
            "completed set contains unknown module codes: " + ",".join(sorted(unknown))
        )

    targets = completion_sets(c)
    remaining = sorted(c.codes - completed)
    first_markers = c.first_markers
    last_markers = c.last_markers
    threshold = c.rules.modules_required_for_thesis

    result: set[frozenset[str]] = set()
    for size in range(1, c.rules.max_modules_per_year + 1):
        for combo in combinations(remaining, size):
            d = frozenset(combo)
            union = completed | d

            if current_year_index == 1 and not first_markers <= d:
                continue
            if d & last_markers and len(union) < threshold:
                continue
            if any(not c.precedents(m, HARD) <= completed for m in d):
                continue

            # Joint witness check: some completion set must contain the
            # running union and excuse every unmet soft precedent.
            witness = False
            for s in targets:
                if not union <= s:
                    continue
                if all(
                    p in union or (p in c.optional_codes and p not in s)
                    for m in d
                    for p in c.precedents(m, SOFT)
                ):
                    witness = True
                    break
            if witness:
                result.add(d)

    return frozenset(result)
