"""Seeded random generation of valid curricula for round-trip tests."""

from __future__ import annotations

import random

from pathcast.curriculum import (
    ChoiceGroup,
    Curriculum,
    ModuleDef,
    PrecedenceConstraint,
    ProgramRules,
    validate_curriculum,
)

_LEVELS = ["junior", "middle", "senior"]


def random_curriculum(seed: int) -> Curriculum:
    rng = random.Random(seed)
    n_compulsory = rng.randint(1, 3)
    n_groups = rng.randint(0, 2)
    group_sizes = [rng.randint(2, 3) for _ in range(n_groups)]
    n_optional = sum(group_sizes)

    codes = [f"M{i:02d}" for i in range(n_compulsory + n_optional)]
    rng.shuffle(codes)
    compulsory = codes[:n_compulsory]
    optional = codes[n_compulsory:]

    modules = []
    for i, code in enumerate(compulsory):
        modules.append(
            ModuleDef(
                code=code,
                level=rng.choice(_LEVELS),
                compulsory=True,
                nominal_year=rng.randint(1, 3),
                first_marker=i == 0 and rng.random() < 0.5,
                last_marker=False,
            )
        )
    for code in optional:
        modules.append(
            ModuleDef(
                code=code,
                level=rng.choice(_LEVELS),
                compulsory=False,
                nominal_year=rng.randint(1, 3),
            )
        )

    groups = []
    cursor = 0
    for size in group_sizes:
        members = optional[cursor:cursor + size]
        cursor += size
        groups.append(
            ChoiceGroup(members=frozenset(members), required_count=rng.randint(1, size))
        )

    # edges only from earlier to later in a random order keeps the graph acyclic
    order = list(codes)
    rng.shuffle(order)
    constraints = {}
    if len(order) >= 2:
        for _ in range(rng.randint(0, 2 * len(codes))):
            i, j = sorted(rng.sample(range(len(order)), 2))
            edge = (order[i], order[j])
            constraints.setdefault(edge, rng.choice(["hard", "soft"]))

    thesis = n_compulsory + sum(g.required_count for g in groups)
    c = Curriculum(
        name=f"GEN-{seed}",
        modules=tuple(sorted(modules, key=lambda m: m.code)),
        constraints=tuple(
            PrecedenceConstraint(kind=k, precedent=p, antecedent=a)
            for (p, a), k in sorted(constraints.items())
        ),
        choice_groups=tuple(sorted(groups, key=lambda g: sorted(g.members))),
        rules=ProgramRules(
            max_modules_per_year=rng.randint(1, 3),
            modules_required_for_thesis=thesis,
        ),
    )
    return validate_curriculum(c)
