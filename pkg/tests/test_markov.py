import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import flat_assignment
from oracle import oracle_project
from pathcast.markov import (
    AssignmentError,
    PopulationVector,
    ProbabilityAssignment,
    TransitionMatrix,
    absorption_summary,
    apply_overrides,
    build_matrix,
    module_loads,
    project,
    project_cohorts,
    random_assignment,
)


def vec(values, year=0):
    return PopulationVector(values=np.asarray(values, dtype=float), year_index=year)


def matrix(rows, order=None):
    P = np.asarray(rows, dtype=float)
    return TransitionMatrix(order=order or tuple(str(i) for i in range(P.shape[0])), P=P)


class TestBuildMatrix:
    def test_tiny_flat(self, tiny_graph):
        a = flat_assignment(tiny_graph, dropout=0.1, repeat=0.2)
        m = build_matrix(tiny_graph, a)
        assert m.P.shape == (5, 5)
        np.testing.assert_allclose(m.P.sum(axis=1), np.ones(5), atol=1e-12)
        i = tiny_graph.index_of("A|A")
        j = tiny_graph.index_of("A+B|B")
        assert m.P[i, j] == pytest.approx(0.7)
        assert m.P[i, i] == pytest.approx(0.2)
        assert m.P[i, tiny_graph.dropout_index] == pytest.approx(0.1)

    def test_absorbing_rows_are_unit(self, tiny_graph, tiny_assignment):
        m = build_matrix(tiny_graph, tiny_assignment)
        for i in tiny_graph.absorbing_indices:
            row = np.zeros(len(tiny_graph.states))
            row[i] = 1.0
            np.testing.assert_array_equal(m.P[i], row)

    def test_probability_on_non_edge(self, msc_graph, msc_assignment):
        rows = {k: dict(v) for k, v in msc_assignment.rows.items()}
        rows[msc_graph.start_index][("advance", ("51",))] = 0.0
        with pytest.raises(AssignmentError, match="non-edge"):
            build_matrix(msc_graph, ProbabilityAssignment(rows=rows))

    def test_row_sum_off(self, tiny_graph, tiny_assignment):
        rows = {k: dict(v) for k, v in tiny_assignment.rows.items()}
        i = tiny_graph.index_of("A|A")
        rows[i][("repeat", ())] = 0.5  # now sums to 1.3
        with pytest.raises(AssignmentError, match="sum"):
            build_matrix(tiny_graph, ProbabilityAssignment(rows=rows))

    def test_negative_probability(self, tiny_graph, tiny_assignment):
        rows = {k: dict(v) for k, v in tiny_assignment.rows.items()}
        i = tiny_graph.index_of("A|A")
        rows[i][("repeat", ())] = -0.1
        rows[i][("dropout", ())] = 0.4
        with pytest.raises(AssignmentError, match="range"):
            build_matrix(tiny_graph, ProbabilityAssignment(rows=rows))

    def test_missing_state_distribution(self, tiny_graph, tiny_assignment):
        rows = {k: dict(v) for k, v in tiny_assignment.rows.items()}
        del rows[tiny_graph.index_of("A|A")]
        with pytest.raises(AssignmentError, match="no outcome distribution"):
            build_matrix(tiny_graph, ProbabilityAssignment(rows=rows))

    def test_documented_probability_positions(self, msc_graph):
        """The four most observable transitions of the example program land
        at their documented matrix positions: registering for 50 alone,
        dropping out after failing 50, moving on to 51+60, and moving on to
        just 51."""
        rows = {}
        for state in [msc_graph.start_index, *msc_graph.active_indices]:
            edges = msc_graph.out_edges(state)
            rows[state] = {}
            uniform = 1.0 / len(edges)
            for e in edges:
                rows[state][(e.kind, tuple(sorted(e.selection)))] = uniform
        start = msc_graph.start_index
        s50 = msc_graph.index_of("50|50")
        rows[start] = {("advance", ("50",)): 0.7, ("advance", ("50", "51")): 0.3}
        rows[s50] = {
            ("dropout", ()): 0.25,
            ("repeat", ()): 0.05,
            ("advance", ("51", "60")): 0.4,
            ("advance", ("51",)): 0.2,
            ("advance", ("51", "61")): 0.1,
        }
        m = build_matrix(msc_graph, ProbabilityAssignment(rows=rows))
        assert m.P[start, s50] == pytest.approx(0.7)
        assert m.P[s50, msc_graph.dropout_index] == pytest.approx(0.25)
        assert m.P[s50, msc_graph.index_of("50+51+60|51+60")] == pytest.approx(0.4)
        assert m.P[s50, msc_graph.index_of("50+51|51")] == pytest.approx(0.2)


class TestProject:
    def test_identity(self):
        m = matrix(np.eye(3))
        v = vec([5.0, 1.0, 0.0])
        out = project(v, m, 7)
        np.testing.assert_array_equal(out.values, v.values)

    def test_analytic_geometric_decay(self):
        m = matrix([[0.5, 0.5], [0.0, 1.0]])
        out = project(vec([100.0, 0.0]), m, 3)
        np.testing.assert_allclose(out.values, [25.0, 75.0], atol=1e-12)

    def test_one_year_is_initial_vector(self):
        m = matrix([[0.5, 0.5], [0.0, 1.0]])
        v = vec([3.0, 4.0], year=9)
        out = project(v, m, 1)
        np.testing.assert_array_equal(out.values, v.values)
        assert out.year_index == 9

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="states"):
            project(vec([1.0, 2.0, 3.0]), matrix([[1.0, 0.0], [0.0, 1.0]]), 2)

    def test_negative_population_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            vec([1.0, -2.0])

    def test_matches_matrix_power_oracle(self, msc_graph, msc_assignment):
        m = build_matrix(msc_graph, msc_assignment)
        v = np.zeros(m.size)
        v[0] = 100.0
        for n in (1, 2, 5, 9):
            got = project(vec(v.tolist()), m, n)
            np.testing.assert_allclose(got.values, oracle_project(v, m.P, n), atol=1e-9)

    def test_mass_conserved_over_50_years(self, msc_graph, msc_assignment):
        m = build_matrix(msc_graph, msc_assignment)
        v = np.zeros(m.size)
        v[0] = 100.0
        out = project(vec(v.tolist()), m, 50)
        assert out.total == pytest.approx(100.0, rel=1e-6)

    def test_step_equals_power(self, msc_graph, msc_assignment):
        m = build_matrix(msc_graph, msc_assignment)
        v = vec([100.0] + [0.0] * (m.size - 1))
        stepped = v
        for _ in range(7):
            stepped = project(stepped, m, 2)
        np.testing.assert_allclose(stepped.values, project(v, m, 8).values, atol=1e-9)

    def test_absorbed_mass_monotone(self, msc_graph, msc_assignment):
        m = build_matrix(msc_graph, msc_assignment)
        absorbing = list(msc_graph.absorbing_indices)
        v = vec([100.0] + [0.0] * (m.size - 1))
        previous = 0.0
        for n in range(1, 30):
            out = project(v, m, n)
            mass = float(out.values[absorbing].sum())
            assert mass >= previous - 1e-9
            previous = mass

    @given(
        P=arrays(
            np.float64,
            (4, 4),
            elements=st.floats(0.01, 1.0, allow_nan=False),
        ),
        v=arrays(np.float64, 4, elements=st.floats(0.0, 1000.0, allow_nan=False)),
        n=st.integers(1, 20),
    )
    @settings(max_examples=100, deadline=None)
    def test_mass_conservation_property(self, P, v, n):
        P = P / P.sum(axis=1, keepdims=True)
        out = project(vec(v.tolist()), matrix(P.tolist()), n)
        assert out.total == pytest.approx(float(v.sum()), rel=1e-6, abs=1e-9)


class TestProjectCohorts:
    def test_identity_accumulates_intakes(self):
        m = matrix(np.eye(3), order=("start", "a", "b"))
        vectors = project_cohorts({0: 100.0, 1: 120.0, 2: 90.0}, m, 3)
        assert [v.values[0] for v in vectors] == [100.0, 220.0, 310.0]

    def test_single_cohort_equals_project(self, msc_graph, msc_assignment):
        m = build_matrix(msc_graph, msc_assignment)
        vectors = project_cohorts({2000: 150.0}, m, 6)
        start = vec([150.0] + [0.0] * (m.size - 1), year=2000)
        for n, got in enumerate(vectors, start=1):
            expected = project(start, m, n)
            np.testing.assert_allclose(got.values, expected.values, atol=1e-9)
            assert got.year_index == 1999 + n

    def test_superposition(self, msc_graph, msc_assignment):
        m = build_matrix(msc_graph, msc_assignment)
        both = project_cohorts({2000: 100.0, 2002: 100.0}, m, 6)
        first = project_cohorts({2000: 100.0}, m, 6)
        second = project_cohorts({2002: 100.0}, m, 4)
        for t, year in enumerate(range(2000, 2006)):
            expected = first[t].values.copy()
            if year >= 2002:
                expected = expected + second[year - 2002].values
            np.testing.assert_allclose(both[t].values, expected, atol=1e-9)

    def test_rejects_out_of_window_intake(self, msc_graph, msc_assignment):
        m = build_matrix(msc_graph, msc_assignment)
        with pytest.raises(ValueError, match="outside"):
            project_cohorts({2000: 10.0, 2010: 5.0}, m, 3)

    def test_rejects_negative_horizon(self, msc_graph, msc_assignment):
        m = build_matrix(msc_graph, msc_assignment)
        with pytest.raises(ValueError, match="horizon"):
            project_cohorts({2000: 10.0}, m, -1)


class TestModuleLoads:
    def test_single_state_occupancy(self, msc_graph):
        v = np.zeros(len(msc_graph.states))
        v[msc_graph.index_of("50|50")] = 100.0
        loads = module_loads([vec(v.tolist(), year=1)], msc_graph)
        assert loads[1]["50"] == 100.0
        assert all(value == 0.0 for code, value in loads[1].items() if code != "50")

    def test_two_module_state(self, msc_graph):
        v = np.zeros(len(msc_graph.states))
        v[msc_graph.index_of("50+51+60|51+60")] = 40.0
        loads = module_loads([vec(v.tolist(), year=3)], msc_graph)
        assert loads[3]["51"] == 40.0 and loads[3]["60"] == 40.0
        assert loads[3]["50"] == 0.0

    def test_eligible_and_dropout_carry_no_load(self, msc_graph):
        v = np.ones(len(msc_graph.states))
        loads = module_loads([vec(v.tolist(), year=0)], msc_graph)
        active_with_50 = sum(
            1 for s in msc_graph.states if "50" in s.current
        )
        assert loads[0]["50"] == float(active_with_50)


class TestAbsorption:
    def test_direct_split(self):
        # one transient state: 0.7 to eligible, 0.3 to dropout
        m = matrix(
            [[0.0, 0.7, 0.3], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            order=("s", "eligible:done", "dropout"),
        )
        summary = absorption_summary(m)
        info = summary.for_state("s")
        assert info["eligible"]["eligible:done"] == pytest.approx(0.7)
        assert info["dropout"] == pytest.approx(0.3)
        assert info["expected_years"] == pytest.approx(1.0)

    def test_with_repeat_geometric(self):
        m = matrix(
            [[0.2, 0.5, 0.3], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            order=("s", "eligible:done", "dropout"),
        )
        info = absorption_summary(m).for_state("s")
        assert info["eligible"]["eligible:done"] == pytest.approx(0.625)
        assert info["expected_years"] == pytest.approx(1.25)

    def test_no_dropout_means_certain_graduation(self, msc_graph):
        a = flat_assignment(msc_graph, dropout=0.0, repeat=0.2)
        summary = absorption_summary(build_matrix(msc_graph, a))
        info = summary.for_state("start")
        assert sum(info["eligible"].values()) == pytest.approx(1.0)
        assert info["dropout"] == pytest.approx(0.0)

    def test_rows_sum_to_one(self, msc_graph, msc_assignment):
        summary = absorption_summary(build_matrix(msc_graph, msc_assignment))
        totals = summary.graduation.sum(axis=1) + summary.dropout
        np.testing.assert_allclose(totals, np.ones(len(summary.state_ids)), atol=1e-9)

    def test_non_absorbing_chain_rejected(self):
        m = matrix([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        # states 0 and 1 swap forever and never reach the absorbing state 2
        with pytest.raises(ValueError, match="absor"):
            absorption_summary(m)


class TestOverrides:
    def test_renormalize_scales_remainder(self, msc_graph, msc_assignment):
        s50 = "50|50"
        effective = apply_overrides(
            msc_graph,
            msc_assignment,
            {s50: {("dropout", ()): 0.4}},
            renormalize=True,
        )
        i = msc_graph.index_of(s50)
        row = effective.rows[i]
        assert row[("dropout", ())] == pytest.approx(0.4)
        before = msc_assignment.rows[i]
        prior_rest = sum(p for k, p in before.items() if k != ("dropout", ()))
        scale = (1 - 0.4) / prior_rest
        for k, p in before.items():
            if k != ("dropout", ()):
                assert row[k] == pytest.approx(p * scale)
        assert sum(row.values()) == pytest.approx(1.0, abs=1e-12)

    def test_setting_prior_value_is_identity(self, msc_graph, msc_assignment):
        i = msc_graph.index_of("50|50")
        prior = msc_assignment.rows[i][("dropout", ())]
        effective = apply_overrides(
            msc_graph, msc_assignment, {"50|50": {("dropout", ()): prior}}
        )
        for k, p in msc_assignment.rows[i].items():
            assert effective.rows[i][k] == pytest.approx(p, abs=1e-12)

    def test_strict_requires_full_row(self, msc_graph, msc_assignment):
        i = msc_graph.index_of("50|50")
        oversized = {k: p * 1.2 for k, p in msc_assignment.rows[i].items()}
        with pytest.raises(AssignmentError, match="sums"):
            apply_overrides(
                msc_graph, msc_assignment, {"50|50": oversized}, renormalize=False
            )

    def test_higher_dropout_strictly_increases_dropout_mass(
        self, msc_graph, msc_assignment
    ):
        m0 = build_matrix(msc_graph, msc_assignment)
        bumped = apply_overrides(
            msc_graph, msc_assignment, {"50|50": {("dropout", ()): 0.5}}
        )
        m1 = build_matrix(msc_graph, bumped)
        v = vec([100.0] + [0.0] * (m0.size - 1))
        drop = msc_graph.dropout_index
        for n in (3, 4, 6):
            low = project(v, m0, n).values[drop]
            high = project(v, m1, n).values[drop]
            assert high > low

    def test_override_on_non_edge(self, msc_graph, msc_assignment):
        with pytest.raises(AssignmentError, match="non-edge"):
            apply_overrides(
                msc_graph, msc_assignment, {"start": {("advance", ("51",)): 0.5}}
            )


class TestRandomAssignment:
    def test_valid_and_deterministic(self, msc_graph):
        a = random_assignment(msc_graph, seed=42)
        b = random_assignment(msc_graph, seed=42)
        assert a.rows == b.rows
        build_matrix(msc_graph, a)

    def test_different_seeds_differ(self, msc_graph):
        a = random_assignment(msc_graph, seed=1)
        b = random_assignment(msc_graph, seed=2)
        assert a.rows != b.rows
