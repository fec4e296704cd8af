import random
import unittest

from .support import hierarchy, matrix, random_comparator, random_instance, thought

from resources.lib.common import ConfigurationError, ContractError
from resources.lib.core.hierarchy import (
    Aggregator,
    ComparatorSpec,
    Hierarchy,
    IncompleteMatrixError,
    OptionThought,
    PartialOrdering,
    ScoreMatrix,
    Slot,
    aggregate_slot,
    flatten,
    hierarchical_compare,
    level_compare,
)

SUM = ComparatorSpec.global_(Aggregator.WEIGHTED_SUM)
B, W, E, I = PartialOrdering.BETTER, PartialOrdering.WORSE, PartialOrdering.EQUIVALENT, PartialOrdering.INCOMPARABLE


class TestAggregateSlot(unittest.TestCase):

    def test_weighted_sum_of_zero_scores(self):
        m = matrix({"a": [0, 0]}, ["t1", "t2"])
        self.assertEqual(aggregate_slot(m, "a", [thought("t1"), thought("t2")], Aggregator.WEIGHTED_SUM), 0.0)

    def test_weighted_sum(self):
        m = matrix({"a": [0.5, 0.25]}, ["t1", "t2"])
        slot = [thought("t1", weight=1.0), thought("t2", weight=2.0)]
        self.assertEqual(aggregate_slot(m, "a", slot, Aggregator.WEIGHTED_SUM), 1.0)

    def test_least_squares(self):
        m = matrix({"a": [3, 4]}, ["t1", "t2"])
        self.assertEqual(aggregate_slot(m, "a", [thought("t1"), thought("t2")], Aggregator.LEAST_SQUARES), 25.0)

    def test_worst_case_is_weighted_minimum(self):
        m = matrix({"a": [3, 4]}, ["t1", "t2"])
        slot = [thought("t1", weight=2.0), thought("t2", weight=1.0)]
        self.assertEqual(aggregate_slot(m, "a", slot, Aggregator.WORST_CASE), 4.0)

    def test_missing_entry_names_the_pair(self):
        m = matrix({"a": [1]}, ["t1"])
        with self.assertRaises(IncompleteMatrixError) as ctx:
            aggregate_slot(m, "a", [thought("t1"), thought("t2")], Aggregator.WEIGHTED_SUM)
        self.assertIn("'a'", str(ctx.exception))
        self.assertIn("'t2'", str(ctx.exception))


class TestLevelCompare(unittest.TestCase):

    def setUp(self):
        self.slot = [thought("t1"), thought("t2")]

    def test_identical_rows_are_equivalent_for_every_spec(self):
        m = matrix({"a": [2, 1], "b": [2, 1]}, ["t1", "t2"])
        for spec in [ComparatorSpec.local()] + [ComparatorSpec.global_(agg) for agg in Aggregator]:
            self.assertIs(level_compare(m, "a", "b", self.slot, spec), E)

    def test_local_crossing_rows_are_incomparable(self):
        m = matrix({"a": [2, 1], "b": [1, 2]}, ["t1", "t2"])
        self.assertIs(level_compare(m, "a", "b", self.slot, ComparatorSpec.local()), I)

    def test_global_sum_tie_is_equivalent(self):
        m = matrix({"a": [2, 1], "b": [1, 2]}, ["t1", "t2"])
        self.assertIs(level_compare(m, "a", "b", self.slot, SUM), E)

    def test_local_componentwise_dominance(self):
        m = matrix({"a": [2, 2], "b": [1, 2]}, ["t1", "t2"])
        self.assertIs(level_compare(m, "a", "b", self.slot, ComparatorSpec.local()), B)
        self.assertIs(level_compare(m, "b", "a", self.slot, ComparatorSpec.local()), W)

    def test_tolerance_absorbs_small_differences(self):
        m = matrix({"a": [1.0, 1.0], "b": [1.05, 1.0]}, ["t1", "t2"])
        self.assertIs(level_compare(m, "a", "b", self.slot, ComparatorSpec.local(tolerance=0.1)), E)
        self.assertIs(level_compare(m, "a", "b", self.slot, ComparatorSpec.local()), W)

    def test_comparator_labels(self):
        self.assertEqual(ComparatorSpec.local().label, "locally-better")
        self.assertEqual(ComparatorSpec.global_(Aggregator.WORST_CASE).label, "worst-case-better")

    def test_invalid_comparators_are_rejected(self):
        with self.assertRaises(ConfigurationError):
            ComparatorSpec("global")
        with self.assertRaises(ConfigurationError):
            ComparatorSpec("local", Aggregator.WEIGHTED_SUM)
        with self.assertRaises(ConfigurationError):
            ComparatorSpec.local(tolerance=-1)


class TestHierarchicalCompare(unittest.TestCase):

    def test_identity(self):
        m = matrix({"a": [1, 2]}, ["t1", "t2"])
        self.assertIs(hierarchical_compare(m, "a", "a", hierarchy(["t1"], ["t2"])), E)

    def test_stronger_slot_dominates(self):
        m = matrix({"a": [3, 0], "b": [2, 9]}, ["t1", "t2"])
        self.assertIs(hierarchical_compare(m, "a", "b", hierarchy(["t1"], ["t2"], comparator=SUM)), B)

    def test_first_slot_incomparability_blocks_weaker_slots(self):
        m = matrix({"a": [2, 1, 5], "b": [1, 2, 0]}, ["t1", "t2", "t3"])
        self.assertIs(hierarchical_compare(m, "a", "b", hierarchy(["t1", "t2"], ["t3"])), I)

    def test_weaker_slot_breaks_ties(self):
        m = matrix({"a": [1, 1, 0], "b": [1, 1, 1]}, ["t1", "t2", "t3"])
        self.assertIs(hierarchical_compare(m, "a", "b", hierarchy(["t1", "t2"], ["t3"])), W)


class TestHierarchyConstruction(unittest.TestCase):

    def test_flatten_single_level_is_identity(self):
        t = thought("t1")
        h = flatten([[[t]]])
        self.assertEqual(len(h), 1)
        self.assertEqual(h.slots[0].thoughts, (t,))

    def test_flatten_is_layer_major_level_minor(self):
        t11 = thought("a", 1, 1)
        t21, t22 = thought("b", 2, 1), thought("c", 2, 2)
        h = flatten([[[t11]], [[t21], [t22]]])
        self.assertEqual([s.thought_ids for s in h.slots], [("a",), ("b",), ("c",)])
        self.assertEqual([(s.layer, s.level) for s in h.slots], [(1, 1), (2, 1), (2, 2)])

    def test_flatten_carries_per_layer_comparators(self):
        h = flatten([[[thought("a", 1, 1)]], [[thought("b", 2, 1)]]], [ComparatorSpec.local(), SUM])
        self.assertFalse(h.slots[0].comparator.is_global)
        self.assertTrue(h.slots[1].comparator.is_global)

    def test_flatten_rejects_a_thought_in_two_layers(self):
        with self.assertRaises(ConfigurationError):
            flatten([[[thought("a", 1, 1)]], [[thought("a", 2, 1)]]])

    def test_flatten_rejects_empty_levels(self):
        with self.assertRaises(ConfigurationError):
            flatten([[[thought("a", 1, 1)], []]])

    def test_hierarchy_rejects_empty_slot(self):
        with self.assertRaises(ConfigurationError):
            Hierarchy((Slot(1, 1, ()),))

    def test_hierarchy_rejects_out_of_order_slots(self):
        with self.assertRaises(ConfigurationError):
            Hierarchy((Slot(1, 2, (thought("a", 1, 2),)), Slot(1, 1, (thought("b"),))))

    def test_option_thought_validation(self):
        with self.assertRaises(ConfigurationError):
            OptionThought("")
        with self.assertRaises(ConfigurationError):
            OptionThought("t", weight=-1.0)

    def test_score_matrix_rejects_negative_scores(self):
        with self.assertRaises(ContractError):
            ScoreMatrix({("a", "t"): -0.5})


class TestComparatorAxioms(unittest.TestCase):
    """Randomised checks of the level-comparator conditions and hierarchy properties."""

    INSTANCES = 1000

    def _slot(self, rng, spec):
        width = rng.randint(1, 4)
        return [thought(f"t{i}", weight=rng.choice((0.5, 1.0, 2.0))) for i in range(width)], spec

    def _row(self, rng, slot):
        return [float(rng.randint(0, 5)) for _ in slot]

    def test_axioms(self):
        rng = random.Random(20240501)
        for _ in range(self.INSTANCES):
            docs, m, h = random_instance(rng, docs=8, max_slots=3, values=range(6))
            entries = dict(m.items())
            entries.update({("dup", t.id): m.get(docs[0], t.id) for t in h.thoughts})
            m = ScoreMatrix(entries)
            for slot in h.slots:
                spec = slot.comparator
                ids = slot.thought_ids
                for a in docs:
                    # identical scores can stand in for each other
                    self.assertIs(level_compare(m, a, "dup", slot.thoughts, spec),
                                  level_compare(m, a, docs[0], slot.thoughts, spec))
                    for b in docs:
                        ab = level_compare(m, a, b, slot.thoughts, spec)
                        # antisymmetry under swap
                        self.assertIs(level_compare(m, b, a, slot.thoughts, spec), ab.flipped())
                        # componentwise lower is never better
                        if all(m.get(a, t) <= m.get(b, t) for t in ids):
                            self.assertIn(ab, (W, E))
                        if spec.is_global:
                            self.assertIsNot(ab, I)
                # transitivity of strict preference on sampled triples
                for _ in range(10):
                    a, b, c = (rng.choice(docs) for _ in range(3))
                    if (level_compare(m, a, b, slot.thoughts, spec) is B
                            and level_compare(m, b, c, slot.thoughts, spec) is B):
                        self.assertIs(level_compare(m, a, c, slot.thoughts, spec), B)
            for _ in range(10):
                a, b, c = (rng.choice(docs) for _ in range(3))
                ab = hierarchical_compare(m, a, b, h)
                self.assertIs(hierarchical_compare(m, b, a, h), ab.flipped())
                if ab is B and hierarchical_compare(m, b, c, h) is B:
                    self.assertIs(hierarchical_compare(m, a, c, h), B)

    def test_weight_scaling_keeps_outcomes(self):
        rng = random.Random(7)
        for _ in range(self.INSTANCES // 4):
            slot, spec = self._slot(rng, random_comparator(rng))
            ids = [t.id for t in slot]
            factor = rng.choice((0.5, 2.0, 4.0))
            scaled = [OptionThought(t.id, weight=t.weight * factor) for t in slot]
            m = matrix({"a": self._row(rng, slot), "b": self._row(rng, slot)}, ids)
            self.assertIs(level_compare(m, "a", "b", slot, spec), level_compare(m, "a", "b", scaled, spec))

    def test_dominance_persists_when_weaker_slots_are_added(self):
        rng = random.Random(11)
        for _ in range(self.INSTANCES // 4):
            docs, m, h = random_instance(rng, docs=3, max_slots=4)
            a, b = docs[0], docs[1]
            for j in range(1, len(h) + 1):
                if hierarchical_compare(m, a, b, h.prefix(j)) is B:
                    self.assertIs(hierarchical_compare(m, a, b, h), B)
                    break


if __name__ == "__main__":
    unittest.main()
