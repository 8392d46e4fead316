import unittest
import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))  # Add project root to Python path
from sources.enricher import enrich_dataset, load_gazetteer
from sources.lexicons import load_default_lexicons
from sources.matcher import (BlockingKey, MatchConfig, UnionFind, block, cluster, compare, edit_similarity,
                             match_records, name_sim, score_pairs)
from sources.record_model import load_dataset
from sources.schemas import CleansedRecord, MatchPair, PersonName, RecordRef, default_author_schema
from sources.standardizer import cleanse_dataset

PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))

def ref(row):
    return RecordRef(source_id="t", row_number=row)

def person(row, first, last, initial=False):
    return CleansedRecord(ref=ref(row), name=PersonName(first=first, last=last, first_is_initial=initial),
                          field_status={}, slot_fields={"name": "Name"})

def rows(clusters):
    return [[member.row_number for member in c.members] for c in clusters]

class TestMatcher(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        gazetteer = load_gazetteer(os.path.join(PROJECT_ROOT, "data", "gazetteer.csv"))
        lexicons = load_default_lexicons().with_gazetteer(gazetteer)
        schema = default_author_schema()
        raw = load_dataset(os.path.join(PROJECT_ROOT, "data", "authors.csv"), schema)
        cls.records = enrich_dataset(cleanse_dataset(raw, schema, lexicons, gazetteer), gazetteer)

    def record(self, row):
        return self.records[row - 1]

    def score(self, a, b):
        return compare(self.record(a), self.record(b)).score

    def test_fixture_scores(self):
        self.assertAlmostEqual(self.score(1, 2), 1.0)
        self.assertAlmostEqual(self.score(1, 6), 0.975)
        self.assertAlmostEqual(self.score(1, 5), 0.775 / 0.85)
        self.assertAlmostEqual(self.score(4, 5), 0.375 / 0.45)
        self.assertAlmostEqual(self.score(7, 8), 0.825 / 0.85)
        self.assertLess(self.score(1, 4), 0.75)

    def test_different_people_do_not_match(self):
        for smit in range(1, 7):
            for scott in (7, 8):
                pair = compare(self.record(smit), self.record(scott))
                self.assertLess(pair.score, 0.75)
                self.assertTrue(all(value < 0.3 for value in pair.evidence.values()), pair.evidence)

    def test_abstaining_comparators(self):
        pair = compare(self.record(4), self.record(5))
        self.assertEqual(set(pair.evidence), {"name_sim", "date_sim"})
        self.assertEqual(pair.evidence["date_sim"], 0.5)

    def test_symmetry_and_reflexivity(self):
        for a in self.records:
            self.assertAlmostEqual(compare(a, a).score, 1.0)
            for b in self.records:
                self.assertEqual(compare(a, b), compare(b, a))

    def test_blocking(self):
        self.assertEqual(len(block(self.records)), 16)
        self.assertEqual(len(block(self.records, MatchConfig(blocking_key=BlockingKey.NONE))), 28)
        self.assertEqual(block(self.records[:1]), [])

    def test_fixture_clusters(self):
        _, clusters = match_records(self.records)
        self.assertEqual(rows(clusters), [[1, 2, 3, 4, 5, 6], [7, 8]])
        self.assertTrue(all(pair.score >= 0.75 for c in clusters for pair in c.pairs))

    def test_blocking_does_not_change_clusters(self):
        _, blocked = match_records(self.records)
        _, brute = match_records(self.records, MatchConfig(blocking_key=BlockingKey.NONE))
        self.assertEqual(rows(blocked), rows(brute))

    def test_threshold_above_one_keeps_records_apart(self):
        _, clusters = match_records(self.records, threshold=1.01)
        self.assertEqual(rows(clusters), [[row] for row in range(1, 9)])

    def test_clusters_refine_as_threshold_rises(self):
        pairs = score_pairs(self.records, MatchConfig(blocking_key=BlockingKey.NONE))
        thresholds = [0.0, 0.25, 0.5, 0.75, 0.9, 0.95, 1.0, 1.01]
        previous = None
        for threshold in thresholds:
            clusters = [set(c.members) for c in cluster(pairs, self.records, threshold=threshold)]
            self.assertEqual(sum(len(c) for c in clusters), len(self.records))
            if previous is not None:
                self.assertGreaterEqual(len(clusters), len(previous))
                for c in clusters:
                    self.assertTrue(any(c <= coarse for coarse in previous))
            previous = clusters

    def test_transitive_closure(self):
        records = [person(1, "A", "X"), person(2, "B", "X"), person(3, "C", "X")]
        pairs = [
            MatchPair(left=ref(1), right=ref(2), score=0.9),
            MatchPair(left=ref(2), right=ref(3), score=0.8),
            MatchPair(left=ref(1), right=ref(3), score=0.1),
        ]
        clusters = cluster(pairs, records)
        self.assertEqual(rows(clusters), [[1, 2, 3]])
        self.assertEqual(len(clusters[0].pairs), 2)

    def test_union_find_root_is_smallest(self):
        uf = UnionFind()
        uf.union(ref(5), ref(3))
        uf.union(ref(9), ref(5))
        self.assertEqual(uf.find(ref(9)), ref(3))

    def test_initials(self):
        self.assertEqual(name_sim(person(1, "J", "Smit", initial=True), person(2, "John", "Smit")), 1.0)
        self.assertEqual(name_sim(person(1, "K", "Smit", initial=True), person(2, "John", "Smit")), 0.0)

    def test_edit_similarity(self):
        self.assertEqual(edit_similarity("smit", "smit"), 1.0)
        self.assertAlmostEqual(edit_similarity("smit", "smith"), 0.8)
        self.assertEqual(edit_similarity("", "smit"), 0.0)

    def test_invalid_config(self):
        with self.assertRaises(ValueError):
            MatchConfig(weights={"shoe_size": 1.0})
        with self.assertRaises(ValueError):
            MatchConfig(weights={"id_exact": -1.0, "name_sim": 2.0})
        with self.assertRaises(ValueError):
            MatchConfig(weights={"id_exact": 0.0})

if __name__ == "__main__":
    unittest.main()
