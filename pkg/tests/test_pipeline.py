import unittest
import os
import sys
import csv
import json
import tempfile

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))  # Add project root to Python path
from cli import main
from sources.artifacts import StageArtifacts, StageName
from sources.config import load_config
from sources.errors import MissingPrerequisiteError
from sources.pipeline import PIPELINE_ORDER, ingest, recommend, run_pipeline, run_stage
from sources.schemas import Dimension, Strategy
from sources.stages import AssessStage, load_resources

PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
CONFIG = os.path.join(PROJECT_ROOT, "config.ini")
EXPECTED = os.path.join(PROJECT_ROOT, "data", "expected")
DATA_FILES = ("cleansed.csv", "enriched.csv", "consolidated.csv", "cleansed_final.csv", "golden.csv")

def read_rows(path):
    with open(path, 'r', encoding='utf-8', newline='') as f:
        return list(csv.reader(f))

class TestPipeline(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out_dir = os.path.join(self.tmp.name, "out")
        self.config = load_config(CONFIG).model_copy(update={"out_dir": self.out_dir})

    def tearDown(self):
        self.tmp.cleanup()

    def output(self, name):
        return read_rows(os.path.join(self.out_dir, name))

    def test_golden_records(self):
        run_pipeline(None, self.config)
        self.assertEqual(self.output("golden.csv"), read_rows(os.path.join(EXPECTED, "golden.csv")))

    def test_cleansed_and_consolidated_tables(self):
        run_pipeline(None, self.config)
        self.assertEqual(self.output("cleansed_final.csv"), read_rows(os.path.join(EXPECTED, "cleansed_final.csv")))
        self.assertEqual(self.output("consolidated.csv"), read_rows(os.path.join(EXPECTED, "consolidated.csv")))

    def test_cleansed_before_backpropagation(self):
        run_pipeline(None, self.config)
        rows = self.output("cleansed.csv")[1:]
        self.assertEqual(rows[2][5], "32904; FL; Melbourne; 10 6 th Street")
        self.assertEqual(rows[3][1], "J.")
        self.assertEqual(rows[5][5], "32904; FL; Melbourne; 6 th Street")
        self.assertEqual(rows[7][5], "60185; IL; West Chicago; Shirley Ave.")
        final = read_rows(os.path.join(EXPECTED, "cleansed_final.csv"))[1:]
        differing = [i + 1 for i, (row, expected) in enumerate(zip(rows, final)) if row != expected]
        self.assertEqual(differing, [3, 4, 6, 8])

    def test_enrichment_table(self):
        run_pipeline(None, self.config)
        rows = self.output("enriched.csv")
        self.assertEqual(rows[0][-1], "Zip")
        self.assertEqual([row[-1] for row in rows[1:]],
                         ["32904", "32904", "32904", "32904", "", "32904", "60185", "60185"])

    def test_quality_reports(self):
        artifacts = run_pipeline(None, self.config)
        self.assertAlmostEqual(artifacts.quality_before.aggregate, 0.25 * (0.85 + 0.9 + 1 / 3 + 1.0))
        self.assertFalse(artifacts.quality_before.acceptable)
        self.assertAlmostEqual(artifacts.quality_after.aggregate, 0.9625)
        self.assertTrue(artifacts.quality_after.acceptable)
        self.assertEqual(artifacts.quality_after.per_dimension[Dimension.TIMELINESS], 1.0)
        self.assertEqual(artifacts.strategy, Strategy.REACTIVE)
        self.assertEqual(len(artifacts.trend.points), 2)
        with open(os.path.join(self.out_dir, "reports", "strategy.json"), 'r', encoding='utf-8') as f:
            strategy = json.load(f)
        self.assertEqual((strategy["strategy"], strategy["trend"]), ("REACTIVE", "IMPROVING"))
        with open(os.path.join(self.out_dir, "reports", "quality_after.json"), 'r', encoding='utf-8') as f:
            report = json.load(f)
        self.assertEqual(report["metadata"]["dataset_id"], "authors")
        self.assertTrue(report["acceptable"])
        for name in ("profile.json", "quality_before.json", "clusters.json", "lineage.json", "trend_authors.jsonl"):
            self.assertTrue(os.path.isfile(os.path.join(self.out_dir, "reports", name)), name)

    def test_trend_grows_across_runs(self):
        run_pipeline(None, self.config)
        artifacts = run_pipeline(None, self.config)
        self.assertEqual(len(artifacts.trend.points), 4)

    def test_deterministic_outputs(self):
        run_pipeline(None, self.config)
        second = self.config.model_copy(update={"out_dir": os.path.join(self.tmp.name, "second")})
        run_pipeline(None, second)
        for name in DATA_FILES:
            with open(os.path.join(self.out_dir, name), 'rb') as a, \
                    open(os.path.join(second.out_dir, name), 'rb') as b:
                self.assertEqual(a.read(), b.read(), name)

    def test_single_stages_compose(self):
        resources = load_resources(self.config, keep_trend=False)
        artifacts = ingest(None, self.config)
        for stage in PIPELINE_ORDER:
            artifacts = run_stage(stage, artifacts, self.config, resources)
        artifacts = recommend(artifacts, self.config)
        whole = run_pipeline(None, self.config, load_resources(self.config, keep_trend=False), write=False)
        self.assertEqual(artifacts.golden, whole.golden)
        self.assertEqual(artifacts.propagated, whole.propagated)
        self.assertEqual(artifacts.consolidated, whole.consolidated)
        self.assertAlmostEqual(artifacts.quality_after.aggregate, whole.quality_after.aggregate)

    def test_stage_names_as_text(self):
        resources = load_resources(self.config, keep_trend=False)
        artifacts = ingest(None, self.config)
        for stage in ("cleanse", "enrich", "match"):
            artifacts = run_stage(stage, artifacts, self.config, resources)
        self.assertEqual([len(c.members) for c in artifacts.clusters], [6, 2])
        artifacts = run_stage(StageName.MATCH, artifacts, self.config, resources, threshold=1.01)
        self.assertEqual(len(artifacts.clusters), 8)

    def test_missing_prerequisite(self):
        artifacts = ingest(None, self.config)
        with self.assertRaises(MissingPrerequisiteError):
            run_stage(StageName.MATCH, artifacts, self.config)
        with self.assertRaises(MissingPrerequisiteError):
            run_stage(StageName.CONSOLIDATE, artifacts, self.config)

    def test_rerunning_a_stage_drops_later_outputs(self):
        resources = load_resources(self.config, keep_trend=False)
        artifacts = run_pipeline(None, self.config, resources, write=False)
        artifacts = run_stage(StageName.CLEANSE, artifacts, self.config, resources)
        self.assertIsNone(artifacts.clusters)
        self.assertIsNone(artifacts.golden)
        self.assertIsNone(artifacts.quality_after)
        self.assertIsNotNone(artifacts.quality_before)

    def test_stage_dump_round_trip(self):
        artifacts = run_pipeline(None, self.config, load_resources(self.config, keep_trend=False), write=False)
        path = os.path.join(self.tmp.name, "dump.json")
        artifacts.save(path)
        loaded = StageArtifacts.load(path)
        self.assertEqual(loaded.golden, artifacts.golden)
        self.assertEqual(loaded.clusters, artifacts.clusters)
        self.assertEqual(loaded.quality_after.aggregate, artifacts.quality_after.aggregate)

    def test_empty_dataset(self):
        path = os.path.join(self.tmp.name, "empty.csv")
        with open(path, 'w', encoding='utf-8') as f:
            f.write("Author ID,Name,ORCID,Birth Date,Address\n")
        artifacts = run_pipeline(path, self.config)
        self.assertEqual(artifacts.golden, [])
        self.assertIsNone(artifacts.quality_before)
        self.assertEqual([issue.code for issue in artifacts.issues], ["EMPTY_DATASET", "EMPTY_DATASET"])
        self.assertEqual(self.output("golden.csv"), [["Author ID", "First", "Last", "ORCID", "Birth Date", "Address"]])

    def test_malformed_rows_become_issues(self):
        path = os.path.join(self.tmp.name, "broken.csv")
        with open(path, 'w', encoding='utf-8') as f:
            f.write("Author ID,Name,ORCID,Birth Date,Address\n1,John Smit\n2,Lena Scott,,,\n")
        artifacts = run_pipeline(path, self.config, write=False)
        self.assertEqual(len(artifacts.raw), 1)
        self.assertEqual([issue.code for issue in artifacts.issues], ["MALFORMED_ROW"])

    def test_required_field_missing(self):
        path = os.path.join(self.tmp.name, "nameless.csv")
        with open(path, 'w', encoding='utf-8') as f:
            f.write("Author ID,Name,ORCID,Birth Date,Address\n1,,,,\n")
        artifacts = run_pipeline(path, self.config, write=False)
        self.assertIn(("MISSING_INFO", "Name"), [(issue.code, issue.field) for issue in artifacts.issues])

    def test_assess_stage_timestamps_increase(self):
        resources = load_resources(self.config)
        artifacts = ingest(None, self.config)
        stage = AssessStage(self.config, resources)
        first = stage.run(artifacts)
        second = stage.run(first)
        self.assertLess(first.trend.points[-1].run_timestamp, second.trend.points[-1].run_timestamp)

class TestCli(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out_dir = os.path.join(self.tmp.name, "out")

    def tearDown(self):
        self.tmp.cleanup()

    def cli(self, *args):
        return main(list(args) + ["--config", CONFIG, "--out-dir", self.out_dir])

    def test_run(self):
        self.assertEqual(self.cli("run"), 0)
        self.assertTrue(os.path.isfile(os.path.join(self.out_dir, "golden.csv")))

    def test_stages_chain_through_dump(self):
        dump = os.path.join(self.tmp.name, "stage.json")
        for command in ("cleanse", "enrich", "match", "consolidate"):
            self.assertEqual(self.cli(command, "--stage-dump", dump), 0, command)
        self.assertEqual(read_rows(os.path.join(self.out_dir, "golden.csv")),
                         read_rows(os.path.join(EXPECTED, "golden.csv")))

    def test_match_threshold_flag(self):
        dump = os.path.join(self.tmp.name, "stage.json")
        self.assertEqual(self.cli("cleanse", "--stage-dump", dump), 0)
        self.assertEqual(self.cli("match", "--stage-dump", dump, "--threshold", "1.01"), 0)
        self.assertEqual(len(StageArtifacts.load(dump).clusters), 8)

    def test_missing_prerequisite_exit_code(self):
        self.assertEqual(self.cli("match"), 3)

    def test_io_failure_exit_code(self):
        self.assertEqual(self.cli("run", "--input", os.path.join(self.tmp.name, "absent.csv")), 2)

    def test_config_invalid_exit_code(self):
        self.assertEqual(main(["run", "--config", os.path.join(self.tmp.name, "absent.ini")]), 1)

    def test_recommend(self):
        self.assertEqual(self.cli("recommend", "--importance", "0.2", "--frequency", "0.9"), 0)

if __name__ == "__main__":
    unittest.main()
