import unittest
import os
import sys
import tempfile
from unittest import mock

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))  # Add project root to Python path
from sources.config import load_config
from sources.consolidator import SurvivorshipRule
from sources.errors import ConfigInvalidError
from sources.matcher import BlockingKey
from sources.schemas import Dimension, FieldKind

PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
CONFIG = os.path.join(PROJECT_ROOT, "config.ini")

class TestConfig(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        with open(CONFIG, 'r', encoding='utf-8') as f:
            self.text = f.read().replace("= data/", f"= {PROJECT_ROOT}/data/")

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, text):
        path = os.path.join(self.tmp.name, "config.ini")
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
        return path

    def test_bundled_config(self):
        config = load_config(CONFIG)
        self.assertEqual(config.dataset_id, "authors")
        self.assertEqual(config.input_path, os.path.join(PROJECT_ROOT, "data", "authors.csv"))
        self.assertEqual([f.name for f in config.record_schema], ["Author ID", "Name", "ORCID", "Birth Date", "Address"])
        self.assertEqual(config.record_schema[1].kind, FieldKind.PERSON_NAME)
        self.assertTrue(config.record_schema[1].required)
        self.assertFalse(config.record_schema[2].required)
        self.assertEqual(config.matching.weights["id_exact"], 0.4)
        self.assertEqual(config.matching.blocking_key, BlockingKey.LAST_NAME)
        self.assertEqual(config.survivorship.rule_order[0], SurvivorshipRule.MAJORITY)
        self.assertEqual(config.standardizer.two_digit_year_pivot, 30)
        self.assertFalse(config.standardizer.enable_yymmdd_heuristics)
        self.assertEqual(set(config.quality_rules), set(Dimension))
        self.assertEqual(config.strategy_cuts, (0.5, 0.5))

    def test_relative_paths_follow_the_config_file(self):
        config = load_config(self.write(self.text.replace("out_dir = out", "out_dir = results")))
        self.assertEqual(config.out_dir, os.path.join(self.tmp.name, "results"))

    def test_out_dir_from_environment(self):
        target = os.path.join(self.tmp.name, "elsewhere")
        with mock.patch.dict(os.environ, {"RIS_OUT_DIR": target}):
            self.assertEqual(load_config(CONFIG).out_dir, target)

    def test_settings_are_read(self):
        text = self.text.replace("enable_yymmdd_heuristics = False", "enable_yymmdd_heuristics = True")
        text = text.replace("blocking_key = LAST_NAME", "blocking_key = none")
        config = load_config(self.write(text))
        self.assertTrue(config.standardizer.enable_yymmdd_heuristics)
        self.assertEqual(config.matching.blocking_key, BlockingKey.NONE)

    def test_invalid_configs(self):
        broken = [
            self.text.replace("weight_timeliness = 0.25", "weight_timeliness = 0.5"),
            self.text.replace("blocking_key = LAST_NAME", "blocking_key = ZIP"),
            self.text.replace("weight_name_sim = 0.3", "weight_name_sim = -0.3"),
            self.text.replace("MAJORITY, MOST_COMPLETE, LONGEST, FIRST_SEEN", "FIRST_SEEN, MAJORITY"),
            self.text.replace("Name = PERSON_NAME", "Name = PHONE_NUMBER"),
            self.text.replace("data/gazetteer.csv", "data/absent.csv"),
            self.text.replace("importance_cut = 0.5", "importance_cut = 1.5"),
            self.text.replace("[SCHEMA]", "[SCHEMATA]"),
        ]
        for text in broken:
            with self.assertRaises(ConfigInvalidError):
                load_config(self.write(text))

    def test_missing_file(self):
        with self.assertRaises(ConfigInvalidError):
            load_config(os.path.join(self.tmp.name, "absent.ini"))

if __name__ == "__main__":
    unittest.main()
