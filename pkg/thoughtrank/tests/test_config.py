import json
import os
import shutil
import tempfile
import unittest

from .support import CIVIL_LAW, NORMATIVE

from resources.lib.common import ConfigurationError
from resources.lib.pipeline.config import json_path, load_config, parse_config
from resources.lib.pipeline.refinement import StaticRefinement


def layer(name, thoughts, metric=None, **extra):
    entry = {"name": name, "metric": metric or {"kind": "all"}, "levels": [thoughts]}
    entry.update(extra)
    return entry


def table_thought(tid, **extra):
    entry = {"id": tid, "provider": {"kind": "table"}}
    entry.update(extra)
    return entry


class TestSchemaValidation(unittest.TestCase):

    def assertConfigError(self, data, fragment):
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(data, source="pipeline.json")
        self.assertIn(fragment, str(ctx.exception))
        self.assertTrue(str(ctx.exception).startswith("pipeline.json: "))

    def test_layers_are_required(self):
        self.assertConfigError({"query": "q"}, "'layers' is a required property")

    def test_error_names_the_json_path(self):
        data = {"layers": [layer("A", [table_thought("t1")], {"kind": "median"})]}
        self.assertConfigError(data, "$.layers[0].metric.kind")

    def test_unknown_top_level_key(self):
        self.assertConfigError({"layers": [layer("A", [table_thought("t1")])], "topk": 3}, "topk")

    def test_at_least_k_needs_k(self):
        self.assertConfigError({"layers": [layer("A", [table_thought("t1")], {"kind": "at-least-k"})]}, "'k'")

    def test_global_comparator_needs_an_aggregator(self):
        data = {"comparator": {"kind": "global"}, "layers": [layer("A", [table_thought("t1")])]}
        with self.assertRaises(ConfigurationError):
            parse_config(data)

    def test_json_path(self):
        self.assertEqual(json_path(["layers", 2, "levels", 0]), "$.layers[2].levels[0]")
        self.assertEqual(json_path([]), "$")


class TestSemanticChecks(unittest.TestCase):

    def test_thought_in_two_layers(self):
        data = {"layers": [layer("A", [table_thought("t1")]), layer("B", [table_thought("t1")])]}
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(data)
        self.assertIn("'t1'", str(ctx.exception))

    def test_duplicate_layer_names(self):
        data = {"layers": [layer("A", [table_thought("t1")]), layer("A", [table_thought("t2")])]}
        with self.assertRaises(ConfigurationError):
            parse_config(data)

    def test_at_least_k_larger_than_the_layer(self):
        data = {"layers": [layer("A", [table_thought("t1")], {"kind": "at-least-k", "k": 2})]}
        with self.assertRaises(ConfigurationError):
            parse_config(data)

    def test_chat_binding_needs_chat_settings(self):
        data = {"layers": [layer("A", [{"id": "c1", "provider": {"kind": "chat", "template": "confirm"}}])]}
        with self.assertRaises(ConfigurationError) as ctx:
            parse_config(data)
        self.assertIn("chat section", str(ctx.exception))

    def test_unknown_template(self):
        data = {
            "chat": {"model": "m"},
            "layers": [layer("A", [{"id": "c1", "provider": {"kind": "chat", "template": "limerick"}}])],
        }
        with self.assertRaises(ConfigurationError):
            parse_config(data)

    def test_binary_follows_the_binding(self):
        data = {
            "chat": {"model": "m"},
            "layers": [layer("A", [
                {"id": "k1", "provider": {"kind": "keyword", "keywords": ["x"]}},
                {"id": "c1", "provider": {"kind": "chat", "template": "confirm"}},
                {"id": "n1", "provider": {"kind": "chat", "template": "normativeness"}},
                table_thought("t1"),
                table_thought("t2", binary=True),
            ])],
        }
        config = parse_config(data)
        self.assertEqual([t.binary for t in config.layers[0].thoughts], [True, True, False, False, True])

    def test_comparators(self):
        data = {
            "comparator": {"kind": "global", "aggregator": "worst-case"},
            "layers": [
                layer("A", [table_thought("t1")]),
                layer("B", [table_thought("t2")], comparator={"kind": "local", "tolerance": 0.5}),
            ],
        }
        config = parse_config(data)
        self.assertEqual(config.layers[0].comparator.label, "worst-case-better")
        self.assertEqual(config.layers[1].comparator.tolerance, 0.5)

    def test_static_refinement(self):
        data = {"layers": [layer("A", [table_thought("t1")], retries=2, refine={
            "kind": "static", "alternatives": [[[table_thought("t1b", criterion="looser")]]],
        })]}
        spec = parse_config(data).layers[0]
        self.assertIsInstance(spec.refine, StaticRefinement)
        self.assertEqual(spec.retries, 2)
        self.assertEqual(spec.refine.alternatives[0][0][0].criterion, "looser")


class TestLoadConfig(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def write(self, name, content):
        path = os.path.join(self.tmp, name)
        with open(path, "w", encoding="utf-8") as stream:
            stream.write(content)
        return path

    def test_paths_resolve_against_the_config_directory(self):
        config = load_config(os.path.join(CIVIL_LAW, "pipeline.json"))
        self.assertEqual(config.corpus, os.path.join(CIVIL_LAW, "corpus.jsonl"))
        self.assertEqual(config.scores, os.path.join(CIVIL_LAW, "scores.jsonl"))
        self.assertTrue(config.uses_table)
        self.assertFalse(config.uses_chat)

    def test_query_file(self):
        self.write("query.txt", "  When may a buyer rescind?\n")
        data = {"query_file": "query.txt", "layers": [layer("A", [table_thought("t1")])]}
        config = load_config(self.write("pipeline.json", json.dumps(data)))
        self.assertEqual(config.query, "When may a buyer rescind?")

    def test_missing_query_file(self):
        data = {"query_file": "absent.txt", "layers": [layer("A", [table_thought("t1")])]}
        with self.assertRaises(ConfigurationError):
            load_config(self.write("pipeline.json", json.dumps(data)))

    def test_invalid_json_and_missing_file(self):
        with self.assertRaises(ConfigurationError):
            load_config(self.write("pipeline.json", "{"))
        with self.assertRaises(ConfigurationError):
            load_config(os.path.join(self.tmp, "absent.json"))

    def test_chat_fixture(self):
        config = load_config(os.path.join(CIVIL_LAW, "pipeline_chat.json"))
        self.assertTrue(config.uses_chat)
        self.assertEqual(config.mode, "replay")
        self.assertEqual(config.chat.model, "gpt-4o")
        self.assertEqual(config.parallelism, 2)

    def test_restricted_keeps_named_layers_in_order(self):
        config = load_config(os.path.join(NORMATIVE, "pipeline.json"))
        restricted = config.restricted(["FCL", "KFL"])
        self.assertEqual([(spec.index, spec.label) for spec in restricted.layers], [(1, "KFL"), (2, "FCL")])
        self.assertEqual(restricted.layers[1].thoughts[0].layer, 2)
        with self.assertRaises(ConfigurationError):
            config.restricted(["NOPE"])


if __name__ == "__main__":
    unittest.main()
