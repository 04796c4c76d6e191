"""
Test suite for the command-line interface.
"""

import csv
import io
import json
import os
import sys
import tempfile
import unittest

from click.testing import CliRunner

# Add the project root to the path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from cli import main
from routecog import __version__
from routecog.artifacts import COMPARE_HEADER, FLOWS_HEADER, ITERATIONS_HEADER
from routecog.network import fixture_network_text


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as handle:
        return list(csv.reader(handle))


def without_column(rows, name):
    index = rows[0].index(name)
    return [row[:index] + row[index + 1:] for row in rows]


class CliTestCase(unittest.TestCase):

    def setUp(self):
        self.runner = CliRunner()
        self.temp = tempfile.TemporaryDirectory()
        self.addCleanup(self.temp.cleanup)

    def path(self, *parts):
        return os.path.join(self.temp.name, *parts)

    def invoke(self, *args):
        return self.runner.invoke(main, list(args))


class TestChoiceCommand(CliTestCase):

    def test_kirchhoff(self):
        result = self.invoke("choice", "--costs", "5,10", "--sensitivity", "1", "--model", "kirchhoff")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("kirchhoff: 0.666667, 0.333333", result.output)
        self.assertNotIn("logit", result.output)

    def test_both_models(self):
        result = self.invoke("choice", "--costs", "105,110", "--sensitivity", "1")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("logit: ", result.output)
        self.assertIn("kirchhoff: 0.511628, 0.488372", result.output)

    def test_bad_costs(self):
        self.assertEqual(self.invoke("choice", "--costs", "5,abc").exit_code, 1)
        result = self.invoke("choice", "--costs", "5,0")
        self.assertEqual(result.exit_code, 1)
        self.assertIn("❌ Error:", result.output)


class TestValidateCommand(CliTestCase):

    def test_fixture_valid(self):
        result = self.invoke("validate")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("✅ Network valid: 12 zones", result.output)

    def test_broken_network(self):
        document = json.loads(fixture_network_text())
        for edge in document["edges"]:
            if edge["id"] == "Express1:N13-C1":
                edge["link_ids"] = ["Express1/N13-N1", "Express1/C1-N14"]
        path = self.path("broken.json")
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(document, handle)
        result = self.invoke("validate", "--network", path)
        self.assertEqual(result.exit_code, 1)
        self.assertIn("edge-connected", result.output)


class TestRoutesCommand(CliTestCase):

    def test_routes(self):
        result = self.invoke("routes", "--from", "Z1", "--to", "Z11", "-k", "3")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("3 routes", result.output)
        self.assertIn("3. cost", result.output)

    def test_unknown_zone(self):
        result = self.invoke("routes", "--from", "Z1", "--to", "Z99")
        self.assertEqual(result.exit_code, 1)
        self.assertIn("❌ Error:", result.output)


class TestRunCommand(CliTestCase):

    def run_into(self, name, *extra):
        out = self.path(name)
        result = self.invoke("run", "--max-iter", "2", "--out", out, *extra)
        self.assertEqual(result.exit_code, 0, result.output)
        return out

    def test_outputs_and_headers(self):
        out = self.run_into("a")
        iterations = read_csv(os.path.join(out, "iterations.csv"))
        flows = read_csv(os.path.join(out, "flows.csv"))
        self.assertEqual(tuple(iterations[0]), ITERATIONS_HEADER)
        self.assertEqual(tuple(flows[0]), FLOWS_HEADER)
        self.assertEqual([row[0] for row in iterations[1:]], ["0", "1"])
        self.assertEqual(flows[1][:2], ["Z1", "Z2"])
        self.assertTrue(os.path.exists(os.path.join(out, "library.json")))

    def test_reproducible(self):
        """Two runs differ at most in the timing column."""
        first, second = self.run_into("a"), self.run_into("b")
        self.assertEqual(without_column(read_csv(os.path.join(first, "iterations.csv")), "route_search_ms"),
                         without_column(read_csv(os.path.join(second, "iterations.csv")), "route_search_ms"))
        for name in ("flows.csv", "library.json"):
            with open(os.path.join(first, name), encoding="utf-8") as a, \
                    open(os.path.join(second, name), encoding="utf-8") as b:
                self.assertEqual(a.read(), b.read(), name)

    def test_library_in(self):
        """A library exported by one run makes the next run hit from its first iteration."""
        first = self.run_into("a")
        second = self.run_into("b", "--library-in", os.path.join(first, "library.json"))
        rows = read_csv(os.path.join(second, "iterations.csv"))
        self.assertEqual(float(rows[1][ITERATIONS_HEADER.index("cache_hit_rate")]), 1.0)

    def test_input_errors(self):
        self.assertEqual(self.invoke("run", "--mode", "rush").exit_code, 1)
        self.assertEqual(self.invoke("run", "--od", self.path("missing.od")).exit_code, 1)

        od = self.path("bad.od")
        with open(od, "w", encoding="utf-8") as handle:
            handle.write("2\nZ1 Z99\n0 5\n5 0\n")
        result = self.invoke("run", "--od", od, "--out", self.path("out"))
        self.assertEqual(result.exit_code, 1)
        self.assertIn("Z99", result.output)

        config = self.path("config.json")
        with open(config, "w", encoding="utf-8") as handle:
            json.dump({"colour": "red"}, handle)
        result = self.invoke("run", "--config", config, "--out", self.path("out"))
        self.assertEqual(result.exit_code, 1)
        self.assertIn("unknown configuration key 'colour'", result.output)


class TestCompareCommand(CliTestCase):

    def test_compare(self):
        out = self.path("cmp")
        result = self.invoke("compare", "--iterations", "2", "--out", out)
        self.assertEqual(result.exit_code, 0, result.output)
        with open(os.path.join(out, "compare.csv"), encoding="utf-8") as handle:
            rows = list(csv.reader(io.StringIO(handle.read())))
        self.assertEqual(tuple(rows[0]), COMPARE_HEADER)
        self.assertEqual(len(rows), 3)
        self.assertIn("mean avg travel cost", result.output)


class TestFixtureCommand(CliTestCase):

    def test_fixture(self):
        out = self.path("fixture")
        result = self.invoke("fixture", "--out", out)
        self.assertEqual(result.exit_code, 0, result.output)
        with open(os.path.join(out, "network.json"), encoding="utf-8") as handle:
            self.assertEqual(handle.read(), fixture_network_text())
        self.assertTrue(os.path.exists(os.path.join(out, "table1.od")))

    def test_version(self):
        result = self.invoke("--version")
        self.assertEqual(result.exit_code, 0)
        self.assertIn(__version__, result.output)


if __name__ == '__main__':
    unittest.main(verbosity=2)
