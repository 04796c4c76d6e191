"""
Test suite for OD matrix parsing and writing.
"""

import os
import sys
import tempfile
import unittest

# Add the project root to the path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from routecog.demand import (
    ODMatrix, check_od_zones, fixture_od, fixture_od_text, od_from_rows, parse_od, read_od, write_od,
)
from routecog.errors import DemandError
from routecog.network import fixture_network


class TestFixtureTable(unittest.TestCase):
    """The bundled flat-time table."""

    @classmethod
    def setUpClass(cls):
        cls.od = fixture_od()

    def test_zones(self):
        self.assertEqual(self.od.zone_ids, tuple(f"Z{i}" for i in range(1, 13)))

    def test_first_row(self):
        self.assertEqual(self.od.demand[0], (0, 200, 182, 221, 235, 120, 80, 60, 105, 89, 800, 253))

    def test_spot_values(self):
        self.assertEqual(self.od.value("Z1", "Z11"), 800.0)
        self.assertEqual(self.od.value("Z5", "Z6"), 1398.0)
        self.assertEqual(self.od.value("Z6", "Z5"), 1397.0)
        self.assertEqual(self.od.value("Z9", "Z8"), 276.0)

    def test_entries(self):
        """Every off-diagonal cell is positive, listed row by row."""
        entries = self.od.entries()
        self.assertEqual(len(entries), 132)
        self.assertEqual(entries[0], ("Z1", "Z2", 200.0))
        self.assertEqual(entries[-1], ("Z12", "Z11", 146.0))

    def test_comments_kept(self):
        self.assertEqual(len(self.od.comments), 2)
        self.assertTrue(self.od.comments[0].startswith(" Flat-time"))

    def test_round_trip(self):
        """Writing the parsed table reproduces the bundled file byte for byte."""
        self.assertEqual(write_od(self.od), fixture_od_text())

    def test_zones_match_network(self):
        check_od_zones(self.od, fixture_network())

    def test_scaled(self):
        peak = self.od.scaled(1.5)
        self.assertEqual(peak.value("Z1", "Z11"), 1200.0)
        self.assertAlmostEqual(peak.total(), self.od.total() * 1.5, places=6)
        self.assertIs(self.od.scaled(1.0), self.od)


class TestParseOD(unittest.TestCase):

    def test_zero_matrix(self):
        od = od_from_rows(["Z1", "Z2"], [[0, 0], [0, 0]])
        self.assertEqual(write_od(od), "2\nZ1 Z2\n0 0\n0 0\n")
        self.assertEqual(parse_od("2\nZ1 Z2\n0 0\n0 0\n"), od)
        self.assertEqual(od.entries(), [])
        self.assertEqual(od.total(), 0.0)

    def test_fractional_values_preserved(self):
        text = "* half a vehicle\n3\nA B C\n0 0.5 2\n1 0 0\n0 0.1 0\n"
        od = parse_od(text)
        self.assertEqual(od.value("A", "B"), 0.5)
        self.assertEqual(write_od(od), text)
        self.assertEqual(parse_od(write_od(od)), od)

    def test_blank_lines_ignored(self):
        od = parse_od("\n2\n\nZ1 Z2\n0 3\n\n4 0\n")
        self.assertEqual(od.value("Z2", "Z1"), 4.0)

    def test_negative_value(self):
        """The message names the offending cell."""
        with self.assertRaisesRegex(DemandError, "-5 at row Z2, column Z1"):
            parse_od("2\nZ1 Z2\n0 1\n-5 0\n")

    def test_nonzero_diagonal(self):
        with self.assertRaisesRegex(DemandError, "diagonal"):
            parse_od("2\nZ1 Z2\n3 1\n1 0\n")

    def test_not_square(self):
        with self.assertRaisesRegex(DemandError, "square"):
            parse_od("2\nZ1 Z2\n0 1 2\n1 0\n")
        with self.assertRaisesRegex(DemandError, "square"):
            parse_od("2\nZ1 Z2\n0 1\n")

    def test_non_numeric(self):
        with self.assertRaisesRegex(DemandError, "line 4"):
            parse_od("2\nZ1 Z2\n0 1\nx 0\n")

    def test_non_finite(self):
        with self.assertRaisesRegex(DemandError, "non-finite"):
            parse_od("2\nZ1 Z2\n0 nan\n1 0\n")

    def test_header_errors(self):
        with self.assertRaisesRegex(DemandError, "zone count"):
            parse_od("* only a comment\n")
        with self.assertRaisesRegex(DemandError, "zone count"):
            parse_od("two\nZ1 Z2\n0 1\n1 0\n")
        with self.assertRaisesRegex(DemandError, "3 zone ids"):
            parse_od("2\nZ1 Z2 Z3\n0 1\n1 0\n")
        with self.assertRaisesRegex(DemandError, "duplicate zone id 'Z1'"):
            parse_od("2\nZ1 Z1\n0 1\n1 0\n")

    def test_unknown_zone(self):
        od = od_from_rows(["Z1", "Z99"], [[0, 1], [1, 0]])
        with self.assertRaisesRegex(DemandError, "unknown zone id 'Z99'"):
            check_od_zones(od, fixture_network())

    def test_value_unknown_zone(self):
        with self.assertRaises(DemandError):
            fixture_od().value("Z1", "Z13")

    def test_direct_construction_validates(self):
        with self.assertRaises(DemandError):
            ODMatrix(("Z1", "Z2"), ((0.0, -1.0), (0.0, 0.0)))

    def test_read_od(self):
        with tempfile.TemporaryDirectory() as temp:
            path = os.path.join(temp, "demand.od")
            with open(path, "w", encoding="utf-8") as handle:
                handle.write("2\nZ1 Z2\n0 7\n0 0\n")
            self.assertEqual(read_od(path).value("Z1", "Z2"), 7.0)
            with self.assertRaisesRegex(DemandError, "cannot read"):
                read_od(os.path.join(temp, "missing.od"))


if __name__ == '__main__':
    unittest.main(verbosity=2)
