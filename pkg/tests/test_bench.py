import os
import unittest
from unittest.mock import MagicMock, patch

from topols.app.bench import COLUMNS, format_table, run_benchmarks, thread_count
from topols.app.config import CompileConfig


class TestBench(unittest.TestCase):
    def setUp(self):
        self.config = CompileConfig(grid=(2, 2), iterations=20, timeout_ms=60000, seeds_per_layer=1)

    def test_rows(self):
        rows = run_benchmarks(["ghz", "bv"], [3], self.config)

        self.assertEqual([(r["family"], r["compiler"]) for r in rows], [
            ("ghz", "topols"), ("ghz", "baseline"), ("bv", "topols"), ("bv", "baseline"),
        ])
        for searched, baseline in (rows[0:2], rows[2:4]):
            self.assertEqual(set(searched), set(COLUMNS))
            self.assertLessEqual(searched["volume"], baseline["volume"])
            self.assertGreaterEqual(searched["reduction_pct"], 0.0)
            self.assertEqual(baseline["reduction_pct"], 0.0)

    @patch("topols.app.bench.space_time_volume", return_value=10)
    @patch("topols.app.bench.compile_baseline")
    @patch("topols.app.bench.compile_full")
    def test_auto_grid_per_job(self, mock_full, mock_baseline, _):
        mock_full.return_value = MagicMock(volume=5, compile_time_ms=1)
        mock_full.return_value.schedule.layer_count = 2

        run_benchmarks(["ghz"], [3, 20], self.config, auto_grid=True)
        grids = [call.args[1].grid for call in mock_full.call_args_list]
        self.assertEqual(grids, [(2, 2), (5, 5)])
        self.assertEqual([call.args[1].grid for call in mock_baseline.call_args_list], grids)

        mock_full.reset_mock()
        run_benchmarks(["ghz"], [3], self.config)
        self.assertEqual(mock_full.call_args.args[1].grid, (2, 2))

    def test_unknown_family(self):
        with self.assertRaises(ValueError):
            run_benchmarks(["qft"], [3], self.config)

    def test_format_table(self):
        rows = [{
            "family": "ghz", "size": 3, "compiler": "topols", "volume": 12,
            "time_ms": 5, "layers": 2, "reduction_pct": 25.0,
        }]
        lines = format_table(rows).splitlines()

        self.assertEqual(len(lines), 3)
        self.assertTrue(lines[0].startswith("family"))
        self.assertTrue(set(lines[1]) <= {"-", " "})
        self.assertIn("25.0", lines[2])

    def test_thread_count(self):
        with patch.dict(os.environ, {"TOPOLS_THREADS": "4"}):
            self.assertEqual(thread_count(), 4)
        with patch.dict(os.environ, {"TOPOLS_THREADS": "many"}):
            self.assertEqual(thread_count(), 1)
        with patch.dict(os.environ, {"TOPOLS_THREADS": "0"}):
            self.assertEqual(thread_count(), 1)


if __name__ == "__main__":
    unittest.main()
