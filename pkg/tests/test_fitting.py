import math
import unittest

import numpy as np

from src.errors import FitError
from src.harness.fitting import exponential_rate, loglog_slope, noise_floor, roundoff_floor


def _decay_with_floor() -> tuple:
    x = np.arange(1.0, 13.0)
    y = 10.0 ** -x
    y[8:] = 1e-14 * np.array([1.0, 1.3, 0.8, 1.1])
    return x, y


class LoglogSlopeTests(unittest.TestCase):
    def test_exact_power_law(self) -> None:
        x = np.geomspace(1e-3, 1.0, 9)
        fit = loglog_slope(x, 3.0 * x**2)
        self.assertAlmostEqual(fit.slope, 2.0, places=10)
        self.assertAlmostEqual(math.exp(fit.intercept), 3.0, places=8)
        self.assertAlmostEqual(fit.r_squared, 1.0, places=12)
        self.assertEqual(fit.n_points, 9)
        self.assertEqual(fit.excluded, [])

    def test_signs_are_ignored(self) -> None:
        x = np.geomspace(0.01, 0.1, 5)
        fit = loglog_slope(x, -(x**4))
        self.assertAlmostEqual(fit.slope, 4.0, places=10)

    def test_absolute_floor_drops_points(self) -> None:
        x = np.geomspace(1e-4, 1.0, 9)
        fit = loglog_slope(x, x, absolute_floor=2e-3)
        self.assertEqual(fit.excluded, [0, 1, 2, 3, 4])
        self.assertAlmostEqual(fit.slope, 1.0, places=10)

    def test_rejects_bad_input(self) -> None:
        with self.assertRaises(FitError):
            loglog_slope([0.0, 1.0, 2.0], [1.0, 2.0, 3.0])
        with self.assertRaises(FitError):
            loglog_slope([1.0, 2.0], [1.0, 2.0])
        with self.assertRaises(FitError):
            loglog_slope([1.0, 2.0, 3.0], [1.0, 2.0])


class ExponentialRateTests(unittest.TestCase):
    def test_recovers_rate_and_drops_floor(self) -> None:
        x, y = _decay_with_floor()
        fit = exponential_rate(x, y)
        self.assertAlmostEqual(fit.rate, math.log(10.0), places=8)
        self.assertEqual(fit.excluded, [8, 9, 10, 11])
        self.assertEqual(fit.n_points, 8)

    def test_too_few_points_above_floor(self) -> None:
        x = np.arange(6.0)
        y = np.array([1e-2, 1e-14, 1e-14, 1e-14, 1e-14, 1e-14])
        with self.assertRaises(FitError):
            exponential_rate(x, y, absolute_floor=1e-13)


class NoiseFloorTests(unittest.TestCase):
    def test_detects_flat_tail(self) -> None:
        x, y = _decay_with_floor()
        floor = noise_floor(x, y, log_x=False)
        self.assertGreater(floor, 0.7e-14)
        self.assertLess(floor, 1.4e-14)

    def test_clean_curve_has_no_floor(self) -> None:
        x = np.geomspace(0.01, 1.0, 8)
        self.assertEqual(noise_floor(x, x**3), 0.0)
        self.assertEqual(noise_floor(x, x**3, absolute=1e-5), 1e-5)

    def test_increasing_curve_is_read_from_small_x(self) -> None:
        x = np.arange(1.0, 9.0)
        y = np.concatenate([np.full(4, 1e-15), 10.0 ** (x[4:] - 20)])
        self.assertAlmostEqual(noise_floor(x, y, log_x=False), 1e-15, delta=1e-30)


class RoundoffFloorTests(unittest.TestCase):
    def test_scales_with_magnitude(self) -> None:
        eps = np.finfo(float).eps
        self.assertEqual(roundoff_floor(0.5), 64 * eps)
        self.assertEqual(roundoff_floor(-100.0), 6400 * eps)


if __name__ == "__main__":
    unittest.main()
