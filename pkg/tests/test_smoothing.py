import math
import unittest

import numpy as np
from scipy.integrate import quad

from src.errors import ConfigError
from src.model.hamiltonian import build_lattice
from src.response.exact import exact_spectral_density
from src.response.finite import freq_response_sos, spectral_weight
from src.response.observables import observables_delta0
from src.smoothing.density import order_slope, smoothed_density
from src.smoothing.kernels import KernelSpec, hermite_coefficients, kernel_eval, kernel_moment
from src.spectral.eigen import eigendecompose


class KernelTests(unittest.TestCase):
    def test_lorentzian_peak(self) -> None:
        self.assertAlmostEqual(kernel_eval(KernelSpec("lorentzian", 1.0), 0.0), 1.0 / math.pi, places=15)

    def test_gaussian_normalized(self) -> None:
        spec = KernelSpec("gaussian", 0.3)
        self.assertAlmostEqual(kernel_moment(spec, 0), 1.0, delta=1e-10)
        mass, _ = quad(lambda x: kernel_eval(spec, x), -np.inf, np.inf, epsabs=1e-13)
        self.assertAlmostEqual(mass, 1.0, delta=1e-10)

    def test_hermite3_coefficients_and_moments(self) -> None:
        c0, c1 = hermite_coefficients(3)
        self.assertAlmostEqual(c0, 1.5, places=12)
        self.assertAlmostEqual(c1, -0.5, places=12)
        spec = KernelSpec("hermite", 0.7, 3)
        self.assertAlmostEqual(kernel_moment(spec, 0), 1.0, delta=1e-10)
        second, _ = quad(lambda x: x * x * kernel_eval(spec, x), -np.inf, np.inf, epsabs=1e-12)
        self.assertAlmostEqual(second, 0.0, delta=1e-8)
        self.assertAlmostEqual(kernel_moment(spec, 2), 0.0, delta=1e-8)
        self.assertNotAlmostEqual(kernel_moment(spec, 4), 0.0, delta=1e-3)

    def test_higher_order_hermite_cancels_more_moments(self) -> None:
        spec = KernelSpec("hermite", 1.0, 5)
        for k in (2, 4):
            self.assertAlmostEqual(kernel_moment(spec, k), 0.0, delta=1e-8)

    def test_lorentzian_moments_diverge(self) -> None:
        self.assertTrue(math.isnan(kernel_moment(KernelSpec("lorentzian", 0.1), 2)))
        self.assertIsNone(KernelSpec("lorentzian", 0.1).order)

    def test_width_must_be_positive(self) -> None:
        with self.assertRaises(ValueError):
            kernel_eval(KernelSpec("gaussian", 0.0), 1.0)
        with self.assertRaises(ValueError):
            kernel_eval(KernelSpec("gaussian", -0.1), 1.0)

    def test_family_names(self) -> None:
        spec = KernelSpec.from_name("hermite3", 0.1)
        self.assertEqual((spec.family, spec.p, spec.order, spec.label), ("hermite", 3, 3, "hermite3"))
        self.assertEqual(KernelSpec.from_name("gaussian", 0.1).order, 1)
        with self.assertRaises(ConfigError):
            KernelSpec.from_name("hermite4", 0.1)
        with self.assertRaises(ValueError):
            KernelSpec("boxcar", 0.1)


class SmoothedDensityTests(unittest.TestCase):
    def test_single_atom_at_zero(self) -> None:
        spec = KernelSpec("gaussian", 0.2)
        omegas = np.linspace(-1, 1, 11)
        np.testing.assert_allclose(smoothed_density([1.0], [0.0], spec, omegas), kernel_eval(spec, omegas), atol=1e-15)

    def test_lorentzian_equals_positive_frequency_term(self) -> None:
        eig = eigendecompose(build_lattice(-4.0, 100))
        obs = observables_delta0(eig)
        weights, freqs = spectral_weight(eig, obs)
        eta = 0.1
        omegas = np.array([1.0, 3.0, 5.0])
        smoothed = smoothed_density(weights, freqs, KernelSpec("lorentzian", eta), omegas)
        z = omegas + 1j * eta
        first = (weights[None, :] / (z[:, None] - freqs[None, :])).sum(axis=1)
        np.testing.assert_allclose(smoothed, -first.imag / math.pi, atol=1e-12)
        # The full response adds the negative-frequency term on top.
        full = freq_response_sos(eig, obs, omegas, eta)
        self.assertTrue(np.all(np.abs(-full.imag / math.pi - smoothed) > 0))


class OrderSlopeTests(unittest.TestCase):
    @classmethod
    def setUpClass(cls) -> None:
        eig = eigendecompose(build_lattice(-4.0, 2000))
        cls.weights, cls.freqs = spectral_weight(eig, observables_delta0(eig))
        cls.exact = exact_spectral_density(-4.0, 3.0)
        cls.etas = np.geomspace(0.01, 0.1, 9)

    def test_gaussian_error_shrinks_like_eta_squared(self) -> None:
        spec_small = KernelSpec("gaussian", 0.05)
        spec_large = KernelSpec("gaussian", 0.1)
        err_small = abs(smoothed_density(self.weights, self.freqs, spec_small, 3.0)[0] - self.exact)
        err_large = abs(smoothed_density(self.weights, self.freqs, spec_large, 3.0)[0] - self.exact)
        self.assertAlmostEqual(err_large / err_small, 4.0, delta=0.6)

    def test_slopes_match_kernel_order(self) -> None:
        expected = {"lorentzian": (1.0, 0.15), "gaussian": (2.0, 0.2), "hermite3": (4.0, 0.5)}
        for family, (slope, tol) in expected.items():
            fit = order_slope(self.weights, self.freqs, family, 3.0, self.etas, self.exact)
            self.assertAlmostEqual(fit.slope, slope, delta=tol, msg=family)
            self.assertGreaterEqual(fit.n_points, 3)


if __name__ == "__main__":
    unittest.main()
