import unittest
from unittest import mock

import numpy as np

from src.config import config
from src.dynamics.kubo import causal_convolution, dyson_first_order, kubo_remainder
from src.dynamics.moments import moment_growth
from src.dynamics.propagation import Drive, default_dt, propagate_free, propagate_free_many, propagate_perturbed
from src.errors import DimensionError, StepSizeError
from src.model.hamiltonian import build_lattice
from src.response.finite import time_response_values
from src.response.observables import delta0, observables_delta0
from src.spectral.eigen import eigendecompose, ground_state


class DriveTests(unittest.TestCase):
    def test_profiles_are_causal_and_bounded(self) -> None:
        ts = np.linspace(-5, 20, 501)
        for name in ("ramp", "sin2"):
            values = Drive(name)(ts)
            self.assertTrue(np.all(values[ts < 0] == 0.0))
            self.assertTrue(np.all(np.abs(values) <= 1.0))
        self.assertAlmostEqual(Drive("ramp")(1.0), 1.0 - np.exp(-1.0))
        self.assertAlmostEqual(Drive("sin2")(np.pi / 2), 1.0)

    def test_unknown_drive(self) -> None:
        with self.assertRaises(ValueError):
            Drive("step")


class FreePropagationTests(unittest.TestCase):
    def setUp(self) -> None:
        self.H = build_lattice(-4.0, 40)
        self.eig = eigendecompose(self.H)
        self.rng = np.random.default_rng(11)

    def test_identity_at_zero(self) -> None:
        v = self.rng.standard_normal(self.H.n)
        np.testing.assert_array_equal(propagate_free(self.eig, v, 0.0), v)

    def test_many_times_keep_initial_state_exact(self) -> None:
        v = np.zeros(self.H.n)
        v[self.H.n // 2] = 1.0
        states = propagate_free_many(self.eig, v, np.array([0.0, 1.0, 0.0, 3.0]))
        np.testing.assert_array_equal(states[:, 0], v)
        np.testing.assert_array_equal(states[:, 2], v)
        np.testing.assert_allclose(states[:, 1], propagate_free(self.eig, v, 1.0), atol=1e-13)
        with self.assertRaises(DimensionError):
            propagate_free_many(self.eig, np.ones(3), np.array([0.0]))

    def test_eigenphase(self) -> None:
        k = 5
        out = propagate_free(self.eig, self.eig.vectors[:, k], 2.5)
        np.testing.assert_allclose(out, np.exp(-2.5j * self.eig.values[k]) * self.eig.vectors[:, k], atol=1e-13)

    def test_unitary(self) -> None:
        v = self.rng.standard_normal(self.H.n) + 1j * self.rng.standard_normal(self.H.n)
        out = propagate_free(self.eig, v, 17.3)
        self.assertAlmostEqual(np.linalg.norm(out), np.linalg.norm(v), delta=1e-12)

    def test_dimension_mismatch(self) -> None:
        with self.assertRaises(DimensionError):
            propagate_free(self.eig, np.ones(3), 1.0)


class PerturbedPropagationTests(unittest.TestCase):
    def setUp(self) -> None:
        self.H = build_lattice(-4.0, 60)
        self.eig = eigendecompose(self.H)
        self.gs = ground_state(self.H, eig=self.eig)
        self.mask = delta0(self.H.n)

    def test_zero_epsilon_matches_free_evolution(self) -> None:
        rng = np.random.default_rng(5)
        psi = rng.standard_normal(self.H.n)
        psi /= np.linalg.norm(psi)
        traj = propagate_perturbed(self.H, self.mask, 0.0, Drive("ramp"), 0.001, 2.0, psi0=psi)
        exact = propagate_free(self.eig, psi, 2.0)
        # Crank-Nicolson phase error is O(dt^2 ||H||^3 T).
        self.assertLess(np.linalg.norm(traj.states[-1] - exact), 1e-4)

    def test_starts_at_ground_state_and_stays_normalized(self) -> None:
        traj = propagate_perturbed(self.H, self.mask, 0.05, Drive("ramp"), None, 2.0)
        np.testing.assert_allclose(np.abs(traj.states[0]), np.abs(self.gs.vector), atol=1e-13)
        norms = np.linalg.norm(traj.states, axis=1)
        self.assertLess(np.max(np.abs(norms - 1.0)), 1e-9)
        self.assertEqual(traj.times[0], 0.0)
        self.assertAlmostEqual(traj.times[-1], 2.0)
        self.assertLessEqual(traj.dt, default_dt(self.H, 0.05))

    def test_step_halving_converges(self) -> None:
        kwargs = dict(psi0=self.gs.vector, observable=self.mask, record_every=10_000)
        coarse = propagate_perturbed(self.H, self.mask, 0.05, Drive("ramp"), 0.01, 5.0, **kwargs)
        fine = propagate_perturbed(self.H, self.mask, 0.05, Drive("ramp"), 0.005, 5.0, **kwargs)
        diff = np.max(np.abs(coarse.expectation - fine.expectation[::2]))
        signal = np.max(np.abs(fine.expectation - fine.expectation[0]))
        self.assertGreater(signal, 0.0)
        self.assertLess(diff, 1e-2 * signal)

    def test_invalid_arguments(self) -> None:
        with self.assertRaises(ValueError):
            propagate_perturbed(self.H, self.mask, 1.5, Drive("ramp"), 0.01, 1.0)
        with self.assertRaises(ValueError):
            propagate_perturbed(self.H, self.mask, 0.1, Drive("ramp"), -0.01, 1.0)
        with self.assertRaises(DimensionError):
            propagate_perturbed(self.H, np.ones(3), 0.1, Drive("ramp"), 0.01, 1.0)

    def test_norm_drift_beyond_tolerance_raises(self) -> None:
        with mock.patch.object(config, "NORM_DRIFT_TOL", -1.0):
            with self.assertRaises(StepSizeError):
                propagate_perturbed(self.H, self.mask, 0.1, Drive("sin2"), 0.05, 1.0)


class KuboTests(unittest.TestCase):
    def test_trapezoid_convolution_of_constants(self) -> None:
        dt = 0.01
        ts = dt * np.arange(101)
        out = causal_convolution(np.ones_like(ts), np.ones_like(ts), dt)
        np.testing.assert_allclose(out, ts, atol=1e-12)

    def test_dyson_term_matches_convolution(self) -> None:
        H = build_lattice(-4.0, 60)
        eig = eigendecompose(H)
        obs = observables_delta0(eig)
        dt = 0.002
        ts = dt * np.arange(2501)
        drive = Drive("ramp")
        conv = causal_convolution(time_response_values(eig, obs, ts), drive(ts), dt)
        dyson = dyson_first_order(eig, obs, drive, ts)
        self.assertLess(np.max(np.abs(conv - dyson)), 1e-5)

    def test_remainder_is_second_order(self) -> None:
        H = build_lattice(-4.0, 60)
        report = kubo_remainder(H, [0.02, 0.04, 0.08], Drive("ramp"), T=4.0, dt=0.002)
        sups = [row.sup_remainder for row in report.rows]
        self.assertTrue(sups[0] < sups[1] < sups[2])
        self.assertIsNotNone(report.fit)
        self.assertAlmostEqual(report.slope, 2.0, delta=0.2)
        self.assertTrue(all(row.norm_drift < 1e-9 for row in report.rows))


class MomentGrowthTests(unittest.TestCase):
    def test_stationary_state_has_constant_moments(self) -> None:
        H = build_lattice(-4.0, 100)
        eig = eigendecompose(H)
        table = moment_growth(eig, eig.vectors[:, 0], np.linspace(0, 20, 21), positions=H.positions)
        np.testing.assert_allclose(table.position, table.position[0], rtol=1e-10)
        np.testing.assert_allclose(table.difference, table.difference[0], rtol=1e-10)
        self.assertLess(table.position[0], 1.0)

    def test_free_packet_spreads_ballistically(self) -> None:
        H = build_lattice(0.0, 400)
        eig = eigendecompose(H)
        psi = np.exp(-0.5 * (H.positions / 3.0) ** 2).astype(complex)
        psi /= np.linalg.norm(psi)
        table = moment_growth(eig, psi, np.linspace(0, 100, 51), positions=H.positions)
        speed = table.ballistic_speed(t_min=50.0)
        self.assertGreater(speed, 0.1)
        self.assertLess(speed, 2.0)
        self.assertTrue(table.is_bounded(table.quadratic_constant))
        self.assertFalse(table.is_bounded(0.5 * table.quadratic_constant))
        self.assertGreater(table.position[-1], 10.0 * table.position[0])
        self.assertLessEqual(np.max(table.difference), 2.0 + 1e-12)


if __name__ == "__main__":
    unittest.main()
