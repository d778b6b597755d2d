import math
import unittest

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from src.config.config import ModelSpec
from src.errors import DimensionError, InvalidModelError
from src.model.hamiltonian import apply, build, build_continuum, build_lattice, build_onsite
from src.model.potentials import make_preset
from src.spectral.eigen import eigendecompose, ground_state


class LatticeBuilderTests(unittest.TestCase):
    def test_impurity_lattice_entries(self) -> None:
        H = build_lattice(-4.0, 2)
        np.testing.assert_array_equal(H.diag, [0, 0, -4, 0, 0])
        np.testing.assert_array_equal(H.offdiag, [1, 1, 1, 1])
        self.assertEqual(H.n, 5)
        self.assertEqual(H.center, 2)

    def test_free_lattice_is_path_graph(self) -> None:
        H = build_lattice(0.0, 2)
        expected = np.diag(np.ones(4), 1) + np.diag(np.ones(4), -1)
        np.testing.assert_array_equal(H.to_dense(), expected)

    def test_positions_and_site_labels(self) -> None:
        H = build_lattice(-4.0, 3)
        np.testing.assert_array_equal(H.positions, np.arange(-3, 4))
        self.assertEqual(H.index_of(0), 3)
        self.assertEqual(H.index_of(-3), 0)
        with self.assertRaises(DimensionError):
            H.index_of(4)

    def test_invalid_inputs_rejected(self) -> None:
        with self.assertRaises(InvalidModelError):
            build_lattice(-4.0, 0)
        with self.assertRaises(InvalidModelError):
            build_lattice(float("nan"), 5)
        with self.assertRaises(InvalidModelError):
            build_lattice(-4.0, 2.5)

    def test_arrays_are_read_only(self) -> None:
        H = build_lattice(-4.0, 2)
        with self.assertRaises(ValueError):
            H.diag[0] = 1.0

    def test_onsite_builder(self) -> None:
        H = build_onsite([0.5, -1.0, 0.5])
        np.testing.assert_array_equal(H.diag, [0.5, -1.0, 0.5])
        self.assertEqual(H.center, 1)
        with self.assertRaises(InvalidModelError):
            build_onsite([1.0, 2.0])

    def test_norm_bound_dominates_spectrum(self) -> None:
        H = build_lattice(-4.0, 20)
        values = eigendecompose(H).values
        self.assertGreaterEqual(H.norm_bound, np.max(np.abs(values)))


class ApplyTests(unittest.TestCase):
    def test_adjacency_action(self) -> None:
        H = build_lattice(0.0, 1)
        np.testing.assert_array_equal(apply(H, np.array([1.0, 0.0, 0.0])), [0.0, 1.0, 0.0])

    def test_zero_vector(self) -> None:
        H = build_lattice(-4.0, 5)
        np.testing.assert_array_equal(apply(H, np.zeros(H.n)), np.zeros(H.n))

    def test_center_column(self) -> None:
        H = build_lattice(-4.0, 2)
        e = np.zeros(5)
        e[2] = 1.0
        np.testing.assert_array_equal(apply(H, e), [0.0, 1.0, -4.0, 1.0, 0.0])

    def test_matches_dense_product_for_complex_columns(self) -> None:
        rng = np.random.default_rng(3)
        H = build_lattice(-2.0, 6)
        v = rng.standard_normal((H.n, 2)) + 1j * rng.standard_normal((H.n, 2))
        np.testing.assert_allclose(apply(H, v), H.to_dense() @ v, atol=1e-14)

    def test_length_mismatch(self) -> None:
        with self.assertRaises(DimensionError):
            apply(build_lattice(0.0, 2), np.zeros(4))


class SpectrumTests(unittest.TestCase):
    def test_free_spectrum_matches_closed_form_for_large_box(self) -> None:
        H = build_lattice(0.0, 2000)
        self.assertEqual(H.n, 4001)
        values = eigvalsh_tridiagonal(H.diag, H.offdiag)
        j = np.arange(H.n, 0, -1)
        expected = 2.0 * np.cos(j * math.pi / (H.n + 1))
        self.assertLessEqual(np.max(np.abs(values - expected)), 1e-10)

    def test_only_the_bound_state_leaves_the_band(self) -> None:
        for V in (-0.5, -1.0, -4.0, -10.0):
            values = eigendecompose(build_lattice(V, 200)).values
            self.assertEqual(int(np.sum(values < -2.0)), 1, msg=f"V={V}")
            self.assertAlmostEqual(values[0], -math.sqrt(V * V + 4.0), delta=1e-10, msg=f"V={V}")
            self.assertTrue(np.all(np.abs(values[1:]) <= 2.0), msg=f"V={V}")

    def test_apply_is_symmetric(self) -> None:
        rng = np.random.default_rng(7)
        for H in (build_lattice(-4.0, 50), build_continuum(make_preset("poschl_teller", {}), 5.0, 0.1)):
            v = rng.standard_normal(H.n)
            w = rng.standard_normal(H.n)
            lhs = v @ apply(H, w)
            rhs = w @ apply(H, v)
            scale = H.norm_bound * np.linalg.norm(v) * np.linalg.norm(w)
            self.assertAlmostEqual(lhs, rhs, delta=1e-13 * (1.0 + scale))


class ContinuumBuilderTests(unittest.TestCase):
    def test_free_dirichlet_ground_energy(self) -> None:
        preset = make_preset("gaussian_well", {"depth": 0.0, "width": 1.0})
        H = build_continuum(preset, math.pi, 0.01)
        E0 = ground_state(H).energy
        self.assertAlmostEqual(E0, 0.25, delta=1e-4)

    def test_poschl_teller_ground_energy(self) -> None:
        preset = make_preset("poschl_teller", {"depth": 2.0})
        self.assertAlmostEqual(preset.exact_ground_energy, -1.0)
        H = build_continuum(preset, 20.0, 0.01)
        self.assertAlmostEqual(ground_state(H).energy, -1.0, delta=1e-3)

    def test_gaussian_well_ground_state_is_even(self) -> None:
        H = build_continuum(make_preset("gaussian_well"), 10.0, 0.05)
        psi = ground_state(H).vector
        np.testing.assert_allclose(psi, psi[::-1], atol=1e-10)
        self.assertEqual(int(np.argmax(np.abs(psi))), H.center)

    def test_origin_is_a_grid_node(self) -> None:
        H = build_continuum(make_preset("poschl_teller"), 5.0, 0.3)
        self.assertEqual(H.n % 2, 1)
        self.assertAlmostEqual(H.positions[H.center], 0.0, places=12)
        self.assertAlmostEqual(H.offdiag[0], -1.0 / H.h**2)

    def test_degenerate_interval(self) -> None:
        preset = make_preset("poschl_teller")
        with self.assertRaises(InvalidModelError):
            build_continuum(preset, 1.0, 0.0)
        with self.assertRaises(InvalidModelError):
            build_continuum(preset, 0.1, 0.1)

    def test_unknown_preset(self) -> None:
        with self.assertRaises(InvalidModelError):
            make_preset("square_well")


class BuildDispatchTests(unittest.TestCase):
    def test_each_kind(self) -> None:
        self.assertEqual(build(ModelSpec(kind="lattice_impurity", V=-1.0), 4).n, 9)
        self.assertEqual(build(ModelSpec(kind="lattice_onsite", values=[0.0, 1.0, 0.0]), 99).n, 3)
        H = build(ModelSpec(kind="continuum_1d", preset="poschl_teller", h=0.1), 5.0)
        self.assertEqual(H.kind, "continuum")
        self.assertIsNotNone(H.preset)


if __name__ == "__main__":
    unittest.main()
