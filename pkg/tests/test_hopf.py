import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfbvp.core import DomainError, Grid, Profile
from hopfbvp.hopf import (
    BiEigenmap,
    alpha_hopf_eval,
    complex_multiplication,
    eigenvalue_check,
    hopf_construction_eval,
    hopf_eigenmap,
    identity_eigenmap,
    multiplication_by_name,
    octonion_multiplication,
    orthmul_eval,
    quaternion_multiplication,
    restricted_multiplication,
)

ALL_KINDS = [
    "complex",
    "quaternion",
    "octonion",
    "restricted3",
    "restricted5",
    "restricted9",
]


class TestOrthogonalMultiplications:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_norm_multiplicative(self, kind):
        m = multiplication_by_name(kind)
        rng = np.random.default_rng(42)
        x = rng.normal(size=(1000, m.k))
        y = rng.normal(size=(1000, m.l))
        out = orthmul_eval(m, x, y)
        err = np.abs(
            np.linalg.norm(out, axis=1)
            - np.linalg.norm(x, axis=1) * np.linalg.norm(y, axis=1)
        )
        assert np.max(err) <= 1e-12

    def test_complex_unit_times_i(self):
        m = complex_multiplication()
        out = orthmul_eval(m, np.array([1.0, 0.0]), np.array([0.0, 1.0]))
        assert np.allclose(out, [0.0, 1.0])

    def test_dimension_mismatch(self):
        m = quaternion_multiplication()
        with pytest.raises(ValueError):
            orthmul_eval(m, np.ones(3), np.ones(4))

    @given(
        a=st.floats(min_value=-3, max_value=3),
        b=st.floats(min_value=-3, max_value=3),
    )
    @settings(max_examples=50)
    def test_bilinearity(self, a, b):
        m = octonion_multiplication()
        rng = np.random.default_rng(1)
        x, xp, y = rng.normal(size=(3, 8))
        lhs = orthmul_eval(m, a * x + b * xp, y)
        rhs = a * orthmul_eval(m, x, y) + b * orthmul_eval(m, xp, y)
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * (1 + abs(a) + abs(b))

    def test_octonion_basis_table(self):
        m = octonion_multiplication()
        e = np.eye(8)
        for i in range(8):
            for j in range(8):
                p = orthmul_eval(m, e[i], e[j])
                nz = np.nonzero(p)[0]
                assert nz.size == 1
                assert abs(p[nz[0]]) == 1.0
        # e0 is a two-sided unit
        for i in range(8):
            assert np.allclose(orthmul_eval(m, e[0], e[i]), e[i])
            assert np.allclose(orthmul_eval(m, e[i], e[0]), e[i])

    def test_octonion_alternativity(self):
        m = octonion_multiplication()
        rng = np.random.default_rng(9)
        for _ in range(20):
            x, y = rng.normal(size=(2, 8))
            xx_y = orthmul_eval(m, orthmul_eval(m, x, x), y)
            x_xy = orthmul_eval(m, x, orthmul_eval(m, x, y))
            assert np.max(np.abs(xx_y - x_xy)) <= 1e-12 * (
                1 + np.linalg.norm(x) ** 2 * np.linalg.norm(y)
            )

    def test_quaternion_associativity_exact_on_basis(self):
        m = quaternion_multiplication()
        e = np.eye(4)
        for i in range(4):
            for j in range(4):
                for k in range(4):
                    ab_c = orthmul_eval(m, orthmul_eval(m, e[i], e[j]), e[k])
                    a_bc = orthmul_eval(m, e[i], orthmul_eval(m, e[j], e[k]))
                    assert np.array_equal(ab_c, a_bc)

    def test_restricted_dimensions(self):
        for l, n_out in [(3, 4), (5, 6), (9, 10)]:
            m = restricted_multiplication(l)
            assert (m.k, m.l, m.n_out) == (2, l, n_out)
        with pytest.raises(ValueError):
            restricted_multiplication(4)


class TestHopfConstruction:
    def test_equator_case(self):
        m = complex_multiplication()
        r = 1.0 / math.sqrt(2.0)
        out = hopf_construction_eval(m, np.array([r, 0.0]), np.array([r, 0.0]))
        assert out[-1] == pytest.approx(0.0, abs=1e-15)
        assert np.linalg.norm(out[:-1]) == pytest.approx(1.0, abs=1e-13)

    def test_zero_second_argument(self):
        m = quaternion_multiplication()
        x = np.array([0.5, 0.5, 0.5, 0.5])
        out = hopf_construction_eval(m, x, np.zeros(4))
        assert np.allclose(out[:-1], 0.0)
        assert out[-1] == pytest.approx(1.0, abs=1e-15)

    def test_sphere_to_sphere(self):
        rng = np.random.default_rng(3)
        for kind in ALL_KINDS:
            m = multiplication_by_name(kind)
            z = rng.normal(size=m.k + m.l)
            z /= np.linalg.norm(z)
            out = hopf_construction_eval(m, z[: m.k], z[m.k :])
            assert abs(np.linalg.norm(out) - 1.0) <= 1e-12


class TestEigenvalues:
    def test_classical_values(self):
        assert eigenvalue_check(complex_multiplication()) == 8
        assert eigenvalue_check(quaternion_multiplication()) == 16
        assert eigenvalue_check(octonion_multiplication()) == 32

    def test_hessian_traces_exactly_zero(self):
        # the trace computation is integer arithmetic on the tensors
        m = octonion_multiplication()
        for comp in range(m.n_out):
            h = np.zeros((16, 16), dtype=np.int64)
            h[:8, 8:] = 2 * m.tensor[comp]
            h[8:, :8] = 2 * m.tensor[comp].T
            assert int(np.trace(h)) == 0

    def test_requires_square(self):
        with pytest.raises(ValueError):
            eigenvalue_check(restricted_multiplication(3))


class TestBiEigenmap:
    def test_circle_eigenvalue_is_degree_squared(self):
        be = BiEigenmap(3, identity_eigenmap(4))
        assert be.lam == 9.0
        assert be.mu == 3.0  # identity on S^3

    def test_hopf_second_factor(self):
        be = BiEigenmap(1, hopf_eigenmap(complex_multiplication()))
        assert be.mu == 8.0
        assert be.target_dim == 4  # odd 3-dim target coupled into R^4

    def test_unit_sphere_valued(self):
        rng = np.random.default_rng(12)
        for second in (
            identity_eigenmap(4),
            hopf_eigenmap(complex_multiplication()),
            hopf_eigenmap(quaternion_multiplication()),
        ):
            be = BiEigenmap(2, second)
            for _ in range(50):
                th = rng.uniform(0, 2 * math.pi)
                x = np.array([math.cos(th), math.sin(th)])
                y = rng.normal(size=second.dim_in)
                y /= np.linalg.norm(y)
                assert abs(np.linalg.norm(be(x, y)) - 1.0) <= 1e-12


class TestAlphaHopfEval:
    def _straight_profile(self):
        t = np.linspace(1e-4, math.pi / 2 - 1e-4, 2001)
        return Profile(Grid(t), 2.0 * t)

    def test_output_norm(self):
        prof = self._straight_profile()
        rng = np.random.default_rng(0)
        m = complex_multiplication()
        worst = 0.0
        for _ in range(2000):
            t = rng.uniform(prof.t[0], prof.t[-1])
            x = rng.normal(size=2)
            x /= np.linalg.norm(x)
            y = rng.normal(size=2)
            y /= np.linalg.norm(y)
            u = alpha_hopf_eval(prof, m, t, x, y)
            worst = max(worst, abs(np.linalg.norm(u) - 1.0))
        assert worst <= 1e-10

    def test_equator_value(self):
        prof = self._straight_profile()
        m = complex_multiplication()
        u = alpha_hopf_eval(
            prof, m, math.pi / 4, np.array([1.0, 0.0]), np.array([0.0, 1.0])
        )
        assert np.allclose(u[:2], [0.0, 1.0], atol=1e-9)
        assert abs(u[2]) < 1e-9

    def test_poles(self):
        prof = self._straight_profile()
        m = complex_multiplication()
        x = np.array([1.0, 0.0])
        u0 = alpha_hopf_eval(prof, m, prof.t[0], x, x)
        u1 = alpha_hopf_eval(prof, m, prof.t[-1], x, x)
        north = np.array([0.0, 0.0, 1.0])
        assert np.linalg.norm(u0 - north) <= 1e-3
        assert np.linalg.norm(u1 + north) <= 1e-3

    def test_outside_domain(self):
        prof = self._straight_profile()
        m = complex_multiplication()
        x = np.array([1.0, 0.0])
        with pytest.raises(DomainError):
            alpha_hopf_eval(prof, m, math.pi / 2, x, x)
