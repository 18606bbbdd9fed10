"""Transforms, derivatives, dealiasing, projections, and norm quadrature."""

import numpy as np
import pytest

from conftest import random_real_field, truncated_convolution
from couette_ks.grid import (
    dealias,
    ddx,
    ddy,
    from_spectral,
    laplacian,
    lp_norm,
    make_grid,
    project_nonzero,
    project_zero,
    spectral_l2,
    to_spectral,
)


class TestMakeGrid:
    def test_small_grid_wavenumbers(self):
        g = make_grid(8, 8, np.pi)
        assert sorted(g.mx) == list(range(-3, 5))
        assert sorted(g.my) == list(range(-3, 5))
        # pi/Ly = 1, so ky are the integers too
        assert sorted(np.rint(g.ky).astype(int)) == list(range(-3, 5))

    def test_default_ky_spacing(self):
        g = make_grid(128, 256, 4 * np.pi)
        spacings = np.diff(np.sort(g.ky))
        assert np.allclose(spacings, 0.25)

    def test_lx_fixed(self):
        g = make_grid(16, 16, 2.0)
        assert g.Lx == 2 * np.pi

    @pytest.mark.parametrize("bad", [(7, 8, 1.0), (8, 9, 1.0), (4, 8, 1.0), (8, 8, 0.0), (8, 8, -2.0)])
    def test_rejects_bad_parameters(self, bad):
        with pytest.raises(ValueError):
            make_grid(*bad)


class TestTransforms:
    def test_constant_field_mean_convention(self):
        g = make_grid(16, 16, np.pi)
        f = to_spectral(g, np.ones((16, 16)))
        assert f.coef[0, 0] == pytest.approx(1.0)
        other = f.coef.copy()
        other[0, 0] = 0.0
        assert np.max(np.abs(other)) < 1e-14

    def test_single_x_harmonic(self):
        g = make_grid(32, 64, 4.0)
        X, Y = np.meshgrid(g.x, g.y, indexing="ij")
        f = to_spectral(g, np.sin(X) * np.exp(-(Y**2)))
        energy = np.sum(np.abs(f.coef) ** 2, axis=1)
        inside = energy[np.abs(g.mx) == 1].sum()
        assert inside / energy.sum() > 1 - 1e-12

    def test_round_trip_random(self):
        g = make_grid(64, 32, 2.5)
        rng = np.random.default_rng(0)
        samples = rng.standard_normal((64, 32))
        back = from_spectral(to_spectral(g, samples))
        assert np.max(np.abs(back - samples)) < 1e-12 * np.max(np.abs(samples))

    def test_hermitian_symmetry(self):
        g = make_grid(16, 16, 1.0)
        rng = np.random.default_rng(1)
        f = to_spectral(g, rng.standard_normal((16, 16)))
        c = f.coef
        for i in range(16):
            for j in range(16):
                assert c[-i % 16, -j % 16] == pytest.approx(np.conj(c[i, j]), abs=1e-13)

    def test_shape_mismatch(self):
        g = make_grid(16, 16, 1.0)
        with pytest.raises(ValueError):
            to_spectral(g, np.ones((16, 8)))


class TestDerivatives:
    def test_ddx_sin(self):
        g = make_grid(32, 16, 1.0)
        X, _ = np.meshgrid(g.x, g.y, indexing="ij")
        out = from_spectral(ddx(to_spectral(g, np.sin(X))))
        assert np.max(np.abs(out - np.cos(X))) < 1e-12

    def test_laplacian_constant(self):
        g = make_grid(16, 16, 1.0)
        out = laplacian(to_spectral(g, np.full((16, 16), 3.7)))
        assert np.max(np.abs(out.coef)) == 0.0

    def test_ddy_gaussian_analytic(self):
        g = make_grid(8, 256, 4 * np.pi)
        _, Y = np.meshgrid(g.x, g.y, indexing="ij")
        out = from_spectral(ddy(to_spectral(g, np.exp(-(Y**2)))))
        assert np.max(np.abs(out - (-2 * Y * np.exp(-(Y**2))))) < 1e-8

    def test_ddx_commutes_with_projection(self):
        g = make_grid(16, 16, 1.0)
        rng = np.random.default_rng(2)
        f = to_spectral(g, rng.standard_normal((16, 16)))
        assert np.max(np.abs(ddx(f).coef[0, :])) == 0.0  # P0(dx f) = 0
        f0_field = f.with_coef(np.concatenate([[f.coef[0]], np.zeros((15, 16))]))
        assert np.max(np.abs(ddx(f0_field).coef)) == 0.0  # dx(P0 f) = 0


class TestDealias:
    def test_idempotent_and_retained_set(self):
        g = make_grid(16, 16, 1.0)
        rng = np.random.default_rng(3)
        f = to_spectral(g, rng.standard_normal((16, 16)))
        d = dealias(f)
        keep = (np.abs(g.mx)[:, None] <= 5) & (np.abs(g.my)[None, :] <= 5)
        assert np.all(d.coef[~keep] == 0)
        assert np.array_equal(d.coef[keep], f.coef[keep])
        assert np.array_equal(dealias(d).coef, d.coef)

    def test_product_matches_convolution_oracle(self):
        g = make_grid(16, 16, 2.0)
        rng = np.random.default_rng(4)
        a = dealias(to_spectral(g, rng.standard_normal((16, 16))))
        b = dealias(to_spectral(g, rng.standard_normal((16, 16))))
        pseudo = dealias(to_spectral(g, from_spectral(a) * from_spectral(b)))
        exact = truncated_convolution(a, b)
        assert np.max(np.abs(pseudo.coef - exact.coef)) < 1e-12


class TestProjections:
    def test_pure_y_function_has_no_nonzero_part(self):
        g = make_grid(16, 32, 2.0)
        _, Y = np.meshgrid(g.x, g.y, indexing="ij")
        f = to_spectral(g, np.cos(np.pi * Y / g.Ly))
        assert spectral_l2(project_nonzero(f)) < 1e-14

    def test_pure_x_harmonic_has_no_zero_part(self):
        g = make_grid(16, 32, 2.0)
        X, Y = np.meshgrid(g.x, g.y, indexing="ij")
        f = to_spectral(g, np.sin(X) * np.exp(-(Y**2)))
        assert project_zero(f).lp(2) < 1e-14

    def test_parseval_split_100_fields(self):
        g = make_grid(32, 32, 2.0)
        rng = np.random.default_rng(5)
        for _ in range(100):
            f = random_real_field(g, rng, dealiased=False)
            total = lp_norm(f, 2) ** 2
            parts = spectral_l2(project_nonzero(f)) ** 2 + 2 * np.pi * project_zero(f).lp(2) ** 2
            assert abs(total - parts) < 1e-12 * max(total, 1e-30)

    def test_projection_completeness(self):
        g = make_grid(16, 16, 1.0)
        rng = np.random.default_rng(6)
        f = to_spectral(g, rng.standard_normal((16, 16)))
        fneq = project_nonzero(f)
        recon = fneq.coef.copy()
        recon[0, :] = project_zero(f).coef
        assert np.array_equal(recon, f.coef)
        assert np.max(np.abs(project_zero(fneq).coef)) == 0.0


class TestNorms:
    def test_area(self):
        g = make_grid(16, 16, 1.0)
        assert lp_norm(to_spectral(g, np.ones((16, 16))), 1) == pytest.approx(4 * np.pi, rel=1e-13)

    def test_sin_l2(self):
        g = make_grid(32, 32, np.pi)
        X, _ = np.meshgrid(g.x, g.y, indexing="ij")
        assert lp_norm(to_spectral(g, np.sin(X)), 2) ** 2 == pytest.approx(2 * np.pi**2, rel=1e-12)

    def test_gaussian_l1(self):
        g = make_grid(8, 256, 4 * np.pi)
        _, Y = np.meshgrid(g.x, g.y, indexing="ij")
        val = lp_norm(to_spectral(g, np.exp(-(Y**2))), 1)
        assert val == pytest.approx(2 * np.pi * np.sqrt(np.pi), abs=1e-8)

    def test_parseval_l2_equals_quadrature(self):
        g = make_grid(32, 64, 3.0)
        rng = np.random.default_rng(7)
        for _ in range(20):
            f = random_real_field(g, rng, dealiased=False)
            a, b = lp_norm(f, 2), spectral_l2(f)
            assert abs(a - b) < 1e-12 * max(a, 1e-30)

    def test_linf_and_unsupported(self):
        g = make_grid(16, 16, 1.0)
        f = to_spectral(g, np.full((16, 16), -2.0))
        assert lp_norm(f, np.inf) == pytest.approx(2.0)
        with pytest.raises(ValueError):
            lp_norm(f, 3)
