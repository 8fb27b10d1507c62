import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cn
from gaborpr.generators import fourier_window_generator, random_gaussian_generator, spatial_window_generator
from gaborpr.recovery import (
    MaskPair,
    SolverOptions,
    assemble_hermitian,
    basis_pursuit,
    bp_partial_fourier,
    extract_bands,
    fourier_sparse_problem,
    jacobi_eigh,
    leading_eigenpair,
    phase_aligned_error,
    sgpr,
    sgpr_fourier_sparse,
)
from gaborpr.tfcore import ambiguity_table, measure_intensities


def sparse(rng, n, k):
    z = np.zeros(n, dtype=complex)
    z[rng.choice(n, k, replace=False)] = cn(rng, k)
    return z


class TestOptions:
    def test_defaults_and_validation(self):
        opts = SolverOptions()
        assert opts.eig_method == "eigh" and opts.bp_polish
        for bad in ({"bp_max_iterations": 0}, {"bp_tolerance": 0}, {"eig_method": "qr"},
                    {"zero_tolerance": -1}):
            with pytest.raises(ValueError):
                SolverOptions(**bad)

    def test_mask_pair(self):
        m = MaskPair([3, -1], [0], 5)
        np.testing.assert_array_equal(m.a_set, [3, 4])
        assert m.size == 2 and not m.is_full
        assert MaskPair.full(4).is_full
        with pytest.raises(ValueError):
            MaskPair([1, 6], [0], 5)


class TestBasisPursuit:
    def test_full_rows_is_inverse(self, rng):
        z = cn(rng, 13)
        y = np.fft.fft(z)
        out, info = bp_partial_fourier(y, range(13), 13, return_info=True)
        assert info["path"] == "exact-fft"
        np.testing.assert_allclose(out, z, atol=1e-10)

    def test_scaled_inverse_direction(self, rng):
        z = sparse(rng, 11, 1)
        rows = [0, 3, 7]
        y = 2.5 * np.fft.ifft(z)[rows]
        np.testing.assert_allclose(bp_partial_fourier(y, rows, 11, "inverse", 2.5), z, atol=1e-8)

    @given(st.integers(0, 2 ** 32 - 1), st.integers(2, 6))
    @settings(max_examples=25, deadline=None)
    def test_one_sparse_recovered(self, seed, m):
        # a single spike is the unique l1 minimizer once two DFT rows are known
        rng = np.random.default_rng(seed)
        z = sparse(rng, 13, 1)
        rows = np.sort(rng.choice(13, m, replace=False))
        out = bp_partial_fourier(np.fft.fft(z)[rows], rows, 13)
        np.testing.assert_allclose(out, z, atol=1e-6 * np.abs(z).max())

    def test_batch(self, rng):
        zs = np.stack([sparse(rng, 13, 1) for _ in range(4)])
        rows = [1, 2, 5, 9]
        out = bp_partial_fourier(np.fft.fft(zs, axis=1)[:, rows], rows, 13)
        np.testing.assert_allclose(out, zs, atol=1e-6)

    def test_zero_data(self):
        np.testing.assert_array_equal(bp_partial_fourier(np.zeros(3), [0, 1, 2], 7), np.zeros(7))

    def test_matches_convex_solver(self, rng):
        cp = pytest.importorskip("cvxpy")
        n = 13
        F = np.exp(-2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n)
        for _ in range(6):
            rows = np.sort(rng.choice(n, 4, replace=False))
            y = F[rows] @ sparse(rng, n, 2)
            v = cp.Variable(n, complex=True)
            best = cp.Problem(cp.Minimize(cp.norm1(v)), [F[rows] @ v == y]).solve()
            out = bp_partial_fourier(y, rows, n)
            assert np.linalg.norm(F[rows] @ out - y) < 1e-8 * np.linalg.norm(y)
            assert np.abs(out).sum() == pytest.approx(best, rel=1e-5)

    def test_dense(self, rng):
        a = cn(rng, (4, 10))
        z = sparse(rng, 10, 1)
        out, _ = basis_pursuit(a, a @ z)
        np.testing.assert_allclose(out, z, atol=1e-6)
        sq = cn(rng, (3, 3))
        out, info = basis_pursuit(sq, sq @ np.ones(3))
        assert info["iterations"] == 0
        np.testing.assert_allclose(out, np.ones(3), atol=1e-10)

    def test_errors(self):
        with pytest.raises(ValueError):
            bp_partial_fourier([1.0], [], 5)
        with pytest.raises(ValueError):
            bp_partial_fourier([1.0, 2.0], [1, 6], 5)
        with pytest.raises(ValueError):
            bp_partial_fourier([1.0], [0, 1], 5)
        with pytest.raises(ValueError):
            bp_partial_fourier([1.0], [0], 5, direction="sideways")


class TestBandsAndEigen:
    def test_bands_round_trip(self, rng):
        x = cn(rng, 6)
        h = np.outer(x, x.conj())
        bands = extract_bands(h)
        assert bands[2, 4] == pytest.approx(h[4, 2])
        np.testing.assert_allclose(assemble_hermitian(bands), h, atol=1e-14)

    def test_defect(self, rng):
        bands = cn(rng, (5, 5))
        with pytest.raises(ValueError, match="Hermitian"):
            assemble_hermitian(bands)
        h, defect = assemble_hermitian(bands, max_defect=None, return_defect=True)
        assert defect > 0.1
        np.testing.assert_allclose(h, h.conj().T)

    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 9))
    @settings(max_examples=25, deadline=None)
    def test_jacobi_matches_eigh(self, seed, n):
        a = cn(np.random.default_rng(seed), (n, n))
        h = a + a.conj().T
        vals, vecs = jacobi_eigh(h)
        np.testing.assert_allclose(vals, np.linalg.eigvalsh(h), atol=1e-9 * max(1, np.abs(vals).max()))
        np.testing.assert_allclose(vecs.conj().T @ vecs, np.eye(n), atol=1e-9)
        np.testing.assert_allclose(h @ vecs, vecs * vals, atol=1e-8 * max(1, np.abs(vals).max()))

    def test_leading_pair_rank_one(self, rng):
        x = cn(rng, 8)
        for method in ("eigh", "jacobi"):
            lam, v = leading_eigenpair(np.outer(x, x.conj()), method)
            assert lam == pytest.approx(np.linalg.norm(x) ** 2)
            i = np.argmax(np.abs(v))
            assert v[i].imag == 0 and v[i].real > 0
            assert phase_aligned_error(x, np.sqrt(lam) * v) < 1e-20

    def test_tie_goes_to_lowest_index(self):
        lam, v = leading_eigenpair(np.diag([2.0, 2.0, 1.0]).astype(complex))
        assert lam == 2.0
        np.testing.assert_allclose(np.abs(v), [1, 0, 0])

    def test_phase_error(self, rng):
        x = cn(rng, 5)
        assert phase_aligned_error(x, np.exp(1.3j) * x) < 1e-28
        assert phase_aligned_error(np.eye(3)[0], np.eye(3)[1]) == pytest.approx(2.0)
        assert phase_aligned_error(x, np.zeros(5)) == pytest.approx(1.0)
        with pytest.raises(ValueError):
            phase_aligned_error(np.zeros(3), x[:3])


class TestSgpr:
    def test_full_mask_ds7(self, ds7, rng):
        x = cn(rng, 7)
        xhat, state = sgpr(ds7, measure_intensities(x, ds7))
        assert phase_aligned_error(x, xhat) < 1e-20
        assert set(state.paths.values()) == {"exact-fft"}
        assert state.eigenvalue == pytest.approx(np.linalg.norm(x) ** 2)
        assert state.flags == []

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=15, deadline=None)
    def test_full_mask_generic_generator(self, seed):
        g = random_gaussian_generator(9, seed)
        x = cn(np.random.default_rng(seed + 1), 9)
        xhat, _ = sgpr(g, measure_intensities(x, g))
        assert phase_aligned_error(x, xhat) < 1e-16

    def test_lift_equals_outer_product(self, ds7, rng):
        x = cn(rng, 7)
        _, state = sgpr(ds7, measure_intensities(x, ds7))
        np.testing.assert_allclose(state.lifted, np.outer(x, x.conj()), atol=1e-12)

    def test_jacobi_path(self, ds7, rng):
        x = cn(rng, 7)
        xhat, _ = sgpr(ds7, measure_intensities(x, ds7), options=SolverOptions(eig_method="jacobi"))
        assert phase_aligned_error(x, xhat) < 1e-20

    def test_sparse_partial_mask(self, qds67, rng):
        x = sparse(rng, 67, 2)
        mask = MaskPair(np.arange(67), np.sort(rng.choice(67, 33, replace=False)), 67)
        xhat, state = sgpr(qds67, measure_intensities(x, qds67, mask.indices()), mask)
        assert phase_aligned_error(x, xhat) < 1e-6
        assert state.paths["stage1"] == "basis-pursuit"

    def test_undetermined_bands_flagged(self, rng):
        g = spatial_window_generator(9, 2, seed=1)
        x = cn(rng, 9)
        _, state = sgpr(g, measure_intensities(x, g))
        assert "undetermined_bands" in state.flags
        assert state.stages["stage3"]["undetermined_bands"] == [2, 3, 4, 5, 6, 7]

    def test_nonpositive_eigenvalue(self, ds7):
        from gaborpr.tfcore import MeasurementSet, full_mask

        meas = MeasurementSet(n=7, indices=full_mask(7), values=np.zeros(49))
        xhat, state = sgpr(ds7, meas)
        assert "nonpositive_leading_eigenvalue" in state.flags
        np.testing.assert_array_equal(xhat, 0)

    def test_diagnostics_json(self, ds7, rng):
        x = cn(rng, 7)
        _, state = sgpr(ds7, measure_intensities(x, ds7))
        d = json.loads(json.dumps(state.to_dict(include_grids=True)))
        assert d["stages"]["stage1"]["path"] == "exact-fft"
        assert len(d["bands"]["re"]) == 7

    def test_errors(self, ds7, rng):
        with pytest.raises(TypeError):
            sgpr(ds7, np.ones(49))
        g = random_gaussian_generator(5, 0)
        with pytest.raises(ValueError):
            sgpr(ds7, measure_intensities(cn(rng, 5), g))


class TestFourierSparse:
    def test_remap_preserves_values(self, rng):
        g, x = cn(rng, 7), cn(rng, 7)
        mask = MaskPair([0, 2, 3], [1, 5], 7)
        meas = measure_intensities(x, g, mask.indices())
        gz, mz, maskz = fourier_sparse_problem(g, meas, mask)
        z = np.fft.fft(x) / np.sqrt(7)
        np.testing.assert_allclose(measure_intensities(z, gz, mz.indices).values, meas.values, rtol=1e-10)
        np.testing.assert_array_equal(maskz.a_set, [1, 5])
        np.testing.assert_array_equal(maskz.b_set, [0, 4, 5])

    def test_full_mask_window(self, rng):
        g = spatial_window_generator(67, 8)
        z = sparse(rng, 67, 3)
        x = np.sqrt(67) * np.fft.ifft(z)
        xhat, _ = sgpr_fourier_sparse(g, measure_intensities(x, g))
        assert phase_aligned_error(x, xhat) < 1e-8

    def test_fourier_window_time_sparse_counterpart(self, rng):
        g = fourier_window_generator(31, 3)
        x = sparse(rng, 31, 1)
        xhat, _ = sgpr(g, measure_intensities(x, g))
        assert phase_aligned_error(x, xhat) < 1e-8


class TestInvariants:
    def test_algebraically_largest(self):
        lam, v = leading_eigenpair(np.diag([1.0, -1.0]).astype(complex))
        assert lam == 1.0
        np.testing.assert_array_equal(v, [1, 0])

    def test_phase_error_grid_oracle(self, rng):
        x, y = cn(rng, 6), cn(rng, 6)
        phases = np.exp(2j * np.pi * np.arange(10_000) / 10_000)
        grid = np.min(np.linalg.norm(x[None, :] - phases[:, None] * y[None, :], axis=1) ** 2)
        assert phase_aligned_error(x, y) == pytest.approx(grid / np.linalg.norm(x) ** 2, abs=1e-6)

    @pytest.mark.parametrize("spec", [("qds", 11), ("qds", 19), ("qds", 67), ("rand", 8), ("rand", 12)])
    def test_full_mask_exactness_roster(self, spec, ds7):
        from gaborpr.generators import quadratic_difference_set

        kind, n = spec
        g = quadratic_difference_set(n)[1] if kind == "qds" else random_gaussian_generator(n, 7)
        rng = np.random.default_rng(n)
        for _ in range(20):
            x = cn(rng, n)
            xhat, state = sgpr(g, measure_intensities(x, g))
            assert phase_aligned_error(x, xhat) < 1e-8
            assert np.linalg.norm(state.lifted - np.outer(x, x.conj())) < 1e-8 * np.linalg.norm(x) ** 2

    def test_stage_identities(self, rng):
        g = random_gaussian_generator(8, 2)
        n = 8
        x = cn(rng, n)
        meas = measure_intensities(x, g)
        _, st_ = sgpr(g, meas)
        b = n * meas.grid(np.arange(n), np.arange(n))
        tab = ambiguity_table(g)
        np.testing.assert_allclose(np.fft.fft(st_.v_grid, axis=1), b, rtol=1e-10, atol=1e-10 * np.abs(b).max())
        lhs = n * np.fft.ifft(st_.w_grid, axis=1).T
        np.testing.assert_allclose(lhs, st_.v_grid, atol=1e-10 * np.abs(st_.v_grid).max())
        hh = np.fft.fft(st_.bands, axis=1)
        supp = tab.support
        np.testing.assert_allclose(hh[supp], st_.h_hat_bands[supp], atol=1e-10 * np.abs(hh).max())

    def test_global_phase_bitwise(self, qds67, rng):
        x = sparse(rng, 67, 2)
        mask = MaskPair(np.arange(67), np.sort(rng.choice(67, 33, replace=False)), 67)
        m1 = measure_intensities(x, qds67, mask.indices())
        m2 = measure_intensities(np.exp(1j * np.pi / 3) * x, qds67, mask.indices())
        from gaborpr.tfcore import MeasurementSet

        # identical inputs give identical outputs
        same = MeasurementSet(n=67, indices=m1.indices, values=m1.values.copy())
        a, _ = sgpr(qds67, m1, mask)
        b, _ = sgpr(qds67, same, mask)
        np.testing.assert_array_equal(a, b)
        np.testing.assert_allclose(m1.values, m2.values, rtol=1e-12)

    def test_bp_constraints_hold(self, rng):
        for _ in range(10):
            rows = np.sort(rng.choice(17, 6, replace=False))
            y = cn(rng, 6)
            out, info = bp_partial_fourier(y, rows, 17, return_info=True)
            assert info["residual"] <= 1e-6

    @pytest.mark.parametrize("n", [13, 17])
    def test_sparse_path_soundness(self, n):
        from gaborpr.injectivity import check_sparse_condition

        g = random_gaussian_generator(n, 11)
        tab = ambiguity_table(g)
        rep = check_sparse_condition(tab, 1, theta=-1)
        assert rep
        rng = np.random.default_rng(n)
        mask = MaskPair(np.arange(n)[: rep.required_A], np.arange(n)[: rep.required_B], n)
        for _ in range(200):
            x, y = sparse(rng, n, 1), sparse(rng, n, 1)
            if phase_aligned_error(x, y) < 1e-9:
                continue
            mx = measure_intensities(x, g, mask.indices()).values
            my = measure_intensities(y, g, mask.indices()).values
            assert np.abs(mx - my).max() > 1e-6


def test_bp_disagreements_are_lower_l1():
    # where BP and the best <=2-sparse feasible point differ, BP is feasible with smaller l1
    import itertools

    n = 13
    F = np.exp(-2j * np.pi * np.outer(np.arange(n), np.arange(n)) / n)
    for case in range(30):
        rng = np.random.default_rng([10, case])
        k, m = [(k, m) for k in (1, 2) for m in (3, 4, 5)][case % 6]
        rows = np.sort(rng.choice(n, m, replace=False))
        z0 = np.zeros(n, dtype=complex)
        z0[rng.choice(n, k, replace=False)] = cn(rng, k)
        y = F[rows] @ z0
        best = np.inf
        for s in itertools.combinations(range(n), k):
            coef, *_ = np.linalg.lstsq(F[np.ix_(rows, s)], y, rcond=None)
            if np.linalg.norm(F[np.ix_(rows, s)] @ coef - y) <= 1e-9 * np.linalg.norm(y):
                best = min(best, np.abs(coef).sum())
        out = bp_partial_fourier(y, rows, n)
        assert np.linalg.norm(F[rows] @ out - y) <= 1e-8 * np.linalg.norm(y)
        assert np.abs(out).sum() <= best * (1 + 1e-6)
        if np.abs(out).sum() > best * (1 - 1e-6):
            assert np.linalg.norm(out - z0) < 1e-4 * np.linalg.norm(z0)
