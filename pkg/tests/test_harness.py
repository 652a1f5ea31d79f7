import math

import numpy as np
import pytest

from tvdeblur import (DataError, Experiment, Psf, ShapeError, SolveParams,
                      apply_blur, builtin_truth, diagonal_motion_psf,
                      gaussian_psf, parse_mode, simulate, snr, sweep,
                      sweep_csv_text)
from tvdeblur.harness import CSV_HEADER


class TestGaussianPsf:
    def test_single_sample(self):
        p = gaussian_psf(1, 2.0)
        assert p.weights.shape == (1, 1) and p.weights[0, 0] == 1.0

    @pytest.mark.parametrize("hsize,delta", [(3, 0.7), (9, 2.0), (16, 5.0), (22, 7.0)])
    def test_unit_mass(self, hsize, delta):
        p = gaussian_psf(hsize, delta)
        assert p.mass == pytest.approx(1.0, abs=1e-12)

    def test_flat_limit(self):
        p = gaussian_psf(3, 1e9)
        assert np.allclose(p.weights, 1.0 / 9.0, atol=1e-6)

    def test_center_is_ceil_half(self):
        assert gaussian_psf(9, 2.0).center == (4, 4)
        assert gaussian_psf(16, 5.0).center == (7, 7)

    @pytest.mark.parametrize("hsize", [3, 4, 9, 16])
    def test_quadrantally_symmetric(self, hsize):
        assert gaussian_psf(hsize, 2.0).quadrantally_symmetric

    def test_motion_kernel_is_not(self):
        assert not diagonal_motion_psf().quadrantally_symmetric


class TestBuiltinTruths:
    def test_shapes_and_ranges(self):
        for name in ("cartoon", "ramp-disk"):
            u = builtin_truth(name, 64, 48)
            assert u.shape == (64, 48)
            assert u.min() >= 0.0 and u.max() <= 1.0

    def test_unknown_name(self):
        with pytest.raises(DataError):
            builtin_truth("mona-lisa", 32, 32)


class TestSimulate:
    def test_noiseless_delta_is_exact_crop(self):
        truth = builtin_truth("cartoon", 24, 24)
        observed, fov = simulate(truth, Psf.delta(), 0.0, seed=5)
        assert (fov.row0, fov.col0) == (0, 0)
        assert np.array_equal(observed, truth)

    def test_margin_is_extent_minus_one(self):
        truth = builtin_truth("cartoon", 64, 64)
        observed, fov = simulate(truth, gaussian_psf(16, 5.0), 0.0, seed=0)
        assert (fov.row0, fov.col0) == (15, 15)
        assert observed.shape == (64 - 30, 64 - 30)

    def test_seeded_noise_is_reproducible(self):
        truth = builtin_truth("cartoon", 32, 32)
        a, _ = simulate(truth, gaussian_psf(3, 1.0), 1e-4, seed=11)
        b, _ = simulate(truth, gaussian_psf(3, 1.0), 1e-4, seed=11)
        assert a.tobytes() == b.tobytes()
        c, _ = simulate(truth, gaussian_psf(3, 1.0), 1e-4, seed=12)
        assert a.tobytes() != c.tobytes()

    def test_field_of_view_is_extension_independent(self):
        truth = builtin_truth("ramp-disk", 30, 26)
        psf = gaussian_psf(5, 1.1)
        observed, fov = simulate(truth, psf, 0.0, seed=0)
        for bc in ("zero", "periodic", "reflective", "antireflective"):
            blurred = apply_blur(truth, psf, bc)
            window = blurred[fov.row0:fov.row0 + fov.rows,
                             fov.col0:fov.col0 + fov.cols]
            assert observed.tobytes() == window.tobytes()

    def test_noise_statistics(self):
        truth = np.full((140, 140), 0.5)
        sigma2 = 1e-4
        observed, fov = simulate(truth, Psf.delta(), sigma2, seed=99)
        noise = observed - 0.5
        n = noise.size
        assert abs(noise.mean()) < 3.0 * math.sqrt(sigma2) / math.sqrt(n)
        assert abs(noise.var() / sigma2 - 1.0) < 0.05

    def test_too_small_truth_rejected(self):
        with pytest.raises(ShapeError):
            simulate(builtin_truth("cartoon", 16, 16), gaussian_psf(9, 2.0), 0.0, 0)


class TestSnr:
    def test_mean_image_scores_zero_db(self):
        truth = builtin_truth("cartoon", 16, 16)
        flat = np.full_like(truth, truth.mean())
        assert snr(flat, truth) == pytest.approx(0.0, abs=1e-12)

    def test_perfect_restoration_is_infinite(self):
        truth = builtin_truth("cartoon", 16, 16)
        assert math.isinf(snr(truth.copy(), truth))

    def test_ten_db_example(self, rng):
        truth = rng.standard_normal((20, 20))
        direction = rng.standard_normal((20, 20))
        signal = np.sum((truth - truth.mean()) ** 2)
        direction *= math.sqrt(0.1 * signal) / np.linalg.norm(direction)
        assert snr(truth - direction, truth) == pytest.approx(10.0, abs=1e-9)

    def test_shape_mismatch(self, rng):
        with pytest.raises(ShapeError):
            snr(rng.standard_normal((4, 4)), rng.standard_normal((4, 5)))


class TestParseMode:
    def test_boundary_models(self):
        assert parse_mode("periodic") == ("bc", "periodic")
        assert parse_mode("antireflective") == ("bc", "antireflective")

    def test_enlarge_spec(self):
        assert parse_mode("enlarge:reflective:12") == ("enlarge", "reflective", 12)

    def test_bad_specs(self):
        for bad in ("mirror", "enlarge:reflective", "enlarge:foo:3", "enlarge:zero:-1"):
            with pytest.raises(DataError):
                parse_mode(bad)


@pytest.fixture(scope="module")
def small_experiment():
    truth = builtin_truth("cartoon", 40, 40)
    psf = gaussian_psf(3, 1.0)
    return Experiment(truth=truth, psf=psf, sigma2=1e-4,
                      modes=("periodic", "reflective"),
                      alphas=(50.0, 500.0, 500.0, 5000.0),
                      params=SolveParams(alpha=1.0, inner_max=6), seed=3)


class TestSweep:
    def test_duplicate_alphas_deduplicated(self, small_experiment):
        assert small_experiment.alphas == (50.0, 500.0, 5000.0)

    def test_rows_sorted_and_one_best_per_mode(self, small_experiment):
        result = sweep(small_experiment, clock=None)
        keys = [(r.mode, r.alpha) for r in result.rows]
        assert keys == sorted(keys)
        for mode in ("periodic", "reflective"):
            marks = [r for r in result.rows if r.mode == mode and r.is_best]
            assert len(marks) == 1

    def test_reference_alpha_marked(self):
        truth = builtin_truth("cartoon", 36, 36)
        exp = Experiment(truth=truth, psf=gaussian_psf(3, 1.0), sigma2=1e-4,
                         modes=("periodic",), alphas=(100.0, 0.05 / 1e-4),
                         params=SolveParams(alpha=1.0, inner_max=4), seed=0)
        result = sweep(exp, clock=None)
        marked = [r for r in result.rows if r.is_reference]
        assert len(marked) == 1 and marked[0].alpha == pytest.approx(500.0)

    def test_failed_cells_recorded_and_sweep_continues(self):
        truth = builtin_truth("cartoon", 40, 40)
        nonsym = Psf(np.array([[0.6, 0.2], [0.1, 0.1]]), (0, 0))
        exp = Experiment(truth=truth, psf=nonsym, sigma2=1e-4,
                         modes=("reflective", "periodic"), alphas=(100.0,),
                         params=SolveParams(alpha=1.0, inner_max=4), seed=0)
        result = sweep(exp, clock=None)
        refl = [r for r in result.rows if r.mode == "reflective"][0]
        per = [r for r in result.rows if r.mode == "periodic"][0]
        assert refl.failed and math.isnan(refl.snr_db) and "Symmetry" in refl.message
        assert not per.failed and math.isfinite(per.snr_db)

    def test_enlarge_mode_cells_run(self):
        truth = builtin_truth("ramp-disk", 36, 36)
        exp = Experiment(truth=truth, psf=diagonal_motion_psf(5, 0.5), sigma2=1e-4,
                         modes=("enlarge:reflective:5",), alphas=(100.0,),
                         params=SolveParams(alpha=1.0, inner_max=4), seed=0)
        result = sweep(exp, clock=None)
        assert len(result.rows) == 1 and not result.rows[0].failed
        assert result.rows[0].is_best  # a single-cell grid marks its only row

    def test_parallel_jobs_match_serial(self, small_experiment):
        serial = sweep(small_experiment, jobs=1, clock=None)
        parallel = sweep(small_experiment, jobs=2, clock=None)
        strip = lambda rows: [(r.mode, r.alpha, r.snr_db, r.iterations, r.is_best)
                              for r in rows]
        assert strip(serial.rows) == strip(parallel.rows)

    def test_null_clock_gives_reproducible_csv(self, small_experiment):
        a = sweep_csv_text(sweep(small_experiment, clock=None))
        b = sweep_csv_text(sweep(small_experiment, clock=None))
        assert a == b
        assert a.splitlines()[0] == CSV_HEADER

    def test_observed_image_scores_below_best_restoration(self, small_experiment):
        from tvdeblur.harness import simulate as sim
        result = sweep(small_experiment, clock=None)
        observed, fov = sim(small_experiment.truth, small_experiment.psf,
                            small_experiment.sigma2, small_experiment.seed)
        raw = snr(observed, fov.crop(small_experiment.truth))
        best = max(r.snr_db for r in result.rows if not r.failed)
        assert raw < best
