import numpy as np
import pytest

from models.pointer import EvolutionSpec, Moments, PointerState
from modules.exceptions import (
    BadGridSpecError,
    DimensionMismatchError,
    InvalidStateError,
    StabilityGuardError,
    TailMassError,
)
from modules.pointer_space import (
    build_grid,
    continuity_residual,
    d_var_q_dt,
    dump_wavefunction,
    evolve_free,
    load_wavefunction,
    make_gaussian,
    moments,
    polar_fields,
    translate,
)


def _fd_variance_rate(phi, spec):
    forward = moments(evolve_free(phi, spec, 1)).var_q
    backward = moments(evolve_free(phi, spec, -1)).var_q
    return (forward - backward) / (2.0 * spec.dt)


class TestGrid:

    @pytest.mark.parametrize("n,length,dq", [(256, 40.0, 0.15625), (1024, 80.0, 0.078125)])
    def test_spacing(self, n, length, dq):
        grid = build_grid(n, length)
        assert grid.dq == dq
        assert grid.dq * grid.n_points == length
        assert grid.positions[0] == -length / 2

    @pytest.mark.parametrize("n,length", [(100, 40.0), (32, 40.0), (256, 0.0), (256, -1.0)])
    def test_bad_spec(self, n, length):
        with pytest.raises(BadGridSpecError):
            build_grid(n, length)

    def test_momentum_lattice_symmetric_except_nyquist(self, small_grid):
        k = small_grid.momentum_lattice
        assert k[0] == pytest.approx(-small_grid.k_max)
        assert np.allclose(k[1:], -k[1:][::-1])
        assert np.allclose(np.diff(k), 2 * np.pi / small_grid.length)


class TestGaussian:

    def test_minimum_uncertainty(self, real_gaussian):
        mom = moments(real_gaussian)
        assert np.allclose([mom.mean_q, mom.mean_p, mom.var_q, mom.var_p], [0, 0, 1, 0.25], atol=1e-8)
        assert mom.uncertainty_product == pytest.approx(0.25, abs=1e-8)

    def test_chirp_widens_momentum(self, chirped_gaussian):
        mom = moments(chirped_gaussian)
        assert mom.var_q == pytest.approx(1.0, abs=1e-8)
        assert mom.var_p == pytest.approx(1.25, abs=1e-8)

    def test_phase_ramp_moves_momentum(self, grid):
        assert moments(make_gaussian(grid, p0=0.7)).mean_p == pytest.approx(0.7, abs=1e-8)

    def test_wide_gaussian(self, grid):
        mom = moments(make_gaussian(grid, sigma=2.0))
        assert mom.var_q == pytest.approx(4.0, abs=1e-8)
        assert mom.var_p == pytest.approx(1 / 16, abs=1e-8)

    def test_too_close_to_edge(self, grid):
        with pytest.raises(TailMassError) as excinfo:
            make_gaussian(grid, q0=35.0)
        assert 1e-10 < excinfo.value.mass <= 1.0
        assert "clearance" in str(excinfo.value)

    def test_non_positive_sigma(self, grid):
        with pytest.raises(InvalidStateError):
            make_gaussian(grid, sigma=0.0)

    def test_parseval(self, grid):
        for phi in (make_gaussian(grid, chirp=0.5), make_gaussian(grid, p0=0.7, q0=-3.0, sigma=1.5)):
            position_norm = grid.dq * np.sum(np.abs(phi.amplitudes) ** 2)
            momentum_norm = grid.dq * np.sum(np.abs(np.fft.fft(phi.amplitudes)) ** 2) / grid.n_points
            assert abs(position_norm - momentum_norm) <= 1e-12

    def test_unnormalized_state_rejected(self, grid):
        with pytest.raises(InvalidStateError):
            PointerState(grid=grid, amplitudes=2 * make_gaussian(grid).amplitudes)

    def test_uncertainty_floor_enforced(self):
        with pytest.raises(InvalidStateError):
            Moments(mean_q=0, mean_p=0, var_q=0.1, var_p=0.1)


class TestTranslate:

    def test_zero_shift_is_identity(self, chirped_gaussian):
        assert translate(chirped_gaussian, 0.0) is chirped_gaussian

    def test_shift_matches_displaced_gaussian(self, grid, real_gaussian):
        shifted = translate(real_gaussian, 1.5)
        assert np.max(np.abs(shifted.amplitudes - make_gaussian(grid, q0=1.5).amplitudes)) <= 1e-10

    def test_moment_covariance(self, grid):
        phi = make_gaussian(grid, p0=0.7, chirp=0.25)
        before, after = moments(phi), moments(translate(phi, 2.0))
        assert after.mean_q - before.mean_q == pytest.approx(2.0, abs=1e-10)
        assert after.var_q == pytest.approx(before.var_q, abs=1e-10)
        assert after.mean_p == pytest.approx(before.mean_p, abs=1e-10)
        assert after.var_p == pytest.approx(before.var_p, abs=1e-10)

    def test_norm_preserved(self, chirped_gaussian):
        shifted = translate(chirped_gaussian, -3.25)
        assert abs(shifted.grid.norm_squared(shifted.amplitudes) - 1.0) <= 1e-12

    def test_shift_into_tail(self, grid, real_gaussian):
        with pytest.raises(TailMassError):
            translate(real_gaussian, grid.length / 2)


class TestPolarFields:

    def test_real_pointer_has_no_phase_gradient(self, real_gaussian):
        fields = polar_fields(real_gaussian)
        assert fields.max_abs_phase_gradient <= 1e-8
        assert np.max(np.abs(fields.current)) <= 1e-12
        assert abs(real_gaussian.grid.dq * np.sum(fields.rho) - 1.0) <= 1e-10

    def test_chirp_gradient_is_linear(self, chirped_gaussian):
        fields = polar_fields(chirped_gaussian)
        q = chirped_gaussian.grid.positions
        core = np.abs(q) < 4.0
        assert np.allclose(fields.s_prime.data[core], q[core], atol=1e-6)

    def test_phase_ramp_gradient(self, grid):
        fields = polar_fields(make_gaussian(grid, p0=0.7))
        core = np.abs(grid.positions) < 3.0
        assert np.allclose(fields.s_prime.data[core], 0.7, atol=1e-6)

    def test_current_scales_with_mass(self, chirped_gaussian):
        light = polar_fields(chirped_gaussian, m=1.0)
        heavy = polar_fields(chirped_gaussian, m=2.0)
        assert np.allclose(heavy.current, light.current / 2)

    def test_nodes_are_masked(self, grid, real_gaussian):
        fields = polar_fields(real_gaussian)
        assert fields.s_prime.mask[0]
        assert not fields.s_prime.mask[grid.n_points // 2]


class TestVarianceRate:

    def test_real_pointer_is_stationary(self, real_gaussian):
        assert d_var_q_dt(real_gaussian) == pytest.approx(0.0, abs=1e-10)

    def test_chirped_pointer(self, chirped_gaussian):
        assert d_var_q_dt(chirped_gaussian, m=1.0) == pytest.approx(2.0, abs=1e-8)

    def test_sign_and_mass_scaling(self, grid):
        assert d_var_q_dt(make_gaussian(grid, chirp=-0.5), m=2.0) == pytest.approx(-1.0, abs=1e-8)

    def test_mass_must_be_positive(self, chirped_gaussian):
        with pytest.raises(InvalidStateError):
            d_var_q_dt(chirped_gaussian, m=0.0)

    @pytest.mark.parametrize("chirp,p0", [(0.5, 0.0), (-0.3, 0.7), (0.1, -1.2)])
    def test_matches_finite_difference(self, grid, chirp, p0):
        phi = make_gaussian(grid, p0=p0, chirp=chirp)
        fd = _fd_variance_rate(phi, EvolutionSpec(mass=1.0, dt=1e-4))
        assert fd == pytest.approx(d_var_q_dt(phi), abs=1e-6)

    def test_potential_does_not_change_rate(self, grid, chirped_gaussian):
        dt = 1e-4
        free = _fd_variance_rate(chirped_gaussian, EvolutionSpec(mass=1.0, dt=dt))
        bound = _fd_variance_rate(chirped_gaussian, EvolutionSpec(mass=1.0, dt=dt, potential=np.cos(grid.positions)))
        assert abs(free - bound) <= 10 * dt ** 2


class TestEvolution:

    def test_zero_steps(self, chirped_gaussian):
        assert evolve_free(chirped_gaussian, EvolutionSpec(dt=0.01), 0) is chirped_gaussian

    def test_free_spreading_law(self, real_gaussian):
        spec = EvolutionSpec(mass=1.0, dt=0.01)
        evolved = evolve_free(real_gaussian, spec, 100)
        assert moments(evolved).var_q == pytest.approx(1.0 + 1.0 / 4.0, abs=1e-6)

    def test_momentum_density_invariant(self, chirped_gaussian):
        evolved = evolve_free(chirped_gaussian, EvolutionSpec(dt=0.01), 50)
        before = np.abs(np.fft.fft(chirped_gaussian.amplitudes))
        after = np.abs(np.fft.fft(evolved.amplitudes))
        assert np.allclose(before, after, atol=1e-12)

    def test_backward_undoes_forward(self, chirped_gaussian):
        spec = EvolutionSpec(dt=0.01)
        round_trip = evolve_free(evolve_free(chirped_gaussian, spec, 20), spec, -20)
        assert np.allclose(round_trip.amplitudes, chirped_gaussian.amplitudes, atol=1e-12)

    def test_norm_kept_with_potential(self, grid, real_gaussian):
        spec = EvolutionSpec(dt=1e-3, potential=0.5 * np.cos(grid.positions))
        evolved = evolve_free(real_gaussian, spec, 1000)
        assert abs(grid.norm_squared(evolved.amplitudes) - 1.0) <= 1e-10

    def test_stability_guard(self, grid):
        with pytest.raises(StabilityGuardError):
            EvolutionSpec(dt=0.5, potential=np.ones(grid.n_points))

    def test_potential_must_match_grid(self, real_gaussian):
        spec = EvolutionSpec(dt=1e-3, potential=np.zeros(64))
        with pytest.raises(DimensionMismatchError):
            evolve_free(real_gaussian, spec, 1)


class TestContinuity:

    def test_residual_small_and_refines(self):
        coarse_grid = build_grid(1024, 80.0)
        fine_grid = build_grid(2048, 80.0)
        coarse = continuity_residual(make_gaussian(coarse_grid, p0=0.7), EvolutionSpec(dt=1e-4))
        fine = continuity_residual(make_gaussian(fine_grid, p0=0.7), EvolutionSpec(dt=5e-5))
        assert coarse <= 1e-6
        assert fine < coarse

    def test_chirped_pointer(self, chirped_gaussian):
        assert continuity_residual(chirped_gaussian, EvolutionSpec(dt=1e-4)) <= 1e-6


class TestWavefunctionDump:

    def test_dump_and_reload(self, tmp_path, small_grid):
        phi = make_gaussian(small_grid, p0=0.4, chirp=0.3)
        path = tmp_path / "pointer.txt"
        dump_wavefunction(phi.amplitudes, small_grid, path)
        assert np.array_equal(load_wavefunction(path, small_grid), phi.amplitudes)

    def test_reload_on_wrong_grid(self, tmp_path, small_grid, grid):
        path = tmp_path / "pointer.txt"
        dump_wavefunction(make_gaussian(small_grid).amplitudes, small_grid, path)
        with pytest.raises(DimensionMismatchError):
            load_wavefunction(path, grid)
