import numpy as np
import pytest

from zenosim import (InvalidStateError, LossCurve, ParameterError, WaveFunction,
                     collapse_check, critical_gamma, default_gamma_grid, sweep_gamma)

from conftest import REF_G, REF_VH


def make_curve(gammas, losses, **overrides):
    meta = dict(width=0.1, center=0.0, g=REF_G, v_h=REF_VH, half_width=32.0,
                n_points=512, dt=1e-3, t_final=4.0)
    meta.update(overrides)
    return LossCurve(gamma_values=np.asarray(gammas, dtype=float),
                     final_loss=np.asarray(losses, dtype=float), **meta)


def test_critical_gamma_constructed_interior_maximum():
    curve = make_curve([0, 5, 10, 15, 20], [0.0, 0.3, 0.5, 0.4, 0.2])
    assert critical_gamma(curve) == 10.0


def test_critical_gamma_boundary_maximum_is_none():
    curve = make_curve([0, 5, 10, 15], [0.0, 0.1, 0.2, 0.3])
    assert critical_gamma(curve) is None


def test_critical_gamma_flat_peak_below_noise_floor_is_none():
    curve = make_curve([0, 5, 10, 15, 20], [0.0, 0.3, 0.30005, 0.3, 0.1])
    assert critical_gamma(curve) is None


def test_critical_gamma_tie_breaks_to_smallest():
    curve = make_curve([0, 5, 10, 15, 20], [0.0, 0.4, 0.2, 0.4, 0.0])
    assert critical_gamma(curve) == 5.0


def test_critical_gamma_needs_three_points():
    with pytest.raises(ParameterError):
        critical_gamma(make_curve([0, 1], [0.0, 0.1]))


def test_critical_gamma_invariant_under_uniform_scaling():
    losses = [0.0, 0.31, 0.52, 0.4, 0.21]
    c1 = make_curve([0, 5, 10, 15, 20], losses)
    c2 = make_curve([0, 5, 10, 15, 20], [3.7 * v for v in losses])
    assert critical_gamma(c1) == critical_gamma(c2)


def test_losscurve_validation():
    with pytest.raises(ParameterError):
        make_curve([0, 5, 5], [0.0, 0.1, 0.2])
    with pytest.raises(ParameterError):
        make_curve([0, 5], [0.0, 0.1, 0.2])


def test_collapse_duplicate_curves():
    c = make_curve([0, 5, 10, 15, 20], [0.0, 0.3, 0.5, 0.4, 0.2])
    report = collapse_check([c, make_curve([0, 5, 10, 15, 20], [0.0, 0.3, 0.5, 0.4, 0.2])])
    for entry in report.entries:
        assert entry.scale == 1.0
        assert entry.residual == 0.0
        assert entry.gamma_star == 10.0


def test_collapse_exact_rescaling():
    losses = np.array([0.0, 0.3, 0.5, 0.4, 0.2])
    ref = make_curve([0, 5, 10, 15, 20], losses)
    half = make_curve([0, 5, 10, 15, 20], 0.5 * losses, center=-5.0)
    report = collapse_check([ref, half])
    assert report.entries[1].scale == pytest.approx(2.0, rel=1e-14)
    assert report.entries[1].residual == pytest.approx(0.0, abs=1e-14)


def test_collapse_symmetric_up_to_inversion():
    losses = np.array([0.0, 0.3, 0.5, 0.4, 0.2])
    a = make_curve([0, 5, 10, 15, 20], losses)
    b = make_curve([0, 5, 10, 15, 20], 0.25 * losses, center=-5.0)
    s_ab = collapse_check([a, b]).entries[1].scale
    s_ba = collapse_check([b, a]).entries[1].scale
    assert s_ab == pytest.approx(1.0 / s_ba, rel=1e-10)


def test_collapse_flags_curves_below_noise():
    ref = make_curve([0, 5, 10, 15, 20], [0.0, 3e-4, 5e-4, 4e-4, 2e-4])
    report = collapse_check([ref])
    assert report.entries[0].below_noise


def test_collapse_rejects_mismatched_inputs():
    a = make_curve([0, 5, 10, 15, 20], [0.0, 0.3, 0.5, 0.4, 0.2])
    with pytest.raises(ParameterError):
        collapse_check([a, make_curve([0, 5, 10, 15, 25], [0.0, 0.3, 0.5, 0.4, 0.2])])
    with pytest.raises(ParameterError):
        collapse_check([a, make_curve([0, 5, 10, 15, 20], [0.0, 0.3, 0.5, 0.4, 0.2],
                                      width=0.5)])
    with pytest.raises(ParameterError):
        collapse_check([a, make_curve([0, 5, 10, 15, 20], [0.0, 0.3, 0.5, 0.4, 0.2],
                                      dt=2e-3)])
    with pytest.raises(ParameterError):
        collapse_check([])


def test_default_gamma_grid_switches_at_half():
    narrow = default_gamma_grid(0.5)
    wide = default_gamma_grid(2.0)
    assert narrow[0] == 0.0 and narrow[-1] == 40.0 and len(narrow) == 41
    assert wide[0] == 0.0 and wide[-1] == 20.0 and len(wide) == 41


@pytest.fixture(scope="module")
def small_sweep(small_grid, trap, ground_small):
    return sweep_gamma([0.0, 2.0, 8.0], grid=small_grid, g=REF_G, trap=trap,
                       width=0.5, center=0.0, dt=2e-3, t_final=2.0,
                       psi0=ground_small.psi0)


def test_sweep_single_zero_gamma(small_grid, trap, ground_small):
    curve = sweep_gamma([0.0], grid=small_grid, g=REF_G, trap=trap, width=0.5,
                        center=0.0, dt=2e-3, t_final=2.0, psi0=ground_small.psi0)
    assert curve.final_loss == pytest.approx([0.0], abs=1e-6)


def test_sweep_gamma_zero_point_and_bounds(small_sweep):
    assert small_sweep.final_loss[0] == pytest.approx(0.0, abs=1e-6)
    assert np.all(small_sweep.final_loss >= 0.0)
    assert np.all(small_sweep.final_loss <= 1.0)
    assert small_sweep.final_loss[1] > 1e-3


def test_sweep_metadata_round_trip(small_sweep, small_grid):
    assert small_sweep.width == 0.5 and small_sweep.center == 0.0
    assert small_sweep.half_width == small_grid.half_width
    assert small_sweep.n_points == small_grid.n_points
    assert small_sweep.dt == 2e-3 and small_sweep.t_final == 2.0
    assert small_sweep.final_rate is not None and len(small_sweep.final_rate) == 3


def test_sweep_results_independent_of_parallelism(small_grid, trap, ground_small,
                                                  small_sweep):
    parallel = sweep_gamma([0.0, 2.0, 8.0], grid=small_grid, g=REF_G, trap=trap,
                           width=0.5, center=0.0, dt=2e-3, t_final=2.0,
                           psi0=ground_small.psi0, n_workers=2)
    assert np.array_equal(parallel.final_loss, small_sweep.final_loss)
    assert np.array_equal(parallel.final_rate, small_sweep.final_rate)


def test_sweep_validates_gammas(small_grid, trap, ground_small):
    kwargs = dict(grid=small_grid, g=REF_G, trap=trap, width=0.5, center=0.0,
                  psi0=ground_small.psi0)
    with pytest.raises(ParameterError):
        sweep_gamma([], **kwargs)
    with pytest.raises(ParameterError):
        sweep_gamma([1.0, 1.0], **kwargs)
    with pytest.raises(ParameterError):
        sweep_gamma([-1.0, 2.0], **kwargs)
    with pytest.raises(ParameterError):
        sweep_gamma([0.0, 1.0], grid=small_grid, g=REF_G, trap=trap,
                    width=0.1, center=0.0, psi0=ground_small.psi0)  # unresolved beam


def test_sweep_errors_tagged_with_gamma(small_grid, trap):
    bad = WaveFunction(small_grid, np.ones(small_grid.n_points, dtype=complex))
    with pytest.raises(InvalidStateError, match="gamma=2"):
        sweep_gamma([2.0, 3.0], grid=small_grid, g=REF_G, trap=trap,
                    width=0.5, center=0.0, psi0=bad)
