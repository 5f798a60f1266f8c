import numpy as np
import pytest

from strembed.bench import fit_loglog_slope, gen_synthetic, run_scaling


def test_gen_synthetic_minimal():
    ds = gen_synthetic(1, 1, 1, seed=0)
    assert len(ds.train) == 1
    assert len(ds.train[0]) == 1


def test_gen_synthetic_shapes():
    ds = gen_synthetic(50, 32, 20, seed=1)
    assert len(ds.train) == 50
    assert all(len(r) == 32 for r in ds.train)
    assert len(ds.alphabet) == 20
    # protein-style alphabet for size 20
    assert "A" in ds.alphabet and "W" in ds.alphabet


def test_gen_synthetic_deterministic():
    a = gen_synthetic(20, 16, 4, seed=9)
    b = gen_synthetic(20, 16, 4, seed=9)
    assert a.train == b.train


def test_gen_synthetic_validation():
    with pytest.raises(ValueError):
        gen_synthetic(0, 5, 4, seed=0)


def test_fit_loglog_slope_exact_linear():
    sizes = [100, 200, 400, 800]
    times = [0.01 * s for s in sizes]
    slope, r2 = fit_loglog_slope(sizes, times)
    assert slope == pytest.approx(1.0, abs=1e-12)
    assert r2 == pytest.approx(1.0, abs=1e-12)


def test_fit_loglog_slope_quadratic():
    sizes = [10, 20, 40, 80]
    slope, _ = fit_loglog_slope(sizes, [s**2 * 1e-6 for s in sizes])
    assert slope == pytest.approx(2.0, abs=1e-12)


def test_run_scaling_validation():
    with pytest.raises(ValueError, match="axis"):
        run_scaling("q", [1, 2, 4, 8])
    with pytest.raises(ValueError, match="4 points"):
        run_scaling("n", [1, 2, 4])
    with pytest.raises(ValueError, match="increasing"):
        run_scaling("n", [8, 4, 2, 1])


def test_run_scaling_smoke_n_axis():
    run = run_scaling("n", [50, 100, 200, 400], length=64, r=32, repeats=1, seed=0)
    assert run.grid == (50, 100, 200, 400)
    assert len(run.wall_times) == 4
    assert all(t > 0 for t in run.wall_times)
    assert all(len(times) == 1 for times in run.all_times)
    # generous bracket for a desk-size smoke run; the acceptance suite
    # measures the real slope at full size
    assert 0.5 < run.fitted_slope < 1.6
