"""Tests for the path simulator: reproducibility, engines, transforms."""

import math

import numpy as np
import pytest

from sdl.errors import InvalidConfig
from sdl.sim import (
    BangBangControl,
    ConstantControl,
    Control,
    MarkovControl,
    PathBatch,
    RunningMaxControl,
    normal_increments,
    scale_transform,
    simulate,
    simulate_terminal,
)
from sdl.sim.paths import check_seed


class SignRuleScalar(Control):
    """Bang-bang drift expressed only through the scalar history contract."""

    def __init__(self):
        super().__init__(1.0, label="sign_scalar")

    def evaluate(self, t, history):
        return -1.0 if history[-1] > 0.0 else 1.0


class TestSeedValidation:
    def test_rejects_non_integers(self):
        for bad in (1.5, "7", None, True, np.float64(3.0)):
            with pytest.raises(InvalidConfig):
                check_seed(bad)

    def test_rejects_out_of_range(self):
        with pytest.raises(InvalidConfig):
            check_seed(1 << 64)
        assert check_seed(-(1 << 63)) == -(1 << 63)
        assert check_seed(np.int64(42)) == 42


class TestIncrements:
    def test_layout_is_flat_per_path(self):
        # row for global path p is the same whether drawn alone or in bulk
        full = normal_increments(99, 16, 0, 40)
        for lo, hi in [(0, 5), (7, 13), (31, 40)]:
            np.testing.assert_array_equal(
                normal_increments(99, 16, lo, hi), full[lo:hi]
            )

    def test_seed_sensitivity(self):
        a = normal_increments(1, 8, 0, 4)
        b = normal_increments(2, 8, 0, 4)
        assert not np.array_equal(a, b)
        np.testing.assert_array_equal(a, normal_increments(1, 8, 0, 4))

    def test_moments(self):
        z = normal_increments(7, 512, 0, 2000).ravel()
        n = z.size
        assert abs(z.mean()) < 3.0 / math.sqrt(n)
        assert abs(z.var() - 1.0) < 3.0 * math.sqrt(2.0 / n)

    def test_empty_range_rejected(self):
        with pytest.raises(InvalidConfig):
            normal_increments(1, 8, 5, 5)


class TestSimulate:
    def test_zero_drift_is_brownian(self):
        batch = simulate(ConstantControl(0.0), 0.5, 1.0, 64, 200, seed=3)
        z = normal_increments(3, 64, 0, 200)
        expected = 0.5 + np.cumsum(z, axis=1) * math.sqrt(1.0 / 64)
        np.testing.assert_allclose(batch.values[:, 1:], expected, atol=1e-12)
        assert np.all(batch.values[:, 0] == 0.5)

    def test_chunk_invariance(self):
        kw = dict(x0=0.0, T=1.0, n_steps=32, n_paths=300, seed=11)
        a = simulate(BangBangControl(), chunk_size=17, **kw)
        b = simulate(BangBangControl(), chunk_size=300, **kw)
        np.testing.assert_array_equal(a.values, b.values)

    def test_thread_invariance(self):
        kw = dict(x0=0.3, T=1.0, n_steps=32, n_paths=400, seed=5, chunk_size=50)
        a = simulate(RunningMaxControl(), threads=1, **kw)
        b = simulate(RunningMaxControl(), threads=4, **kw)
        np.testing.assert_array_equal(a.values, b.values)

    def test_path_count_invariance(self):
        # prefix of a larger run is bit-identical to a smaller run
        kw = dict(x0=0.0, T=1.0, n_steps=16, seed=13)
        small = simulate(BangBangControl(), n_paths=50, **kw)
        large = simulate(BangBangControl(), n_paths=200, **kw)
        np.testing.assert_array_equal(large.values[:50], small.values)

    def test_history_engine_matches_batch_engine(self):
        kw = dict(x0=0.2, T=1.0, n_steps=24, n_paths=60, seed=17)
        scalar = simulate(SignRuleScalar(), **kw)
        batch = simulate(BangBangControl(), **kw)
        np.testing.assert_array_equal(scalar.values, batch.values)

    def test_clamp_counts_and_values(self):
        kw = dict(x0=0.0, T=1.0, n_steps=10, n_paths=20, seed=23)
        wild = simulate(MarkovControl(lambda t, x: 2.0 + 0.0 * x, bound=1.0), **kw)
        tame = simulate(ConstantControl(1.0), **kw)
        assert wild.clamp_violations == 20 * 10
        np.testing.assert_array_equal(wild.values, tame.values)
        assert tame.clamp_violations == 0

    def test_nan_drift_rejected(self):
        with pytest.raises(InvalidConfig):
            simulate(
                MarkovControl(lambda t, x: np.full_like(x, np.nan), bound=1.0),
                0.0, 1.0, 4, 8, seed=1,
            )

    def test_storage_cap(self):
        with pytest.raises(InvalidConfig):
            simulate(ConstantControl(0.0), 0.0, 1.0, 1000, 10**9, seed=1)

    def test_batch_accessors(self):
        batch = simulate(ConstantControl(-1.0), 0.1, 2.0, 8, 5, seed=29)
        assert batch.n_paths == 5
        assert batch.n_steps == 8
        assert batch.T == 2.0
        assert batch.dt == 0.25
        p = batch.path(2)
        np.testing.assert_array_equal(p.values, batch.values[2])
        with pytest.raises(InvalidConfig):
            batch.path(5)
        np.testing.assert_array_equal(batch.terminal(), batch.values[:, -1])

    def test_argument_validation(self):
        with pytest.raises(InvalidConfig):
            simulate("constant", 0.0, 1.0, 4, 8, seed=1)
        with pytest.raises(InvalidConfig):
            simulate(ConstantControl(0.0), 0.0, -1.0, 4, 8, seed=1)
        with pytest.raises(InvalidConfig):
            simulate(ConstantControl(0.0), 0.0, 1.0, 0, 8, seed=1)
        with pytest.raises(InvalidConfig):
            simulate(ConstantControl(0.0), math.inf, 1.0, 4, 8, seed=1)


class TestTerminalEngine:
    def test_matches_full_simulation(self):
        controls = (ConstantControl(-1.0), BangBangControl(), RunningMaxControl())
        starts = np.array([-0.5, 0.0, 0.7])
        ts = simulate_terminal(controls, starts, 1.0, 32, 150, seed=41,
                               chunk_size=64)
        for ci, ctrl in enumerate(controls):
            for ji, x0 in enumerate(starts):
                full = simulate(ctrl, float(x0), 1.0, 32, 150, seed=41)
                np.testing.assert_array_equal(ts.lane(ci, ji), full.terminal())

    def test_common_random_numbers(self):
        # constant-drift lanes differ by exactly (c1 - c2) * T up to rounding
        ts = simulate_terminal(
            (ConstantControl(-1.0), ConstantControl(1.0)), 0.0, 1.0, 64, 500,
            seed=43,
        )
        diff = ts.lane(1, 0) - ts.lane(0, 0)
        np.testing.assert_allclose(diff, 2.0, atol=1e-10)

    def test_thread_and_chunk_invariance(self):
        kw = dict(T=1.0, n_steps=16, n_paths=300, seed=47)
        a = simulate_terminal(BangBangControl(), 0.0, chunk_size=37, threads=1, **kw)
        b = simulate_terminal(BangBangControl(), 0.0, chunk_size=300, threads=3, **kw)
        np.testing.assert_array_equal(a.values, b.values)

    def test_metadata(self):
        ts = simulate_terminal(
            (ConstantControl(0.0, bound=1.0),), [0.0, 1.0], 2.0, 8, 10, seed=51
        )
        assert ts.values.shape == (1, 2, 10)
        assert ts.labels == ("constant:0",)
        assert ts.T == 2.0 and ts.n_steps == 8 and ts.seed == 51
        np.testing.assert_array_equal(ts.clamp_violations, [0])

    def test_validation(self):
        with pytest.raises(InvalidConfig):
            simulate_terminal((), 0.0, 1.0, 4, 8, seed=1)
        with pytest.raises(InvalidConfig):
            simulate_terminal(SignRuleScalar(), 0.0, 1.0, 4, 8, seed=1)
        with pytest.raises(InvalidConfig):
            simulate_terminal(ConstantControl(0.0), np.inf, 1.0, 4, 8, seed=1)
        with pytest.raises(InvalidConfig):
            simulate_terminal(ConstantControl(0.0), np.zeros((2, 2)), 1.0, 4, 8,
                              seed=1)


class TestScaleTransform:
    def test_identity_and_roundtrip(self):
        batch = simulate(BangBangControl(), 0.0, 1.0, 16, 30, seed=53)
        same = scale_transform(batch, 1.0)
        np.testing.assert_array_equal(same.values, batch.values)
        back = scale_transform(scale_transform(batch, 2.0), 0.5)
        np.testing.assert_array_equal(back.values, batch.values)
        np.testing.assert_array_equal(back.times, batch.times)

    def test_scaling_rule(self):
        batch = simulate(ConstantControl(-1.0), 0.5, 1.0, 8, 5, seed=59)
        out = scale_transform(batch, 3.0)
        np.testing.assert_array_equal(out.times, batch.times * 9.0)
        np.testing.assert_array_equal(out.values, batch.values * 3.0)
        assert out.seed == batch.seed

    def test_validation(self):
        batch = simulate(ConstantControl(0.0), 0.0, 1.0, 4, 2, seed=61)
        with pytest.raises(InvalidConfig):
            scale_transform(batch, 0.0)
        with pytest.raises(InvalidConfig):
            scale_transform(batch.values, 2.0)


class TestPathBatchValidation:
    def test_shape_checks(self):
        with pytest.raises(InvalidConfig):
            PathBatch(times=np.array([0.0]), values=np.zeros((2, 1)), seed=1)
        with pytest.raises(InvalidConfig):
            PathBatch(times=np.linspace(0, 1, 5), values=np.zeros((2, 4)), seed=1)
        with pytest.raises(InvalidConfig):
            PathBatch(times=np.zeros((2, 2)), values=np.zeros((2, 2)), seed=1)
