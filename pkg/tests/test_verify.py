"""Tests for the statistical verification suite (small corpus)."""

import math

import numpy as np
import pytest

from sdl.errors import InvalidConfig
from sdl.normal import WindowPair
from sdl.verify import (
    CheckResult,
    check_error_estimate,
    check_modulus,
    check_sandwich,
    corpus_controls,
    corpus_starts,
    j_window_mc,
    window_pairs,
)

from conftest import SMALL_SEED


class TestCorpusLayout:
    def test_controls(self):
        labels = [c.label for c in corpus_controls()]
        assert labels == ["constant:-1", "constant:0", "bang_bang_sgn",
                          "running_max"]
        assert all(c.bound == 1.0 for c in corpus_controls())

    def test_window_pairs(self):
        pairs = window_pairs()
        assert len(pairs) == 6  # ordered pairs h <= k over three sizes
        assert all(w.h <= w.k for w in pairs)

    def test_starts_cover_extras_and_midpoints(self):
        pairs = window_pairs()
        starts = corpus_starts(pairs)
        for x in (-1.0, 0.0, 2.0):
            assert x in starts
        for w in pairs:
            assert (w.h + w.k) / 2.0 in starts
        assert list(starts) == sorted(set(starts))

    def test_corpus_shape(self, small_corpus):
        assert small_corpus.values.shape[0] == 4
        assert small_corpus.values.shape[1] == len(corpus_starts(window_pairs()))
        assert small_corpus.seed == SMALL_SEED
        assert small_corpus.T == 1.0


class TestJWindowMc:
    def test_matches_naive_indicator_mean(self):
        rng = np.random.default_rng(67)
        samples = rng.normal(-0.3, 1.0, 5000)
        w = WindowPair(h=0.5, k=1.0)
        j = ((samples >= w.k) & (samples <= w.k + w.h)).astype(float) - (
            (samples >= 0.0) & (samples <= w.h)
        ).astype(float)
        mean, se = j_window_mc(np.sort(samples), w)
        assert mean == pytest.approx(float(j.mean()), abs=1e-15)
        naive_se = float(j.std(ddof=0)) / math.sqrt(samples.size)
        assert se == pytest.approx(naive_se, rel=1e-12)

    def test_se_positive_for_mixed_sample(self):
        samples = np.sort(np.array([-0.5, 0.25, 1.2, 3.0]))
        mean, se = j_window_mc(samples, WindowPair(h=0.5, k=1.0))
        assert se > 0.0


class TestCheckResult:
    def test_line_format(self):
        ok = CheckResult(name="x", passed=True, claim="c", details={})
        bad = CheckResult(name="y", passed=False, claim="c", details={})
        assert ok.line() == "PASS x"
        assert bad.line() == "FAIL y"


class TestChecksOnSmallCorpus:
    def test_error_estimate_passes(self, small_corpus):
        results = check_error_estimate(small_corpus)
        names = [r.name for r in results]
        assert "reference-control-equality" in names
        assert len([n for n in names if n.startswith("window-mean")]) == 4
        for r in results:
            assert r.passed, (r.name, r.details)
        per_control = [r for r in results if r.name.startswith("window-mean")]
        # 6 pairs x 4 starts (3 extras + midpoint) per control
        assert all(r.details["n_checks"] == 24 for r in per_control)

    def test_sandwich_passes(self, small_corpus):
        results = check_sandwich(small_corpus)
        assert len(results) == 3  # kde + two closed forms
        for r in results:
            assert r.passed, (r.name, r.details)
        kde_result = results[0]
        assert kde_result.details["budget"] > 0.0
        assert kde_result.details["n_points"] == 61

    def test_modulus_passes(self, small_corpus):
        results = check_modulus(small_corpus, alphas=(0.5,))
        assert len(results) == 4
        for r in results:
            assert r.passed, (r.name, r.details)
            assert r.details["modulus"] > 0.0
            assert r.details["stat_error"] > 0.0

    def test_missing_start_detected(self, small_corpus):
        with pytest.raises(InvalidConfig):
            check_error_estimate(small_corpus, extra_starts=(17.5,))
