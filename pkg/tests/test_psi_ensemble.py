import numpy as np
import pytest
from scipy import stats

from localflow.bell import coplanar_setting, singlet_probabilities
from localflow.errors import InputError
from localflow.psi_ensemble import (
    ClusterMap,
    KappaProcess,
    SingleQubitMap,
    alternating_run,
    expected_repeat_probability,
    sample_outcomes,
    singlet_outcome,
    singlet_outcomes,
    statistical_dependence_report,
)


def _random_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def test_interval_examples():
    a = coplanar_setting(0)
    assert singlet_outcome(a, a, 0.3) == (1, -1)
    out = singlet_outcomes(a, a, np.random.default_rng(0).random(10_000))
    assert np.all(out[:, 0] != out[:, 1])
    counts = sample_outcomes(a, coplanar_setting(90), 100_000, seed=1)
    sigma = np.sqrt(0.25 * 0.75 / counts.n)
    assert np.all(np.abs(counts.frequencies - 0.25) < 5 * sigma)


def test_cluster_lengths_sum_to_one():
    rng = np.random.default_rng(2)
    for _ in range(50):
        cm = ClusterMap.for_settings(_random_unit(rng), _random_unit(rng))
        assert sum(cm.lengths) == pytest.approx(1, abs=1e-15)
        assert min(cm.lengths) >= 0


def test_chi_square_against_quantum():
    rng = np.random.default_rng(6)
    for k in range(20):
        a, b = _random_unit(rng), _random_unit(rng)
        counts = sample_outcomes(a, b, 100_000, seed=k)
        expected = singlet_probabilities(a, b) * counts.n
        keep = expected > 0
        obs = np.array(counts.counts)[keep]
        p = stats.chisquare(obs, expected[keep] * obs.sum() / expected[keep].sum()).pvalue
        assert p > 0.001


def test_dependence():
    a, perp = coplanar_setting(0), coplanar_setting(90)
    rep = statistical_dependence_report([(a, a), (a, perp)], n=100_000, seed=0)
    assert rep.mutual_information > 0 and rep.exact > 0
    assert abs(rep.mutual_information - rep.exact) < 0.01
    assert statistical_dependence_report([(a, a)], n=10_000).mutual_information == 0
    fixed = ClusterMap((0.25, 0.25, 0.25, 0.25))
    rep = statistical_dependence_report([(a, a), (a, perp)], n=100_000, partition=lambda x, y: fixed)
    assert rep.exact == 0 and rep.mutual_information < 10 * rep.bias_scale


def test_kappa_process():
    p = KappaProcess(1.0, seed=0, kappa=0.4)
    assert p.advance(0.0) == 0.4
    with pytest.raises(InputError):
        KappaProcess(0.0)


def test_single_qubit_map_partitions():
    z = SingleQubitMap("z", 0.5)
    x = SingleQubitMap("x", 0.5)
    assert [z.outcome(k) for k in (0.1, 0.3, 0.6, 0.8)] == [1, 1, -1, -1]
    assert [x.outcome(k) for k in (0.1, 0.3, 0.6, 0.8)] == [1, -1, 1, -1]


def test_alternating_examples():
    sd = alternating_run(1e-6, 1.0, 10_000, seed=0, mode="superdeterministic")
    assert sd.repeat_probability("z") >= 0.99 and sd.repeat_probability("x") >= 0.99
    for mode in ("superdeterministic", "quantum"):
        r = alternating_run(1e3, 1.0, 10_000, seed=0, mode=mode)
        for b in "zx":
            assert abs(r.repeat_probability(b) - 0.5) < 5 * 0.5 / np.sqrt(r.stats[b].pairs)
    q = alternating_run(1e-6, 1.0, 10_000, seed=0, mode="quantum")
    assert abs(q.repeat_probability("z") - 0.5) < 0.02


def test_repeat_probability_tracks_decay():
    for r in (0.05, 0.3, 1.0):
        res = alternating_run(r, 1.0, 20_000, seed=1)
        for b in "zx":
            st = res.stats[b]
            assert abs(st.probability - expected_repeat_probability(r)) < 5 * max(st.stderr, 1e-3)


def test_alternating_errors():
    with pytest.raises(InputError):
        alternating_run(1.0, 1.0, 0, mode="quantum")
    with pytest.raises(InputError):
        alternating_run(1.0, 1.0, 100, mode="everett")
