import numpy as np
import pytest

from localflow.bell import (
    DeterministicStrategy,
    HiddenVariableModel,
    audit_correlations,
    audit_hv_bound,
    bell_slack,
    coplanar_correlation,
    coplanar_grid,
    coplanar_setting,
    correlation_sigma,
    cosd,
    enumerate_strategies,
    hv_correlation,
    quantum_correlation,
    random_model,
    sample_singlet,
    setting_vector,
    sign_model,
    slack_tensor,
    strategy_count,
)
from localflow.errors import InputError


def _random_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def test_quantum_correlation_examples():
    a = coplanar_setting(0)
    assert quantum_correlation(a, a) == -1
    assert quantum_correlation(a, coplanar_setting(90)) == 0
    assert coplanar_correlation(0, 60) == -0.5
    assert cosd(60) == 0.5
    with pytest.raises(InputError):
        setting_vector([1, 1, 0])


def test_slack_examples():
    assert bell_slack(coplanar_correlation, 0, 60, 120) == -0.5
    assert bell_slack(coplanar_correlation, 30, 30, 30) == 0


def test_sample_singlet():
    a = coplanar_setting(10)
    assert sample_singlet(a, a, 5000, seed=1).equal_outcomes == 0
    counts = sample_singlet(coplanar_setting(0), coplanar_setting(90), 100_000, seed=2)
    sigma = np.sqrt(0.25 * 0.75 / counts.n)
    assert np.all(np.abs(counts.frequencies - 0.25) < 5 * sigma)
    one = sample_singlet(a, coplanar_setting(40), 1, seed=3)
    assert one.as_dict() == sample_singlet(a, coplanar_setting(40), 1, seed=3).as_dict()


def test_singlet_correlation_within_5_sigma():
    rng = np.random.default_rng(8)
    for k in range(50):
        a, b = _random_unit(rng), _random_unit(rng)
        rho = quantum_correlation(a, b)
        got = sample_singlet(a, b, 100_000, seed=k).correlation
        assert abs(got - rho) < 5 * correlation_sigma(rho, 100_000)


def test_hv_correlation_examples():
    m = HiddenVariableModel([1.0], DeterministicStrategy([[1]], [[-1]]))
    assert hv_correlation(m, 0, 0) == -1
    m = HiddenVariableModel([0.5, 0.5], DeterministicStrategy([[1, 1]], [[1, -1]]))
    assert hv_correlation(m, 0, 0) == 0
    rng = np.random.default_rng(0)
    m = random_model(3, 4, rng, anticorrelated=False)
    for a in range(3):
        for b in range(3):
            direct = sum(m.weights[l] * m.strategy.A[a, l] * m.strategy.B[b, l] for l in range(4))
            assert hv_correlation(m, a, b) == pytest.approx(direct, abs=1e-15)
            assert -1 <= hv_correlation(m, a, b) <= 1


def test_exhaustive_audit_attains_zero():
    rep = audit_hv_bound(3, 1)
    assert rep.exhaustive and rep.n_models == 8 and rep.min_slack == 0
    rep = audit_hv_bound(3, 4)
    assert rep.exhaustive and rep.n_models == 4096 and rep.min_slack == 0


def test_random_audit():
    rep = audit_hv_bound(3, 4, trials=10_000, seed=0, max_exhaustive=0)
    assert not rep.exhaustive and rep.n_models == 10_000
    assert rep.min_slack >= -1e-12 and not rep.violated


def test_bound_needs_perfect_anticorrelation():
    assert strategy_count(3, 1, anticorrelated=False) == 64
    rep = audit_hv_bound(3, 1, anticorrelated=False)
    assert rep.min_slack == -2 and rep.violated


def test_quantum_audit_reports_violation():
    angles = [0, 60, 120]
    P = np.array([[coplanar_correlation(a, b) for b in angles] for a in angles])
    rep = audit_correlations(P)
    assert rep.violated and rep.min_slack <= -0.5


def test_audit_is_deterministic_and_chunk_free():
    a = audit_hv_bound(4, 3, trials=3000, seed=5, max_exhaustive=0, chunk=1000)
    b = audit_hv_bound(4, 3, trials=3000, seed=5, max_exhaustive=0, chunk=1000)
    assert a == b


def test_enumeration_covers_all_tables():
    A, B = enumerate_strategies(2, 2, anticorrelated=False)
    flat = {tuple(np.concatenate([a.ravel(), b.ravel()])) for a, b in zip(A, B)}
    assert len(flat) == 256


def test_lambda_permutation_invariance():
    rng = np.random.default_rng(4)
    for _ in range(20):
        m = random_model(4, 5, rng)
        perm = rng.permutation(5)
        assert np.allclose(slack_tensor(m.correlation_matrix()), slack_tensor(m.permuted(perm).correlation_matrix()))


def test_sign_model_is_local():
    angles = [0, 30, 60, 90, 120, 150, 180]
    m = sign_model(angles)
    assert not audit_correlations(m.correlation_matrix()).violated
    # a = b gives perfect anticorrelation
    assert hv_correlation(m, 2, 2) == -1


def test_model_validation():
    with pytest.raises(InputError):
        DeterministicStrategy([[2]], [[1]])
    with pytest.raises(InputError):
        HiddenVariableModel([0.7, 0.7], DeterministicStrategy([[1, 1]], [[1, 1]]))
    with pytest.raises(InputError):
        audit_hv_bound(2, 1)
    with pytest.raises(InputError):
        coplanar_grid(1)
