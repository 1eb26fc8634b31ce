import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaal.errors import ConfigError, ContractError
from gaal.oracles import (
    SKIP,
    NearestNeighborOracle,
    OracleResponse,
    PendingQueue,
    default_skip_radius,
    ground_truth_label,
    nn_label,
)
from gaal.svm import LabeledSet


def sign_of_first(x):
    return x[0]


def test_ground_truth_examples():
    assert ground_truth_label(sign_of_first, np.array([0.5, -2.0])).verdict == 1
    assert ground_truth_label(sign_of_first, np.array([-0.5, 9.0])).verdict == -1


def test_ground_truth_tie_goes_positive():
    assert ground_truth_label(sign_of_first, np.array([0.0, 1.0])).verdict == 1


def test_ground_truth_agrees_with_recompute_on_1000_points():
    rng = np.random.default_rng(3)
    for x in rng.uniform(-1, 1, size=(1000, 2)):
        expected = 1 if x[0] >= 0 else -1
        assert ground_truth_label(sign_of_first, x).verdict == expected


def test_ground_truth_is_pure():
    x = np.array([0.25, 0.5])
    first = ground_truth_label(sign_of_first, x)
    assert all(ground_truth_label(sign_of_first, x) == first for _ in range(5))


def reference_set(n=50, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1, 1, size=(n, 2))
    y = np.where(X[:, 0] >= 0, 1.0, -1.0)
    return LabeledSet(X, y)


def test_nn_label_exact_match_returns_its_label():
    ref = reference_set()
    i = 17
    resp = nn_label(ref, tau=0.5, x=ref.instances[i])
    assert resp.verdict == int(ref.labels[i])


def test_nn_label_skips_outside_radius():
    ref = LabeledSet(np.array([[0.0, 0.0]]), np.array([1.0]))
    assert nn_label(ref, tau=0.1, x=np.array([5.0, 5.0])).verdict == SKIP


def test_nn_label_matches_exhaustive_scan():
    ref = reference_set(50, seed=1)
    rng = np.random.default_rng(2)
    tau = 0.4
    for x in rng.uniform(-1.5, 1.5, size=(200, 2)):
        dists = [float(np.linalg.norm(r - x)) for r in ref.instances]
        j = min(range(50), key=lambda i: (dists[i], i))
        expected = SKIP if dists[j] > tau else int(ref.labels[j])
        assert nn_label(ref, tau, x).verdict == expected


def test_nn_label_tie_takes_lowest_index():
    ref = LabeledSet(np.array([[1.0, 0.0], [-1.0, 0.0]]), np.array([1.0, -1.0]))
    assert nn_label(ref, tau=5.0, x=np.array([0.0, 0.0])).verdict == 1


def test_nn_label_infinite_radius_never_skips():
    ref = reference_set(20, seed=4)
    oracle = NearestNeighborOracle(ref, tau=np.inf)
    for x in np.random.default_rng(5).uniform(-10, 10, size=(50, 2)):
        assert oracle.respond(x).verdict != SKIP


def test_nn_label_vanishing_radius_skips_everything_off_reference():
    ref = reference_set(20, seed=6)
    tiny = 1e-12
    assert nn_label(ref, tiny, ref.instances[3] + 0.01).verdict == SKIP
    assert nn_label(ref, tiny, ref.instances[3].copy()).verdict != SKIP


def test_nn_label_contract_errors():
    with pytest.raises(ContractError):
        nn_label(LabeledSet(np.zeros((0, 2)), np.zeros(0)), 1.0, np.zeros(2))
    with pytest.raises(ConfigError):
        nn_label(reference_set(), 0.0, np.zeros(2))


def test_default_skip_radius_is_95th_percentile_of_nn_distances():
    ref = reference_set(40, seed=7)
    X = ref.instances
    nn = []
    for i in range(len(X)):
        dists = [np.linalg.norm(X[i] - X[j]) for j in range(len(X)) if j != i]
        nn.append(min(dists))
    assert default_skip_radius(ref) == pytest.approx(np.percentile(nn, 95), abs=1e-12)


def make_queue(n=10):
    q = PendingQueue()
    for i in range(n):
        q.issue(f"q{i}", {"i": i})
    return q


def test_queue_full_resolution():
    q = make_queue(10)
    responses = [OracleResponse(f"q{i}", 1 if i % 2 else -1) for i in range(10)]
    applied, rejected = q.apply(responses)
    assert len(applied) == 10 and rejected == []
    assert len(q) == 0


def test_queue_unknown_id_rejected_and_state_unchanged():
    q = make_queue(3)
    applied, rejected = q.apply([OracleResponse("q999", 1)])
    assert applied == [] and rejected == ["q999"]
    assert len(q) == 3


def test_queue_duplicate_verdict_is_idempotent():
    q = make_queue(2)
    q.apply([OracleResponse("q0", 1)])
    applied, rejected = q.apply([OracleResponse("q0", -1)])
    assert applied == [] and rejected == ["q0"]
    assert q.resolved["q0"] == 1  # first verdict wins


def test_queue_accepts_skip_and_rejects_garbage():
    q = make_queue(2)
    applied, _ = q.apply([OracleResponse("q0", SKIP)])
    assert applied and q.resolved["q0"] == SKIP
    with pytest.raises(ContractError):
        q.apply([OracleResponse("q1", 7)])


def test_queue_reissue_rejected():
    q = make_queue(1)
    with pytest.raises(ContractError):
        q.issue("q0", {})


@settings(max_examples=30)
@given(st.floats(min_value=-1, max_value=1), st.floats(min_value=-1, max_value=1))
def test_programmatic_oracles_repeatable(a, b):
    x = np.array([a, b])
    ref = reference_set(10, seed=8)
    assert nn_label(ref, 2.0, x) == nn_label(ref, 2.0, x)
