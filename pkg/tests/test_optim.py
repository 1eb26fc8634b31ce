import numpy as np
import pytest

from gaal.errors import ConfigError, DimensionError
from gaal.optim import Adam, SgdMomentum


def test_plain_sgd_step():
    opt = SgdMomentum(learning_rate=0.1, momentum=0.0)
    (theta,) = opt.step([np.array([1.0])], [np.array([2.0])])
    assert theta[0] == pytest.approx(0.8, abs=1e-15)


def test_momentum_two_steps_hand_unrolled():
    # v1 = 1, theta1 = -0.1; v2 = 0.9 + 1 = 1.9, theta2 = -0.1 - 0.19 = -0.29
    opt = SgdMomentum(learning_rate=0.1, momentum=0.9)
    theta = [np.array([0.0])]
    for _ in range(2):
        theta = opt.step(theta, [np.array([1.0])])
    assert theta[0][0] == pytest.approx(-0.29, abs=1e-15)


def test_zero_gradient_fixed_point():
    for opt in (SgdMomentum(0.1, 0.9), Adam(0.1)):
        theta = [np.array([1.5, -2.0])]
        out = opt.step(theta, [np.zeros(2)])
        assert np.array_equal(out[0], theta[0])


def test_adam_first_step_is_learning_rate_sized():
    # bias correction makes the first update lr * g / (|g| + eps)
    opt = Adam(learning_rate=0.01)
    (theta,) = opt.step([np.array([0.0])], [np.array([3.0])])
    assert theta[0] == pytest.approx(-0.01, rel=1e-6)


def test_adam_matches_hand_unrolled_two_steps():
    lr, b1, b2, eps = 0.1, 0.9, 0.999, 1e-8
    g1, g2 = 1.0, -0.5
    m = v = 0.0
    theta = 0.2
    for t, g in ((1, g1), (2, g2)):
        m = b1 * m + (1 - b1) * g
        v = b2 * v + (1 - b2) * g * g
        theta -= lr * (m / (1 - b1**t)) / (np.sqrt(v / (1 - b2**t)) + eps)
    opt = Adam(learning_rate=lr, beta1=b1, beta2=b2, epsilon=eps)
    params = [np.array([0.2])]
    params = opt.step(params, [np.array([g1])])
    params = opt.step(params, [np.array([g2])])
    assert params[0][0] == pytest.approx(theta, rel=1e-12)


def test_shape_mismatch_raises_dimension_error():
    opt = SgdMomentum(0.1)
    with pytest.raises(DimensionError):
        opt.step([np.zeros(3)], [np.zeros(2)])


def test_buffer_shape_mismatch_raises():
    opt = SgdMomentum(0.1, 0.9)
    opt.step([np.zeros(3)], [np.ones(3)])
    with pytest.raises(DimensionError):
        opt.step([np.zeros(4)], [np.ones(4)])


@pytest.mark.parametrize(
    "bad",
    [
        lambda: SgdMomentum(learning_rate=0.0),
        lambda: SgdMomentum(learning_rate=0.1, momentum=1.0),
        lambda: Adam(learning_rate=-1.0),
        lambda: Adam(learning_rate=0.1, beta1=1.0),
    ],
)
def test_invalid_settings_rejected(bad):
    with pytest.raises(ConfigError):
        bad()
