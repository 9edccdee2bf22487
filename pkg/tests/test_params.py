import numpy as np
import pytest
from hypothesis import given, strategies as st

from poisson_aoi.params import (NetworkParams, ParameterError, Policy, RngSpec, TrafficParams,
                                db_to_linear, load_config, split_stream, validate_params)


def test_fig4_parameters_are_valid():
    net = NetworkParams.from_db(0.05, 10.0, r0=1.0, alpha=4.0, p=0.5)
    v = validate_params(net, TrafficParams(0.1))
    assert v.net.theta == 10.0
    assert v.traffic.queue_capacity == 2


def test_alpha_two_rejected():
    with pytest.raises(ParameterError, match="alpha must exceed 2"):
        validate_params(NetworkParams(0.05, alpha=2.0), TrafficParams(0.1))


def test_lambda_a_range():
    with pytest.raises(ParameterError, match=r"lambda_a outside \[0,1\]"):
        validate_params(NetworkParams(0.05), TrafficParams(1.5))


@pytest.mark.parametrize("kw, msg", [
    (dict(lam=-1.0), "lambda"), (dict(lam=0.1, r0=0.0), "r0"),
    (dict(lam=0.1, theta=0.0), "theta"), (dict(lam=0.1, p=0.0), "p"), (dict(lam=0.1, p=1.5), "p"),
])
def test_network_field_errors_name_the_field(kw, msg):
    with pytest.raises(ParameterError, match=msg):
        NetworkParams(**kw).validate()


def test_deadline_must_be_positive_integer():
    with pytest.raises(ParameterError, match="deadline_d"):
        TrafficParams(0.1, "A", 0).validate()
    TrafficParams(0.1, "none", None).validate()


def test_db_conversion_exact():
    assert db_to_linear(10.0) == 10.0
    assert NetworkParams.from_db(0.1, 10.0).theta_db == pytest.approx(10.0)


def test_policy_parse():
    assert Policy.parse("a") is Policy.A
    assert Policy.parse("B") is Policy.B
    assert Policy.parse("none") is Policy.NONE
    with pytest.raises(ValueError):
        Policy.parse("C")


def test_split_stream_examples():
    assert split_stream(RngSpec(7, 0), 2) == [RngSpec(7, 1), RngSpec(7, 2)]
    assert split_stream(RngSpec(7, 0), 1) == split_stream(RngSpec(7, 0), 1)
    with pytest.raises(ParameterError):
        split_stream(RngSpec(7, 0), 0)


def test_streams_of_different_seeds_differ():
    a = [s.generator().random(1000) for s in split_stream(RngSpec(7, 0), 3)]
    b = [s.generator().random(1000) for s in split_stream(RngSpec(8, 0), 3)]
    for x in a:
        for y in b:
            assert not np.any(np.isin(x, y))


@given(st.integers(0, 2**63 - 1), st.integers(0, 10**6))
def test_rng_spec_is_reproducible(seed, stream):
    spec = RngSpec(seed, stream)
    assert np.array_equal(spec.generator().random(8), spec.generator().random(8))


def test_load_config_defaults_and_overrides(tmp_path):
    cfg = load_config()
    assert cfg["theta_db"] == 10.0 and cfg["policy"] == "none"
    path = tmp_path / "c.json"
    path.write_text('{"lambda": 0.2, "policy": "A", "deadline_d": 5}')
    cfg = load_config(path, seed=9)
    assert cfg["lambda"] == 0.2 and cfg["seed"] == 9 and cfg["deadline_d"] == 5


def test_load_config_rejects_bad_values(tmp_path):
    path = tmp_path / "c.json"
    path.write_text('{"alpha": 1.5}')
    with pytest.raises(ParameterError):
        load_config(path)
