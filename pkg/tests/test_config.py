import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from sqzdist.config import RunConfig, build_scenario, dump_config, parse_config, scenario_config
from sqzdist.errors import NonGram, NonUnitary
from sqzdist.model import beamsplitter_unitary, tritter_unitary

from conftest import random_scenario


def test_named_unitaries():
    cfg = parse_config('{"scenario": {"unitary": "tritter", "squeezing": [1, 1, 0]}}')
    assert np.allclose(build_scenario(cfg.scenario).U, tritter_unitary())


def test_literal_complex_matrix():
    s = 2**-0.5
    text = json.dumps({"scenario": {"unitary": [[[s, 0], [0, s]], [[0, s], [s, 0]]], "squeezing": [1, 1]}})
    assert np.allclose(build_scenario(parse_config(text).scenario).U, beamsplitter_unitary())


def test_real_entries_allowed():
    sc = build_scenario(parse_config('{"scenario": {"unitary": [[1, 0], [0, 1]], "squeezing": [0.5, 0.5]}}').scenario)
    assert np.array_equal(sc.U, np.eye(2))


def test_haar_and_overlaps():
    cfg = parse_config(
        '{"scenario": {"unitary": {"haar": {"M": 3, "seed": 4}}, "squeezing": [1, 1, 1],'
        ' "overlap": {"gaussian": {"delta_t": 1.0, "omega0": 0.5}}}}'
    )
    sc = build_scenario(cfg.scenario)
    assert sc.M == 3
    assert abs(sc.V[0, 1]) == pytest.approx(np.exp(-0.25))
    cfg = parse_config('{"scenario": {"unitary": "beamsplitter", "squeezing": [1, 1], "overlap": {"homogeneous": 0.25}}}')
    assert build_scenario(cfg.scenario).V[0, 1] == pytest.approx(0.75)


def test_unknown_keys_rejected():
    with pytest.raises(ValidationError):
        parse_config('{"scenario": {"unitary": "tritter", "squeezing": [1], "extra": 1}}')
    with pytest.raises(ValidationError):
        parse_config('{"nonsense": true}')
    with pytest.raises(ValidationError):
        parse_config('{"validate": {"tolerances": {"bogus": 1.0}}}')


def test_gaussian_needs_one_delay_source():
    with pytest.raises(ValidationError):
        parse_config('{"scenario": {"unitary": "beamsplitter", "squeezing": [1, 1], "overlap": {"gaussian": {}}}}')


def test_domain_errors_surface():
    with pytest.raises(NonUnitary):
        build_scenario(parse_config('{"scenario": {"unitary": [[1, 1], [0, 1]], "squeezing": [0, 0]}}').scenario)
    with pytest.raises(NonGram):
        build_scenario(
            parse_config('{"scenario": {"unitary": "beamsplitter", "squeezing": [0, 0], "overlap": [[1, 1.5], [1.5, 1]]}}').scenario
        )


@given(st.integers(0, 10_000), st.integers(1, 4))
def test_round_trip(seed, M):
    sc = random_scenario(M, seed, eta=np.random.default_rng(seed).uniform(0, 1, M))
    text = dump_config(RunConfig(scenario=scenario_config(sc), max_total=3))
    back = build_scenario(parse_config(text).scenario)
    for a, b in [(sc.U, back.U), (sc.V, back.V), (sc.squeeze.r, back.squeeze.r), (sc.squeeze.theta, back.squeeze.theta), (sc.eta, back.eta)]:
        assert np.max(np.abs(a - b)) <= 1e-15


def test_validate_alias_round_trip():
    cfg = parse_config('{"validate": {"tolerances": {"hafnian": 1e-3}}}')
    assert parse_config(dump_config(cfg)).validate_.tolerances == {"hafnian": 1e-3}
