import dataclasses
import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from replica_bandit.mobility import (
    Direction,
    Role,
    ScenarioConfig,
    TraceFormatError,
    VehicleSnapshot,
    candidate_set,
    expected_candidate_count,
    load_trace,
    mean_candidate_count,
    save_trace,
    sev_rate_for_candidates,
    synth_highway,
)

F, B = Direction.FORWARD, Direction.BACKWARD


def snap(vid, role, pos, direction=F, rnd=0, speed=15.0):
    return VehicleSnapshot(rnd, vid, role, pos, speed, direction)


# candidate discovery


def test_candidate_inside_range_same_direction():
    tav = snap("t", Role.TAV, 1000.0)
    assert candidate_set(tav, [tav, snap("s", Role.SEV, 1250.0)], 300.0) == [("s", 250.0)]


def test_candidate_opposite_direction_excluded():
    tav = snap("t", Role.TAV, 1000.0)
    assert candidate_set(tav, [snap("s", Role.SEV, 1250.0, B)], 300.0) == []


def test_candidate_boundary():
    tav = snap("t", Role.TAV, 1000.0)
    assert candidate_set(tav, [snap("s", Role.SEV, 1301.0)], 300.0) == []
    assert candidate_set(tav, [snap("s", Role.SEV, 1300.0)], 300.0) == [("s", 300.0)]


def test_candidates_exclude_tavs():
    tav = snap("t", Role.TAV, 0.0)
    assert candidate_set(tav, [snap("u", Role.TAV, 10.0)], 300.0) == []


@given(st.floats(0, 5000), st.floats(0, 600), st.sampled_from(list(Direction)), st.sampled_from(list(Direction)))
def test_candidate_decision_symmetric_in_offset(pos, offset, d_tav, d_sev):
    tav = snap("t", Role.TAV, pos + 600, d_tav)
    ahead = candidate_set(tav, [snap("s", Role.SEV, pos + 600 + offset, d_sev)], 300.0)
    behind = candidate_set(tav, [snap("s", Role.SEV, pos + 600 - offset, d_sev)], 300.0)
    assert bool(ahead) == bool(behind)
    assert bool(ahead) == (d_tav == d_sev and abs((pos + 600 + offset) - (pos + 600)) <= 300.0)


# trace files


def write(tmp_path, text, name="trace.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


HEADER = "round,vehicle_id,role,position_m,speed_mps,direction\n"


def test_load_minimal_trace(tmp_path):
    p = write(tmp_path, HEADER + "0,s1,SeV,10.0,15.0,F\n0,t1,TaV,0.0,12.0,F\n")
    tl = load_trace(p)
    assert list(tl) == [0]
    assert [s.vehicle_id for s in tl[0]] == ["s1", "t1"]
    assert tl[0][0].role is Role.SEV and tl[0][1].direction is F


def test_load_empty_trace_warns(tmp_path, caplog):
    p = write(tmp_path, "")
    with caplog.at_level(logging.WARNING):
        assert load_trace(p) == {}
    assert "empty" in caplog.text


def test_unknown_role_names_token(tmp_path):
    p = write(tmp_path, HEADER + "0,s1,Bus,10.0,15.0,F\n")
    with pytest.raises(TraceFormatError, match="'Bus'"):
        load_trace(p)


@pytest.mark.parametrize(
    "body,match",
    [
        ("0,s1,SeV,abc,15.0,F\n", "line 2"),
        ("0,s1,SeV,1.0,15.0\n", "line 2"),
        ("1,s1,SeV,1.0,15.0,F\n0,s2,SeV,1.0,15.0,F\n", "line 3"),
        ("0,s1,SeV,1.0,15.0,F\n0,s1,SeV,2.0,15.0,F\n", "duplicate"),
        ("0,s1,SeV,1.0,15.0,X\n", "direction"),
    ],
)
def test_malformed_traces(tmp_path, body, match):
    with pytest.raises(TraceFormatError, match=match):
        load_trace(write(tmp_path, HEADER + body))


def test_bad_header(tmp_path):
    with pytest.raises(TraceFormatError, match="header"):
        load_trace(write(tmp_path, "a,b,c\n"))


vehicle = st.builds(
    lambda vid, role, pos, speed, d: (vid, role, pos, speed, d),
    st.text("abcdefghij0123456789_", min_size=1, max_size=6),
    st.sampled_from(list(Role)),
    st.floats(-1e5, 1e5, allow_nan=False),
    st.floats(0, 20),
    st.sampled_from(list(Direction)),
)


@settings(max_examples=50)
@given(st.dictionaries(st.integers(0, 50), st.lists(vehicle, min_size=1, max_size=5, unique_by=lambda v: v[0]), max_size=6))
def test_trace_roundtrip(tmp_path_factory, rounds):
    tl = {
        r: tuple(sorted((VehicleSnapshot(r, *v) for v in vs), key=lambda s: s.vehicle_id))
        for r, vs in sorted(rounds.items())
    }
    p = tmp_path_factory.mktemp("rt") / "t.csv"
    save_trace(tl, p)
    assert load_trace(p) == tl


# synthetic highway


def small_config(**kw):
    base = dict(road_length_m=3000.0, ramp_positions_m=(1500.0,), total_rounds=200, rng_seed=3)
    base.update(kw)
    return ScenarioConfig(**base)


def test_synth_deterministic():
    cfg = small_config()
    assert synth_highway(cfg) == synth_highway(cfg)
    assert synth_highway(cfg) != synth_highway(dataclasses.replace(cfg, rng_seed=4))


def test_synth_zero_rates_gives_empty_rounds():
    tl = synth_highway(small_config(sev_arrival_rate_hz=0.0, tav_arrival_rate_hz=0.0, total_rounds=20))
    assert sorted(tl) == list(range(20))
    assert all(len(v) == 0 for v in tl.values())


def test_synth_conserves_vehicles():
    cfg = small_config(sev_arrival_rate_hz=0.5, tav_arrival_rate_hz=0.2)
    tl = synth_highway(cfg)
    last = {}
    gone = set()
    for rnd in sorted(tl):
        present = {s.vehicle_id: s for s in tl[rnd]}
        for vid, prev in last.items():
            if vid in present:
                cur = present[vid]
                step = cur.position_m - prev.position_m
                expected = prev.speed_mps * cfg.round_duration_s
                assert step == pytest.approx(expected if prev.direction is F else -expected, abs=1e-9)
                assert cur.speed_mps == prev.speed_mps and cur.role is prev.role
            else:
                gone.add(vid)
        assert not gone & set(present), "vehicle reappeared after leaving"
        for s in tl[rnd]:
            assert s.speed_mps <= cfg.max_speed_mps
            assert 0 <= s.position_m <= cfg.road_length_m
        last = present


def test_synth_ramps_remove_vehicles():
    cfg = small_config(ramp_exit_prob=1.0, prepopulate=False, total_rounds=400, sev_arrival_rate_hz=0.4)
    tl = synth_highway(cfg)
    # with certain exit, no vehicle that entered at the road start is seen past the ramp
    starters = {s.vehicle_id for snaps in tl.values() for s in snaps if s.direction is F and s.position_m == 0.0}
    for snaps in tl.values():
        for s in snaps:
            if s.vehicle_id in starters:
                assert s.position_m < 1500.0


def test_synth_density_matches_flow_formula():
    cfg = ScenarioConfig(sev_arrival_rate_hz=0.8, tav_arrival_rate_hz=0.05, total_rounds=1000, rng_seed=11)
    measured = mean_candidate_count(synth_highway(cfg), cfg.comm_range_m)
    assert measured == pytest.approx(expected_candidate_count(cfg), rel=0.2)


def test_rate_for_candidates_inverts_formula():
    cfg = ScenarioConfig()
    rate = sev_rate_for_candidates(8.0, cfg)
    assert expected_candidate_count(dataclasses.replace(cfg, sev_arrival_rate_hz=rate)) == pytest.approx(8.0)


def test_scenario_validation():
    with pytest.raises(ValueError):
        ScenarioConfig(comm_range_m=0)
    with pytest.raises(ValueError):
        ScenarioConfig(ramp_positions_m=(20000.0,))
    with pytest.raises(ValueError):
        ScenarioConfig(sev_arrival_rate_hz=-1)
