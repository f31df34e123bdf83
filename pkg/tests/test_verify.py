import numpy as np
import pytest

from cpnilp import jsonio, verify
from cpnilp.cpmap import identity_channel
from cpnilp.nilpotency import synthesize
from cpnilp.verify import (
    NA,
    PASS,
    VERDICT_KEYS,
    extreme_point_checks,
    flag_invariant_subspaces,
    instance_report,
    run_verify,
)


def test_report_has_every_key(shift):
    report = instance_report(shift)
    assert set(report["verdicts"]) == set(VERDICT_KEYS)
    assert set(report["verdicts"].values()) == {PASS}
    assert report["commuting_flags"] == [[0, 1], [1, 0]]


def test_report_for_non_nilpotent():
    report = instance_report(identity_channel(3))
    assert report["summary"]["order"] is None
    assert report["verdicts"]["prop_2_6"] == PASS
    assert report["verdicts"]["thm_2_7"] == NA


def test_flag_invariant_subspaces():
    alpha = synthesize((1, 2, 1), 2)
    subs = flag_invariant_subspaces(alpha, verify.DEFAULT_TOL)
    assert [S.dim for S in subs] == [3, 1]


def test_extreme_point_checks(rng):
    assert extreme_point_checks([1, 2, 3], rng)


def test_run_verify_rejects_empty():
    with pytest.raises(ValueError):
        run_verify(3, 2, 0, 0)


def test_counterexample_dump_replays(tmp_path, monkeypatch):
    monkeypatch.setattr(verify, "check_theorem_2_7", lambda a, b: len(a) < 2)
    report = run_verify(4, 2, 8, seed=3, out_dir=tmp_path)
    assert report["status"] == "fail"
    dumped = [f for f in report["failures"] if "thm_2_7" in f.get("failed", [])]
    assert dumped
    kind, alpha = jsonio.load(dumped[0]["instance"])
    assert kind == "kraus_map"
    assert instance_report(alpha)["verdicts"]["thm_2_7"] == "fail"


def test_seed_determinism():
    a = run_verify(4, 2, 10, seed=11)
    b = run_verify(4, 2, 10, seed=11)
    a.pop("wall_time_s")
    b.pop("wall_time_s")
    assert a == b
