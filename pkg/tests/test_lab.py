import math
from dataclasses import replace

import numpy as np
import pytest

from ultragabor import lab
from ultragabor.config import load_suite
from ultragabor.errors import ConfigError
from ultragabor.weights import power_weight

SUITE = {s.identifier: s for s in load_suite()}


@pytest.mark.parametrize("ident", sorted(SUITE))
def test_default_suite_outcome_matches_expectation(ident):
    rep = lab.run_suite([SUITE[ident]])[0]
    assert rep.ok, (rep.identifier, rep.margin, rep.note)
    assert rep.identifier == ident
    if rep.passed:
        assert rep.margin >= 0


@pytest.mark.parametrize("ident", ["lemma71_gaussian", "lemma72_gaussian", "lemma73_gaussian_hermite"])
def test_refinement_keeps_inequalities(ident):
    coarse = lab.run_experiment(SUITE[ident])
    fine = lab.run_experiment(SUITE[ident].refined(2))
    assert coarse.passed and fine.passed
    assert fine.grid != coarse.grid or fine.margin != coarse.margin


def test_constants_carry_provenance():
    rep = lab.run_experiment(SUITE["lemma71_gaussian"])
    assert rep.constants
    for c in rep.constants.values():
        assert {"value", "provenance"} <= set(c)


def test_gated_precondition_becomes_failed_report():
    spec = SUITE["multiplier_envelope_gate"]
    rep = lab.run_suite([spec])[0]
    assert not rep.passed and rep.ok
    assert rep.note
    assert rep.status == "expected-fail"


def test_run_suite_orders_by_identifier():
    specs = [SUITE["isometry_hermite"], SUITE["lemma71_zero"]]
    assert [r.identifier for r in lab.run_suite(specs)] == ["isometry_hermite", "lemma71_zero"]


def test_unknown_experiment_is_a_config_error():
    with pytest.raises(ConfigError):
        lab.run_experiment(lab.ExperimentSpec("x", "no_such_runner"))


def test_spec_validation():
    with pytest.raises(ConfigError):
        lab.ExperimentSpec("x", "lemma71", expected="maybe")
    with pytest.raises(ConfigError):
        lab.ExperimentSpec("x", "lemma71", tolerance=-1.0)
    s = lab.ExperimentSpec("x", "lemma71", step=0.25, params=(("k", "v"),))
    assert s.refined(4).fine_step == pytest.approx(1 / 16)
    assert s.param("k") == "v" and s.param("missing", 3) == 3


def test_spatial_weights():
    om = power_weight(1)
    x = np.array([-2.0, 0.0, 3.0])
    assert lab.SpatialWeight("one", om)(x) == pytest.approx([0, 0, 0])
    assert lab.SpatialWeight("exp:2", om)(x) == pytest.approx(om(np.abs(x)) / 2)
    assert lab.SpatialWeight("inv:2", om)(x) == pytest.approx(-om(np.abs(x)) / 2)
    assert lab.SpatialWeight("poly:2", om)(x) == pytest.approx(np.log1p(x * x))
    with pytest.raises(ConfigError):
        lab.SpatialWeight("cosh:1", om)(x)


def test_report_dict_round_trip():
    rep = lab.run_experiment(SUITE["lemma71_gaussian"])
    d = rep.to_dict()
    assert "table" not in d and "runtime" not in d
    assert d["status"] == "pass"
    back = lab.ExperimentReport.from_dict(d)
    assert back.margin == pytest.approx(rep.margin)
    assert back.constants.keys() == rep.constants.keys()


def test_report_status_labels():
    r = lab.ExperimentReport("i", "e", "pass", False, 1.0, 0.5, -math.log(2))
    assert r.status == "fail" and not r.ok
    r2 = replace(r, expected="expected-fail")
    assert r2.status == "expected-fail" and r2.ok
