import pytest

from ultragabor.config import default_suite_path, eval_fraction, load_suite, parse_suite
from ultragabor.errors import ConfigError

GOOD = """
[suite]
name = tiny

[experiment:one]
experiment = lemma71
windows = gaussian, hermite1
h = 0.5, 1, 1/2
b = 1/3
param.alpha_max = 60
"""


def test_parse_minimal_suite():
    (spec,) = parse_suite(GOOD)
    assert spec.identifier == "one"
    assert spec.windows == ("gaussian", "hermite1")
    assert spec.h == (0.5, 1.0, 0.5)
    assert spec.b == pytest.approx(1 / 3)
    assert spec.param("alpha_max") == "60"


@pytest.mark.parametrize("text,needle", [
    ("[experiment:x]\nwindows = gaussian\n", "missing"),
    ("[experiment:x]\nexperiment = nope\n", "unknown experiment"),
    ("[experiment:x]\nexperiment = lemma71\nwindows = square\n", "unknown window"),
    ("[experiment:x]\nexperiment = lemma71\ncolour = red\n", "unknown keys"),
    ("[experiment:x]\nexperiment = lemma71\nradius = -1\n", "positive"),
    ("[experiment:x]\nexperiment = lemma71\nh = one\n", "x.h"),
    ("[experiment:x]\nexperiment = lemma71\nweights = cosh:1\n", "spatial weight"),
    ("[experiment:x]\nexperiment = lemma71\nomega = nope\n", "weight function"),
    ("[other]\nk = v\n", "unexpected section"),
    ("not an ini file", "<string>"),
])
def test_parse_errors(text, needle):
    with pytest.raises(ConfigError, match=needle):
        parse_suite(text)


def test_duplicate_identifier_rejected():
    with pytest.raises(ConfigError):
        parse_suite("[experiment:x]\nexperiment = lemma71\n[experiment: x ]\nexperiment = lemma72\n")


def test_eval_fraction():
    assert eval_fraction(" 1/3 ") == pytest.approx(1 / 3)
    assert eval_fraction("0.25") == 0.25
    with pytest.raises(ValueError):
        eval_fraction("a/b")


def test_default_suite_loads():
    specs = load_suite()
    assert len(specs) == 26
    assert default_suite_path().is_file()
    assert sum(s.expected == "expected-fail" for s in specs) == 3


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_suite(tmp_path / "absent.ini")
