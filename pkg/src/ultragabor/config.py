"""Suite configuration files (INI syntax via :mod:`configparser`).

Every experiment is a section named ``experiment:<identifier>``::

    [experiment:lemma71_gaussian]
    experiment = lemma71
    windows = gaussian, gaussian
    h = 0.5, 1, 0.5
    weights = exp:2, exp:2, exp:1, exp:2
    param.alpha_max = 60

Keys prefixed with ``param.`` are passed through to the runner.  Labels are
resolved when the file is loaded, so a typo fails before anything runs.
"""

from __future__ import annotations

import configparser
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .lab import MULTIPLIERS, OMEGAS, RUNNERS, WINDOWS, ExperimentSpec, SpatialWeight

SECTION_PREFIX = "experiment:"
FLOAT_KEYS = ("a", "b", "radius", "step", "xi_radius", "tolerance")
KNOWN_KEYS = set(FLOAT_KEYS) | {"experiment", "windows", "omega", "h", "weights", "expected"}


def default_suite_path() -> Path:
    return Path(str(resources.files("ultragabor") / "data" / "default_suite.ini"))


def _floats(text: str, where: str) -> tuple[float, ...]:
    try:
        return tuple(float(eval_fraction(t)) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def eval_fraction(text: str) -> float:
    """Parse ``0.25`` or ``1/3``."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _validate(spec: ExperimentSpec):
    where = spec.identifier
    if spec.experiment not in RUNNERS:
        raise ConfigError(f"{where}: unknown experiment {spec.experiment!r}")
    for w in spec.windows:
        if w != "zero" and w not in WINDOWS:
            raise ConfigError(f"{where}: unknown window {w!r}")
    if spec.omega not in OMEGAS:
        raise ConfigError(f"{where}: unknown weight function {spec.omega!r}")
    sigma = spec.param("sigma")
    if sigma is not None and sigma not in OMEGAS:
        raise ConfigError(f"{where}: unknown sigma {sigma!r}")
    mult = spec.param("multiplier")
    if mult is not None and mult not in MULTIPLIERS:
        raise ConfigError(f"{where}: unknown multiplier {mult!r}")
    for w in spec.weights:
        kind = w.partition(":")[0]
        if kind not in ("one", "exp", "inv", "poly"):
            raise ConfigError(f"{where}: unknown spatial weight {w!r}")
        SpatialWeight(w, None)  # syntax only
    for name in ("a", "b", "radius", "step", "xi_radius"):
        if getattr(spec, name) <= 0:
            raise ConfigError(f"{where}: {name} must be positive")


def parse_suite(text: str, source: str = "<string>") -> list[ExperimentSpec]:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    specs = []
    for section in parser.sections():
        if not section.startswith(SECTION_PREFIX):
            if section != "suite":
                raise ConfigError(f"{source}: unexpected section [{section}]")
            continue
        ident = section[len(SECTION_PREFIX):].strip()
        items = dict(parser.items(section))
        unknown = [k for k in items if k not in KNOWN_KEYS and not k.startswith("param.")]
        if unknown:
            raise ConfigError(f"{ident}: unknown keys {unknown}")
        if "experiment" not in items:
            raise ConfigError(f"{ident}: missing 'experiment'")
        kw: dict = {"identifier": ident, "experiment": items["experiment"].strip()}
        for key in FLOAT_KEYS:
            if key in items:
                kw[key] = _floats(items[key], f"{ident}.{key}")[0]
        if "windows" in items:
            kw["windows"] = tuple(w.strip() for w in items["windows"].split(",") if w.strip())
        if "weights" in items:
            kw["weights"] = tuple(w.strip() for w in items["weights"].split(",") if w.strip())
        if "h" in items:
            kw["h"] = _floats(items["h"], f"{ident}.h")
        for key in ("omega", "expected"):
            if key in items:
                kw[key] = items[key].strip()
        kw["params"] = tuple(sorted((k[len("param."):], v.strip()) for k, v in items.items()
                                    if k.startswith("param.")))
        spec = ExperimentSpec(**kw)
        _validate(spec)
        specs.append(spec)
    idents = [s.identifier for s in specs]
    if len(set(idents)) != len(idents):
        raise ConfigError(f"{source}: duplicate experiment identifiers")
    return specs


def load_suite(path: str | Path | None = None) -> list[ExperimentSpec]:
    """Read a suite file (the shipped default when ``path`` is ``None``)."""
    p = default_suite_path() if path is None else Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {p}: {exc}") from None
    return parse_suite(text, str(p))
