"""Flat ``section.key = value`` run configuration, named presets and environment overrides.

A config file holds one assignment per line, e.g.::

    model.K = 0.5
    grid.n = 1024
    init.preset = one_minus_a_sech_bx
    init.a = 0.7

Any key can be overridden by an environment variable ``EPLAB_<SECTION>_<KEY>``
in upper case (``EPLAB_MODEL_K=0.5``, ``EPLAB_TIME_T_END=3``).
"""

import configparser
import os
from dataclasses import dataclass, field

from .errors import ConfigurationError
from .eulerian import Scenario

ENV_PREFIX = "EPLAB_"
_SECTION = "eplab"


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text):
    return tuple(float(v) for v in str(text).replace(";", ",").split(",") if v.strip())


def _optional_str(text):
    text = str(text).strip()
    return text or None


# config key -> (field name, parser)
SCENARIO_KEYS = {
    "model.k": ("K", float),
    "grid.n": ("n", int),
    "grid.length": ("length", float),
    "time.dt": ("dt", float),
    "time.t_end": ("t_end", float),
    "time.output_stride": ("output_stride", int),
    "time.snapshot_times": ("snapshot_times", _floats),
    "init.preset": ("rho_preset", str),
    "init.a": ("rho_a", float),
    "init.b": ("rho_b", float),
    "init.mode": ("rho_mode", int),
    "init.u_preset": ("u_preset", str),
    "init.u_a": ("u_a", float),
    "init.u_b": ("u_b", float),
    "init.u_mode": ("u_mode", int),
    "init.table": ("table", _optional_str),
    "solver.poisson_tol": ("poisson_tol", float),
    "solver.picard_tol": ("picard_tol", float),
    "solver.max_picard": ("max_picard", int),
    "solver.blowup_threshold": ("blowup_threshold", float),
    "solver.dealias": ("dealias", _bool),
}

OPTION_KEYS = {
    "outputs.dir": ("out_dir", _optional_str),
    "outputs.lagrangian": ("lagrangian", _bool),
    "outputs.particles": ("particles", int),
    "criteria.t0": ("T0", float),
    "criteria.eps": ("eps", float),
    "criteria.delta0": ("delta0", float),
}


@dataclass(frozen=True)
class RunOptions:
    """Settings outside the physical scenario."""

    out_dir: str | None = None
    lagrangian: bool = False
    particles: int = 2048
    T0: float = 1.0
    eps: float = 0.1
    delta0: float = 0.01


@dataclass(frozen=True)
class RunConfig:
    scenario: Scenario = field(default_factory=Scenario)
    options: RunOptions = field(default_factory=RunOptions)

    def as_dict(self):
        """Flat key -> value mapping, the inverse of :func:`build_config`."""
        out = {}
        for key, (name, _) in SCENARIO_KEYS.items():
            out[key] = getattr(self.scenario, name)
        for key, (name, _) in OPTION_KEYS.items():
            out[key] = getattr(self.options, name)
        return out


def _case_a():
    return {"init.preset": "one_minus_a_sech_bx", "init.a": "0.7", "init.b": "3"}


PRESETS = {
    "table1-a": {**_case_a(), "time.t_end": "3"},
    "table1-b": {"init.preset": "one_minus_a_sech_bx", "init.a": "0.7", "init.b": "2",
                 "time.t_end": "4"},
    "table1-c": {"init.preset": "one_minus_a_sech_bx", "init.a": "0.3", "init.b": "2",
                 "time.t_end": "20"},
    "isothermal-a": {**_case_a(), "model.K": "0.5", "time.t_end": "3"},
    "decay-k0": {"init.preset": "one_minus_a_sech_bx", "init.a": "0.2", "init.b": "1",
                 "time.t_end": "10", "time.snapshot_times": "0,2,4,6,8,10"},
    "decay-k05": {"init.preset": "one_minus_a_sech_bx", "init.a": "0.2", "init.b": "1",
                  "model.K": "0.5", "time.t_end": "10", "time.snapshot_times": "0,2,4,6,8,10"},
    "table2-comparison3-k0": {"init.preset": "one_plus_sech", "init.a": "1", "init.b": "1",
                              "init.u_preset": "sech", "init.u_a": "1", "init.u_b": "1",
                              "time.t_end": "10", "time.snapshot_times": "0,2.5,5,7.5,10"},
    "table2-comparison3-k05": {"init.preset": "one_plus_sech", "init.a": "1", "init.b": "1",
                               "init.u_preset": "sech", "init.u_a": "1", "init.u_b": "1",
                               "model.K": "0.5", "time.t_end": "10",
                               "time.snapshot_times": "0,0.1,0.2,0.3,0.4"},
}


def read_pairs(text, source="<config>"):
    """Parse ``key = value`` lines into a dict with lower-cased keys."""
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"),
                                       inline_comment_prefixes=("#",))
    try:
        parser.read_string(f"[{_SECTION}]\n" + text, source=source)
    except configparser.Error as exc:
        raise ConfigurationError(f"{source}: {exc}") from exc
    return {k.lower(): v for k, v in parser.items(_SECTION)}


def env_overrides(environ=None, keys=None):
    environ = os.environ if environ is None else environ
    keys = keys or list(SCENARIO_KEYS) + list(OPTION_KEYS)
    out = {}
    for key in keys:
        name = ENV_PREFIX + key.upper().replace(".", "_")
        if name in environ:
            out[key] = environ[name]
    return out


def build_config(pairs, allow_unknown=()):
    """Typed ``RunConfig`` from raw string pairs; errors name the offending key."""
    scen, opts = {}, {}
    for key, raw in pairs.items():
        key = key.lower()
        if key in SCENARIO_KEYS:
            target, (name, conv) = scen, SCENARIO_KEYS[key]
        elif key in OPTION_KEYS:
            target, (name, conv) = opts, OPTION_KEYS[key]
        elif any(key.startswith(p) for p in allow_unknown):
            continue
        else:
            raise ConfigurationError(f"unknown config key {key!r}")
        try:
            target[name] = conv(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"{key}: cannot parse {raw!r} ({exc})") from exc
    try:
        scenario = Scenario(**scen)
    except ConfigurationError as exc:
        raise ConfigurationError(f"invalid scenario: {exc}") from exc
    return RunConfig(scenario=scenario, options=RunOptions(**opts))


def load_pairs(path=None, preset=None, environ=None, extra=None):
    """Merge preset, file, environment and explicit overrides (later wins)."""
    pairs = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigurationError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        pairs.update(PRESETS[preset])
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                pairs.update(read_pairs(fh.read(), source=str(path)))
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    pairs.update(env_overrides(environ))
    pairs.update({k.lower(): str(v) for k, v in (extra or {}).items()})
    return pairs


def load_config(path=None, preset=None, environ=None, extra=None):
    return build_config(load_pairs(path, preset, environ, extra))


def format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, tuple):
        return ", ".join(format_value(v) for v in value)
    return "" if value is None else str(value)


def dump_config(cfg):
    """Config text that reloads to an equal ``RunConfig``."""
    return "".join(f"{k} = {format_value(v)}\n" for k, v in cfg.as_dict().items())

