"""Run configuration: INI-style sections, bundled presets and flag overrides."""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from envprobe.dynamics import DEFAULT_BLOCH_SIGMA
from envprobe.errors import EnvProbeError
from envprobe.model import (
    BathParams,
    CBFCouplingParams,
    FreeFieldParams,
    ProbePreparation,
    XYCouplingParams,
)
from envprobe.observables import NEGATIVITY_FACTOR

TASKS = ("evolve", "steady", "negativity", "spectrum", "cv-marginal", "sweep")
MODELS = ("xy", "cbf", "cv")
SWEEP_PARAMETERS = ("nbar", "gamma_diss", "gamma_deph")
SWEEP_QUANTITIES = ("negativity", "mutual_information")

SCHEMA = {
    "run": ("task", "model", "seed", "samples", "sampler_sigma", "negativity_factor", "format"),
    "free": ("omega1", "omega2", "Omega", "omega_bar"),
    "coupling": ("jx", "jy", "J", "delta", "g"),
    "probe": ("theta", "phi", "bloch2"),
    "bath": ("gamma_diss", "gamma_deph", "nbar"),
    "grid": ("time", "nu"),
    "sweep": ("parameter", "values", "quantity"),
    "cv": ("r", "gamma_diss", "nbar", "tau"),
}
REQUIRED = ("run.task", "run.model")


class ConfigError(EnvProbeError, ValueError):
    def __init__(self, message, location=None):
        self.location = location
        super().__init__(f"{message} ({location})" if location else message)


@dataclass(frozen=True)
class RunConfig:
    task: str
    model: str
    free: FreeFieldParams | None = None
    coupling: XYCouplingParams | CBFCouplingParams | None = None
    prep: ProbePreparation = ProbePreparation()
    bloch2: tuple = (0.0, 0.0, 0.0)
    bath: BathParams | None = None
    time_grid: tuple = ()
    nu_grid: tuple = ()
    sweep_parameter: str | None = None
    sweep_values: tuple = ()
    sweep_quantity: str = "negativity"
    cv_r: float = 1.0
    cv_gamma_diss: tuple = ()
    cv_nbar: tuple = ()
    cv_tau: tuple = ()
    seed: int = 0
    samples: int = 100
    sampler_sigma: float = DEFAULT_BLOCH_SIGMA
    negativity_factor: float = NEGATIVITY_FACTOR
    output_format: str = "csv"
    sections: dict = field(default_factory=dict, compare=False)

    def to_sections(self):
        """Flat ``{section: {key: text}}`` view; feeding it back to :func:`parse_config` gives an equal config."""
        return {s: dict(v) for s, v in self.sections.items()}


def parse_grid(text, location=None):
    """Grid syntax: ``start:stop:count``, ``log:start:stop:count`` or a comma list."""
    text = text.strip()
    try:
        if text.startswith("log:"):
            a, b, n = text[4:].split(":")
            a, b, n = float(a), float(b), int(n)
            if a <= 0 or b <= 0:
                raise ConfigError("log grid bounds must be positive", location)
            values = np.geomspace(a, b, n)
        elif ":" in text:
            a, b, n = text.split(":")
            values = np.linspace(float(a), float(b), int(n))
        else:
            values = np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError as exc:
        raise ConfigError(f"malformed grid {text!r}: {exc}", location) from None
    if len(values) == 0:
        raise ConfigError("grid is empty", location)
    if not np.all(np.isfinite(values)):
        raise ConfigError("grid has non-finite values", location)
    if len(values) > 1 and np.any(np.diff(values) <= 0):
        raise ConfigError("grid must be strictly increasing", location)
    return tuple(float(v) for v in values)


def preset_names():
    return sorted(p.name[:-4] for p in resources.files("envprobe.presets").iterdir()
                  if p.name.endswith(".ini"))


def preset_text(name):
    path = resources.files("envprobe.presets") / f"{name}.ini"
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}",
                          f"--preset {name}")
    return path.read_text()


_HEADER = re.compile(r"^\s*\[([^\]]+)\]")
_KEY = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*[=:]")


def _read_text(text, source):
    """Parse INI text into ``{section: {key: (value, location)}}``."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}", source) from None
    lines = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if m := _HEADER.match(line):
            section = m.group(1).strip()
        elif section and (m := _KEY.match(line)):
            lines[(section, m.group(1))] = lineno
    out = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            out.setdefault(section, {})[key] = (value, f"{source}:{lines.get((section, key), '?')}")
    return out


def _merge(base, extra):
    for section, items in extra.items():
        base.setdefault(section, {}).update(items)
    return base


class _Reader:
    def __init__(self, raw):
        self.raw = raw
        self.used = {}

    def has(self, section, key):
        return key in self.raw.get(section, {})

    def loc(self, section, key):
        return self.raw[section][key][1]

    def text(self, section, key, default=None):
        if not self.has(section, key):
            return default
        value = self.raw[section][key][0].strip()
        self.used.setdefault(section, {})[key] = value
        return value

    def number(self, section, key, default=None, *, kind=float):
        text = self.text(section, key)
        if text is None:
            return default
        try:
            value = kind(text)
        except ValueError:
            raise ConfigError(f"malformed number for {section}.{key}: {text!r}",
                              self.loc(section, key)) from None
        if kind is float and not math.isfinite(value):
            raise ConfigError(f"{section}.{key} must be finite", self.loc(section, key))
        return value

    def require(self, section, key, **kw):
        if not self.has(section, key):
            raise ConfigError(f"missing required key {section}.{key}")
        return self.number(section, key, **kw)

    def grid(self, section, key):
        text = self.text(section, key)
        return () if text is None else parse_grid(text, self.loc(section, key))


def _check_unknown(raw):
    for section, items in raw.items():
        if section not in SCHEMA:
            loc = next(iter(items.values()))[1] if items else None
            raise ConfigError(f"unknown section [{section}]", loc)
        for key, (_, loc) in items.items():
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}", loc)


def _pairwise(r, section, first, second, alt_first, alt_second, build, alt_build):
    has_plain = r.has(section, first) or r.has(section, second)
    has_alt = r.has(section, alt_first) or r.has(section, alt_second)
    if has_plain and has_alt:
        raise ConfigError(f"give either {section}.{first}/{second} or "
                          f"{section}.{alt_first}/{alt_second}, not both")
    if has_alt:
        return alt_build(r.require(section, alt_first), r.require(section, alt_second))
    return build(r.require(section, first), r.require(section, second))


def _wrap(location, func, *args):
    try:
        return func(*args)
    except ConfigError:
        raise
    except EnvProbeError as exc:
        raise ConfigError(str(exc), location) from None


def parse_overrides(pairs):
    """``["bath.nbar=0.1", ...]`` into the raw nested form used by :func:`parse_config`."""
    out = {}
    for pair in pairs:
        if "=" not in pair or "." not in pair.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got {pair!r}",
                              f"--set {pair}")
        lhs, value = pair.split("=", 1)
        section, key = lhs.strip().split(".", 1)
        out.setdefault(section, {})[key] = (value.strip(), f"--set {pair}")
    return out


def parse_config(text=None, *, mapping=None, preset=None, overrides=None, source="<config>"):
    """Build a validated :class:`RunConfig`.

    Layers are applied in order: preset, ``text``, ``mapping``, ``overrides``
    (later layers win).  ``mapping`` is ``{section: {key: text}}`` and
    ``overrides`` uses the raw ``{section: {key: (text, location)}}`` form.
    """
    raw = {}
    if preset:
        _merge(raw, _read_text(preset_text(preset), f"preset {preset}"))
    if text:
        _merge(raw, _read_text(text, source))
    if mapping:
        _merge(raw, {s: {k: (str(v), f"{source} [{s}] {k}") for k, v in items.items()}
                     for s, items in mapping.items()})
    if overrides:
        _merge(raw, overrides)
    missing = [k for k in REQUIRED if k.split(".")[1] not in raw.get(k.split(".")[0], {})]
    if missing:
        raise ConfigError("usage: missing required keys " + ", ".join(missing)
                          + " (give --preset NAME or --config PATH)")
    _check_unknown(raw)
    r = _Reader(raw)

    task = r.text("run", "task")
    if task not in TASKS:
        raise ConfigError(f"run.task must be one of {TASKS}, got {task!r}", r.loc("run", "task"))
    model = r.text("run", "model")
    if model not in MODELS:
        raise ConfigError(f"run.model must be one of {MODELS}, got {model!r}", r.loc("run", "model"))
    if (task == "cv-marginal") != (model == "cv"):
        raise ConfigError(f"task {task!r} cannot run with model {model!r}", r.loc("run", "model"))

    kw = dict(task=task, model=model)
    kw["seed"] = r.number("run", "seed", 0, kind=int)
    kw["samples"] = r.number("run", "samples", 100, kind=int)
    if kw["samples"] < 1:
        raise ConfigError("run.samples must be positive", r.loc("run", "samples"))
    kw["sampler_sigma"] = r.number("run", "sampler_sigma", DEFAULT_BLOCH_SIGMA)
    if kw["sampler_sigma"] < 0:
        raise ConfigError("run.sampler_sigma must be non-negative", r.loc("run", "sampler_sigma"))
    kw["negativity_factor"] = r.number("run", "negativity_factor", NEGATIVITY_FACTOR)
    fmt = r.text("run", "format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"run.format must be csv or json, got {fmt!r}", r.loc("run", "format"))
    kw["output_format"] = fmt

    if model == "cv":
        kw["cv_r"] = r.require("cv", "r")
        for key in ("gamma_diss", "nbar", "tau"):
            values = r.grid("cv", key)
            if not values:
                raise ConfigError(f"missing required key cv.{key}")
            if min(values) < 0:
                raise ConfigError(f"cv.{key} must be non-negative", r.loc("cv", key))
            kw[f"cv_{key}"] = values
    else:
        kw["free"] = _wrap("[free]", _pairwise, r, "free", "omega1", "omega2", "Omega", "omega_bar",
                           FreeFieldParams, FreeFieldParams.from_sum_difference)
        if model == "xy":
            kw["coupling"] = _wrap("[coupling]", _pairwise, r, "coupling", "jx", "jy", "J", "delta",
                                   XYCouplingParams, XYCouplingParams.from_j_delta)
        else:
            kw["coupling"] = _wrap("[coupling]", CBFCouplingParams, r.require("coupling", "g"))
        kw["bath"] = _wrap("[bath]", BathParams, r.require("bath", "gamma_diss"),
                           r.require("bath", "gamma_deph"), r.require("bath", "nbar"))
        kw["prep"] = _wrap("[probe]", ProbePreparation, r.number("probe", "theta", 0.0),
                           r.number("probe", "phi", 0.0))
        bloch = r.text("probe", "bloch2")
        if bloch is not None:
            try:
                vec = tuple(float(v) for v in bloch.split(","))
            except ValueError:
                vec = ()
            if len(vec) != 3 or np.linalg.norm(vec) > 1.0 + 1e-12:
                raise ConfigError("probe.bloch2 must be three numbers with norm <= 1",
                                  r.loc("probe", "bloch2"))
            kw["bloch2"] = vec
        kw["time_grid"] = r.grid("grid", "time")
        kw["nu_grid"] = r.grid("grid", "nu")
        if kw["time_grid"] and kw["time_grid"][0] < 0:
            raise ConfigError("grid.time must be non-negative", r.loc("grid", "time"))
        param = r.text("sweep", "parameter")
        if param is not None:
            if param not in SWEEP_PARAMETERS:
                raise ConfigError(f"sweep.parameter must be one of {SWEEP_PARAMETERS}",
                                  r.loc("sweep", "parameter"))
            values = r.grid("sweep", "values")
            if not values:
                raise ConfigError("missing required key sweep.values")
            if min(values) < 0:
                raise ConfigError("sweep values must be non-negative", r.loc("sweep", "values"))
            kw["sweep_parameter"], kw["sweep_values"] = param, values
        quantity = r.text("sweep", "quantity", "negativity")
        if quantity not in SWEEP_QUANTITIES:
            raise ConfigError(f"sweep.quantity must be one of {SWEEP_QUANTITIES}",
                              r.loc("sweep", "quantity"))
        kw["sweep_quantity"] = quantity
        needs = {"evolve": "time_grid", "negativity": "time_grid", "spectrum": "nu_grid"}
        if task in needs and not kw[needs[task]]:
            grid_key = "time" if needs[task] == "time_grid" else "nu"
            raise ConfigError(f"missing required key grid.{grid_key} for task {task}")
        if task == "sweep" and not kw["sweep_parameter"]:
            raise ConfigError("missing required keys sweep.parameter, sweep.values for task sweep")

    return RunConfig(sections=r.used, **kw)


def with_bath_value(bath: BathParams, parameter, value):
    values = dict(gamma_diss=bath.gamma_diss, gamma_deph=bath.gamma_deph, nbar=bath.nbar)
    values[parameter] = value
    return BathParams(**values)
