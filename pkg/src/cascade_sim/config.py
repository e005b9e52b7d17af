"""Flat key = value run configuration.

One key per line, `#` starts a comment, blank lines ignored.  Keys are a
closed set; anything else is a parse error that names the line and key.
List-valued keys (values, b_values) take comma-separated entries on one
line; p0q0 sweep values pair the two numbers with a colon, as in
`values = 0.3:0.4, 0.4:0.3`.
"""

import math
from dataclasses import dataclass, fields
from typing import Optional

from .errors import ConfigError
from .model import ModelParams

_INT_KEYS = {"n", "steps", "bailout_budget", "seed", "realizations",
             "resolution", "max_iter"}
_FLOAT_KEYS = {"j0", "sigma_j", "h", "p0", "q0", "delta_h", "jtilde", "tol"}
_STR_KEYS = {"out", "axis"}
_LIST_KEYS = {"values", "b_values"}
KNOWN_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | _LIST_KEYS

_AXES = ("j0", "h", "n", "b", "p0q0")


@dataclass
class RunConfig:
    """Resolved configuration with documented defaults filled in.

    j0 and jtilde default to None because they are required only by some
    commands; each command checks for what it needs.
    """

    n: int = 1000
    j0: Optional[float] = None
    sigma_j: float = 0.001
    h: float = 0.0
    steps: int = 8
    bailout_budget: int = 0
    p0: float = 1.0 / 3.0
    q0: float = 1.0 / 3.0
    seed: int = 0
    realizations: int = 1000
    delta_h: float = 0.01
    jtilde: Optional[float] = None
    resolution: int = 101
    tol: float = 1e-10
    max_iter: int = 100000
    out: Optional[str] = None
    axis: str = "j0"
    values: Optional[list] = None
    b_values: Optional[list] = None


def _parse_scalar(key, raw, where):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError("not finite")
            return v
    except ValueError:
        kind = "an integer" if key in _INT_KEYS else "a number"
        raise ConfigError(f"{where}: key {key!r} needs {kind}, got {raw!r}")
    return raw


def _parse_list(key, raw, where):
    entries = [e.strip() for e in raw.split(",") if e.strip()]
    if not entries:
        raise ConfigError(f"{where}: key {key!r} needs at least one entry")
    out = []
    for e in entries:
        try:
            if key == "b_values":
                out.append(int(e))
            elif ":" in e:
                a, b = e.split(":")
                out.append((float(a), float(b)))
            else:
                out.append(float(e))
        except ValueError:
            raise ConfigError(f"{where}: key {key!r} has a malformed entry {e!r}")
    return out


def _set_key(config, key, raw, where):
    if key not in KNOWN_KEYS:
        raise ConfigError(f"{where}: unknown key {key!r}")
    if key in _LIST_KEYS:
        value = _parse_list(key, raw, where)
    else:
        value = _parse_scalar(key, raw, where)
    setattr(config, key, value)


def _validate(config, where="config"):
    c = config
    checks = [
        (c.n >= 1, "n must be >= 1"),
        (c.sigma_j >= 0, "sigma_j must be >= 0"),
        (c.h >= 0, "h must be >= 0"),
        (c.steps >= 0, "steps must be >= 0"),
        (c.bailout_budget >= 0, "bailout_budget must be >= 0"),
        (0 <= c.p0 <= 1, "p0 must lie in [0, 1]"),
        (0 <= c.q0 <= 1, "q0 must lie in [0, 1]"),
        (c.p0 + c.q0 <= 1, "p0 + q0 must not exceed 1"),
        (0 <= c.seed < 2**64, "seed must fit an unsigned 64-bit integer"),
        (c.realizations >= 1, "realizations must be >= 1"),
        (c.delta_h > 0, "delta_h must be positive"),
        (c.resolution >= 2, "resolution must be >= 2"),
        (c.tol > 0, "tol must be positive"),
        (c.max_iter >= 1, "max_iter must be >= 1"),
        (c.axis in _AXES, f"axis must be one of {', '.join(_AXES)}"),
    ]
    for ok, msg in checks:
        if not ok:
            raise ConfigError(f"{where}: {msg}")


def parse_config(text):
    """Parse a configuration document into a RunConfig."""
    config = RunConfig()
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, raw = body.split("=", 1)
        _set_key(config, key.strip(), raw.strip(), f"line {lineno}")
    _validate(config)
    return config


def apply_overrides(config, pairs):
    """Apply command-line key=value overrides on top of a parsed config."""
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"override {pair!r}: expected key=value")
        key, raw = pair.split("=", 1)
        _set_key(config, key.strip(), raw.strip(), f"override {pair!r}")
    _validate(config)
    return config


def to_model_params(config, require_j0=True):
    """Build engine parameters; j0 may be deferred when a sweep supplies it."""
    j0 = config.j0
    if j0 is None:
        if require_j0:
            raise ConfigError("j0 is required for this command")
        j0 = 0.0
    return ModelParams(
        n=config.n, j0=j0, sigma_j=config.sigma_j, h=config.h,
        steps=config.steps, bailout_budget=config.bailout_budget,
        p0=config.p0, q0=config.q0, master_seed=config.seed)


def canonical_items(config):
    """(key, value) pairs of every set field, in declaration order, with
    list values rendered back to their config-file syntax."""
    items = []
    for f in fields(config):
        v = getattr(config, f.name)
        if v is None:
            continue
        if f.name in _LIST_KEYS:
            parts = []
            for e in v:
                if isinstance(e, tuple):
                    parts.append(f"{e[0]!r}:{e[1]!r}")
                else:
                    parts.append(repr(e))
            v = ", ".join(parts)
        items.append((f.name, v))
    return items


def canonical_text(config):
    """Render a config so that parsing it back yields an equal RunConfig."""
    return "".join(f"{k} = {v}\n" for k, v in canonical_items(config))
