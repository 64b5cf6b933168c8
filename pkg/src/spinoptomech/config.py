"""Plain-text run configuration.

Grammar::

    # comment
    [section]
    key = value

Values are arithmetic expressions (``150*pi``, ``-1e-3``, ``2**0.5``),
comma-separated lists (``0, 70*pi, 100*pi``) or ranges ``start:stop:count``
(inclusive, evenly spaced).  A list or range under ``[params]``,
``[operating_point]`` or ``[sweep]`` becomes a sweep axis.

Sections:

``params``           any ModelParams field (normalized units).
``operating_point``  Delta, G_m, G_a, n_s: prescribe the operating point.
``grid``             omega and k as ``start:stop:count``.
``run``              preset, mode, P, P_ref, seed, selfconsistent,
                     allow_unstable, k_label, target.
``sweep``            any params or operating-point name, or P.
"""
import ast
from dataclasses import dataclass, field
import math
import operator
import re

import numpy as np

from .errors import (ParseError, UnknownKey, TypeMismatch, ConstraintViolation,
                     SpinOptomechError)
from .params import ModelParams
from .spectra import Mode

OPERATING_KEYS = ("Delta", "G_m", "G_a", "n_s")
SWEEPABLE = ModelParams.field_names() + OPERATING_KEYS + ("P",)
PRESET_NAMES = ("default", "fig2", "fig3", "fig5", "fig6", "thermal")
SUBCOMMANDS = ("dispersion", "stability", "dns", "teff", "dsf")

RUN_DEFAULTS = {
    "preset": "default",
    "mode": Mode.CORRECTED.value,
    "P": 1.0,
    "P_ref": 1.0,
    "seed": 0,
    "selfconsistent": False,
    "allow_unstable": False,
    "k_label": "k0",
    "target": "teff",
}
GRID_DEFAULTS = {"omega": (-5.0, 5.0, 2001), "k": None}

_SECTIONS = ("params", "operating_point", "grid", "run", "sweep")
_HEADER = re.compile(r"^\[\s*([A-Za-z_][A-Za-z0-9_]*)\s*\]$")
_KEY = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNOPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_NAMES = {"pi": math.pi, "e": math.e}


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    operating_point: dict
    sweep: tuple
    omega_grid: tuple
    k_grid: tuple
    mode: Mode
    P: float
    P_ref: float
    seed: int
    selfconsistent: bool
    allow_unstable: bool
    k_label: str
    preset: str
    target: str
    provenance: dict = field(default_factory=dict)

    @property
    def sweep_size(self):
        return int(np.prod([len(v) for _, v in self.sweep])) if self.sweep else 1

    def to_dict(self):
        return {
            "params": self.params.to_dict(),
            "operating_point": dict(self.operating_point),
            "sweep": [[name, list(values)] for name, values in self.sweep],
            "omega_grid": list(self.omega_grid),
            "k_grid": list(self.k_grid) if self.k_grid else None,
            "mode": self.mode.value,
            "P": self.P, "P_ref": self.P_ref, "seed": self.seed,
            "selfconsistent": self.selfconsistent,
            "allow_unstable": self.allow_unstable,
            "k_label": self.k_label, "preset": self.preset, "target": self.target,
        }


def _eval_node(node, line, column):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body, line, column)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left, line, column),
                                      _eval_node(node.right, line, column))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
        return _UNOPS[type(node.op)](_eval_node(node.operand, line, column))
    raise ParseError("unsupported expression", line, column)


def evaluate_number(text, line=1, column=1):
    """Evaluate an arithmetic expression with ``pi`` and ``e``."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text.strip()!r}", line,
                         column + max((exc.offset or 1) - 1, 0)) from None
    try:
        return float(_eval_node(tree, line, column))
    except (ZeroDivisionError, OverflowError) as exc:
        raise ParseError(f"cannot evaluate {text.strip()!r}: {exc}", line, column) from None


def _looks_numeric(text):
    try:
        evaluate_number(text)
        return True
    except ParseError:
        return False


def _parse_value(text, line, column):
    """A float, a tuple of floats (list or range) or a bare string."""
    raw = text.strip()
    if not raw:
        raise ParseError("missing value", line, column)
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise ParseError("range must be start:stop:count", line, column)
        start, stop, count = (evaluate_number(p, line, column) for p in parts)
        if count != int(count) or count < 1:
            raise TypeMismatch(f"line {line}: range count must be a positive integer")
        return tuple(float(x) for x in np.linspace(start, stop, int(count)))
    if "," in raw:
        items = [p for p in raw.split(",")]
        if any(not p.strip() for p in items):
            raise ParseError("empty list element", line, column)
        return tuple(evaluate_number(p, line, column) for p in items)
    if raw[0] in "0123456789.+-(" or _looks_numeric(raw):
        return evaluate_number(raw, line, column)
    return raw


def _as_bool(value, key, line):
    if isinstance(value, str) and value.lower() in ("true", "yes", "on", "1"):
        return True
    if isinstance(value, str) and value.lower() in ("false", "no", "off", "0"):
        return False
    if isinstance(value, float) and value in (0.0, 1.0):
        return bool(value)
    raise TypeMismatch(f"line {line}: {key} expects a boolean, got {value!r}")


def _params_from(values):
    try:
        return ModelParams(**values)
    except SpinOptomechError as exc:
        name = getattr(exc, "field", "params")
        raise ConstraintViolation(name, str(exc)) from None


def parse_config(text):
    """Parse configuration text into a fully resolved :class:`RunConfig`."""
    from . import presets

    entries = {s: {} for s in _SECTIONS}
    provenance = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        indent = len(line) - len(line.lstrip()) + 1
        header = _HEADER.match(stripped)
        if header:
            section = header.group(1)
            if section not in _SECTIONS:
                raise UnknownKey(f"line {lineno}: unknown section [{section}]")
            continue
        if stripped.startswith("["):
            raise ParseError("malformed section header", lineno, indent)
        if "=" not in stripped:
            raise ParseError("expected 'key = value'", lineno, indent)
        key, value_text = stripped.split("=", 1)
        key = key.strip()
        if not _KEY.match(key):
            raise ParseError(f"invalid key {key!r}", lineno, indent)
        eq = line.index("=")
        value_col = eq + 2 + len(line[eq + 1:]) - len(line[eq + 1:].lstrip())
        if section is None:
            section = "params"
        if key in entries[section]:
            raise ParseError(f"duplicate key {key!r}", lineno, indent)
        entries[section][key] = (_parse_value(value_text, lineno, value_col), lineno)
        provenance[f"{section}.{key}"] = {"line": lineno, "text": value_text.strip()}

    run = dict(RUN_DEFAULTS)
    for key, (value, lineno) in entries["run"].items():
        if key not in RUN_DEFAULTS:
            raise UnknownKey(f"line {lineno}: unknown run option {key!r}")
        if key in ("selfconsistent", "allow_unstable"):
            run[key] = _as_bool(value, key, lineno)
        elif key in ("P", "P_ref", "seed"):
            if not isinstance(value, float):
                raise TypeMismatch(f"line {lineno}: {key} expects a number, got {value!r}")
            if key == "seed" and value != int(value):
                raise TypeMismatch(f"line {lineno}: seed must be an integer")
            run[key] = int(value) if key == "seed" else value
        elif key == "mode":
            try:
                run[key] = Mode(value).value
            except ValueError:
                raise ConstraintViolation("mode", f"expected corrected or as-printed, got {value!r}") from None
        else:
            run[key] = str(value)
    if run["preset"] not in PRESET_NAMES:
        raise ConstraintViolation("preset", f"unknown preset {run['preset']!r}")
    if run["target"] not in SUBCOMMANDS:
        raise ConstraintViolation("target", f"unknown target {run['target']!r}")
    if run["P"] < 0:
        raise ConstraintViolation("P", "pump power must be non-negative")
    if run["P_ref"] <= 0:
        raise ConstraintViolation("P_ref", "reference power must be positive")

    base_params, base_ss = presets.PRESETS[run["preset"]]()
    values = base_params.to_dict()
    operating = {}
    if base_ss.prescribed:
        operating = {"Delta": base_ss.Delta, "G_m": base_ss.G_m, "G_a": base_ss.G_a}
    axes = []

    def take(name, value, lineno, target):
        if isinstance(value, str):
            raise TypeMismatch(f"line {lineno}: {name} expects a number, got {value!r}")
        if isinstance(value, tuple):
            if any(n == name for n, _ in axes):
                raise ParseError(f"{name} swept twice", lineno, 1)
            axes.append((name, value))
            target[name] = value[0]
        else:
            target[name] = value

    fields = set(ModelParams.field_names())
    for key, (value, lineno) in entries["params"].items():
        if key not in fields:
            raise UnknownKey(f"line {lineno}: unknown parameter {key!r}")
        take(key, value, lineno, values)
    for key, (value, lineno) in entries["operating_point"].items():
        if key not in OPERATING_KEYS:
            raise UnknownKey(f"line {lineno}: unknown operating-point key {key!r}")
        take(key, value, lineno, operating)
    for key, (value, lineno) in entries["sweep"].items():
        if key not in SWEEPABLE:
            raise UnknownKey(f"line {lineno}: {key!r} is not a sweepable parameter")
        if not isinstance(value, tuple):
            value = (value,) if isinstance(value, float) else value
        take(key, value, lineno, values if key in fields else operating)

    params = _params_from(values)
    for name, axis in axes:
        if name in fields:
            for v in axis:
                _params_from({**values, name: v})
        elif name == "P" and min(axis) < 0:
            raise ConstraintViolation("P", "pump power must be non-negative")

    grids = dict(GRID_DEFAULTS)
    for key, (value, lineno) in entries["grid"].items():
        if key not in grids:
            raise UnknownKey(f"line {lineno}: unknown grid {key!r}")
        if not isinstance(value, tuple) or ":" not in provenance[f"grid.{key}"]["text"]:
            raise TypeMismatch(f"line {lineno}: grid {key} must be start:stop:count")
        grids[key] = (value[0], value[-1], len(value))
        if len(value) < 2 or value[0] >= value[-1]:
            raise ConstraintViolation(key, "grid needs start < stop and at least two points")
    if grids["k"] is None:
        span = 2.0 * params.alpha_tilde if params.alpha_tilde > 0 else 5.0
        grids["k"] = (-span, span, 501)

    return RunConfig(
        params=params, operating_point=operating, sweep=tuple(axes),
        omega_grid=tuple(grids["omega"]), k_grid=tuple(grids["k"]),
        mode=Mode(run["mode"]), P=run["P"], P_ref=run["P_ref"], seed=run["seed"],
        selfconsistent=run["selfconsistent"], allow_unstable=run["allow_unstable"],
        k_label=run["k_label"], preset=run["preset"], target=run["target"],
        provenance=provenance,
    )


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
