"""Experiment specifications loaded from JSON documents.

A spec names one sweep axis and a base stream. Stream fields may be numbers
or small arithmetic expressions over earlier fields, e.g. ``"p": "3*r/n"``,
``"b": "2*r"``, ``"T": "500*r"``, so coupled parameters follow the swept one.
"""

import ast
import json
import operator
from dataclasses import dataclass, field, replace

from ..exceptions import ConfigInvalid
from ..model import StreamConfig

ESTIMATORS = ("snipe", "grouse", "zero_fill")
SPEC_KEYS = {"name", "stream", "sweep", "estimators", "trials", "outputs", "options", "workers"}
STREAM_KEYS = {"n", "r", "p", "b", "T", "seed", "subspace_kind", "first_block"}
SWEEP_KEYS = {"axis", "values"}
OPTION_KEYS = {"grouse_step_scale", "min_block_guard"}
DEFAULT_OPTIONS = {"grouse_step_scale": 100.0, "min_block_guard": True}
DEFAULT_TRIALS = 50

# evaluation order; each stage may only reference names from earlier stages
_STAGES = (("n", "r"), ("p", "b"), ("T", "first_block"))
_INT_FIELDS = {"n", "r", "b", "T", "first_block"}

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.FloorDiv: operator.floordiv,
    ast.Pow: operator.pow,
}


def evaluate_expression(text, names):
    """Evaluate ``+ - * / // **`` arithmetic over numeric literals and ``names``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise ConfigInvalid(f"unknown name {node.id!r} in expression {text!r}")
            return names[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        raise ConfigInvalid(f"unsupported syntax in expression {text!r}")

    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError:
        raise ConfigInvalid(f"cannot parse expression {text!r}") from None
    try:
        return ev(tree)
    except ZeroDivisionError:
        raise ConfigInvalid(f"division by zero in expression {text!r}") from None


def _resolve_number(key, raw, names):
    if isinstance(raw, bool):
        raise ConfigInvalid(f"stream.{key} must be a number or expression")
    if isinstance(raw, str):
        value = evaluate_expression(raw, names)
    elif isinstance(raw, (int, float)):
        value = raw
    else:
        raise ConfigInvalid(f"stream.{key} must be a number or expression")
    if key in _INT_FIELDS:
        if float(value) != int(round(value)):
            raise ConfigInvalid(f"stream.{key} evaluated to non-integer {value}")
        value = int(round(value))
    return value


def resolve_stream(stream):
    """Turn a raw stream mapping into a :class:`StreamConfig`."""
    unknown = set(stream) - STREAM_KEYS
    if unknown:
        raise ConfigInvalid(f"unknown stream keys: {sorted(unknown)}")
    missing = {"n", "r", "p", "T"} - set(stream)
    if missing:
        raise ConfigInvalid(f"missing stream keys: {sorted(missing)}")
    names = {}
    for stage in _STAGES:
        resolved = {}
        for key in stage:
            raw = stream.get(key)
            if raw is None:
                continue
            resolved[key] = _resolve_number(key, raw, names)
        names.update(resolved)
    b = names.get("b", 2 * names["r"])
    seed = stream.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigInvalid("stream.seed must be an integer")
    kind = stream.get("subspace_kind", "generic")
    try:
        return StreamConfig.uniform(
            names["n"],
            names["r"],
            float(names["p"]),
            b,
            names["T"],
            seed=seed,
            subspace_kind=kind,
            first_block=names.get("first_block"),
        )
    except ConfigInvalid:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(str(exc)) from None


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: a base stream, one swept field, estimators and trial count.

    Trial ``i`` at every sweep point uses stream seed ``stream["seed"] + i``.
    """

    name: str
    stream: dict
    sweep: dict
    estimators: tuple = ("snipe",)
    trials: int = DEFAULT_TRIALS
    outputs: str = "out"
    options: dict = field(default_factory=dict)
    workers: int = None

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise ConfigInvalid("name must be a non-empty string")
        if not isinstance(self.stream, dict):
            raise ConfigInvalid("stream must be an object")
        if not isinstance(self.sweep, dict):
            raise ConfigInvalid("sweep must be an object with 'axis' and 'values'")
        unknown = set(self.sweep) - SWEEP_KEYS
        if unknown:
            raise ConfigInvalid(f"unknown sweep keys: {sorted(unknown)}")
        axis = self.sweep.get("axis")
        if axis not in STREAM_KEYS or axis == "seed":
            raise ConfigInvalid(f"sweep.axis must be one stream field, got {axis!r}")
        values = self.sweep.get("values")
        if not isinstance(values, list) or not values:
            raise ConfigInvalid("sweep.values must be a non-empty list")
        ests = tuple(self.estimators)
        if not ests or any(e not in ESTIMATORS for e in ests) or len(set(ests)) != len(ests):
            raise ConfigInvalid(f"estimators must be distinct members of {ESTIMATORS}")
        object.__setattr__(self, "estimators", ests)
        if not isinstance(self.trials, int) or isinstance(self.trials, bool) or self.trials < 1:
            raise ConfigInvalid("trials must be a positive integer")
        if not isinstance(self.outputs, str):
            raise ConfigInvalid("outputs must be a path string")
        unknown = set(self.options) - OPTION_KEYS
        if unknown:
            raise ConfigInvalid(f"unknown option keys: {sorted(unknown)}")
        if self.workers is not None and (not isinstance(self.workers, int) or self.workers < 1):
            raise ConfigInvalid("workers must be a positive integer")
        # resolve every point now so errors surface at load time
        self.points()

    @property
    def axis(self):
        return self.sweep["axis"]

    @property
    def resolved_options(self):
        return {**DEFAULT_OPTIONS, **self.options}

    def points(self):
        """List of ``(axis_value, StreamConfig)`` at the base seed."""
        return [
            (value, resolve_stream({**self.stream, self.axis: value}))
            for value in self.sweep["values"]
        ]

    def with_overrides(self, **changes):
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise ConfigInvalid("spec must be a JSON object")
        unknown = set(doc) - SPEC_KEYS
        if unknown:
            raise ConfigInvalid(f"unknown spec keys: {sorted(unknown)}")
        missing = {"name", "stream", "sweep"} - set(doc)
        if missing:
            raise ConfigInvalid(f"missing spec keys: {sorted(missing)}")
        return cls(**doc)


def trial_config(cfg, trial):
    return replace(cfg, seed=cfg.seed + trial)


def load_spec(path):
    """Read an :class:`ExperimentSpec` from a JSON file.

    Raises
    ------
    FileNotFoundError
        If ``path`` does not exist.
    ConfigInvalid
        On malformed JSON or any spec violation.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"{path}: invalid JSON ({exc})") from None
    return ExperimentSpec.from_dict(doc)
