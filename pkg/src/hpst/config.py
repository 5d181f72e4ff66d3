"""JSON experiment configuration.

Example::

    {
      "kind": "peaks",
      "chain": {"n_nodes": 4, "coupling_model": "full_dipolar", "homogeneous_offset": 0.0},
      "field": {"omegas": [0, 175, 175, 0]},
      "source": 2,
      "target": 3,
      "window": 4.0
    }

``field`` holds exactly one of ``omegas`` (all N values), ``symmetric``
(outer values mirrored onto both ends, remaining nodes zero) or
``currents`` (list of ``[b, xi]`` pairs).  Unknown keys are rejected.
Serialization always writes every field in a fixed order, so
``dumps(loads(dumps(cfg)))`` is byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from dataclasses import field as dataclass_field
from pathlib import Path
from typing import Any

from .currents import CurrentSystem, field_from_currents
from .dynamics import DEFAULT_PC_TOLERANCE, DEFAULT_TAU_STEP, DEFAULT_THRESHOLD
from .errors import ConfigError, DomainError
from .model import ChainSpec, CouplingModel, FieldProfile
from .optimize import Objective, ObjectiveKind, Parameter, SearchSpace

KINDS = ("curve", "peaks", "optimize", "pst-check", "currents-solve", "currents-field")
FIELD_SOURCES = ("omegas", "symmetric", "currents")
FORMATS = ("csv", "json", "table")


def _require(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"{where}.{key}: missing required field")
    return d[key]


def _reject_unknown(d: dict, allowed, where: str) -> None:
    extra = sorted(set(d) - set(allowed))
    if extra:
        raise ConfigError(f"{where}.{extra[0]}: unknown field")


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _integer(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    return value


def _numbers(value, where: str, allow_empty: bool = False) -> list[float]:
    if not isinstance(value, list):
        raise ConfigError(f"{where}: expected a list")
    if not value and not allow_empty:
        raise ConfigError(f"{where}: list must not be empty")
    return [_number(v, f"{where}[{i}]") for i, v in enumerate(value)]


def _optional(d: dict, key: str, conv, where: str, default=None):
    value = d.get(key)
    return default if value is None else conv(value, f"{where}.{key}")


@dataclass
class FieldSource:
    kind: str
    values: list  # floats, or [b, xi] pairs for currents

    def to_dict(self) -> dict:
        return {self.kind: [list(v) if isinstance(v, (list, tuple)) else v for v in self.values]}

    def profile(self, n_nodes: int) -> FieldProfile:
        if self.kind == "omegas":
            return FieldProfile(tuple(self.values))
        if self.kind == "symmetric":
            return FieldProfile.symmetric(n_nodes, self.values)
        return field_from_currents(self.current_system(n_nodes))

    def current_system(self, n_nodes: int) -> CurrentSystem:
        if self.kind != "currents":
            raise ConfigError("field.currents: this run needs a current system")
        return CurrentSystem(tuple(tuple(p) for p in self.values), n_nodes)


@dataclass
class ExperimentConfig:
    kind: str
    chain: ChainSpec
    field: FieldSource | None = None
    source: int | None = None
    target: int | None = None
    targets: list[int] | None = None
    pairs: list[list[int]] | None = None
    tau_start: float = 0.0
    tau_step: float = DEFAULT_TAU_STEP
    window: float | None = None
    concurrence_window: float | None = None
    threshold: float = DEFAULT_THRESHOLD
    pc_tolerance: float = DEFAULT_PC_TOLERANCE
    pst: dict[str, Any] | None = None
    search: dict[str, Any] | None = None
    currents_solve: dict[str, Any] | None = None
    output: dict[str, Any] = dataclass_field(default_factory=lambda: {"path": None, "format": None})

    # -- (de)serialization ---------------------------------------------------

    @classmethod
    def from_dict(cls, d: Any, kind: str | None = None) -> ExperimentConfig:
        if not isinstance(d, dict):
            raise ConfigError("config: top level must be a JSON object")
        _reject_unknown(
            d,
            ("kind", "chain", "field", "source", "target", "targets", "pairs", "tau_start",
             "tau_step", "window", "concurrence_window", "threshold", "pc_tolerance", "pst",
             "search", "currents_solve", "output"),
            "config",
        )
        kind = kind or d.get("kind")
        if kind not in KINDS:
            raise ConfigError(f"config.kind: must be one of {', '.join(KINDS)}, got {kind!r}")

        chain_d = _require(d, "chain", "config")
        if not isinstance(chain_d, dict):
            raise ConfigError("config.chain: expected an object")
        _reject_unknown(chain_d, ("n_nodes", "coupling_model", "homogeneous_offset"), "config.chain")
        try:
            chain = ChainSpec(
                _integer(_require(chain_d, "n_nodes", "config.chain"), "config.chain.n_nodes"),
                CouplingModel(chain_d.get("coupling_model", CouplingModel.FULL_DIPOLAR.value)),
                _optional(chain_d, "homogeneous_offset", _number, "config.chain", 0.0),
            )
        except (DomainError, ValueError) as exc:
            raise ConfigError(f"config.chain: {exc}") from None

        fs = None
        if d.get("field") is not None:
            fs = cls._parse_field(d["field"], chain.n_nodes)

        cfg = cls(
            kind=kind,
            chain=chain,
            field=fs,
            source=_optional(d, "source", _integer, "config"),
            target=_optional(d, "target", _integer, "config"),
            targets=None if d.get("targets") is None else [
                _integer(v, f"config.targets[{i}]") for i, v in enumerate(d["targets"])
            ],
            pairs=None if d.get("pairs") is None else [
                [_integer(v, f"config.pairs[{i}]") for v in p] for i, p in enumerate(d["pairs"])
            ],
            tau_start=_optional(d, "tau_start", _number, "config", 0.0),
            tau_step=_optional(d, "tau_step", _number, "config", DEFAULT_TAU_STEP),
            window=_optional(d, "window", _number, "config"),
            concurrence_window=_optional(d, "concurrence_window", _number, "config"),
            threshold=_optional(d, "threshold", _number, "config", DEFAULT_THRESHOLD),
            pc_tolerance=_optional(d, "pc_tolerance", _number, "config", DEFAULT_PC_TOLERANCE),
            pst=d.get("pst"),
            search=d.get("search"),
            currents_solve=d.get("currents_solve"),
            output=dict(d.get("output") or {"path": None, "format": None}),
        )
        cfg.validate()
        return cfg

    @staticmethod
    def _parse_field(fd, n_nodes: int) -> FieldSource:
        if not isinstance(fd, dict):
            raise ConfigError("config.field: expected an object")
        present = [k for k in FIELD_SOURCES if k in fd]
        _reject_unknown(fd, FIELD_SOURCES, "config.field")
        if len(present) != 1:
            raise ConfigError(
                f"config.field: exactly one of {', '.join(FIELD_SOURCES)} is required"
            )
        kind = present[0]
        where = f"config.field.{kind}"
        if kind == "currents":
            raw = fd[kind]
            if not isinstance(raw, list) or not raw:
                raise ConfigError(f"{where}: expected a non-empty list of [b, xi] pairs")
            values = []
            for i, pair in enumerate(raw):
                if not isinstance(pair, list) or len(pair) != 2:
                    raise ConfigError(f"{where}[{i}]: expected [b, xi]")
                values.append([_number(pair[0], f"{where}[{i}]"), _number(pair[1], f"{where}[{i}]")])
        else:
            values = _numbers(fd[kind], where)
        fs = FieldSource(kind, values)
        try:
            profile = fs.profile(n_nodes)
        except DomainError as exc:
            raise ConfigError(f"{where}: {exc}") from None
        if len(profile) != n_nodes:
            raise ConfigError(f"{where}: has {len(profile)} values, chain has {n_nodes} nodes")
        return fs

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "chain": {
                "n_nodes": self.chain.n_nodes,
                "coupling_model": self.chain.coupling_model.value,
                "homogeneous_offset": self.chain.homogeneous_offset,
            },
            "field": None if self.field is None else self.field.to_dict(),
            "source": self.source,
            "target": self.target,
            "targets": self.targets,
            "pairs": self.pairs,
            "tau_start": self.tau_start,
            "tau_step": self.tau_step,
            "window": self.window,
            "concurrence_window": self.concurrence_window,
            "threshold": self.threshold,
            "pc_tolerance": self.pc_tolerance,
            "pst": self.pst,
            "search": self.search,
            "currents_solve": self.currents_solve,
            "output": {"path": self.output.get("path"), "format": self.output.get("format")},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str, kind: str | None = None) -> ExperimentConfig:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})") from None
        return cls.from_dict(data, kind)

    @classmethod
    def load(cls, path: str | Path, kind: str | None = None) -> ExperimentConfig:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
        return cls.loads(text, kind)

    # -- validation ----------------------------------------------------------

    def _node(self, node, where: str) -> None:
        if node is None:
            raise ConfigError(f"config.{where}: missing required field")
        if not 1 <= node <= self.chain.n_nodes:
            raise ConfigError(f"config.{where}: node {node} outside [1, {self.chain.n_nodes}]")

    def validate(self) -> None:
        kind = self.kind
        if not self.tau_step > 0:
            raise ConfigError("config.tau_step: must be positive")
        if self.tau_start < 0:
            raise ConfigError("config.tau_start: must be non-negative")
        if self.output.get("format") not in (None, *FORMATS):
            raise ConfigError(f"config.output.format: must be one of {', '.join(FORMATS)}")
        if kind in ("curve", "peaks", "pst-check", "currents-solve", "currents-field") and self.field is None:
            raise ConfigError("config.field: missing required field")

        if kind in ("curve", "peaks", "optimize"):
            self._node(self.source, "source")
            if self.window is None or not self.window > self.tau_start:
                raise ConfigError("config.window: required and must exceed tau_start")
            if self.concurrence_window is not None and self.concurrence_window <= 0:
                raise ConfigError("config.concurrence_window: must be positive")
        if kind in ("peaks", "optimize"):
            self._node(self.target, "target")
            if self.target == self.source:
                raise ConfigError("config.target: must differ from source")
        if kind == "curve":
            if self.targets is not None:
                if not self.targets:
                    raise ConfigError("config.targets: list must not be empty")
                for i, t in enumerate(self.targets):
                    self._node(t, f"targets[{i}]")
            elif self.target is None:
                raise ConfigError("config.target: curve needs target or targets")
            else:
                self._node(self.target, "target")
            for i, p in enumerate(self.curve_pairs()):
                if len(p) != 2 or p[0] == p[1]:
                    raise ConfigError(f"config.pairs[{i}]: expected two distinct nodes")
                for n in p:
                    self._node(n, f"pairs[{i}]")
        if kind == "pst-check":
            if not isinstance(self.pst, dict):
                raise ConfigError("config.pst: missing required field")
            _reject_unknown(self.pst, ("tau0", "phi0"), "config.pst")
            if _number(_require(self.pst, "tau0", "config.pst"), "config.pst.tau0") <= 0:
                raise ConfigError("config.pst.tau0: must be positive")
            if self.pst.get("phi0") is not None:
                _number(self.pst["phi0"], "config.pst.phi0")
        if kind == "currents-solve":
            if not isinstance(self.currents_solve, dict):
                raise ConfigError("config.currents_solve: missing required field")
            _reject_unknown(self.currents_solve, ("xis",), "config.currents_solve")
            _numbers(_require(self.currents_solve, "xis", "config.currents_solve"), "config.currents_solve.xis")
        if kind == "currents-field" and self.field.kind != "currents":
            raise ConfigError("config.field.currents: currents-field needs a current system")
        if kind == "optimize":
            self.search_space()

    # -- derived objects -----------------------------------------------------

    def profile(self) -> FieldProfile:
        return self.field.profile(self.chain.n_nodes)

    def curve_targets(self) -> list[int]:
        return list(self.targets) if self.targets is not None else [self.target]

    def curve_pairs(self) -> list[list[int]]:
        if self.pairs is not None:
            return [list(p) for p in self.pairs]
        if self.target is not None and self.target != self.source:
            return [[self.source, self.target]]
        return []

    def search_space(self) -> SearchSpace:
        s = self.search
        if not isinstance(s, dict):
            raise ConfigError("config.search: missing required field")
        _reject_unknown(s, ("parameters", "objective", "refine", "max_evaluations"), "config.search")
        raw = _require(s, "parameters", "config.search")
        if not isinstance(raw, list) or not raw:
            raise ConfigError("config.search.parameters: expected a non-empty list")
        params = []
        for i, p in enumerate(raw):
            where = f"config.search.parameters[{i}]"
            if not isinstance(p, dict):
                raise ConfigError(f"{where}: expected an object")
            _reject_unknown(p, ("nodes", "current_xi", "lo", "hi", "step"), where)
            nodes = p.get("nodes") or []
            if not isinstance(nodes, list):
                raise ConfigError(f"{where}.nodes: expected a list")
            for j, n in enumerate(nodes):
                self._node(_integer(n, f"{where}.nodes[{j}]"), f"search.parameters[{i}].nodes[{j}]")
            try:
                params.append(Parameter(
                    lo=_number(_require(p, "lo", where), f"{where}.lo"),
                    hi=_number(_require(p, "hi", where), f"{where}.hi"),
                    step=_optional(p, "step", _number, where, 0.001),
                    nodes=tuple(nodes),
                    current_xi=_optional(p, "current_xi", _number, where),
                ))
            except DomainError as exc:
                raise ConfigError(f"{where}: {exc}") from None
        obj = s.get("objective") or {}
        if not isinstance(obj, dict):
            raise ConfigError("config.search.objective: expected an object")
        _reject_unknown(obj, ("kind", "w_amp", "w_time", "quantity"), "config.search.objective")
        try:
            objective = Objective(
                ObjectiveKind(obj.get("kind", ObjectiveKind.PROBABILITY_FIRST.value)),
                _optional(obj, "w_amp", _number, "config.search.objective", 1.0),
                _optional(obj, "w_time", _number, "config.search.objective", 0.0),
                obj.get("quantity", "probability"),
            )
            space = SearchSpace(
                parameters=tuple(params),
                window=self.window,
                source=self.source,
                target=self.target,
                objective=objective,
                concurrence_window=self.concurrence_window,
                threshold=self.threshold,
                pc_tolerance=self.pc_tolerance,
                tau_step=self.tau_step,
                base_field=None if self.field is None else self.profile(),
                refine=bool(s.get("refine", False)),
                max_evaluations=_optional(s, "max_evaluations", _integer, "config.search"),
            )
            if space.parameters:
                space.field_for(self.chain, [p.lo for p in space.parameters])
        except (DomainError, ValueError) as exc:
            raise ConfigError(f"config.search: {exc}") from None
        return space
