"""JSON schemas for potential functions and experiment configurations.

A potential spec is a tagged union on "kind":

    {"kind": "imbalance",     "n": 10, "C": 0.5}
    {"kind": "finite_set",    "members": [[1,1,...], ...], "penalty": <penalty>}
    {"kind": "finite_set",    "pattern": {"n": 10, "max_period": 3}, "penalty": <penalty>}
    {"kind": "aggregate",     "components": [<phi spec>, ...], "c": 0.5}
    {"kind": "graph_relaxed", "graph": "path.edges" | {"edge_list": "0 1\n..."},
                              "kappa": 4.0, "penalty": <penalty>, "tol": 1e-6}
    {"kind": "projection",    "class": [{"threshold": 0.0, "sign": 1}, ...],
                              "x": [...], "penalty": <penalty>}

A penalty spec is a bare number, {"value": v}, {"mode": "exhaustive"}, or
{"mode": "mc", "m": 2000, "seed": 0}; the mode forms compute the Rademacher
average of the underlying set.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..core import PotentialFunction
from ..graphopt import (
    EdgeListError,
    RelaxedSet,
    WeightedGraph,
    build_laplacian,
    rademacher_relaxed,
    relaxed_graph_phi,
)
from ..philib import (
    FiniteVertexSet,
    PenaltyConstant,
    aggregate_phi,
    finite_set_phi,
    imbalance_phi,
    pattern_family,
    project_class,
    projection_phi,
    rademacher_of_set,
)
from ..predictors import PlayoutConfig

PHI_KINDS = ("imbalance", "finite_set", "aggregate", "graph_relaxed", "projection")


class ConfigError(ValueError):
    """Invalid potential or experiment specification."""


def _require(cond: bool, msg: str):
    if not cond:
        raise ConfigError(msg)


def parse_penalty(spec, rad) -> PenaltyConstant:
    """Resolve a penalty spec; ``rad(mode, m, seed)`` supplies computed modes."""
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return PenaltyConstant(float(spec), "user-supplied")
    _require(isinstance(spec, dict), f"penalty must be a number or object, got {spec!r}")
    if "value" in spec:
        return PenaltyConstant(float(spec["value"]), "user-supplied")
    mode = spec.get("mode")
    if mode == "exhaustive":
        return rad("exhaustive", 0, 0)
    if mode == "mc":
        return rad("mc", int(spec.get("m", 2000)), int(spec.get("seed", 0)))
    raise ConfigError(f"unknown penalty spec {spec!r}")


def _load_graph(spec) -> WeightedGraph:
    try:
        if isinstance(spec, str):
            return WeightedGraph.load(spec)
        if isinstance(spec, dict) and "edge_list" in spec:
            return WeightedGraph.from_edge_list(spec["edge_list"])
    except OSError as exc:
        raise ConfigError(f"cannot read graph: {exc}") from None
    except EdgeListError as exc:
        raise ConfigError(f"bad edge list: {exc}") from None
    raise ConfigError(f"graph must be a path or an edge_list object, got {spec!r}")


def _threshold_class(entries):
    fns = []
    for e in entries:
        _require(isinstance(e, dict) and "threshold" in e,
                 f"class entries need a 'threshold', got {e!r}")
        c = float(e["threshold"])
        s = int(e.get("sign", 1))
        _require(s in (-1, 1), "sign must be +1 or -1")
        fns.append(lambda x, c=c, s=s: s * np.where(np.asarray(x) >= c, 1, -1))
    return fns


def build_phi(spec: dict) -> PotentialFunction:
    """Construct the potential a JSON spec describes."""
    _require(isinstance(spec, dict) and "kind" in spec, "phi spec needs a 'kind'")
    kind = spec["kind"]
    try:
        if kind == "imbalance":
            return imbalance_phi(int(spec["n"]), float(spec.get("C", 0.5)))
        if kind == "finite_set":
            if "pattern" in spec:
                p = spec["pattern"]
                F = pattern_family(int(p["n"]), int(p["max_period"]))
            else:
                F = FiniteVertexSet(np.asarray(spec["members"], dtype=int),
                                    len(spec["members"][0]))
            pen = parse_penalty(spec.get("penalty", {"mode": "exhaustive"}),
                                lambda mode, m, s: rademacher_of_set(F, mode, m, s))
            return finite_set_phi(F, pen)
        if kind == "aggregate":
            comps = [build_phi(c) for c in spec["components"]]
            return aggregate_phi(comps, float(spec.get("c", 0.5)))
        if kind == "graph_relaxed":
            g = _load_graph(spec["graph"])
            rset = RelaxedSet(build_laplacian(g), float(spec["kappa"]))
            tol = float(spec.get("tol", 1e-6))
            pen = parse_penalty(spec.get("penalty", {"mode": "mc", "m": 2000}),
                                lambda mode, m, s: rademacher_relaxed(rset, mode, m, s, tol))
            return relaxed_graph_phi(rset, pen, tol)
        if kind == "projection":
            fns = _threshold_class(spec["class"])
            _require("x" in spec, "projection spec needs the covariate values 'x'")
            x = np.asarray(spec["x"], dtype=float)
            F = project_class(fns, x)
            pen = parse_penalty(spec.get("penalty", {"mode": "exhaustive"}),
                                lambda mode, m, s: rademacher_of_set(F, mode, m, s))
            return projection_phi(fns, pen, x=x)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"bad {kind!r} spec: {exc}") from None
    raise ConfigError(f"unknown phi kind {kind!r}; expected one of {PHI_KINDS}")


def parse_predictor(spec: dict | None, default_seed: int = 0) -> PlayoutConfig:
    if spec is None:
        return PlayoutConfig("single_playout", seed=default_seed)
    _require(isinstance(spec, dict), "predictor spec must be an object")
    try:
        return PlayoutConfig(
            mode=spec.get("mode", "single_playout"),
            m=int(spec.get("m", 1)),
            seed=int(spec.get("seed", default_seed)),
            clamp=bool(spec.get("clamp", True)),
        )
    except ValueError as exc:
        raise ConfigError(f"bad predictor spec: {exc}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully resolved experiment: potential, predictor, opponent, seed."""

    phi_spec: dict
    phi: PotentialFunction = field(repr=False)
    n: int
    k: int
    predictor: PlayoutConfig
    adversary: str | None
    outcomes_path: str | None
    seed: int


def load_config(source) -> ExperimentConfig:
    """Parse an experiment config from a dict, JSON string, or file path."""
    if isinstance(source, (str, Path)):
        try:
            raw = json.loads(Path(source).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
    elif isinstance(source, dict):
        raw = source
    else:
        raise ConfigError(f"config must be a path or object, got {type(source).__name__}")

    _require("phi" in raw, "config needs a 'phi' spec")
    phi = build_phi(raw["phi"])
    n = int(raw.get("n", phi.n))
    _require(n == phi.n, f"config horizon {n} does not match the potential's n={phi.n}")
    k = int(raw.get("k", phi.k))
    _require(k == phi.k, f"config alphabet {k} does not match the potential's k={phi.k}")
    seed = int(raw.get("seed", 0))
    predictor = parse_predictor(raw.get("predictor"), default_seed=seed)
    adversary = raw.get("adversary")
    if adversary is not None:
        _require(adversary in ("oblivious", "adaptive_greedy", "adaptive_optimal"),
                 f"unknown adversary kind {adversary!r}")
    return ExperimentConfig(raw["phi"], phi, n, k, predictor, adversary,
                            raw.get("outcomes"), seed)
