"""Problem files, compiled-model files and exports.

Every state, input and subsystem in a file is a 1-based delta index. States
may also be written as bit strings (first variable first); where a file gives
both forms the bit string wins and the two must agree.

Problem file (JSON)::

    {
      "model": {"rules": "net.rules"} | {"assr": "net.json"} | {"assr": {...}},
      "constraints": {
        "states": [..] | "all",  "exclude_states": [..],
        "inputs": [..],          "subsystems": [..],
        "inputs_by_state": {"<state>": [..]},
        "subsystems_by_state": {"<state>": [..]}
      },
      "cost": {"type": "quadratic", "qx": [..], "qu": [..], "qsigma": [..]}
            | {"type": "target", "targets": [..], "on_target": g1, "otherwise": g0}
            | {"type": "table", "default": g, "entries": [[x, u, sigma, g], ..]},
      "x0": 5 | "0101",
      "x0_bits": "0101"
    }

Relative paths are resolved against the problem file's directory.
"""
from __future__ import annotations

import csv
import json
import os
from typing import Any, TextIO

from .logic import LogicalMatrix, bits_to_index, index_to_bits
from .model import (ConstraintSet, ProblemInstance, QuadraticCost, SbcnModel, StageCost, TableCost,
                    TargetCost)
from .ostg import Ostg
from .policy import FeedbackLaw, Trajectory
from .rules import compile_rules, parse_rules


class ProblemError(ValueError):
    """A problem or model file is malformed or inconsistent."""


# --- models -----------------------------------------------------------------

def load_rules_model(path: str) -> SbcnModel:
    with open(path, encoding="utf-8") as fh:
        rules = parse_rules(fh.read())
    return SbcnModel(rules.n, rules.m, compile_rules(rules), rules.states, rules.inputs)


def model_to_dict(model: SbcnModel) -> dict:
    return {
        "n": model.n, "m": model.m, "z": model.z, "N": model.N, "M": model.M,
        "states": list(model.state_names), "inputs": list(model.input_names),
        "L": [{"rows": mat.rows, "cols": mat.to_list()} for mat in model.L],
    }


def model_from_dict(data: dict) -> SbcnModel:
    try:
        mats = [LogicalMatrix(int(L["rows"]), L["cols"]) for L in data["L"]]
        return SbcnModel(int(data["n"]), int(data["m"]), mats,
                         tuple(data.get("states", ())), tuple(data.get("inputs", ())))
    except (KeyError, TypeError) as exc:
        raise ProblemError(f"malformed model: missing or bad field {exc}") from None


def load_model(path: str) -> SbcnModel:
    """A rule file, or a compiled-model JSON file when the name ends in ``.json``."""
    if path.endswith(".json"):
        with open(path, encoding="utf-8") as fh:
            return model_from_dict(json.load(fh))
    return load_rules_model(path)


def write_model(model: SbcnModel, fh: TextIO) -> None:
    """One JSON object, one matrix per line so large models stay greppable."""
    head = {k: v for k, v in model_to_dict(model).items() if k != "L"}
    fh.write("{\n")
    for key, value in head.items():
        fh.write(f"  {json.dumps(key)}: {json.dumps(value)},\n")
    fh.write('  "L": [\n')
    for i, mat in enumerate(model.L):
        sep = "," if i + 1 < model.z else ""
        fh.write(f'    {{"rows": {mat.rows}, "cols": {json.dumps(mat.to_list())}}}{sep}\n')
    fh.write("  ]\n}\n")


# --- problems ---------------------------------------------------------------

def _state(value: Any, n: int, what: str) -> int:
    if isinstance(value, str):
        if len(value) != n or set(value) - {"0", "1"}:
            raise ProblemError(f"{what}: bit string {value!r} must have {n} binary digits")
        return bits_to_index(value)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ProblemError(f"{what}: expected an index or bit string, got {value!r}")
    return value


def _states(values, n, what) -> list[int]:
    if not isinstance(values, list):
        raise ProblemError(f"{what} must be a list")
    return [_state(v, n, what) for v in values]


def parse_state(text: str, n: int, what: str) -> int:
    """JSON object keys are strings: length-``n`` binary keys are bit strings, the rest indices.

    A canonical decimal of that shape exceeds ``2^n``, so no valid index is lost.
    """
    if len(text) == n and not set(text) - {"0", "1"}:
        return bits_to_index(text)
    try:
        return int(text)
    except ValueError:
        raise ProblemError(f"{what}: bad state key {text!r}") from None


def _resolve(path: str, base: str) -> str:
    return path if os.path.isabs(path) else os.path.join(base, path)


def _model(spec: Any, base: str) -> SbcnModel:
    if not isinstance(spec, dict):
        raise ProblemError("'model' must be an object")
    if "rules" in spec:
        return load_rules_model(_resolve(spec["rules"], base))
    if "assr" in spec:
        assr = spec["assr"]
        if isinstance(assr, str):
            return load_model(_resolve(assr, base))
        return model_from_dict(assr)
    raise ProblemError("'model' needs a 'rules' or 'assr' entry")


def _constraints(spec: dict, model: SbcnModel) -> ConstraintSet:
    n = model.n
    states = spec.get("states", "all")
    if states == "all":
        states = None
    else:
        states = _states(states, n, "constraints.states")
    exclude = _states(spec.get("exclude_states", []), n, "constraints.exclude_states")
    if exclude:
        base = set(range(1, model.N + 1)) if states is None else set(states)
        states = sorted(base - set(exclude))

    def by_state(key):
        table = spec.get(key, {})
        if not isinstance(table, dict):
            raise ProblemError(f"constraints.{key} must map states to lists")
        return {parse_state(k, n, f"constraints.{key}"): list(v) for k, v in table.items()}

    return ConstraintSet(model.N, model.M, model.z, states,
                         inputs=by_state("inputs_by_state"),
                         subsystems=by_state("subsystems_by_state"),
                         default_inputs=spec.get("inputs"),
                         default_subsystems=spec.get("subsystems"))


def _cost(spec: Any, model: SbcnModel) -> StageCost:
    if not isinstance(spec, dict) or "type" not in spec:
        raise ProblemError("'cost' must be an object with a 'type'")
    kind = spec["type"]
    if kind == "quadratic":
        return QuadraticCost(spec["qx"], spec["qu"], spec["qsigma"])
    if kind == "target":
        return TargetCost(_states(spec["targets"], model.n, "cost.targets"),
                          spec["on_target"], spec["otherwise"])
    if kind == "table":
        entries = {}
        for row in spec.get("entries", []):
            x, u, s, g = row
            entries[(_state(x, model.n, "cost.entries"), u, s)] = g
        return TableCost(entries, spec.get("default", 0.0))
    raise ProblemError(f"unknown cost type {kind!r}")


def _x0(spec: dict, n: int) -> int | None:
    idx = spec.get("x0")
    bits = spec.get("x0_bits")
    if isinstance(idx, str):
        bits, idx = (idx, None) if bits is None else (bits, _state(idx, n, "x0"))
    if bits is not None:
        from_bits = _state(bits, n, "x0_bits")
        if idx is not None and idx != from_bits:
            raise ProblemError(f"x0 = {idx} disagrees with bit string {bits!r} (= {from_bits})")
        return from_bits
    return None if idx is None else _state(idx, n, "x0")


def problem_from_dict(data: dict, base: str = ".") -> ProblemInstance:
    if not isinstance(data, dict):
        raise ProblemError("problem must be a JSON object")
    try:
        model = _model(data.get("model"), base)
        constraints = _constraints(data.get("constraints", {}), model)
        cost = _cost(data.get("cost"), model)
        x0 = _x0(data, model.n)
    except KeyError as exc:
        raise ProblemError(f"missing field {exc}") from None
    return ProblemInstance(model, constraints, cost, x0)


def load_problem(path: str) -> ProblemInstance:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ProblemError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return problem_from_dict(data, os.path.dirname(os.path.abspath(path)))


# --- exports ----------------------------------------------------------------

def _num(w: float) -> float | int:
    return int(w) if float(w).is_integer() else w


def graph_to_dict(graph: Ostg) -> dict:
    return {
        "N": graph.N, "M": graph.M, "z": graph.z, "x0": graph.x0,
        "vertices": list(graph.vertices),
        "edges": [{"src": e.src, "dst": e.dst, "weight": _num(e.weight), "u": e.input, "sigma": e.subsystem}
                  for e in graph.edges()],
        "pruned": list(graph.pruned),
    }


def write_dot(graph: Ostg, fh: TextIO) -> None:
    N, M, z = graph.N, graph.M, graph.z
    fh.write("digraph ostg {\n")
    for v in graph.vertices:
        shape = ", shape=doublecircle" if v == graph.x0 else ""
        fh.write(f'  {v} [label="δ_{N}^{v}"{shape}];\n')
    for e in graph.edges():
        fh.write(f'  {e.src} -> {e.dst} [label="w={_num(e.weight)}, u=δ_{M}^{e.input}, σ=δ_{z}^{e.subsystem}"];\n')
    fh.write("}\n")


def write_json(obj: Any, fh: TextIO) -> None:
    json.dump(obj, fh, indent=2, sort_keys=False, ensure_ascii=False)
    fh.write("\n")


TRAJECTORY_HEADER = ["t", "state", "bits", "u", "sigma", "cost", "running_average"]


def write_trajectory(traj: Trajectory, n: int, fh: TextIO) -> None:
    """Rows ``t = 0..T-1``: the state at ``t``, the action applied and the running average."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(TRAJECTORY_HEADER)
    for t, avg in enumerate(traj.running_averages()):
        x = traj.states[t]
        writer.writerow([t, x, index_to_bits(x, n), traj.inputs[t], traj.subsystems[t],
                         repr(traj.costs[t]), repr(avg)])


def load_law(path: str) -> FeedbackLaw:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if "law" in data:
        data = data["law"]
    try:
        return FeedbackLaw.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ProblemError(f"{path}: malformed law ({exc})") from None
