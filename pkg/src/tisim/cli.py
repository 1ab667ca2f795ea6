"""Batch front end: ``tisim --config job.json [--out report.json]``.

A job file names a lattice, a generator list and a command.  The report is
sorted, indented UTF-8 JSON that embeds the resolved config, so rerunning
a report's ``config`` block reproduces the same bytes.

Exit codes: 0 success, 2 invalid job, 3 negative verdict (not in span, no
witness, no certificate), 4 numerical-health failure.
"""
from __future__ import annotations

import argparse
import copy
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .closure import ClosureOptions, close, member
from .lattice import Circulant, DenseCapError, LatticeSpec, Sector
from .obstruction import CasimirAdmissibilityError, CasimirSpec, certify_no_go
from .quadratic import (
    QuadraticElement,
    boson_commutator,
    boson_named,
    boson_nn,
    boson_onsite,
    fermion_commutator,
    fermion_named,
    fermion_nn,
    fermion_onsite,
)
from .relations import relations_suite
from .spin import SpinElement, dense_realize_spin, nn_generators, onsite_generators, spin_commutator, tau_symmetrize
from .trotter import DepthError, MAX_DEPTH, NumericalHealthError, compile_word, simulate_schedule
from .witness import (
    BranchSelectionError,
    FermionSeedSet,
    NoWitnessError,
    PreconditionError,
    UnsupportedTargetError,
    boson_witness,
    fermion_witness_1d,
    fermion_witness_dd,
    spin_recipes,
    spin_target,
)
from .words import combo, Leaf, word_depth, word_from_json, word_to_json

__all__ = ["SCHEMA", "SCHEMA_VERSION", "JobError", "run_job", "run", "main",
           "EXIT_OK", "EXIT_INVALID", "EXIT_VERDICT", "EXIT_NUMERICAL"]

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INVALID, EXIT_VERDICT, EXIT_NUMERICAL = 0, 2, 3, 4

_SCALAR = {"oneOf": [{"type": "number"}, {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"}]}
_OFFSET = {"oneOf": [{"type": "integer"}, {"type": "array", "items": {"type": "integer"}, "minItems": 1}]}
_PARAMS4 = {"type": "array", "items": _SCALAR, "minItems": 4, "maxItems": 4}


def _gen(kind: str, props: dict | None = None, required: tuple = ()) -> dict:
    return {
        "type": "object",
        "properties": {"kind": {"const": kind}, **(props or {})},
        "required": ["kind", *required],
        "additionalProperties": False,
    }


_GENERATOR = {
    "oneOf": [
        _gen("fermion_onsite"),
        _gen("fermion_nn", {"axis": {"type": "integer", "minimum": 1}, "x": _SCALAR, "y": _SCALAR,
                            "w": _SCALAR, "wt": _SCALAR}, ("axis", "x", "y", "w", "wt")),
        _gen("fermion_named", {"name": {"enum": ["HX", "HWplus", "HWminus", "HW"]}, "offset": _OFFSET},
             ("name", "offset")),
        _gen("boson_onsite", {"x": _SCALAR, "y": _SCALAR, "w": _SCALAR}, ("x", "y", "w")),
        _gen("boson_nn", {"direction": _OFFSET, "x": _SCALAR, "y": _SCALAR, "w": _SCALAR, "wt": _SCALAR},
             ("direction", "x", "y", "w", "wt")),
        _gen("boson_named", {"name": {"enum": ["LX", "LY", "LW"]}, "offset": _OFFSET}, ("name", "offset")),
        _gen("spin_onsite"),
        _gen("spin_nn"),
        _gen("spin_string", {"letters": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
                             "coefficient": _SCALAR}, ("letters",)),
        _gen("spin_target", {"target": {"type": "array", "minItems": 2, "maxItems": 4}}, ("target",)),
        _gen("element", {"data": {"type": "object"}}, ("data",)),
    ]
}

_WORD = {"type": "object"}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version", "command"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"enum": ["closure", "member", "witness", "casimir", "trotter", "relations"]},
        "lattice": {
            "type": "object",
            "additionalProperties": False,
            "required": ["d", "m", "sector"],
            "properties": {
                "d": {"type": "integer", "minimum": 1},
                "m": {"type": "integer", "minimum": 2},
                "sector": {"enum": ["fermion", "boson", "spin"]},
                "D": {"type": "integer", "minimum": 2},
            },
        },
        "generators": {"type": "array", "minItems": 1, "items": _GENERATOR},
        "target": _GENERATOR,
        "options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "mode": {"enum": ["exact", "float"]},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "max_dim": {"type": ["integer", "null"], "minimum": 1},
                "strategy": {"enum": ["generators", "pairs"]},
            },
        },
        "witness": {
            "type": "object",
            "additionalProperties": False,
            "required": ["family", "target"],
            "properties": {
                "family": {"enum": ["fermion_1d", "fermion_dd", "boson", "spin"]},
                "seed": _PARAMS4,
                "axis_seeds": {"type": "array", "items": _PARAMS4, "minItems": 1},
                "diagonal_seeds": {"type": "array", "items": _OFFSET},
                "seeds": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["direction", "params"],
                        "properties": {"direction": _OFFSET, "params": _PARAMS4},
                    },
                },
                "target": {"type": "array", "minItems": 2, "maxItems": 4},
            },
        },
        "casimir": {
            "type": "object",
            "additionalProperties": False,
            "required": ["family"],
            "properties": {
                "family": {"enum": ["power", "antisymmetric", "custom"]},
                "f": {"type": "integer", "minimum": 1},
                "gammas": {"type": "object", "additionalProperties": _SCALAR},
                "check_membership": {"type": "boolean"},
            },
        },
        "trotter": {
            "type": "object",
            "additionalProperties": False,
            "required": ["t", "ns"],
            "properties": {
                "t": {"type": "number"},
                "ns": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
                "word": _WORD,
                "terms": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2}},
                "max_depth": {"type": "integer", "minimum": 0},
                "scheme": {"enum": ["four-factor", "balanced"]},
            },
        },
        "relations": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "ms": {"type": "array", "items": {"type": "integer", "minimum": 2}, "minItems": 1},
                "ds": {"type": "array", "items": {"type": "integer", "minimum": 1, "maximum": 3}, "minItems": 1},
                "random_samples": {"type": "integer", "minimum": 0},
            },
        },
        "seed": {"type": "integer"},
        "output": {"type": "string"},
    },
    "allOf": [
        {"if": {"properties": {"command": {"enum": ["closure", "member", "casimir", "trotter"]}}},
         "then": {"required": ["lattice", "generators"]}},
        {"if": {"properties": {"command": {"enum": ["member", "casimir"]}}}, "then": {"required": ["target"]}},
        {"if": {"properties": {"command": {"const": "witness"}}}, "then": {"required": ["witness"]}},
        {"if": {"properties": {"command": {"const": "casimir"}}}, "then": {"required": ["casimir"]}},
        {"if": {"properties": {"command": {"const": "trotter"}}}, "then": {"required": ["trotter"]}},
    ],
}


class JobError(ValueError):
    """Invalid job; ``pointer`` names the offending config field."""

    def __init__(self, message: str, pointer: str = "$"):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer


# --------------------------------------------------------------------------
# config resolution


def validate(config: Any) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    err = jsonschema.exceptions.best_match(validator.iter_errors(config))
    if err is not None:
        raise JobError(err.message, err.json_path)


def resolve(config: dict, mode: str | None = None, tol: float | None = None, seed: int | None = None) -> dict:
    """Schema-checked config with command-line overrides and defaults filled in."""
    validate(config)
    cfg = copy.deepcopy(config)
    opts = {**ClosureOptions().to_json(), **cfg.get("options", {})}
    if mode is not None:
        opts["mode"] = mode
    if tol is not None:
        opts["tol"] = tol
    cfg["options"] = opts
    if seed is not None:
        cfg["seed"] = seed
    cfg.setdefault("seed", 0)
    # the output path is delivery, not job content: keep it out of the payload
    cfg.pop("output", None)
    if cfg["command"] == "relations":
        rel = cfg.setdefault("relations", {})
        rel.setdefault("ms", list(range(2, 9)))
        rel.setdefault("ds", [1, 2])
        rel.setdefault("random_samples", 0)
    if cfg["command"] == "trotter":
        cfg["trotter"].setdefault("max_depth", MAX_DEPTH)
        cfg["trotter"].setdefault("scheme", "four-factor")
    validate(cfg)
    return cfg


def _scalar(value, exact: bool):
    if isinstance(value, str):
        return Fraction(value.replace(" ", ""))
    if isinstance(value, int):
        return Fraction(value)
    # decimal literals are read exactly in exact mode (0.5 -> 1/2)
    return Fraction(repr(value)) if exact else float(value)


def _lattice(cfg: dict) -> LatticeSpec:
    lat = cfg["lattice"]
    try:
        return LatticeSpec(lat["d"], lat["m"], Sector(lat["sector"]), lat.get("D", 2))
    except ValueError as exc:
        raise JobError(str(exc), "$.lattice") from exc


def _build(spec: dict, lat: LatticeSpec, exact: bool, pointer: str) -> list:
    kind = spec["kind"]
    s = lambda k: _scalar(spec[k], exact)  # noqa: E731
    family = kind.split("_")[0]
    if family in ("fermion", "boson", "spin") and lat.sector.value != family:
        raise JobError(f"{kind} does not live on a {lat.sector.value} lattice", pointer)
    try:
        if kind == "fermion_onsite":
            return [fermion_onsite(lat)]
        if kind == "fermion_nn":
            return [fermion_nn(lat, spec["axis"], s("x"), s("y"), s("w"), s("wt"))]
        if kind == "fermion_named":
            return [fermion_named(lat, spec["name"], spec["offset"])]
        if kind == "boson_onsite":
            return [boson_onsite(lat, s("x"), s("y"), s("w"))]
        if kind == "boson_nn":
            return [boson_nn(lat, spec["direction"], s("x"), s("y"), s("w"), s("wt"))]
        if kind == "boson_named":
            return [boson_named(lat, spec["name"], spec["offset"])]
        if kind == "spin_onsite":
            return onsite_generators(lat)
        if kind == "spin_nn":
            return nn_generators(lat)
        if kind == "spin_string":
            c = _scalar(spec.get("coefficient", 1), True)
            return [tau_symmetrize(spec["letters"], lat, c)]
        if kind == "spin_target":
            return [spin_target(lat, tuple(spec["target"]))]
        data = spec["data"]
        el = SpinElement.from_json(data) if lat.sector is Sector.SPIN else QuadraticElement.from_json(data)
        if el.lattice != lat:
            raise JobError("element lattice differs from the job lattice", pointer)
        return [el]
    except JobError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise JobError(str(exc), pointer) from exc


def _generators(cfg: dict, lat: LatticeSpec, exact: bool) -> list:
    out = []
    for i, spec in enumerate(cfg["generators"]):
        out += _build(spec, lat, exact, f"$.generators[{i}]")
    return out


def _target(cfg: dict, lat: LatticeSpec, exact: bool):
    els = _build(cfg["target"], lat, exact, "$.target")
    if len(els) != 1:
        raise JobError("target must be a single element", "$.target")
    return els[0]


def _json_scalar(c):
    if isinstance(c, Fraction):
        return int(c) if c.denominator == 1 else str(c)
    if isinstance(c, complex):
        return {"re": c.real, "im": c.imag}
    return float(c)


# --------------------------------------------------------------------------
# commands


def _cmd_closure(cfg):
    lat = _lattice(cfg)
    exact = cfg["options"]["mode"] == "exact"
    rep = close(_generators(cfg, lat, exact), ClosureOptions(**cfg["options"]))
    return rep.to_json(), EXIT_OK


def _cmd_member(cfg):
    lat = _lattice(cfg)
    exact = cfg["options"]["mode"] == "exact"
    gens = _generators(cfg, lat, exact)
    tgt = _target(cfg, lat, exact)
    rep = close(gens, ClosureOptions(**cfg["options"]))
    mem = member(tgt, rep)
    result = {
        "verdict": "in-span" if mem.in_span else "not-in-span",
        "in_span": mem.in_span,
        "residual_norm": mem.residual_norm,
        "coefficients": None if mem.coefficients is None else [_json_scalar(c) for c in mem.coefficients],
        "word": None if mem.word is None else word_to_json(mem.word),
        "closure_dimension": rep.dimension,
        "closure_converged": rep.converged,
        "target": tgt.to_json(),
    }
    return result, EXIT_OK if mem.in_span else EXIT_VERDICT


def _params(p):
    return tuple(_scalar(c, True) for c in p)


def _offset_tuple(v):
    return (v,) if isinstance(v, int) else tuple(v)


def _witness_target(raw, sector: str):
    if sector == "spin":
        return tuple(raw)
    kind, v = raw[0], raw[1]
    return kind, _offset_tuple(v)


def _cmd_witness(cfg):
    wcfg = cfg["witness"]
    fam = wcfg["family"]
    try:
        if fam == "fermion_1d":
            m = cfg.get("lattice", {}).get("m")
            if m is None or "seed" not in wcfg:
                raise JobError("fermion_1d witnesses need lattice.m and witness.seed", "$.witness")
            wit = fermion_witness_1d(_params(wcfg["seed"]), m, _witness_target(wcfg["target"], "fermion"))
        elif fam == "fermion_dd":
            lat = _lattice(cfg)
            seeds = FermionSeedSet(lat.d, lat.m, tuple(_params(p) for p in wcfg.get("axis_seeds", [])),
                                   tuple(_offset_tuple(v) for v in wcfg.get("diagonal_seeds", [])))
            seeds.check()
            wit = fermion_witness_dd(seeds, _witness_target(wcfg["target"], "fermion"))
        elif fam == "boson":
            lat = _lattice(cfg)
            seeds = {lat.offset(s["direction"]): _params(s["params"]) for s in wcfg.get("seeds", [])}
            wit = boson_witness(lat, seeds, _witness_target(wcfg["target"], "boson"))
        else:
            m = cfg.get("lattice", {}).get("m")
            if m is None:
                raise JobError("spin witnesses need lattice.m", "$.lattice")
            wit = spin_recipes(m, _witness_target(wcfg["target"], "spin"))
    except (NoWitnessError, UnsupportedTargetError, BranchSelectionError) as exc:
        return {"verdict": "no-witness", "reason": str(exc), "error": type(exc).__name__}, EXIT_VERDICT
    except PreconditionError as exc:
        raise JobError(str(exc), "$.witness") from exc
    except (ValueError, TypeError, KeyError) as exc:
        if isinstance(exc, JobError):
            raise
        raise JobError(str(exc), "$.witness") from exc
    result = {"verdict": "witness", "verified": wit.verify(), "depth": word_depth(wit.word), **wit.to_json()}
    return result, EXIT_OK


def _cmd_casimir(cfg):
    lat = _lattice(cfg)
    if lat.sector is not Sector.SPIN:
        raise JobError("casimir certificates need a spin lattice", "$.lattice.sector")
    gens = _generators(cfg, lat, True)
    tgt = _target(cfg, lat, True)
    c = cfg["casimir"]
    try:
        if c["family"] == "power":
            spec = CasimirSpec.power(lat.m, c.get("f", 1))
        elif c["family"] == "antisymmetric":
            spec = CasimirSpec.antisymmetric(lat.m)
        else:
            if "gammas" not in c:
                raise JobError("custom Casimir needs gammas", "$.casimir")
            spec = CasimirSpec.from_gammas(lat.m, {int(k): _scalar(v, True) for k, v in c["gammas"].items()})
    except CasimirAdmissibilityError as exc:
        raise JobError(str(exc), "$.casimir.f") from exc
    res = certify_no_go(spec, gens, tgt)
    result = res.to_json()
    if c.get("check_membership"):
        mem = member(tgt, close(gens, ClosureOptions(**cfg["options"])))
        result["membership"] = {"in_span": mem.in_span, "residual_norm": mem.residual_norm}
    return result, EXIT_OK if res.valid else EXIT_VERDICT


def _cmd_trotter(cfg):
    lat = _lattice(cfg)
    gens = _generators(cfg, lat, cfg["options"]["mode"] == "exact")
    tc = cfg["trotter"]
    if "word" in tc:
        try:
            word = word_from_json(tc["word"])
        except (ValueError, KeyError, TypeError) as exc:
            raise JobError(str(exc), "$.trotter.word") from exc
    elif "terms" in tc:
        word = combo(*[(_scalar(c, True), Leaf(int(g))) for c, g in tc["terms"]])
    else:
        raise JobError("trotter jobs need a word or terms", "$.trotter")
    rows = []
    try:
        for n in tc["ns"]:
            sched = compile_word(word, tc["t"], n, tc["max_depth"], tc["scheme"])
            res = simulate_schedule(sched, gens)
            rows.append({"n": n, "steps": sched.step_count, **res.to_json()})
    except DepthError as exc:
        raise JobError(str(exc), "$.trotter.word") from exc
    except IndexError as exc:
        raise JobError(str(exc), "$.trotter.word") from exc
    return {"word": word_to_json(word), "t": tc["t"], "scheme": tc["scheme"], "sweep": rows}, EXIT_OK


def _random_sweep(samples: int, seed: int) -> dict:
    """Sector-symmetry checks on random rational elements."""
    rng = np.random.default_rng(seed)

    def rat():
        return Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))

    counts = {"fermion": 0, "boson": 0, "spin": 0}
    bad = {"fermion": 0, "boson": 0, "spin": 0}
    for _ in range(samples):
        m = int(rng.integers(2, 6))
        for sector in ("fermion", "boson"):
            lat = LatticeSpec(1, m, Sector(sector))
            sign = -1 if sector == "fermion" else 1

            def circ(cls=True):
                c = Circulant(lat, {(k,): rat() for k in range(m)})
                return c + c.T * sign if cls else c

            a = QuadraticElement(lat, circ(), circ(), circ(False))
            b = QuadraticElement(lat, circ(), circ(), circ(False))
            if sector == "fermion":
                c = fermion_commutator(a, b)
                ok = c.Y == -c.X
            else:
                c = boson_commutator(a, b)
                ok = c.W.is_symmetric()
            counts[sector] += 1
            bad[sector] += not ok
        lat = LatticeSpec(1, min(m + 1, 4), Sector.SPIN)
        gens = nn_generators(lat)
        a = gens[int(rng.integers(len(gens)))] * rat()
        b = gens[int(rng.integers(len(gens)))] * rat()
        c = spin_commutator(a, b)
        A, B = dense_realize_spin(a), dense_realize_spin(b)
        ok = all(isinstance(v, Fraction) for _, v in c.items())
        ok = ok and np.allclose(dense_realize_spin(c), 1j * (A @ B - B @ A), atol=1e-9)
        counts["spin"] += 1
        bad["spin"] += not ok
    return {"samples": counts, "failures": bad, "passed": not any(bad.values())}


def _cmd_relations(cfg):
    rel = cfg["relations"]
    report = relations_suite(rel["ms"], rel["ds"]).to_json()
    if rel["random_samples"]:
        report["random_sweep"] = _random_sweep(rel["random_samples"], cfg["seed"])
    return report, EXIT_OK


_COMMANDS = {
    "closure": _cmd_closure,
    "member": _cmd_member,
    "witness": _cmd_witness,
    "casimir": _cmd_casimir,
    "trotter": _cmd_trotter,
    "relations": _cmd_relations,
}


# --------------------------------------------------------------------------
# entry points


def dumps(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def run_job(config: dict, mode: str | None = None, tol: float | None = None,
            seed: int | None = None) -> tuple[int, dict]:
    """Resolve, dispatch and wrap a job; never raises for job-level problems."""
    try:
        cfg = resolve(config, mode, tol, seed)
    except JobError as exc:
        return EXIT_INVALID, {"schema_version": SCHEMA_VERSION, "status": "invalid",
                              "error": str(exc), "pointer": exc.pointer, "exit_code": EXIT_INVALID}
    try:
        result, code = _COMMANDS[cfg["command"]](cfg)
        status = "ok" if code == EXIT_OK else "verdict"
    except JobError as exc:
        return EXIT_INVALID, {"schema_version": SCHEMA_VERSION, "status": "invalid", "config": cfg,
                              "error": str(exc), "pointer": exc.pointer, "exit_code": EXIT_INVALID}
    except DenseCapError as exc:
        return EXIT_INVALID, {"schema_version": SCHEMA_VERSION, "status": "invalid", "config": cfg,
                              "error": str(exc), "pointer": "$", "exit_code": EXIT_INVALID}
    except NumericalHealthError as exc:
        return EXIT_NUMERICAL, {"schema_version": SCHEMA_VERSION, "status": "numerical-health", "config": cfg,
                                "error": str(exc), "exit_code": EXIT_NUMERICAL}
    return code, {"schema_version": SCHEMA_VERSION, "status": status, "command": cfg["command"],
                  "config": cfg, "result": result, "exit_code": code}


def run(config_path: str, out: str | None = None, mode: str | None = None, tol: float | None = None,
        seed: int | None = None) -> int:
    """Read a job file, run it, write the report; returns the exit code."""
    config = None
    try:
        config = json.loads(Path(config_path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        code, payload = EXIT_INVALID, {"schema_version": SCHEMA_VERSION, "status": "invalid",
                                       "error": f"cannot read config: {exc}", "pointer": "$",
                                       "exit_code": EXIT_INVALID}
    else:
        code, payload = run_job(config, mode, tol, seed)
    text = dumps(payload)
    target = out or (config.get("output") if isinstance(config, dict) else None)
    if target:
        Path(target).write_text(text, encoding="utf-8")
        print(_summary(payload), file=sys.stderr)
    else:
        sys.stdout.write(text)
    return code


def _summary(payload: dict) -> str:
    if payload["status"] == "invalid":
        return f"invalid job: {payload['error']}"
    if payload["status"] == "numerical-health":
        return f"numerical health failure: {payload['error']}"
    res = payload["result"]
    cmd = payload["command"]
    if cmd == "closure":
        return f"closure dimension {res['dimension']} of {res['ambient_dimension']} (converged: {res['converged']})"
    if cmd == "casimir":
        return res.get("conclusion") or f"no certificate: {res['reason']}"
    if cmd == "relations":
        return "all identities pass" if res["passed"] else "identities failing: " + ", ".join(
            r["name"] for r in res["identities"] if not r["passed"])
    return f"{cmd}: {res.get('verdict', 'done')}"


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="tisim", description=__doc__.splitlines()[0])
    parser.add_argument("--config", required=True, help="job file (JSON)")
    parser.add_argument("--out", help="report path (default: stdout)")
    parser.add_argument("--mode", choices=["exact", "float"], help="override the closure arithmetic")
    parser.add_argument("--tol", type=float, help="override the float-mode tolerance")
    parser.add_argument("--seed", type=int, help="seed for randomized sweeps")
    args = parser.parse_args(argv)
    return run(args.config, args.out, args.mode, args.tol, args.seed)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
