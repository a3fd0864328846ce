"""Experiment configuration: a JSON document validated against a published
schema, then compiled into a model, a measure, and an estimator call.

The format is deliberately small and strict: unknown keys are rejected with
the offending field path, weights are exact rationals written as strings
("1/4"), and every value needed to reproduce a run (model parameters,
generator specs, grids, caps, the master seed) lives in the document.
"""

from __future__ import annotations

from fractions import Fraction

from .cremona import CremonaModel, MonomialMap, MonomialModel
from .errors import InputError
from .finitegroups import Automorphism, FiniteGroup, cyclic_automorphism
from .freegroup import FreeGroupOracle, SemidirectOracle
from .walk import FiniteMeasure
from . import words as W


class ConfigError(InputError):
    """Invalid configuration; the message names the offending field."""


#: Human-readable schema contract, also embedded in reports.
SCHEMA = {
    "experiment": "one of: drift, translation_growth, gromov_tail, "
    "shadow_decay, match_census, stab_acylindricity, small_cancellation, "
    "characteristic_index, degree_growth, cremona_exactness",
    "seed": "unsigned 64-bit integer",
    "model": {
        "type": "free | semidirect | cremona | monomial",
        "rank": "free/semidirect: number of free generators (>= 2)",
        "torsion": {"type": "cyclic", "order": "int >= 1"},
        "actions": "semidirect: one action per generator: "
        '{"type": "identity"} or {"type": "multiplier", "value": int}',
        "primes": "cremona: list of coefficient primes",
        "degree_cap": "cremona: composition degree cap",
    },
    "measure": {
        "atoms": [
            {
                "word": "free/semidirect: reduced word string, e.g. 'aB'",
                "torsion": "semidirect: torsion index (default 0)",
                "gen": "cremona: generator spec, e.g. "
                '{"name": "sigma"} | {"name": "henon", "n": 2} | '
                '{"name": "linear", "entries": [9 ints]} | '
                '{"name": "monomial", "matrix": [4 ints]} | '
                '{"name": "compose", "factors": [specs]} | '
                '{"name": "inverse", "of": spec}',
                "matrix": "monomial model: [a, b, c, d]",
                "weight": "exact rational string, e.g. '1/4'",
            }
        ],
        "attest_non_elementary": "bool (user attestation)",
        "attest_wpd": "bool (user attestation)",
    },
    "params": "experiment-specific keyword arguments",
}

_MODEL_KEYS = {
    "free": {"type", "rank"},
    "semidirect": {"type", "rank", "torsion", "actions"},
    "cremona": {"type", "primes", "degree_cap"},
    "monomial": {"type"},
}

_EXPERIMENTS = (
    "drift",
    "translation_growth",
    "gromov_tail",
    "shadow_decay",
    "match_census",
    "stab_acylindricity",
    "small_cancellation",
    "characteristic_index",
    "degree_growth",
    "cremona_exactness",
)

_PARAM_KEYS = {
    "drift": {"n", "trials", "expected", "tolerance"},
    "translation_growth": {"n_grid", "trials", "drift_tolerance", "tau_budget"},
    "gromov_tail": {"n_grid", "trials", "epsilon", "threshold"},
    "shadow_decay": {
        "m_grid",
        "samples",
        "wilson_z",
        "slope_rtol",
        "settle_steps",
        "chunk",
    },
    "match_census": {
        "kind",
        "trials",
        "n",
        "n_grid",
        "axis_core",
        "L",
        "pattern_length",
        "s_grid",
        "self_match_fraction",
        "axis_threshold",
        "non_match_threshold",
    },
    "stab_acylindricity": {"K", "n_grid", "trials", "quantile", "census_cap"},
    "small_cancellation": {"n", "trials", "epsilon", "A", "pass_threshold"},
    "characteristic_index": {"n_grid", "trials", "frequency_tolerance"},
    "degree_growth": {
        "n_grid",
        "trials",
        "iterate_budget",
        "gap_tolerance",
        "lambda_degree_bound",
    },
    "cremona_exactness": {"henon_power_budget"},
}


def _require(condition: bool, path: str, message: str):
    if not condition:
        raise ConfigError(f"{path}: {message}")


def _check_keys(obj: dict, allowed: set, path: str):
    unknown = set(obj) - allowed
    _require(not unknown, path, f"unknown keys {sorted(unknown)}")


def validate_config(config: dict) -> None:
    """Raise ConfigError (naming the field) unless the document is valid."""
    _require(isinstance(config, dict), "$", "config must be a JSON object")
    _check_keys(config, {"experiment", "seed", "model", "measure", "params"}, "$")
    for key in ("experiment", "seed", "model", "params"):
        _require(key in config, "$", f"missing required key '{key}'")
    _require(
        config["experiment"] in _EXPERIMENTS,
        "$.experiment",
        f"must be one of {_EXPERIMENTS}",
    )
    seed = config["seed"]
    _require(
        isinstance(seed, int) and 0 <= seed < 2**64,
        "$.seed",
        "must be an unsigned 64-bit integer",
    )
    needs_measure = config["experiment"] != "cremona_exactness"
    if needs_measure:
        _require("measure" in config, "$", "missing required key 'measure'")

    model = config["model"]
    _require(isinstance(model, dict), "$.model", "must be an object")
    _require("type" in model, "$.model", "missing 'type'")
    mtype = model["type"]
    _require(
        mtype in _MODEL_KEYS, "$.model.type", f"must be one of {sorted(_MODEL_KEYS)}"
    )
    _check_keys(model, _MODEL_KEYS[mtype], "$.model")
    if mtype in ("free", "semidirect"):
        _require(
            isinstance(model.get("rank"), int) and model.get("rank", 0) >= 2,
            "$.model.rank",
            "must be an integer >= 2",
        )
    if mtype == "semidirect":
        torsion = model.get("torsion")
        _require(isinstance(torsion, dict), "$.model.torsion", "must be an object")
        _check_keys(torsion, {"type", "order"}, "$.model.torsion")
        _require(
            torsion.get("type") == "cyclic",
            "$.model.torsion.type",
            "only 'cyclic' torsion groups are configurable",
        )
        _require(
            isinstance(torsion.get("order"), int) and torsion["order"] >= 1,
            "$.model.torsion.order",
            "must be an integer >= 1",
        )
        actions = model.get("actions")
        _require(
            isinstance(actions, list) and len(actions) == model["rank"],
            "$.model.actions",
            "need exactly one action per generator",
        )
        for i, action in enumerate(actions):
            path = f"$.model.actions[{i}]"
            _require(isinstance(action, dict), path, "must be an object")
            _check_keys(action, {"type", "value"}, path)
            _require(
                action.get("type") in ("identity", "multiplier"),
                f"{path}.type",
                "must be 'identity' or 'multiplier'",
            )
            if action["type"] == "multiplier":
                _require(
                    isinstance(action.get("value"), int),
                    f"{path}.value",
                    "must be an integer",
                )
    if mtype == "cremona":
        primes = model.get("primes")
        if primes is not None:
            _require(
                isinstance(primes, list)
                and primes
                and all(isinstance(p, int) for p in primes),
                "$.model.primes",
                "must be a nonempty list of integers",
            )
        cap = model.get("degree_cap")
        if cap is not None:
            _require(
                isinstance(cap, int) and cap >= 2,
                "$.model.degree_cap",
                "must be an integer >= 2",
            )

    if needs_measure:
        _validate_measure(config["measure"], mtype)

    params = config["params"]
    _require(isinstance(params, dict), "$.params", "must be an object")
    allowed = _PARAM_KEYS[config["experiment"]]
    _check_keys(params, allowed, "$.params")


def _validate_measure(measure, mtype: str):
    _require(isinstance(measure, dict), "$.measure", "must be an object")
    _check_keys(
        measure, {"atoms", "attest_non_elementary", "attest_wpd"}, "$.measure"
    )
    atoms = measure.get("atoms")
    _require(
        isinstance(atoms, list) and atoms, "$.measure.atoms", "must be a nonempty list"
    )
    total = Fraction(0)
    for i, atom in enumerate(atoms):
        path = f"$.measure.atoms[{i}]"
        _require(isinstance(atom, dict), path, "must be an object")
        if mtype in ("free", "semidirect"):
            allowed = {"word", "weight"} | (
                {"torsion"} if mtype == "semidirect" else set()
            )
            _check_keys(atom, allowed, path)
            _require(isinstance(atom.get("word"), str), f"{path}.word", "must be a string")
        elif mtype == "cremona":
            _check_keys(atom, {"gen", "weight"}, path)
            _validate_genspec(atom.get("gen"), f"{path}.gen")
        else:  # monomial
            _check_keys(atom, {"matrix", "weight"}, path)
            matrix = atom.get("matrix")
            _require(
                isinstance(matrix, list)
                and len(matrix) == 4
                and all(isinstance(v, int) for v in matrix),
                f"{path}.matrix",
                "must be four integers",
            )
        _require("weight" in atom, path, "missing 'weight'")
        try:
            weight = Fraction(atom["weight"])
        except (ValueError, ZeroDivisionError, TypeError):
            raise ConfigError(f"{path}.weight: not a rational number") from None
        _require(weight > 0, f"{path}.weight", "must be positive")
        total += weight
    _require(
        total == 1,
        "$.measure.atoms",
        f"weights must sum to 1 exactly, got {total}",
    )


def _validate_genspec(spec, path: str):
    _require(isinstance(spec, dict), path, "must be an object")
    _require("name" in spec, path, "missing 'name'")
    name = spec["name"]
    if name == "sigma":
        _check_keys(spec, {"name"}, path)
    elif name == "henon":
        _check_keys(spec, {"name", "n"}, path)
        _require(
            isinstance(spec.get("n"), int) and spec["n"] >= 2,
            f"{path}.n",
            "must be an integer >= 2",
        )
    elif name == "linear":
        _check_keys(spec, {"name", "entries"}, path)
        entries = spec.get("entries")
        _require(
            isinstance(entries, list)
            and len(entries) == 9
            and all(isinstance(v, int) for v in entries),
            f"{path}.entries",
            "must be nine integers",
        )
    elif name == "monomial":
        _check_keys(spec, {"name", "matrix"}, path)
        matrix = spec.get("matrix")
        _require(
            isinstance(matrix, list)
            and len(matrix) == 4
            and all(isinstance(v, int) for v in matrix),
            f"{path}.matrix",
            "must be four integers",
        )
    elif name == "compose":
        _check_keys(spec, {"name", "factors"}, path)
        factors = spec.get("factors")
        _require(
            isinstance(factors, list) and len(factors) >= 1,
            f"{path}.factors",
            "must be a nonempty list",
        )
        for k, factor in enumerate(factors):
            _validate_genspec(factor, f"{path}.factors[{k}]")
    elif name == "inverse":
        _check_keys(spec, {"name", "of"}, path)
        _require("of" in spec, path, "missing 'of'")
        _validate_genspec(spec["of"], f"{path}.of")
    else:
        raise ConfigError(
            f"{path}.name: unknown generator {name!r} "
            "(sigma, henon, linear, monomial, compose, inverse)"
        )


# ---------------------------------------------------------------------------
# Compilation.


def build_model(model_spec: dict):
    mtype = model_spec["type"]
    if mtype == "free":
        return FreeGroupOracle(model_spec["rank"])
    if mtype == "semidirect":
        order = model_spec["torsion"]["order"]
        group = FiniteGroup.cyclic(order)
        actions = []
        for action in model_spec["actions"]:
            if action["type"] == "identity":
                actions.append(Automorphism.identity(group))
            else:
                actions.append(cyclic_automorphism(order, action["value"]))
        return SemidirectOracle(model_spec["rank"], group, actions)
    if mtype == "cremona":
        kwargs = {}
        if "primes" in model_spec:
            kwargs["primes"] = tuple(model_spec["primes"])
        if "degree_cap" in model_spec:
            kwargs["degree_cap"] = model_spec["degree_cap"]
        return CremonaModel(**kwargs)
    return MonomialModel()


def _cremona_element(model: CremonaModel, spec: dict):
    name = spec["name"]
    if name == "sigma":
        return model.sigma()
    if name == "henon":
        return model.henon(spec["n"])
    if name == "linear":
        return model.linear(spec["entries"])
    if name == "monomial":
        return model.monomial(spec["matrix"])
    if name == "inverse":
        return model.inverse(_cremona_element(model, spec["of"]))
    element = model.identity()
    for factor in spec["factors"]:
        element = model.multiply(element, _cremona_element(model, factor))
    return element


def _genspec_tag(spec: dict) -> str:
    name = spec["name"]
    if name == "henon":
        return f"henon{spec['n']}"
    if name == "linear":
        return "linear[" + ",".join(str(v) for v in spec["entries"]) + "]"
    if name == "monomial":
        return "monomial[" + ",".join(str(v) for v in spec["matrix"]) + "]"
    if name == "compose":
        return ".".join(_genspec_tag(f) for f in spec["factors"])
    if name == "inverse":
        return _genspec_tag(spec["of"]) + "^-1"
    return name


def build_measure(oracle, measure_spec: dict) -> FiniteMeasure:
    atoms = []
    for atom in measure_spec["atoms"]:
        weight = Fraction(atom["weight"])
        if isinstance(oracle, SemidirectOracle):
            element = oracle.element(
                W.str_to_word(atom["word"], oracle.rank), atom.get("torsion", 0)
            )
            tag = atom["word"] + (
                f"|{atom['torsion']}" if atom.get("torsion") else ""
            )
        elif isinstance(oracle, FreeGroupOracle):
            element = W.str_to_word(atom["word"], oracle.rank)
            tag = atom["word"]
        elif isinstance(oracle, CremonaModel):
            element = _cremona_element(oracle, atom["gen"])
            tag = _genspec_tag(atom["gen"])
        else:
            element = MonomialMap(*atom["matrix"])
            tag = "monomial[" + ",".join(str(v) for v in atom["matrix"]) + "]"
        atoms.append((tag, element, weight))
    return FiniteMeasure(
        oracle,
        atoms,
        attest_non_elementary=measure_spec.get("attest_non_elementary", False),
        attest_wpd=measure_spec.get("attest_wpd", False),
    )


def run_config(config: dict, jobs: int = 1):
    """Validate, compile, and execute a configuration document."""
    from . import experiments as E

    validate_config(config)
    name = config["experiment"]
    seed = config["seed"]
    params = dict(config["params"])
    if name == "cremona_exactness":
        return E.cremona_exactness(**params)
    oracle = build_model(config["model"])
    measure = build_measure(oracle, config["measure"])
    if name == "drift":
        return E.estimate_drift(measure, seed=seed, jobs=jobs, **params)
    if name == "translation_growth":
        return E.translation_growth(measure, seed=seed, jobs=jobs, **params)
    if name == "gromov_tail":
        return E.gromov_tail(measure, seed=seed, jobs=jobs, **params)
    if name == "shadow_decay":
        return E.shadow_decay(measure, seed=seed, **params)
    if name == "match_census":
        params["axis_core"] = (
            W.str_to_word(params["axis_core"]) if "axis_core" in params else None
        )
        kind = params.pop("kind")
        return E.match_census(kind, measure, seed=seed, jobs=jobs, **params)
    if name == "stab_acylindricity":
        return E.stab_acylindricity(measure, seed=seed, jobs=jobs, **params)
    if name == "small_cancellation":
        return E.small_cancellation_experiment(measure, seed=seed, jobs=jobs, **params)
    if name == "characteristic_index":
        return E.characteristic_index_experiment(measure, seed=seed, **params)
    return E.degree_growth_experiment(measure, seed=seed, **params)
