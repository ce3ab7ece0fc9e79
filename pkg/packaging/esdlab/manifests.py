# -*- coding: utf-8 -*-

"""
Run manifests: JSON documents configuring one command-line run.

Every command has a JSON Schema (draft 7) document, see `manifest_schema`.
Documents are validated against it before anything runs; violations raise
ManifestError with the JSON pointer of the offending value, e.g.
``/state/alpha: expected number in [0, 1]``. Defaults declared in the
schema are filled in after validation.
"""

import copy
import dataclasses
import json
import logging
import math
from typing import Optional

import jsonschema

from esdlab.channels import TemporalMismatch
from esdlab.exceptions import ManifestError, ValidationError
from esdlab.protocol import BASELINES, VARIANTS, ProtocolConfig, uniform_grid
from esdlab.states import StateParams
from esdlab.syserrors import ErrorBudget, OperatingPoint
from esdlab.tomography import METHODS

L = logging.getLogger("esdlab.manifests")

MAX_SEED = 2**64 - 1
PBS_PORTS = ("delta", "delta_prime", "delta1", "delta1_prime", "delta2", "delta2_prime")

# long spellings accepted for the pipeline variant
VARIANT_SPELLINGS = {"physical_single_flip": "single_flip", "paper_literal": "literal"}


def _range_text(minimum, maximum):
    if minimum is not None and maximum is not None:
        return " in [%g, %g]" % (minimum, maximum)
    if minimum is not None:
        return " >= %g" % minimum
    if maximum is not None:
        return " <= %g" % maximum
    return ""


def _numeric(kind, minimum=None, maximum=None, nullable=False, **extra):
    schema = {"type": [kind, "null"] if nullable else kind,
              "description": kind + _range_text(minimum, maximum) + (" or null" if nullable else "")}
    if minimum is not None:
        schema["minimum"] = minimum
    if maximum is not None:
        schema["maximum"] = maximum
    schema.update(extra)
    return schema


def number(minimum=None, maximum=None, **extra):
    return _numeric("number", minimum, maximum, **extra)


def integer(minimum=None, maximum=None, **extra):
    return _numeric("integer", minimum, maximum, **extra)


def boolean(nullable=False, **extra):
    return dict({"type": ["boolean", "null"] if nullable else "boolean",
                 "description": "boolean or null" if nullable else "boolean"}, **extra)


def one_of(choices, **extra):
    return dict({"enum": list(choices), "description": "one of %s" % ", ".join(str(c) for c in choices)}, **extra)


def obj(properties, required=(), **extra):
    schema = {"type": "object", "description": "object", "properties": properties, "additionalProperties": False}
    if required:
        schema["required"] = list(required)
    schema.update(extra)
    return schema


def either_object(then, otherwise, **extra):
    """A value that is the object `then` or, when not an object, matches `otherwise`."""
    return dict({"if": {"type": "object"}, "then": then, "else": otherwise}, **extra)


STATE = obj({"alpha": number(0.0, 1.0), "sign": one_of((1, -1), default=-1)}, required=("alpha",))

Z = either_object(obj({"chi": number()}, required=("chi",)),
                  {"enum": [0, 1], "description": "0, 1 or {\"chi\": number}"})

PBS_DELTAS = either_object(obj({name: number(0.0, 0.1) for name in PBS_PORTS}), number(0.0, 0.1))

BUDGET = obj({
    "mu": number(0.0, default=0.0),
    "delta_p": number(0.0, default=0.0),
    "delta_P": number(0.0, default=0.0),
    "pbs_deltas": dict(PBS_DELTAS, default=0.0),
    "delta_phi": number(0.0, default=0.0),
}, type=["object", "null"], description="object or null", default=None)

COMMON = {
    "command": {"type": "string", "description": "string"},
    "description": {"type": "string", "description": "string"},
    "seed": integer(0, MAX_SEED, default=0),
}

DEFAULT_STATE = {"alpha": 0.55}


def grid(default):
    return integer(2, default=default)


PROPERTIES = {
    "sweep": {
        "state": STATE,
        "p": number(0.0, 1.0, default=0.0),
        "z": dict(Z, default=0),
        "pipeline_variant": one_of(VARIANTS, default="single_flip"),
        "apply_not": boolean(default=True),
        "renormalize_after_first": boolean(nullable=True, default=None),
        "baseline": one_of(BASELINES, default="first_channel"),
        "grid_points": grid(201),
    },
    "characterize-first": {
        "state": STATE,
        "z": dict(Z, default=0),
        "embed_not": boolean(default=True),
        "grid_points": grid(101),
    },
    "characterize-second": {
        "state": STATE,
        "apply_not": boolean(default=False),
        "grid_points": grid(101),
    },
    "regimes": {
        "alpha": number(0.0, 1 / math.sqrt(2), default=0.55),
        "z": dict(Z, default=0),
        "pipeline_variant": one_of(VARIANTS, default="single_flip"),
        "baseline": one_of(BASELINES, default="first_channel"),
        "grid_points": grid(101),
    },
    "verify-oracle": {
        "grid_points": grid(11),
        "z": {"type": "array", "items": Z, "minItems": 1, "description": "a non-empty array of z values",
              "default": [0, 1]},
        "tolerance": number(0.0, default=1e-8),
    },
    "error-report": {
        "state": dict(STATE, default=DEFAULT_STATE),
        "p": number(0.0, 1.0, default=0.0),
        "P": number(0.0, 1.0, default=0.0),
        "z": dict(Z, default=1),
        "budget": BUDGET,
        "extinction_ratio": number(0.0, 0.1, default=1e-3),
        "samples": integer(100, default=10000),
        "correlated": boolean(default=False),
        "grid_points": grid(21),
    },
    "tomo-sim": {
        "state": dict(STATE, default=DEFAULT_STATE),
        "p": number(0.0, 1.0, default=0.0),
        "P": number(0.0, 1.0, default=0.0),
        "z": dict(Z, default=0),
        "apply_not": boolean(default=False),
        "pairs": integer(1, nullable=True, default=None),
        "settings": one_of((16, 36), default=16),
        "iterations": integer(2, default=5),
        "method": one_of(METHODS, default="max_likelihood"),
        "noiseless": boolean(default=False),
    },
}

# short manifest keys and the fields they stand for
ALIASES = {
    "variant": ("pipeline_variant", one_of(VARIANTS + tuple(VARIANT_SPELLINGS)), lambda v: VARIANT_SPELLINGS.get(v, v)),
    "grid": ("grid_points", obj({"n": integer(2)}, required=("n",)), lambda g: g["n"]),
}

REQUIRED = {"sweep": ("state",), "characterize-first": ("state",), "characterize-second": ("state",)}

COMMANDS = tuple(PROPERTIES)
DEFAULTS_ALLOWED = ("regimes", "verify-oracle", "error-report", "tomo-sim")


def manifest_schema(command):
    """The JSON Schema document of a command's manifest."""
    if command not in PROPERTIES:
        raise ValidationError("unknown command %r, expected one of %s" % (command, ", ".join(COMMANDS)))
    properties = dict(COMMON, **PROPERTIES[command])
    for alias, (target, schema, _) in ALIASES.items():
        if target in properties:
            properties[alias] = schema
    schema = obj(copy.deepcopy(properties), REQUIRED.get(command, ()))
    return dict({"$schema": "http://json-schema.org/draft-07/schema#", "title": "esdlab %s manifest" % command},
                **schema)


_validators = {}


def _validator(command):
    if command not in _validators:
        schema = manifest_schema(command)
        jsonschema.Draft7Validator.check_schema(schema)
        _validators[command] = jsonschema.Draft7Validator(schema)
    return _validators[command]


def escape(token):
    return str(token).replace("~", "~0").replace("/", "~1")


def _pointer(path):
    return "".join("/" + escape(token) for token in path)


def _locate(error):
    """(rank, pointer, message) of a validation error; unknown fields sort first."""
    here = _pointer(error.absolute_path)
    if error.validator == "additionalProperties":
        unknown = sorted(set(error.instance) - set(error.schema.get("properties", {})))
        return 0, "%s/%s" % (here, escape(unknown[0])), "unknown field"
    if error.validator == "required":
        missing = [name for name in error.validator_value if name not in error.instance]
        return 1, "%s/%s" % (here, escape(missing[0])), "required field missing"
    description = error.schema.get("description") if isinstance(error.schema, dict) else None
    return 2, here, "expected %s" % description if description else error.message


def _resolve_aliases(document):
    for alias, (target, _, convert) in ALIASES.items():
        if alias not in document:
            continue
        value = convert(document.pop(alias))
        if target in document and document[target] != value:
            raise ManifestError("/" + alias, "conflicts with /%s" % target)
        document[target] = value
    return document


def _complete(value, schema):
    """Fills schema defaults into a validated value and normalizes numbers."""
    if value is None:
        return None
    if "if" in schema:
        return _complete(value, schema["then"] if isinstance(value, dict) else schema["else"])
    if isinstance(value, dict) and "properties" in schema:
        out = {}
        for name, sub in schema["properties"].items():
            if name in value:
                out[name] = _complete(value[name], sub)
            elif "default" in sub:
                out[name] = _complete(copy.deepcopy(sub["default"]), sub)
        return out
    if isinstance(value, list) and "items" in schema:
        return [_complete(v, schema["items"]) for v in value]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return value
    kinds = schema.get("type", ())
    if "integer" in kinds or "enum" in schema:
        return int(value) if float(value).is_integer() else value
    if "number" in kinds:
        return float(value)
    return value


@dataclasses.dataclass
class Manifest:
    """A validated manifest with every default filled in."""
    command: str
    document: dict
    path: Optional[str] = None

    def __getitem__(self, key):
        return self.document[key]

    @property
    def seed(self):
        return self.document["seed"]

    def state(self):
        return state_params(self.document["state"])

    def mismatch(self):
        return mismatch(self.document["z"])

    def to_json(self):
        return json.dumps(self.document, sort_keys=True, indent=2)


def validate(doc, command):
    """Validates a parsed document for command and fills in the defaults."""
    if command not in PROPERTIES:
        raise ValidationError("unknown command %r, expected one of %s" % (command, ", ".join(COMMANDS)))
    validator = _validator(command)
    located = sorted(_locate(e) for e in validator.iter_errors(doc))
    if located:
        _, pointer, message = located[0]
        raise ManifestError(pointer, message)
    if doc.get("command") not in (None, command):
        raise ManifestError("/command", "manifest is for %r, not %r" % (doc["command"], command))
    document = _complete(_resolve_aliases(dict(doc)), validator.schema)
    document["command"] = command
    return Manifest(command, document)


def _non_finite(name):
    raise ManifestError("/", "non-finite number %s is not allowed" % name)


def load_manifest(path, command):
    """Reads and validates the JSON manifest at path."""
    try:
        with open(path) as f:
            doc = json.load(f, parse_constant=_non_finite)
    except OSError as e:
        raise ManifestError("/", "cannot read manifest %s: %s" % (path, e.strerror))
    except json.JSONDecodeError as e:
        raise ManifestError("/", "invalid JSON at line %d column %d: %s" % (e.lineno, e.colno, e.msg))
    manifest = validate(doc, command)
    manifest.path = path
    L.info("loaded %s manifest %s", command, path)
    return manifest


def default_manifest(command):
    """The built-in manifest used when a command runs without --manifest."""
    if command not in DEFAULTS_ALLOWED:
        raise ManifestError("/", "%s needs a manifest (--manifest)" % command)
    return validate({}, command)


def state_params(doc):
    return StateParams(alpha=doc["alpha"], relative_sign=doc.get("sign", -1))


def mismatch(value):
    if isinstance(value, dict):
        return TemporalMismatch.phase(value["chi"])
    return TemporalMismatch.binary(value)


def protocol_config(manifest, grid_points=None):
    """ProtocolConfig of a sweep manifest; grid_points overrides the manifest grid."""
    d = manifest.document
    return ProtocolConfig(state=manifest.state(), p=d["p"], z=manifest.mismatch(),
                          pipeline_variant=d["pipeline_variant"], apply_not=d["apply_not"],
                          renormalize_after_first=d["renormalize_after_first"], baseline=d["baseline"],
                          P_grid=uniform_grid(grid_points or d["grid_points"]))


def error_budget(manifest):
    """Budget of an error-report manifest, the reported one at its extinction ratio when none is given."""
    d = manifest.document
    if d["budget"] is None:
        return ErrorBudget.headline(d["extinction_ratio"], d["p"], d["P"])
    return ErrorBudget.from_json(d["budget"])


def operating_point(manifest):
    d = manifest.document
    return OperatingPoint(manifest.state(), d["p"], d["P"], manifest.mismatch())
