"""JSON schemas for body descriptions and command results."""

from __future__ import annotations

import jsonschema

_NUM_LIST = {"type": "array", "items": {"type": "number"}, "minItems": 1}

BODY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$ref": "#/$defs/body",
    "$defs": {
        "body": {
            "oneOf": [
                {
                    "type": "object",
                    "properties": {
                        "type": {"const": "ball"},
                        "r": {"type": "number", "exclusiveMinimum": 0},
                        "n": {"type": "integer", "minimum": 1},
                    },
                    "required": ["type", "r"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "type": {"const": "ellipsoid"},
                        "radii": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
                        "Q": {"type": "array", "items": _NUM_LIST, "minItems": 2},
                    },
                    "required": ["type"],
                    "oneOf": [{"required": ["radii"]}, {"required": ["Q"]}],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "type": {"const": "lp_ball"},
                        "p": {"type": "number", "minimum": 2},
                        "radii": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
                    },
                    "required": ["type", "p", "radii"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "type": {"const": "product"},
                        "factors": {"type": "array", "items": {"$ref": "#/$defs/body"}, "minItems": 1},
                    },
                    "required": ["type", "factors"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "type": {"const": "translate"},
                        "shift": _NUM_LIST,
                        "base": {"$ref": "#/$defs/body"},
                    },
                    "required": ["type", "shift", "base"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "type": {"const": "scaled"},
                        "factor": {"type": "number", "exclusiveMinimum": 0},
                        "base": {"$ref": "#/$defs/body"},
                    },
                    "required": ["type", "factor", "base"],
                    "additionalProperties": False,
                },
            ]
        }
    },
}

_RESIDUALS = {
    "type": "object",
    "properties": {
        "ode": {"type": "number"},
        "boundary": {"type": "number"},
        "gauge": {"type": "number"},
    },
    "required": ["ode", "boundary", "gauge"],
}

RESULT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "capacity": {"type": "number"},
        "method": {"enum": ["clarke_dual", "closed_form"]},
        "n": {"type": "integer", "minimum": 1},
        "k": {"type": "integer", "minimum": 0},
        "chord": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "properties": {
                        "action": {"type": "number"},
                        "certified": {"type": "boolean"},
                        "residuals": _RESIDUALS,
                    },
                    "required": ["action", "residuals"],
                },
            ]
        },
        "diagnostics": {"type": "object"},
    },
    "required": ["capacity", "method", "n", "k", "chord", "diagnostics"],
}

SPECTRUM_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "array",
    "items": {
        "type": "object",
        "properties": {"action": {"type": "number", "exclusiveMinimum": 0}, "label": {"type": "string"}},
        "required": ["action", "label"],
        "additionalProperties": False,
    },
}

VERIFY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "passed": {"type": "boolean"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "value": {"type": ["number", "null"]},
                    "target": {"type": "string"},
                    "violation": {"type": ["number", "null"]},
                    "passed": {"type": "boolean"},
                    "error": {"type": ["string", "null"]},
                },
                "required": ["name", "passed"],
            },
        },
        "capacities": {"type": "object", "additionalProperties": {"type": "number"}},
    },
    "required": ["passed", "checks"],
}


def validate(instance, schema) -> None:
    """Raise :class:`jsonschema.ValidationError` if ``instance`` does not match."""
    jsonschema.validate(instance, schema)
