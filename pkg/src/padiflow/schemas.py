"""JSON schemas for problem files read by the command-line tool."""

RATIONAL = {
    "oneOf": [
        {"type": "string", "pattern": r"^\s*[-−]?[0-9]+(/[0-9]*[1-9][0-9]*)?\s*$"},
        {"type": "integer"},
    ]
}

TERM = {
    "type": "array",
    "prefixItems": [{"type": "integer", "minimum": 0}, RATIONAL],
    "minItems": 2,
    "maxItems": 2,
}

SERIES = {
    "oneOf": [
        {"type": "array", "items": TERM},
        {
            "type": "object",
            "properties": {
                "terms": {"type": "array", "items": TERM},
                "order": {"type": "integer", "minimum": 0},
            },
            "required": ["terms", "order"],
            "additionalProperties": False,
        },
    ]
}

LOGVALUE = {
    "type": "object",
    "properties": {"logp": RATIONAL, "log2": RATIONAL, "p": {"type": "integer", "minimum": 3}},
    "required": ["logp", "log2", "p"],
    "additionalProperties": False,
}

PRIME = {"type": "integer", "minimum": 3}
ORDER = {"type": "integer", "minimum": 0}

ODE = {
    "type": "object",
    "properties": {
        "kind": {"const": "ode"},
        "a": SERIES,
        "b": SERIES,
        "c": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"m": {"type": "integer", "minimum": 2}, "series": SERIES},
                "required": ["m", "series"],
                "additionalProperties": False,
            },
        },
        "s": {"type": "integer", "minimum": 1},
        "t": {"type": "integer", "minimum": 1},
        "p": PRIME,
        "prime": PRIME,
        "logr": LOGVALUE,
        "order": ORDER,
    },
    "required": ["kind", "a", "s", "t"],
    "oneOf": [{"required": ["p"]}, {"required": ["prime"]}],
    "additionalProperties": False,
}

POLY2 = {
    "type": "array",
    "items": {
        "type": "array",
        "prefixItems": [
            {
                "type": "array",
                "items": {"type": "integer", "minimum": 0},
                "minItems": 2,
                "maxItems": 2,
            },
            RATIONAL,
        ],
        "minItems": 2,
        "maxItems": 2,
    },
}

FIELD = {
    "type": "object",
    "properties": {
        "kind": {"const": "field"},
        "P": POLY2,
        "Q": POLY2,
        "order": ORDER,
        "prime": PRIME,
        "primeRange": {
            "type": "array",
            "items": {"type": "integer", "minimum": 2},
            "minItems": 2,
            "maxItems": 2,
        },
    },
    "required": ["kind", "P", "Q"],
    "additionalProperties": False,
}

SERIES_FILE = {
    "type": "object",
    "properties": {
        "kind": {"const": "series"},
        "series": SERIES,
        "prime": PRIME,
        "order": ORDER,
    },
    "required": ["kind", "series"],
    "additionalProperties": False,
}

BY_KIND = {"ode": ODE, "field": FIELD, "series": SERIES_FILE}
