"""JSON Schemas for every ``--json`` payload the CLI prints."""
from __future__ import annotations

_RATIONAL = {"type": "string", "pattern": r"^-?\d+/\d+$"}
_COST = {"type": "string", "pattern": r"^-?\d+(\.\d+)?(/\d+)?$"}
_IDS = {"type": "array", "items": {"type": "integer", "minimum": 0}}
_PAIRS = {"type": "array", "items": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}}

CERTIFICATE = {
    "type": "object",
    "required": ["min_weight", "scales"],
    "properties": {
        "min_weight": {"type": "string"},
        "scales": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["r", "hubs"],
                "properties": {
                    "r": _RATIONAL,
                    "hubs": {"type": "object", "additionalProperties": {"type": "integer"}},
                },
            },
        },
    },
}

WITNESS = {
    "type": "object",
    "required": ["r", "component", "pairs"],
    "properties": {"r": _RATIONAL, "component": _IDS, "pairs": _PAIRS},
}

VERIFY = {
    "type": "object",
    "required": ["result"],
    "oneOf": [
        {"properties": {"result": {"const": "certificate"}, "certificate": CERTIFICATE}, "required": ["certificate"]},
        {"properties": {"result": {"const": "witness"}, "witness": WITNESS, "witness_checked": {"type": "boolean"}},
         "required": ["witness"]},
    ],
}

SPC = {
    "type": "object",
    "required": ["r", "hubs", "valid"],
    "properties": {"r": _RATIONAL, "hubs": _IDS, "valid": {"type": "boolean"}},
}

HIERARCHY = {
    "type": "object",
    "required": ["base_unit", "alpha", "top", "levels"],
    "properties": {
        "base_unit": _RATIONAL,
        "alpha": _RATIONAL,
        "top": {"type": "integer"},
        "levels": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["level", "radius", "components"],
                "properties": {
                    "level": {"type": "integer"},
                    "radius": _RATIONAL,
                    "components": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["id", "members", "interface"],
                            "properties": {
                                "id": {"type": "integer"},
                                "members": _IDS,
                                "interface": {
                                    "type": "array",
                                    "items": {
                                        "type": "object",
                                        "required": ["level", "hub", "dist"],
                                        "properties": {
                                            "level": {"type": "integer"},
                                            "hub": {"type": "integer"},
                                            "dist": _COST,
                                        },
                                    },
                                },
                            },
                        },
                    },
                },
            },
        },
    },
}

NET = {
    "type": "object",
    "required": ["r", "points", "eta", "invariants"],
    "properties": {
        "r": _RATIONAL,
        "points": _IDS,
        "eta": _IDS,
        "invariants": {"type": "object", "additionalProperties": {"type": "boolean"}},
    },
}

DECOMPOSITION = {
    "type": "object",
    "required": ["width", "root", "nodes", "valid"],
    "properties": {
        "width": {"type": "integer"},
        "root": {"type": "integer"},
        "valid": {"type": "boolean"},
        "nodes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "parent", "bag"],
                "properties": {"id": {"type": "integer"}, "parent": {"type": "integer"}, "bag": _IDS},
            },
        },
    },
}

SOLUTION = {
    "type": "object",
    "required": ["solver", "cost"],
    "properties": {
        "solver": {"type": "string"},
        "cost": _COST,
        "width": {"type": ["integer", "null"]},
        "tour": _IDS,
        "edges": _PAIRS,
    },
}

REPORT = {
    "type": "object",
    "required": ["problem", "eps", "eps_internal", "bootstrap_cost", "net_radius", "quotient_opt", "final_cost"],
    "properties": {
        "problem": {"enum": ["tsp", "steiner"]},
        "eps": _RATIONAL,
        "eps_internal": _RATIONAL,
        "beta": {"type": "integer"},
        "bootstrap_cost": _COST,
        "net_radius": _RATIONAL,
        "quotient_opt": _COST,
        "lift_cost": _COST,
        "final_cost": _COST,
        "quotient_size": {"type": "integer"},
        "width": {"type": "integer"},
        "projected_width": {"type": "integer"},
        "trimmed": {"type": "boolean"},
        "notes": {"type": "array", "items": {"type": "string"}},
        "steps": {"type": "object", "additionalProperties": {"type": "integer"}},
    },
}

FPTAS = {
    "type": "object",
    "required": ["solution", "report"],
    "properties": {"solution": SOLUTION, "report": REPORT},
}

REDUCTION = {
    "type": "object",
    "required": ["kind", "threshold", "roles"],
    "properties": {
        "kind": {"enum": ["stp", "tsp"]},
        "threshold": _COST,
        "roles": {"type": "object", "additionalProperties": {"type": "integer"}},
        "ladder": {"type": "object", "additionalProperties": _COST},
        "n": {"type": "integer"},
        "m": {"type": "integer"},
    },
}

DECISION = {
    "type": "object",
    "required": ["satisfiable", "cost", "threshold"],
    "properties": {
        "satisfiable": {"type": "boolean"},
        "cost": _COST,
        "threshold": _COST,
        "assignment": {"type": ["array", "null"], "items": {"type": "boolean"}},
        "undetermined": _IDS,
    },
}

ORACLE_HD = {
    "type": "object",
    "required": ["highway_dimension", "h_max"],
    "properties": {
        "highway_dimension": {"type": ["integer", "null"]},
        "h_max": {"type": "integer"},
        "exceeds": {"type": "boolean"},
    },
}

MANIFEST = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["seed", "params", "n", "alpha", "certificate"],
        "properties": {
            "seed": {"type": "integer"},
            "params": {"type": "object"},
            "n": {"type": "integer"},
            "alpha": _RATIONAL,
            "certificate": {"type": "string"},
            "file": {"type": "string"},
        },
    },
}

BY_COMMAND = {
    "verify-hd1": VERIFY,
    "spc": SPC,
    "hierarchy": HIERARCHY,
    "net": NET,
    "treedecomp": DECOMPOSITION,
    "solve-tsp": SOLUTION,
    "solve-steiner": SOLUTION,
    "oracle-tsp": SOLUTION,
    "oracle-steiner": SOLUTION,
    "fptas-tsp": FPTAS,
    "fptas-steiner": FPTAS,
    "gen-stp": REDUCTION,
    "gen-tsp": REDUCTION,
    "decide-stp": DECISION,
    "decide-tsp": DECISION,
    "oracle-hd": ORACLE_HD,
    "gen-corpus": MANIFEST,
}
