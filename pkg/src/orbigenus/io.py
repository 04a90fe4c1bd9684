"""Model file format: JSON with exact rationals as "p/q" strings."""

from __future__ import annotations

import json
from fractions import Fraction

import jsonschema

from .errors import SchemaError
from .model import FixedComponent, LineDatum, OrbifoldModel

RATIONAL = {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]*[1-9][0-9]*)?$"}
INT_OR_RATIONAL = {"oneOf": [{"type": "integer"}, RATIONAL]}

LINE = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["tangent_fixed", "normal", "w_bundle"]},
        "lambda_h": RATIONAL,
        "lambda_g": RATIONAL,
        "v": {"type": "integer"},
        "c1": {"type": "array", "items": INT_OR_RATIONAL},
        "real": {"type": "boolean"},
    },
}

COMPONENT = {
    "type": "object",
    "additionalProperties": False,
    "required": ["label", "dim_c", "lines", "weight"],
    "properties": {
        "label": {"type": "string"},
        "dim_c": {"type": "integer", "minimum": 0},
        "h2": {
            "type": "object",
            "additionalProperties": False,
            "required": ["rank"],
            "properties": {
                "rank": {"type": "integer", "minimum": 0},
                "intersection": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["monomial", "value"],
                        "properties": {
                            "monomial": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                            "value": RATIONAL,
                        },
                    },
                },
            },
        },
        "lines": {"type": "array", "items": LINE},
        "weight": RATIONAL,
        "isotropy_order": {"type": "integer", "minimum": 1},
        "count": {"type": "integer", "minimum": 1},
        "pair": {"type": "array", "minItems": 2, "maxItems": 2},
    },
}

MODEL_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["schema", "name", "mode", "dim_c", "rank_w", "level", "components"],
    "properties": {
        "schema": {"const": 1},
        "name": {"type": "string"},
        "mode": {"enum": ["sector_sum", "commuting_pair"]},
        "dim_c": {"type": "integer", "minimum": 0},
        "rank_w": {"type": "integer", "minimum": 0},
        "level": {"type": "integer", "minimum": 0},
        "group": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "components": {"type": "array", "items": COMPONENT},
        "meta": {"type": "object"},
    },
}


def rat(x) -> str:
    return str(Fraction(x))


def _int_or_rat(x):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else str(x)


def _line_json(ln: LineDatum):
    return {"kind": ln.kind, "lambda_h": rat(ln.lambda_h), "lambda_g": rat(ln.lambda_g), "v": ln.v,
            "c1": [_int_or_rat(c) for c in ln.c1], "real": ln.real}


def _pair_json(p):
    if p is None:
        return None
    return [list(x) if isinstance(x, tuple) else x for x in p]


def model_to_json(model: OrbifoldModel) -> dict:
    comps = []
    for c in model.components:
        d = {
            "label": c.label,
            "dim_c": c.dim_c,
            "h2": {"rank": c.h2_rank,
                   "intersection": [{"monomial": list(m), "value": rat(v)} for m, v in sorted(c.intersection.items())]},
            "lines": [_line_json(l) for l in c.tangent + c.normal + c.w_lines],
            "weight": rat(c.weight),
            "isotropy_order": c.isotropy_order,
            "count": c.count,
        }
        if c.pair is not None:
            d["pair"] = _pair_json(c.pair)
        comps.append(d)
    out = {"schema": 1, "name": model.name, "mode": model.mode, "dim_c": model.dim_c, "rank_w": model.rank_w,
           "level": model.level, "components": comps}
    if model.group:
        out["group"] = list(model.group)
    if model.meta:
        out["meta"] = {k: v for k, v in model.meta.items()}
    return out


def dumps(model: OrbifoldModel) -> str:
    return json.dumps(model_to_json(model), indent=2, sort_keys=False) + "\n"


def _path(err) -> str:
    return "/".join(str(p) for p in err.absolute_path) or "<root>"


def validate_json(doc):
    v = jsonschema.Draft202012Validator(MODEL_SCHEMA)
    errs = sorted(v.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errs:
        e = errs[0]
        raise SchemaError(f"schema error at {_path(e)}: {e.message}")


def _pair_from(p):
    if p is None:
        return None
    return tuple(tuple(x) if isinstance(x, list) else x for x in p)


def model_from_json(doc) -> OrbifoldModel:
    validate_json(doc)
    comps = []
    for c in doc["components"]:
        lines = [LineDatum(l["kind"], Fraction(l.get("lambda_h", "0")), Fraction(l.get("lambda_g", "0")),
                           l.get("v", 0), tuple(Fraction(x) for x in l.get("c1", [])), l.get("real", False))
                 for l in c["lines"]]
        h2 = c.get("h2", {"rank": 0})
        inter = {tuple(e["monomial"]): Fraction(e["value"]) for e in h2.get("intersection", [])}
        comps.append(FixedComponent(
            c["label"], c["dim_c"], h2["rank"], inter,
            [l for l in lines if l.kind == "tangent_fixed"],
            [l for l in lines if l.kind == "normal"],
            [l for l in lines if l.kind == "w_bundle"],
            Fraction(c["weight"]), c.get("isotropy_order", 1), c.get("count", 1), _pair_from(c.get("pair"))))
    m = OrbifoldModel(doc["name"], doc["mode"], doc["dim_c"], doc["rank_w"], comps, doc["level"],
                      tuple(doc.get("group", ())), dict(doc.get("meta", {})))
    return m.validate()


def loads(text: str) -> OrbifoldModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"not valid JSON: {e}") from None
    return model_from_json(doc)


def load(path) -> OrbifoldModel:
    with open(path) as fh:
        return loads(fh.read())
