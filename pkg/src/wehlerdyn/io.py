"""Surface files and point strings.

Surface file layout::

    {"name": "...", "field": "Q" | {"Fp": p},
     "coefficients": [{"exp": [i, j, k], "num": "3", "den": "2"}, ...],
     "points": [[[a, b], [c, d], [e, f]], ...]}      # optional

Omitted exponent triples are zero and an omitted ``den`` means 1.  The
optional ``points`` list records known points of the surface.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path

from .errors import ParseError, SchemaError, ZeroVector
from .numcore import ZERO, normalize_proj, normalize_proj_fp
from .wehler import SurfacePoint, WehlerSurface, make_point, on_surface


def _int_string(value, what: str) -> int:
    if isinstance(value, bool):
        raise SchemaError(f"{what} must be a decimal string")
    if isinstance(value, int):
        return value
    if not isinstance(value, str) or not re.fullmatch(r"\s*[+-]?\d+\s*", value):
        raise SchemaError(f"{what} must be a decimal string, got {value!r}")
    return int(value)


def surface_from_json(obj) -> tuple[WehlerSurface, list[SurfacePoint]]:
    """Build a surface (and its recorded points) from a parsed JSON object."""
    if not isinstance(obj, dict):
        raise SchemaError("surface file must hold a JSON object")
    unknown = set(obj) - {"name", "field", "coefficients", "points"}
    if unknown:
        raise SchemaError(f"unknown keys: {sorted(unknown)}")
    name = obj.get("name", "")
    if not isinstance(name, str):
        raise SchemaError("name must be a string")
    fld = obj.get("field", "Q")
    if fld == "Q":
        p = None
    elif isinstance(fld, dict) and set(fld) == {"Fp"} and isinstance(fld["Fp"], int):
        p = fld["Fp"]
    else:
        raise SchemaError(f"field must be \"Q\" or {{\"Fp\": p}}, got {fld!r}")
    coeffs = obj.get("coefficients")
    if not isinstance(coeffs, list):
        raise SchemaError("coefficients must be a list")
    table: dict[tuple[int, int, int], Fraction] = {}
    for entry in coeffs:
        if not isinstance(entry, dict) or "exp" not in entry or "num" not in entry:
            raise SchemaError(f"bad coefficient entry {entry!r}")
        if set(entry) - {"exp", "num", "den"}:
            raise SchemaError(f"unknown keys in coefficient entry {entry!r}")
        exp = entry["exp"]
        if (not isinstance(exp, list) or len(exp) != 3
                or any(not isinstance(e, int) or e not in (0, 1, 2) for e in exp)):
            raise SchemaError(f"exp must be three integers in 0..2, got {exp!r}")
        num = _int_string(entry["num"], "num")
        den = _int_string(entry.get("den", "1"), "den")
        if den <= 0:
            raise SchemaError("den must be positive")
        key = tuple(exp)
        if key in table:
            raise SchemaError(f"duplicate exponent {exp}")
        table[key] = Fraction(num, den)
    try:
        S = WehlerSurface(table, p=p, name=name)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    points = []
    for raw in obj.get("points", []):
        try:
            pt = make_point([tuple(_int_string(v, "coordinate") for v in c) for c in raw], p)
        except (TypeError, ValueError, ZeroVector) as exc:
            raise SchemaError(f"bad point {raw!r}: {exc}") from None
        if not on_surface(S, pt):
            raise SchemaError(f"recorded point {raw!r} is not on the surface")
        points.append(pt)
    return S, points


def surface_to_json(S: WehlerSurface, points=()) -> dict:
    out = {
        "name": S.name,
        "field": "Q" if S.p is None else {"Fp": S.p},
        "coefficients": [
            {"exp": list(e), "num": str(c.numerator), "den": str(c.denominator)}
            for e, c in S.coeffs.items()
        ],
    }
    if points:
        out["points"] = [pt.to_json() for pt in points]
    return out


def load_surface(path) -> tuple[WehlerSurface, list[SurfacePoint]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON: {exc}") from None
    return surface_from_json(obj)


def dump_surface(S: WehlerSurface, path, points=()) -> None:
    Path(path).write_text(json.dumps(surface_to_json(S, points), indent=2) + "\n")


_COORD = re.compile(r"\s*([xyz])\s*=\s*\[\s*([+-]?\d+)\s*:\s*([+-]?\d+)\s*\]\s*")


def parse_point(text: str, p: int | None = None) -> SurfacePoint:
    """Parse ``"x=[a:b],y=[c:d],z=[e:f]"``; ``"origin"`` is ``(0, 0, 0)``."""
    text = text.strip()
    if text == "origin":
        return SurfacePoint(ZERO, ZERO, ZERO, p=p)
    parts = text.split(",")
    if len(parts) != 3:
        raise ParseError(f"expected three coordinates in {text!r}")
    coords = {}
    for part in parts:
        m = _COORD.fullmatch(part)
        if not m:
            raise ParseError(f"cannot parse coordinate {part!r}")
        name, a, b = m.group(1), int(m.group(2)), int(m.group(3))
        if name in coords:
            raise ParseError(f"coordinate {name} given twice")
        try:
            coords[name] = normalize_proj(a, b) if p is None else normalize_proj_fp(a, b, p)
        except (ZeroVector, ValueError) as exc:
            raise ParseError(str(exc)) from None
    return SurfacePoint(coords["x"], coords["y"], coords["z"], p=p)


def format_point(pt: SurfacePoint) -> str:
    return ",".join(f"{n}=[{c.a}:{c.b}]" for n, c in zip("xyz", pt.coords))


def parse_int_matrix(text: str) -> list[list[int]]:
    try:
        m = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed matrix {text!r}: {exc}") from None
    if not isinstance(m, list) or not m or not all(isinstance(r, list) for r in m):
        raise ParseError(f"matrix must be a list of rows: {text!r}")
    return m

