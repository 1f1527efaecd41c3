"""Seeded sample generators and the bundled surface files.

Every random draw goes through :func:`named_rng`, which derives a
``random.Random`` from a purpose string, a format version and the user
seed.  Changing a generator means bumping its version string.
"""

from __future__ import annotations

import json
import random
from importlib import resources
from typing import Iterable

from .errors import SingularAtV
from .io import surface_from_json, dump_surface
from .numcore import normalize_proj
from .wehler import (
    ALL_EXPONENTS,
    FREE_EXPONENTS,
    SurfacePoint,
    WehlerSurface,
    fiber_containment_free,
    on_surface,
    orbit8_family,
)

GENERATOR_VERSION = "v1"
BUNDLED = ("orbit8", "sample", "census1", "census2", "census3", "census4", "census5")

# small search set for rational points: 0, inf, +-1, +-2, +-1/2
SMALL_VALUES = tuple(normalize_proj(a, b) for a, b in
                     [(0, 1), (1, 0), (1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 2)])


def named_rng(purpose: str, seed: int) -> random.Random:
    return random.Random(f"wehlerdyn-{purpose}-{GENERATOR_VERSION}:{int(seed)}")


# exponents with one entry 1 and the others in {0, 2}: the middle coefficients
# of the fibers through V, all nonzero iff no such fiber lies on the surface
EDGE_EXPONENTS = tuple(e for e in FREE_EXPONENTS if e.count(1) == 1)


def random_orbit8_surface(rng: random.Random, bound: int = 3) -> WehlerSurface:
    """Random member of the family through ``{0, inf}^3``.

    Edge coefficients are drawn nonzero so that every involution is defined
    at the eight points of V; this also keeps every corner smooth.
    """
    nonzero = [c for c in range(-bound, bound + 1) if c]
    free = {e: (rng.choice(nonzero) if e in EDGE_EXPONENTS else rng.randint(-bound, bound))
            for e in FREE_EXPONENTS}
    try:
        return orbit8_family(free)
    except SingularAtV:     # unreachable with nonzero edges, kept as a guard
        raise AssertionError("edge coefficients should keep V smooth") from None


def small_points(S: WehlerSurface, values: Iterable = SMALL_VALUES) -> list[SurfacePoint]:
    values = tuple(values)
    return [SurfacePoint(x, y, z) for x in values for y in values for z in values
            if on_surface(S, (x, y, z))]


def random_generic_surface(rng: random.Random, min_points: int = 1,
                           bound: int = 2) -> tuple[WehlerSurface, list[SurfacePoint]]:
    """Random integral surface with at least ``min_points`` small rational points.

    Candidates with fewer points, or without a certificate that no fiber
    lies on the surface, are redrawn.
    """
    while True:
        coeffs = {e: rng.randint(-bound, bound) for e in ALL_EXPONENTS}
        if not any(coeffs.values()):
            continue
        S = WehlerSurface(coeffs)
        pts = small_points(S)
        if len(pts) < min_points:
            continue
        if not fiber_containment_free(S):
            continue
        return S, pts


def load_bundled(name: str) -> tuple[WehlerSurface, list[SurfacePoint]]:
    if name not in BUNDLED:
        raise KeyError(f"no bundled surface {name!r}; choose from {BUNDLED}")
    text = resources.files("wehlerdyn").joinpath("data").joinpath(f"{name}.json").read_text()
    return surface_from_json(json.loads(text))


def bundled_path(name: str):
    return resources.files("wehlerdyn").joinpath("data").joinpath(f"{name}.json")


def regenerate(directory) -> None:
    """Rewrite the bundled files from their fixed seeds."""
    from pathlib import Path
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    S = random_orbit8_surface(named_rng("orbit8", 0))
    S = WehlerSurface(S.coeffs, name="orbit8")
    dump_surface(S, out / "orbit8.json", small_points(S, SMALL_VALUES[:2]))
    S, pts = random_generic_surface(named_rng("sample", 5), min_points=5)
    S = WehlerSurface(S.coeffs, name="sample")
    dump_surface(S, out / "sample.json", pts)
    rng = named_rng("census", 0)
    for i in range(1, 6):
        coeffs = {e: rng.randint(-3, 3) for e in ALL_EXPONENTS}
        dump_surface(WehlerSurface(coeffs, name=f"census{i}"), out / f"census{i}.json")
