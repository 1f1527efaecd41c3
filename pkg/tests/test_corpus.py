import json

import pytest

from wehlerdyn.corpus import (
    BUNDLED,
    EDGE_EXPONENTS,
    SMALL_VALUES,
    bundled_path,
    load_bundled,
    named_rng,
    random_generic_surface,
    random_orbit8_surface,
    regenerate,
    small_points,
)
from wehlerdyn.wehler import CORNER_EXPONENTS, V_POINTS, fiber_containment_free, on_surface


def test_named_rng_is_reproducible():
    a = [named_rng("x", 3).random() for _ in range(2)]
    assert a[0] == a[1]
    assert named_rng("x", 3).random() != named_rng("y", 3).random()
    assert named_rng("x", 3).random() != named_rng("x", 4).random()


def test_orbit8_generator():
    rng = named_rng("test", 0)
    for _ in range(10):
        S = random_orbit8_surface(rng)
        assert all(S.coeff(*e) == 0 for e in CORNER_EXPONENTS)
        assert all(S.coeff(*e) != 0 for e in EDGE_EXPONENTS)
        assert len(EDGE_EXPONENTS) == 12


def test_generic_generator():
    S, pts = random_generic_surface(named_rng("test", 1), min_points=2)
    assert len(pts) >= 2 and all(on_surface(S, p) for p in pts)
    assert fiber_containment_free(S)
    assert set(pts) <= set(small_points(S))
    assert len(SMALL_VALUES) == 8


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_files_load(name):
    S, pts = load_bundled(name)
    assert S.name == name
    assert all(on_surface(S, p) for p in pts)
    assert json.loads(bundled_path(name).read_text())["name"] == name


def test_bundled_orbit8_records_v():
    S, pts = load_bundled("orbit8")
    assert set(pts) == set(V_POINTS)
    with pytest.raises(KeyError):
        load_bundled("nope")


def test_regenerate_reproduces_bundled(tmp_path):
    regenerate(tmp_path)
    for name in BUNDLED:
        assert (tmp_path / f"{name}.json").read_text() == bundled_path(name).read_text()
