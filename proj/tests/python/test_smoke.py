import cmath
import math
from pathlib import Path

import pytest

import gasket_forge as gf

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def test_k4_is_four_mutually_tangent_circles():
    k4 = gf.parse_complex((FIXTURES / "k4.complex").read_text())
    p = gf.pack(k4)
    assert p.converged
    for i in range(4):
        for j in range(i + 1, 4):
            assert gf.inversive_product(p.circles[i], p.circles[j]) == pytest.approx(1.0, abs=1e-9)


def test_g1_level_one_counts():
    c = gf.subdivide(gf.builtin_complex("g1"), gf.builtin_rule(), 1)
    assert len(c.vertex_ids) == 6
    assert len(c.edges()) == 8
    assert c.euler_characteristic() == 2


def test_packing_round_trip():
    c = gf.subdivide(gf.builtin_complex("g2"), gf.builtin_rule(), 2)
    p = gf.pack(c)
    text = gf.format_packing(p)
    assert gf.format_packing(gf.parse_packing(text)) == text
    assert max(p.tangency_residual, p.angle_residual) < 1e-10


def test_mobius_triples_and_classes():
    m = gf.mobius_from_triples((0, 1, None), (1, 1j, -1))
    assert m(0) == pytest.approx(1)
    assert m(None) == pytest.approx(-1)
    assert gf.classify(gf.MobiusMap(1, 1, 0, 1)) == "parabolic"
    rot = gf.MobiusMap(cmath.exp(0.5j), 0, 0, 1)
    assert gf.classify(rot) == "elliptic"
    assert gf.classify(rot @ rot.inverse()) == "identity"


def test_rule_validation_and_parse_errors():
    ok, violations = gf.validate_rule(gf.builtin_rule())
    assert ok and not violations
    with pytest.raises(ValueError):
        gf.parse_rule("polygon P sides=4\ncell P.1 nonsense\n")


def test_cli_entry_point():
    code, out, _ = gf.run_cli(["validate", "--builtin", "quad"])
    assert code == 0
    assert "verdict=ok" in out
    code, _, err = gf.run_cli(["frobnicate"])
    assert code == 2
    assert err


def test_circle_mapping_keeps_tangency():
    a = gf.GenCircle.circle(0, 1)
    b = gf.GenCircle.circle(2, 1)
    m = gf.MobiusMap(1, 0.3, 0.2 + 0.1j, 1)
    assert gf.inversive_product(m.map_circle(a), m.map_circle(b)) == pytest.approx(1.0, abs=1e-9)
    assert math.isfinite(m.map_circle(a).radius)
