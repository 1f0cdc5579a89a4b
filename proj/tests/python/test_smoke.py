import json
import math
import os

import pytest

import mktransport as mk


@pytest.fixture(scope="module")
def disk():
    return mk.DistanceField(mk.ConvexBody.euclidean(), mk.DomainBoundary.circle(1.0))


def test_distance_and_gradient(disk):
    assert disk((0.3, 0.4)) == pytest.approx(0.5, abs=1e-12)
    g = disk.gradient((0.0, 0.5))
    assert g[0] == pytest.approx(0.0, abs=1e-9)
    assert g[1] == pytest.approx(-1.0, abs=1e-9)
    assert disk.is_singular((0.0, 0.0))
    assert disk.inradius() == pytest.approx(1.0, rel=1e-6)


def test_gauges():
    e = mk.ConvexBody.ellipse([[1.0, 0.0], [0.0, 4.0]])
    assert e.gauge((0.0, 1.0)) == pytest.approx(2.0)
    assert e.polar_gauge((0.0, 1.0)) == pytest.approx(0.5)
    assert e.validate()["passed"]
    assert not mk.ConvexBody.max_norm().validate()["passed"]


def test_density_and_growth(disk):
    one = mk.SourceField.constant(1.0, mk.Region.domain(mk.DomainBoundary.circle(1.0)))
    assert mk.transport_density(disk, one, (0.6, 0.0)) == pytest.approx(0.3, rel=1e-8)
    assert mk.growth_factor(0.0, 2.0) == 2.0
    assert mk.h3_threshold(disk, one) == pytest.approx(0.5, rel=1e-8)


def test_uniqueness(disk):
    one = mk.SourceField.constant(1.0, mk.Region.domain(mk.DomainBoundary.circle(1.0)))
    ring = mk.SourceField.constant(1.0, mk.Region.sector((0.0, 0.0), 0.0, 2 * math.pi, 0.5, 1.0))
    assert mk.is_unique(disk, one, h=1 / 32)
    assert not mk.is_unique(disk, ring, h=1 / 32)
    assert abs(mk.minimal_minimizer(disk, ring, (0.0, 0.0), h=1 / 32)) <= 1e-6


def test_run_scenario(tmp_path):
    with open(os.path.join(os.environ.get("MKT_SCENARIOS", "scenarios"), "disk_annulus_source.json")) as fh:
        config = json.load(fh)
    config["grid"] = {"n": 32}
    code, summary = mk.run_scenario(config, output=tmp_path, tasks=["distance", "uniqueness"])
    assert code == 0
    assert summary["tasks"]["uniqueness"]["verdict"] == "NON-UNIQUE"
    assert (tmp_path / "distance.csv").read_text().startswith("x,y,value\n")

    code, err = mk.run_scenario({"body": {"kind": "euclidean"}, "tasks": ["distance"]})
    assert code == 2 and err["error"] == "config_error"
    code, err = mk.run_scenario("{ broken")
    assert code == 2
