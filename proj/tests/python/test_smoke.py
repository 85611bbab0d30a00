import math

import numpy as np
import pytest

import radon_edges as re


def test_disk_sinogram_matches_chord_length():
    s = re.make_sinogram(re.make_disk(1.0), n_theta=30, n_p=128)
    assert s.values.shape == (30, 128)
    expected = 2.0 * np.sqrt(np.clip(1.0 - s.p**2, 0.0, None))
    assert np.max(np.abs(s.values - expected[None, :])) < 1e-12


def test_radon_numeric_close_to_analytic():
    ph = re.make_annulus(1.0, 2.0)
    assert abs(re.radon_numeric(ph, 0.3, 0.5, step=1e-4) - re.radon_analytic(ph, 0.3, 0.5)) < 5e-4


def test_disk_branches_and_reconstruction():
    disk = re.make_disk(1.0)
    s = re.make_sinogram(disk, n_theta=90, n_p=256)
    branches = re.detect_branches(s)
    chart_a = [b for b in branches if b.chart == "A"]
    assert len(chart_a) == 2
    for b in chart_a:
        assert abs(b.exponent - 0.5) < 0.15
        assert not b.affine
        assert np.all(np.diff(b.beta) > 0)
    patches = re.reconstruct_gamma(branches)
    score = re.score_reconstruction(patches, disk, 3 * s.p_step)
    assert score["coverage"] >= 0.9
    assert score["hausdorff"] <= 3 * s.p_step


def test_branches_json_round_trip():
    s = re.make_sinogram(re.make_parabola_region(), n_theta=60, n_p=128)
    text = re.branches_to_json(re.detect_branches(s))
    assert re.branches_to_json(re.branches_from_json(text)) == text


def test_legendre_of_half_square():
    x = np.linspace(-1.0, 1.0, 201)
    out = re.legendre_discrete(x, x**2 / 2)
    assert out["orientation"] == "convex"
    assert np.max(np.abs(out["values"] - out["slopes"] ** 2 / 2)) < 1e-3


def test_legendre_of_line_is_a_point():
    x = np.linspace(-1.0, 1.0, 21)
    out = re.legendre_discrete(x, 2 * x + 1)
    assert out["point"] == pytest.approx((2.0, -1.0))


def test_errors_are_typed():
    with pytest.raises(re.InvalidParameter):
        re.make_disk(0.0)
    with pytest.raises(re.InvalidParameter):
        re.parse_phantom_spec("disk:r=1")
    with pytest.raises(re.ParseError):
        re.branches_from_json("{")
    assert issubclass(re.ParseError, re.Error)


def test_phantom_spec_and_json():
    ph = re.parse_phantom_spec("polygon:(0,0);(1,0);(1,1);(0,1)")
    assert ph.area() == pytest.approx(1.0)
    assert ph.contains(0.5, 0.5)
    assert re.phantom_from_json(ph.to_json()).to_json() == ph.to_json()
    assert math.isclose(re.make_disk(2.0).support_radius, 2.0)


def test_examples_report():
    report = re.run_examples(n_theta=90, n_p=256)
    names = [e["example"] for e in report["examples"]]
    assert names == ["disk", "annulus", "parabola"]
    assert all(e["passed"] for e in report["examples"])
