import csv
import json
import math
import subprocess

import pytest

import nhsoc


def test_eigensystem_known_points():
    eig = nhsoc.eigensystem((1.0, 0.0))
    assert eig.e_plus == pytest.approx(math.sqrt(2.0))
    assert eig.theta.real == pytest.approx(math.pi / 8)
    up, down = eig.psi_plus
    assert up.real == pytest.approx(0.38268343236508978)
    assert down.real == pytest.approx(0.92387953251128674)

    d = nhsoc.half_gap(nhsoc.ControlPoint(-1.0, 1.0))
    assert d == pytest.approx(complex(1.2720196495140690, 0.7861513777574233))


def test_hamiltonian_and_spin():
    h = nhsoc.hamiltonian((0.0, 1.0))
    assert h == [[1j, 1], [1, -1j]]
    assert nhsoc.spin_polarization([1, 0]) == 1.0
    assert nhsoc.spin_polarization([0, 1]) == -1.0


def test_errors_carry_codes():
    with pytest.raises(nhsoc.NhsocError) as info:
        nhsoc.eigensystem((0.0, 1.0))
    assert info.value.code == "EpDegenerate"
    with pytest.raises(nhsoc.NhsocError) as info:
        nhsoc.predict_nat_radius((-1.0, 0.0), math.exp(-2))
    assert info.value.code == "NoTransition"
    with pytest.raises(nhsoc.ConfigError):
        nhsoc.run_experiment("evolve", '{"bogus": 1}')


def test_paths():
    p = nhsoc.standard_path("loop", 0.1)
    assert [tuple(w) for w in p.waypoints] == [(1, 0), (1, 1.2), (-1, 1.2), (-1, 0)]
    point, velocity = p.position_at(12.0)
    assert tuple(point) == pytest.approx((1.0, 1.2))
    assert velocity.magnitude() == pytest.approx(0.1)
    spike = nhsoc.standard_path("spike", 1.0, "cw", nhsoc.ProtocolParams(x_m=-0.5, h=1.0))
    assert spike.total_length == pytest.approx(4.0)


def test_loop_asymmetry():
    v = math.exp(-2)
    ccw = nhsoc.evolve(nhsoc.standard_path("loop", v, "ccw"), dt=1e-2, stride=0)
    cw = nhsoc.evolve(nhsoc.standard_path("loop", v, "cw"), dt=1e-2, stride=0)
    assert ccw.final_band_index > 0.95
    assert cw.final_band_index < 0.0
    assert len(ccw) == 2


def test_nat_radius():
    pred = nhsoc.predict_nat_radius((-1.0, 1.0), math.exp(-2))
    assert pred.radius == pytest.approx(0.366781782440216795, rel=1e-12)
    slow = nhsoc.predict_nat_radius((-1.0, 1.0), 0.5 * math.exp(-2))
    assert slow.radius < pred.radius


def test_point_source_small():
    field = nhsoc.point_source_diagram((-1.0, 1.0), math.exp(-2), n_rays=8, dt=1e-2)
    assert len(field.rays) == 8
    assert field.prediction is not None
    assert abs(field.median_front() - field.prediction.radius) / field.prediction.radius < 0.3


def test_speed_sweep():
    pts = nhsoc.speed_sweep("hermitian", [math.exp(-4), 1e3], dt=1e-2)
    assert pts[0][1] < -0.98
    assert abs(pts[1][1]) < 0.01


def test_run_experiment_writes_files(tmp_path):
    manifest = nhsoc.run_experiment("bands", '{"grid": {"q": {"count": 5}, "g": {"count": 3}}}', str(tmp_path))
    assert manifest["files"] == [{"name": "bands.csv", "rows": 15}]
    with open(tmp_path / "bands.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 15
    assert sum(float(r["ep_flag"]) for r in rows) == 1


def test_cli_roundtrip(tmp_path):
    cli = nhsoc.cli_path()
    if cli is None:
        pytest.skip("nhsoc CLI not available")
    out = tmp_path / "out"
    subprocess.run([cli, "predict-radius", "--out", str(out)], check=True, capture_output=True)
    pred = json.loads((out / "prediction.json").read_text())
    assert pred["radius"] == pytest.approx(0.366781782440216795, rel=1e-12)
    bad = subprocess.run([cli, "evolve", "--step", "-1", "--out", str(out)], capture_output=True)
    assert bad.returncode == 2
