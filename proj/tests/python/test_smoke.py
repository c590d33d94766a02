import json
import math
import os
from pathlib import Path

import pytest

import rdpredict

CONFIG_DIR = Path(os.environ.get("RDPREDICT_CONFIG_DIR", Path(__file__).resolve().parents[2] / "configs"))


@pytest.fixture(scope="module")
def example():
    return json.loads((CONFIG_DIR / "example.json").read_text())


def test_version():
    assert rdpredict.__version__ == "0.1.0"


def test_eig(example):
    out = rdpredict.eig(example)
    lam = out["eigenvalues"]
    assert len(lam) == 20
    assert abs(lam[0] - 0.317) < 0.005
    assert abs(lam[1] - 0.116) < 0.005
    assert abs(lam[2] + 0.342) < 0.005
    assert out["eigenfunctions"].shape == (20, 201)


def test_certify(example):
    cert = rdpredict.certify(example)
    assert cert["N"] == 2
    assert cert["delta_max"] >= 0.23
    assert cert["satisfied"]


def test_short_simulation(example):
    example = dict(example, sim=dict(example["sim"], t_end=2.0))
    out = rdpredict.simulate(example)
    assert not out["diverged"]
    assert out["x"].shape[1] == 20
    assert out["w"].shape[1] == 2
    assert len(out["t"]) == len(out["normX"])
    assert all(math.isfinite(v) for v in out["normU"])
    assert out["metadata"]["config_hash"] == rdpredict.config_hash(example)


def test_place_poles():
    acl, k = rdpredict.place_poles([0.317, 0.116], 1.0, [-0.3, -0.3])
    for i, lam in enumerate([0.317, 0.116]):
        assert abs(lam + math.exp(-lam) * k[i][i] + 0.3) < 1e-12
    assert abs(acl[0][0] + 0.3) < 1e-12


def test_missing_key(example):
    broken = json.loads(json.dumps(example))
    del broken["problem"]["p"]
    with pytest.raises(rdpredict.ConfigError, match="problem.p"):
        rdpredict.eig(broken)


def test_run_command(tmp_path):
    outputs = rdpredict.run_command("eig", str(CONFIG_DIR / "dirichlet.json"), str(tmp_path))
    assert (tmp_path / "spectrum.json").exists()
    assert (tmp_path / "basis.csv").exists()
    assert len(outputs) == 2
    spectrum = json.loads((tmp_path / "spectrum.json").read_text())
    assert abs(spectrum["eigenvalues"][0] + math.pi**2) < 1e-6
