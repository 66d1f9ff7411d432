import numpy as np
import pytest

from dtvtomo.experiments import (Scenario, crack_fraction, k_sweep, lambda_search,
                                 make_scenario, noise_sweep, noise_table, write_table)
from dtvtomo.solver import SolveConfig


@pytest.fixture(scope="module")
def tiny():
    return make_scenario(Scenario(size=32, n_angles=21))


def test_scenario_parts(tiny):
    assert tiny.truth.shape == (32, 32)
    assert tiny.noisy.geometry.n_angles == 21
    assert not tiny.truth[tiny.crack].any()
    assert tiny.fibre_only[tiny.crack].min() > 0


def test_crack_fraction_limits(tiny):
    assert crack_fraction(tiny.truth, tiny.fibre_only, tiny.crack) == pytest.approx(1.0)
    assert crack_fraction(tiny.fibre_only, tiny.fibre_only, tiny.crack) == 0.0


def test_noise_sweep_rows():
    rows = noise_sweep(levels=(0.0, 0.05), seeds=range(3), size=48, n_angles=36)
    assert len(rows) == 6
    table = noise_table(rows)
    assert [r["eta"] for r in table] == [0.0, 0.05]
    assert table[0]["hits"] == 3 and table[0]["runs"] == 3


def test_k_sweep_fbp(tiny):
    rows = k_sweep(tiny, Ks=(2, 4), method="fbp", theta_deg=20.0)
    assert [r["K"] for r in rows] == [2, 4]
    assert rows[0]["theta_deg"] == pytest.approx(180 / 21 * 2)


def test_lambda_search_picks_best(tiny):
    best, x, rows = lambda_search(tiny.noisy, tiny.truth, "tv", [0.3, 3.0],
                                  cfg=SolveConfig(max_iters=200))
    assert [r["lam"] for r in rows] == [3.0, 0.3]
    assert best["psnr"] == max(r["psnr"] for r in rows)
    assert x.shape == (32, 32)


def test_write_table(tmp_path):
    write_table(tmp_path / "t.csv", [{"a": 1, "b": 2.5}, {"a": 3, "b": 4}])
    assert (tmp_path / "t.csv").read_text() == "a,b\n1,2.5\n3,4\n"
