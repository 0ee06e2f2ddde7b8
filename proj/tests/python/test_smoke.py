import math
import pathlib

import numpy as np
import pytest

import pncgames as pg

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"
TSIRELSON = 0.5 * (1 + 1 / math.sqrt(2))


def test_rac_bound_and_enumeration():
    g = pg.build_rac(2, 2)
    assert g.alice_inputs == 4
    assert len(g.partitions) == 1
    assert pg.rac_pnc_bound(3, 3) == "5/9"
    b = pg.pnc_bound(g, max_alphabet=2, mode="exact")
    assert b["value"] == pytest.approx(0.75, abs=1e-15)


def test_game_json_round_trip():
    g = pg.build_cglmp_game(4)
    assert pg.Game.from_json(g.to_json()) == g


def test_bb84_strategy():
    g = pg.build_rac(2, 2)
    s = pg.QuantumStrategy.from_json((DATA / "bb84_strategy.json").read_text())
    assert pg.quantum_performance(g, s) == pytest.approx(TSIRELSON, abs=1e-9)
    assert pg.obliviousness_deviation(g, s) <= 1e-12


def test_strategy_from_numpy():
    z0 = np.diag([1.0, 0.0]).astype(complex)
    z1 = np.diag([0.0, 1.0]).astype(complex)
    s = pg.QuantumStrategy(2, [z0, z1], [[z0, z1]])
    assert s.dim == 2
    with pytest.raises(ValueError):
        pg.QuantumStrategy(2, [2 * z0, z1], [[z0, z1]])


def test_cglmp_values():
    assert pg.cglmp_mixed_value(2) == pytest.approx(math.sqrt(2) / 2, abs=1e-15)
    g = pg.build_cglmp_game(3)
    s = pg.cglmp_quantum_strategy(3)
    assert pg.quantum_performance(g, s) == pytest.approx(pg.cglmp_mixed_value(3), abs=1e-9)
    assert pg.cglmp_value_formula(3, [1.0, 0.0, 0.0]) == pytest.approx(0.0, abs=1e-14)


def test_seesaw_small():
    r = pg.seesaw(pg.build_rac(2, 2), dim=2, restarts=3, seed=1)
    assert r["value"] >= 0.8535
    assert all(b >= a - 1e-9 for a, b in zip(r["trace"], r["trace"][1:]))


def test_bridge_chsh():
    r = pg.bridge((DATA / "chsh_scenario.json").read_text(), (DATA / "chsh_setup.json").read_text())
    assert abs(r["bell_value"] - r["game_performance"]) <= 1e-10
    assert r["bell_value"] == pytest.approx(TSIRELSON, abs=1e-9)


def test_errors_are_value_errors():
    with pytest.raises(pg.FormatError):
        pg.Game.from_json((DATA / "malformed.json").read_text())
    with pytest.raises(pg.GameError):
        pg.Game.from_json((DATA / "overlapping_cells_game.json").read_text())
