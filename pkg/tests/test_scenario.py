import json

import pytest

from decaykit.errors import ScenarioError
from decaykit.scenario import canonical_scenarios, parse_scenario, scenario_hash, validate_scenario

BASE = """{
  "density": {
    "resonances": [
      {"omega0": 1.0, "gamma": 2.0}
    ]
  },
  "domain": {"kind": "HalfLine"},
  "time_grid": {"t_min": 0.0, "t_max": 5.0, "points": 6}
}
"""


def test_minimal_scenario_fills_defaults():
    sc = parse_scenario(BASE)
    assert sc.data["quad"]["abs_tol"] == 1e-10
    assert sc.data["model"]["mode"] == "PoleOnly"
    assert sc.density.weights == (1.0,)
    assert len(sc.grid) == 6


def test_canonical_scenarios_validate_and_round_trip():
    for name, raw in canonical_scenarios().items():
        sc = validate_scenario(raw)
        again = validate_scenario(json.loads(json.dumps(sc.data)))
        assert again.data == sc.data
        assert again.hash == sc.hash


def test_unknown_key_names_field_and_line():
    text = BASE.replace('"gamma": 2.0}', '"gamma": 2.0, "gama": 3}')
    with pytest.raises(ScenarioError) as e:
        parse_scenario(text)
    assert e.value.field == "density.resonances[0].gama"
    assert e.value.line == 4
    assert "unknown key 'gama'" in str(e.value)


def test_negative_gamma():
    with pytest.raises(ScenarioError) as e:
        parse_scenario(BASE.replace('"gamma": 2.0', '"gamma": -1'))
    assert e.value.field == "density.resonances[0].gamma"
    assert e.value.line == 4


def test_unknown_top_level_key():
    text = BASE.replace('"domain"', '"outputz": [],\n  "domain"')
    with pytest.raises(ScenarioError) as e:
        parse_scenario(text)
    assert e.value.field == "outputz" and e.value.line == 7


def test_json_syntax_error_line():
    with pytest.raises(ScenarioError) as e:
        parse_scenario(BASE.replace('"HalfLine"}', '"HalfLine"'))
    assert e.value.line is not None


def test_duplicate_key():
    text = BASE.replace('"domain": {"kind": "HalfLine"}', '"domain": {"kind": "HalfLine", "kind": "FullLine"}')
    with pytest.raises(ScenarioError, match="duplicate"):
        parse_scenario(text)


@pytest.mark.parametrize("patch, field", [
    ({"domain": {"kind": "Interval", "a": 1.0}}, "domain"),
    ({"domain": {"kind": "HalfLine", "a": 1.0}}, "domain.a"),
    ({"time_grid": {"t_min": 5.0, "t_max": 1.0, "points": 3}}, "time_grid.t_max"),
    ({"time_grid": {"t_min": 0.0, "t_max": 1.0, "points": 3, "spacing": "log"}}, "time_grid.t_min"),
    ({"model": {"pairs": [{"omega_n": 1, "gamma_n": 1}], "prefactor": [2, 0]}}, "model.prefactor"),
    ({"model": {"pairs": [{"omega_n": 1, "gamma_n": 1}], "threshold_p": 1}}, "model.threshold_p"),
    ({"quad": {"rel_tol": 0}}, "quad.rel_tol"),
    ({"contour": {"kind": "Rectangle", "params": [0, 1, 0]}}, "contour.params"),
    ({"tau_time": {"cutoff": 1.0}}, "tau_time.cutoff"),
    ({"density": {"resonances": [{"omega0": 1, "gamma": 1, "weight": 0.5},
                                 {"omega0": 2, "gamma": 1, "weight": 0.6}]}}, "density.resonances"),
])
def test_field_precise_errors(patch, field):
    raw = json.loads(BASE)
    raw.update(patch)
    with pytest.raises(ScenarioError) as e:
        validate_scenario(raw)
    assert e.value.field == field


def test_hash_is_stable_and_sensitive():
    a = validate_scenario(json.loads(BASE))
    b = validate_scenario(json.loads(BASE))
    assert a.hash == b.hash
    raw = json.loads(BASE)
    raw["density"]["resonances"][0]["gamma"] = 2.5
    assert validate_scenario(raw).hash != a.hash
    assert len(scenario_hash(a.data)) == 64


def test_tol_override():
    sc = parse_scenario(BASE).with_overrides(1e-6)
    assert sc.quad.abs_tol == sc.quad.rel_tol == 1e-6
