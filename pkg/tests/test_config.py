import json

import pytest
from numpy.testing import assert_allclose

import robineig as rb
from robineig.errors import ParseError, ValidationError

MINIMAL = {
    "domain": {"preset": "unit_square"},
    "mesh": {"h": 0.5},
    "k_max": 4,
    "theta1": 0.0,
    "theta2": 1.0,
}


def _cfg(**overrides):
    d = dict(MINIMAL)
    d.update(overrides)
    return rb.parse_config(json.dumps(d))


# -- happy path ----------------------------------------------------------------


def test_minimal_config():
    cfg = _cfg()
    assert cfg.k_max == 4
    assert cfg.h_target == 0.5
    assert cfg.domain.n_segments == 4
    assert cfg.theta1.evaluate("bottom", 0.5) == 0.0
    assert cfg.theta2.evaluate("left", 0.2) == 1.0
    # documented defaults
    assert cfg.cluster_tol == 1e-6
    assert cfg.strict_tol == 1e-8
    assert cfg.levels == 3
    assert cfg.refinements == 0
    assert cfg.nid_grid == 50
    assert len(cfg.t_values) == 11


def test_defaults_without_mesh_block():
    cfg = rb.parse_config(json.dumps({"k_max": 2}))
    assert cfg.h_target == 0.25
    assert cfg.domain.n_segments == 4  # unit square preset
    assert cfg.theta1.evaluate("top", 0.5) == 0.0  # Neumann default
    assert cfg.theta2 is None


def test_theta_alias_for_solve_only_configs():
    cfg = rb.parse_config(json.dumps({"k_max": 3, "theta": 2.0}))
    assert cfg.theta1.evaluate("top", 0.1) == 2.0
    assert cfg.theta2 is None


def test_theta_and_theta1_conflict():
    with pytest.raises(ValidationError):
        _cfg(theta=1.0)  # MINIMAL already has theta1


def test_lshape_preset():
    cfg = _cfg(domain={"preset": "lshape"})
    assert_allclose(cfg.domain.area, 0.75)
    assert "notch" in cfg.domain.arc_labels


def test_explicit_polygon_domain():
    cfg = _cfg(domain={
        "vertices": [[0, 0], [2, 0], [2, 1], [0, 1]],
        "labels": ["s", "e", "n", "w"],
    })
    assert_allclose(cfg.domain.area, 2.0)
    assert cfg.domain.arc_labels == ("s", "e", "n", "w")


def test_per_label_theta():
    cfg = _cfg(theta2={"default": 0.0, "per_label": {"bottom": 2.0}})
    assert cfg.theta2.evaluate("bottom", 0.5) == 2.0
    assert cfg.theta2.evaluate("top", 0.5) == 0.0


def test_theta_entry_families():
    cfg = _cfg(theta2={"per_label": {
        "bottom": {"name": "linear", "a": 0.5, "b": 1.0},
        "top": {"name": "constant", "value": 3.0},
    }, "default": 0.0})
    assert_allclose(cfg.theta2.evaluate("bottom", 0.5), 1.0)
    assert cfg.theta2.evaluate("top", 0.9) == 3.0


def test_coefficient_block():
    cfg = _cfg(coefficients={"a2": {"name": "aniso_trig", "d1": 2.0, "d2": 2.0}})
    A = cfg.coefficients.a2(0.5, 0.5)
    assert A.shape == (2, 2)


def test_resolved_json_round_trips():
    cfg = _cfg(cluster_tol=1e-7)
    blob = json.loads(cfg.resolved_json())
    assert blob["cluster_tol"] == 1e-7
    assert blob["k_max"] == 4
    assert blob["mesh"]["h"] == 0.5
    # resolved config parses back to an equivalent experiment
    again = rb.parse_config(json.dumps(blob))
    assert again.k_max == cfg.k_max
    assert again.cluster_tol == cfg.cluster_tol
    assert again.h_target == cfg.h_target
    assert_allclose(again.t_values, cfg.t_values)


# -- parse errors ---------------------------------------------------------------


def test_parse_error_carries_position():
    bad = '{\n  "domain": {"preset": "unit_square"},\n  "k_max": 4,,\n}'
    with pytest.raises(ParseError) as err:
        rb.parse_config(bad)
    assert err.value.line == 3
    assert err.value.column > 0


def test_parse_error_on_non_object():
    with pytest.raises(ValidationError):
        rb.parse_config("[1, 2, 3]")  # valid JSON, wrong shape
    with pytest.raises(ParseError):
        rb.parse_config("{nope}")


# -- validation errors ------------------------------------------------------------


def test_missing_k_max():
    d = dict(MINIMAL)
    del d["k_max"]
    with pytest.raises(ValidationError) as err:
        rb.parse_config(json.dumps(d))
    assert "k_max" in str(err.value)


def test_bad_mesh_h():
    with pytest.raises(ValidationError):
        _cfg(mesh={"h": -0.5})


def test_unknown_domain_preset():
    with pytest.raises(ValidationError) as err:
        _cfg(domain={"preset": "pentagon"})
    assert "domain" in str(err.value)


def test_unknown_top_level_key():
    with pytest.raises(ValidationError):
        _cfg(mesh_h=0.5)  # typo must be caught, not ignored


def test_unknown_mesh_key():
    with pytest.raises(ValidationError):
        _cfg(mesh={"h": 0.5, "refinement": 2})


def test_per_label_typo_names_field():
    with pytest.raises(ValidationError) as err:
        _cfg(theta2={"per_label": {"botom": 1.0}})
    msg = str(err.value)
    assert "botom" in msg
    assert "bottom" in msg  # the valid labels are listed


def test_bad_k_max():
    with pytest.raises(ValidationError):
        _cfg(k_max=0)
    with pytest.raises(ValidationError):
        _cfg(k_max=2.5)


def test_bad_t_values():
    with pytest.raises(ValidationError):
        _cfg(sweep={"t_values": [0.8, 0.2]})  # not increasing
    with pytest.raises(ValidationError):
        _cfg(sweep={"t_values": [0.0, 0.5, 1.5]})  # outside [0, 1]
    with pytest.raises(ValidationError):
        _cfg(sweep={"t_values": [1.0]})  # too short


# -- randomized self-checks -------------------------------------------------------


def test_run_all_checks_passes():
    cfg = _cfg()
    results = rb.run_all_checks(cfg, seed=0)
    assert len(results) >= 8
    failed = [r.name for r in results if not r.passed]
    assert failed == []
    names = [r.name for r in results]
    assert len(set(names)) == len(names)  # check names are unique


def test_run_all_checks_deterministic():
    cfg = _cfg()
    a = rb.run_all_checks(cfg, seed=3)
    b = rb.run_all_checks(cfg, seed=3)
    assert [(r.name, r.passed, r.detail) for r in a] == \
           [(r.name, r.passed, r.detail) for r in b]
