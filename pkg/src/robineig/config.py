"""Experiment configuration: JSON schema, validation and presets.

A config names a domain (preset or explicit polygon), a mesh size, interior
coefficients from the catalog, one or two boundary coefficients and the
spectral parameters.  parse_config fills defaults and returns both the built
objects and a fully-resolved plain dict for reproducible re-emission.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .coeffs import (
    EllipticCoefficients,
    RobinCoefficient,
    coefficients_from_config,
    robin_from_config,
)
from .errors import ParseError, ValidationError
from .geometry import PolygonalDomain, build_polygon

PRESETS = {
    "unit_square": {
        "vertices": [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        "labels": ["bottom", "right", "top", "left"],
    },
    "lshape": {
        "vertices": [
            [0.0, 0.0], [1.0, 0.0], [1.0, 0.5],
            [0.5, 0.5], [0.5, 1.0], [0.0, 1.0],
        ],
        "labels": ["bottom", "right", "notch", "notch", "top", "left"],
    },
}

_TOP_KEYS = {
    "domain", "mesh", "coefficients", "theta", "theta1", "theta2",
    "k_max", "cluster_tol", "strict_tol", "sweep", "nid_grid",
}

_ROBIN_ENTRY_NAMES = {"constant", "linear", "trig", "bump"}


@dataclass(frozen=True)
class ExperimentConfig:
    domain: PolygonalDomain
    h_target: float
    refinements: int
    levels: int
    k_max: int
    coefficients: EllipticCoefficients
    theta1: RobinCoefficient
    theta2: RobinCoefficient | None
    cluster_tol: float
    strict_tol: float
    t_values: np.ndarray
    nid_grid: int
    resolved: dict = field(repr=False)

    def resolved_json(self) -> str:
        return json.dumps(self.resolved, indent=2, sort_keys=True) + "\n"


def _require(cond: bool, fieldname: str, message: str) -> None:
    if not cond:
        raise ValidationError(fieldname, message)


def _check_robin_value(value: Any, fieldname: str, domain_labels: set) -> Any:
    """Validate one boundary-coefficient config value; return resolved form."""
    if isinstance(value, bool):
        raise ValidationError(fieldname, "must be a number or mapping")
    if isinstance(value, (int, float)):
        return float(value)
    _require(isinstance(value, dict), fieldname, "must be a number or mapping")
    out: dict[str, Any] = {}
    for key in value:
        _require(key in {"default", "per_label", "bound"}, f"{fieldname}.{key}",
                 "unknown field")

    def check_entry(entry, where):
        if isinstance(entry, (int, float)) and not isinstance(entry, bool):
            return float(entry)
        _require(isinstance(entry, dict), where, "must be a number or mapping")
        name = entry.get("name", "constant")
        _require(name in _ROBIN_ENTRY_NAMES, where,
                 f"unknown entry '{name}' (choose from {sorted(_ROBIN_ENTRY_NAMES)})")
        if name == "constant":
            _require("value" in entry, where, "constant entry needs 'value'")
        return dict(entry)

    if "default" in value:
        out["default"] = check_entry(value["default"], f"{fieldname}.default")
    per = value.get("per_label", {})
    _require(isinstance(per, dict), f"{fieldname}.per_label", "must be a mapping")
    if per:
        out["per_label"] = {}
        for label, entry in per.items():
            _require(label in domain_labels, f"{fieldname}.per_label.{label}",
                     f"label not on the domain boundary (have {sorted(domain_labels)})")
            out["per_label"][label] = check_entry(entry, f"{fieldname}.per_label.{label}")
    if "default" not in value and not per:
        raise ValidationError(fieldname, "needs 'default' and/or 'per_label'")
    if "bound" in value:
        out["bound"] = float(value["bound"])
    return out


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON config; fill documented defaults.

    Raises ParseError (with line/column) for malformed JSON, ValidationError
    (naming the offending field) for schema violations.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno, column=exc.colno,
        ) from exc
    _require(isinstance(raw, dict), "<root>", "config must be a JSON object")
    for key in raw:
        _require(key in _TOP_KEYS, key, "unknown field")

    # domain
    dom_cfg = raw.get("domain", {"preset": "unit_square"})
    _require(isinstance(dom_cfg, dict), "domain", "must be a mapping")
    if "preset" in dom_cfg:
        name = dom_cfg["preset"]
        _require(name in PRESETS, "domain.preset",
                 f"unknown preset '{name}' (have {sorted(PRESETS)})")
        dom_resolved = {"preset": name, **PRESETS[name]}
    else:
        _require("vertices" in dom_cfg and "labels" in dom_cfg, "domain",
                 "needs either 'preset' or 'vertices' + 'labels'")
        dom_resolved = {
            "vertices": [[float(x), float(y)] for x, y in dom_cfg["vertices"]],
            "labels": [str(s) for s in dom_cfg["labels"]],
        }
    domain = build_polygon(dom_resolved["vertices"], dom_resolved["labels"])
    labels = set(domain.arc_labels)

    # mesh
    mesh_cfg = raw.get("mesh", {})
    _require(isinstance(mesh_cfg, dict), "mesh", "must be a mapping")
    for key in mesh_cfg:
        _require(key in {"h", "refinements", "levels"}, f"mesh.{key}", "unknown field")
    h = float(mesh_cfg.get("h", 0.25))
    _require(h > 0, "mesh.h", "must be positive")
    refinements = int(mesh_cfg.get("refinements", 0))
    _require(refinements >= 0, "mesh.refinements", "must be nonnegative")
    levels = int(mesh_cfg.get("levels", 3))
    _require(levels >= 1, "mesh.levels", "must be at least 1")

    # spectral parameters
    _require("k_max" in raw, "k_max", "required")
    k_max = raw["k_max"]
    _require(isinstance(k_max, int) and k_max >= 1, "k_max",
             "must be a positive integer")
    cluster_tol = float(raw.get("cluster_tol", 1e-6))
    _require(cluster_tol > 0, "cluster_tol", "must be positive")
    strict_tol = float(raw.get("strict_tol", 1e-8))
    _require(strict_tol > 0, "strict_tol", "must be positive")
    nid_grid = int(raw.get("nid_grid", 50))
    _require(nid_grid >= 0, "nid_grid", "must be nonnegative")

    # interior coefficients
    coeff_cfg = raw.get("coefficients", {"name": "laplacian"})
    _require(isinstance(coeff_cfg, dict), "coefficients", "must be a mapping")
    try:
        coefficients = coefficients_from_config(coeff_cfg)
    except KeyError as exc:
        raise ValidationError("coefficients", str(exc.args[0])) from exc

    # boundary coefficients;  "theta" is an alias for "theta1"
    _require(not ("theta" in raw and "theta1" in raw), "theta",
             "give either 'theta' or 'theta1', not both")
    theta1_raw = raw.get("theta1", raw.get("theta", 0.0))
    theta1_resolved = _check_robin_value(theta1_raw, "theta1", labels)
    theta1 = robin_from_config(theta1_resolved)
    theta2 = None
    theta2_resolved = None
    if "theta2" in raw:
        theta2_resolved = _check_robin_value(raw["theta2"], "theta2", labels)
        theta2 = robin_from_config(theta2_resolved)

    # sweep grid
    sweep_cfg = raw.get("sweep", {})
    _require(isinstance(sweep_cfg, dict), "sweep", "must be a mapping")
    for key in sweep_cfg:
        _require(key in {"num_t", "t_values"}, f"sweep.{key}", "unknown field")
    if "t_values" in sweep_cfg:
        t_values = np.asarray([float(t) for t in sweep_cfg["t_values"]])
        _require(len(t_values) >= 2, "sweep.t_values", "need at least two values")
        _require(
            bool(np.all(t_values >= 0) and np.all(t_values <= 1)
                 and np.all(np.diff(t_values) > 0)),
            "sweep.t_values", "must be strictly increasing within [0, 1]",
        )
    else:
        num_t = int(sweep_cfg.get("num_t", 11))
        _require(num_t >= 2, "sweep.num_t", "must be at least 2")
        t_values = np.linspace(0.0, 1.0, num_t)

    resolved = {
        "domain": dom_resolved,
        "mesh": {"h": h, "refinements": refinements, "levels": levels},
        "coefficients": coeff_cfg if coeff_cfg else {"name": "laplacian"},
        "theta1": theta1_resolved,
        "k_max": k_max,
        "cluster_tol": cluster_tol,
        "strict_tol": strict_tol,
        "sweep": {"t_values": [float(t) for t in t_values]},
        "nid_grid": nid_grid,
    }
    if theta2_resolved is not None:
        resolved["theta2"] = theta2_resolved

    return ExperimentConfig(
        domain=domain,
        h_target=h,
        refinements=refinements,
        levels=levels,
        k_max=k_max,
        coefficients=coefficients,
        theta1=theta1,
        theta2=theta2,
        cluster_tol=cluster_tol,
        strict_tol=strict_tol,
        t_values=t_values,
        nid_grid=nid_grid,
        resolved=resolved,
    )
