"""Scenario files, run dispatch, and report serialization.

A scenario is a flat ``key = value`` text file (``#`` comments, dotted keys
for nested map recipes) describing one computation:

    scenario = deg-star
    geometry.p = 2
    geometry.q = 1
    map.f.kind = circle_winding
    map.f.m = 3
    map.h.kind = su2_identity

Reports serialize deterministically to JSON (stable key order, complex
numbers as [re, im] pairs) or CSV (header row; convergence tables as
resolution/re/im/delta rows).
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field

from . import __version__
from .chern import assemble_split_map, deg, deg_star, generator
from .collapse import build_collapse_map, collapse_degree
from .defaults import (COLLAPSE_RADIUS, SPLIT_DEGREE_SCALES,
                       SPLIT_DEGREE_TOL, T_MAX, T_NODES)
from .domains import ChartedSphereDomain
from .maps import compose_map_with_matrix
from .results import DegreeResult
from .superconn import (SuperBundleModel, flz_point_case, gamma_report,
                        index_report, localize)

EXIT_OK = 0
EXIT_ORACLE_MISMATCH = 2
EXIT_UNCONVERGED = 3
EXIT_CONFIG_ERROR = 64

SCENARIO_KINDS = ("deg", "deg-star", "gamma-limit", "localize",
                  "flz-point", "index-report", "verify")


class ScenarioError(ValueError):
    """Invalid scenario configuration; carries the offending field path."""


class UnconvergedError(RuntimeError):
    """A computation finished without meeting its convergence policy."""


def parse_scenario(text: str) -> dict:
    """Parse flat key = value lines into a string-to-string dict."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, val = line.split("=", 1)
        key, val = key.strip(), val.strip()
        if not key:
            raise ScenarioError(f"line {lineno}: empty key")
        if key in out:
            raise ScenarioError(f"line {lineno}: duplicate key {key!r}")
        out[key] = val
    return out


def load_scenario(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def _get_int(cfg, key, default=None):
    if key not in cfg:
        if default is None:
            raise ScenarioError(f"missing required key {key!r}")
        return default
    try:
        return int(cfg[key])
    except ValueError:
        raise ScenarioError(f"{key}: expected integer, got {cfg[key]!r}") from None


def _get_float(cfg, key, default):
    if key not in cfg:
        return default
    try:
        return float(cfg[key])
    except ValueError:
        raise ScenarioError(f"{key}: expected float, got {cfg[key]!r}") from None


def _build_generator(cfg, prefix):
    kind = cfg.get(prefix + ".kind")
    if kind is None:
        raise ScenarioError(f"missing required key {prefix + '.kind'!r}")
    size = _get_int(cfg, prefix + ".size", 2)
    m = _get_int(cfg, prefix + ".m", 1)
    try:
        return generator(kind, size=size, m=m)
    except ValueError as exc:
        raise ScenarioError(f"{prefix}.kind: {exc}") from None


def _build_product_map(cfg, p, q, radius, nodes_per_angle=None):
    """Split-form map (pr2* f) . (phi* h) or a plain phi* h pullback."""
    phi = build_collapse_map(p, q, radius=radius, nodes_per_angle=nodes_per_angle)
    h = _build_generator(cfg, "map.h")
    if "map.f.kind" in cfg:
        f = _build_generator(cfg, "map.f")
        return assemble_split_map(f, h, collapse=phi), phi.source
    return compose_map_with_matrix(phi, h), phi.source


def _degree_entry(result: DegreeResult) -> dict:
    return {
        "value": [result.value.real, result.value.imag],
        "rounded": result.rounded,
        "residual": result.residual,
        "converged": result.converged,
    }


def _conv_rows(pairs):
    rows, prev = [], None
    for scale, val in pairs:
        val = complex(val)
        delta = abs(val - prev) if prev is not None else 0.0
        rows.append([float(scale), val.real, val.imag, delta])
        prev = val
    return rows


@dataclass
class RunReport:
    """Machine-readable record of one scenario run."""

    scenario: dict
    values: dict
    convergence: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    wall_time: float = 0.0
    version: str = __version__

    @property
    def exit_code(self) -> int:
        if any(not c["converged"] for c in self.checks):
            return EXIT_UNCONVERGED
        if any(not c["passed"] for c in self.checks):
            return EXIT_ORACLE_MISMATCH
        return EXIT_OK

    def to_json(self) -> str:
        # wall_time stays off the wire so identical configs serialize
        # byte-identically; it is still available on the object.
        payload = {
            "scenario": self.scenario,
            "values": self.values,
            "convergence": self.convergence,
            "checks": self.checks,
            "version": self.version,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["section", "name", "re", "im", "extra"])
        for name in sorted(self.values):
            val = self.values[name]
            if isinstance(val, dict):
                w.writerow(["value", name, val["value"][0], val["value"][1],
                            f"rounded={val['rounded']};residual={val['residual']}"])
            elif isinstance(val, (list, tuple)):
                w.writerow(["value", name, val[0], val[1], ""])
            else:
                w.writerow(["value", name, val, "", ""])
        for name in sorted(self.convergence):
            for scale, re, im, delta in self.convergence[name]:
                w.writerow(["convergence", name, re, im,
                            f"scale={scale};delta={delta}"])
        for c in self.checks:
            w.writerow(["check", c["name"], "", "",
                        f"passed={c['passed']};converged={c['converged']}"])
        return buf.getvalue()


def _scale_nodes(base: dict | None, scale: float):
    if scale == 1.0:
        return base
    from .defaults import NODES_PER_ANGLE

    src = dict(NODES_PER_ANGLE) if base is None else dict(base)
    return {k: max(4, int(round(v * scale))) for k, v in src.items()}


def _run_deg(cfg, resolution_scale):
    m_dim = _get_int(cfg, "geometry.sphere", 1)
    dom = ChartedSphereDomain.sphere(
        m_dim, nodes_per_angle=_scale_nodes(None, resolution_scale))
    g = _build_generator(cfg, "map")
    result = deg(g, dom)
    if not result.converged:
        raise UnconvergedError(f"deg did not converge: {result}")
    return (
        {"deg": _degree_entry(result)},
        {"deg": _conv_rows(result.convergence)},
        [{"name": "deg integral quantizes", "passed": result.accepted,
          "converged": result.converged}],
    )


def _boundary_geometry(cfg, resolution_scale):
    p = _get_int(cfg, "geometry.p", 2)
    q = _get_int(cfg, "geometry.q", 1)
    radius = _get_float(cfg, "geometry.collapse_radius", COLLAPSE_RADIUS)
    nodes = _scale_nodes(None, resolution_scale)
    return p, q, radius, nodes


def _run_deg_star(cfg, resolution_scale):
    p, q, radius, nodes = _boundary_geometry(cfg, resolution_scale)
    g, dom = _build_product_map(cfg, p, q, radius, nodes)
    result = deg_star(g, dom, scales=SPLIT_DEGREE_SCALES, tol=SPLIT_DEGREE_TOL)
    if not result.converged:
        raise UnconvergedError(f"deg_star did not converge: {result}")
    values = {"deg_star": _degree_entry(result)}
    checks = [{"name": "deg* integral quantizes", "passed": result.accepted,
               "converged": result.converged}]
    if "map.f.kind" in cfg:
        # Splitting oracle: deg*(pr2* f . phi* h) should equal deg(h) over
        # the collapse target sphere.
        h = _build_generator(cfg, "map.h")
        h_dom = ChartedSphereDomain.sphere(p + q, nodes_per_angle=nodes)
        oracle = deg(h, h_dom)
        values["deg_h_oracle"] = _degree_entry(oracle)
        checks.append({
            "name": "splitting matches deg(h) oracle",
            "passed": oracle.accepted and oracle.rounded == result.rounded,
            "converged": oracle.converged,
        })
    return values, {"deg_star": _conv_rows(result.convergence)}, checks


def _build_model(cfg, resolution_scale):
    p, q, radius, nodes = _boundary_geometry(cfg, resolution_scale)
    g, dom = _build_product_map(cfg, p, q, radius, nodes)
    model = SuperBundleModel(dom.at_scale(SPLIT_DEGREE_SCALES[-1]), g,
                             unitarized=False)
    model.degree_star(scales=SPLIT_DEGREE_SCALES, tol=SPLIT_DEGREE_TOL)
    return model, (p, q)


def _run_gamma_limit(cfg, resolution_scale):
    model, _ = _build_model(cfg, resolution_scale)
    t_nodes = _get_int(cfg, "gamma.t_nodes", T_NODES)
    T_final = _get_float(cfg, "gamma.T", T_MAX)
    rep = gamma_report(model, T_values=(T_final / 4, T_final / 2, T_final),
                       t_nodes=t_nodes)
    ds = rep.deg_star_value
    n = model.n
    expected = (-1.0) ** n * ds.rounded
    values = {
        "gamma_limit": [rep.extrapolated_limit.real, rep.extrapolated_limit.imag],
        "gamma_closed_form": [rep.closed_form_value.real,
                              rep.closed_form_value.imag],
        "deg_star": _degree_entry(ds),
        "two_path_gap": rep.two_path_gap,
    }
    convergence = {
        "gamma_vs_T": _conv_rows(zip(rep.T_values, rep.boundary_integrals)),
        "gamma_vs_resolution": _conv_rows(rep.convergence),
        "deg_star": _conv_rows(ds.convergence),
    }
    checks = [
        {"name": "two gamma paths agree", "passed": rep.two_path_gap < 1e-7,
         "converged": ds.converged},
        {"name": "gamma limit equals (-1)^n deg*",
         "passed": abs(rep.extrapolated_limit - expected) < 1e-4,
         "converged": ds.converged},
    ]
    return values, convergence, checks


def _run_localize(cfg, resolution_scale):
    model, _ = _build_model(cfg, resolution_scale)
    rep = localize([model], n=model.n, t_nodes=_get_int(cfg, "gamma.t_nodes", T_NODES))
    values = {
        "localized_value": [rep.value.real, rep.value.imag],
        "gamma_path": [rep.gamma_path.real, rep.gamma_path.imag],
        "agreement": rep.agreement,
    }
    convergence = {
        "deg_star": _conv_rows(rep.per_model[0]["deg_star"].convergence),
    }
    checks = [{"name": "degree path equals gamma path",
               "passed": rep.consistent, "converged": True}]
    return values, convergence, checks


def _run_flz_point(cfg, resolution_scale):
    n = _get_int(cfg, "geometry.n", 1)
    dom = ChartedSphereDomain.sphere(
        2 * n - 1, nodes_per_angle=_scale_nodes(None, resolution_scale))
    v = _build_generator(cfg, "map")
    rep = flz_point_case(v, dom, n)
    values = {
        "point_contribution": [rep.value.real, rep.value.imag],
        "deg": _degree_entry(rep.degree),
    }
    checks = [{"name": "point case quantizes", "passed": rep.degree.accepted,
               "converged": rep.degree.converged}]
    return values, {"deg": _conv_rows(rep.degree.convergence)}, checks


def _run_index_report(cfg, resolution_scale):
    model, _ = _build_model(cfg, resolution_scale)
    value = index_report([model], n=model.n)
    ds = model.degree_star()
    values = {
        "index": [value.real, value.imag],
        "deg_star": _degree_entry(ds),
    }
    checks = [{"name": "index integral quantizes", "passed": ds.accepted,
               "converged": ds.converged}]
    return values, {"deg_star": _conv_rows(ds.convergence)}, checks


def _run_verify(cfg, resolution_scale, seed=0):
    from .verify import run_all_checks

    names = [s.strip() for s in cfg.get("verify.only", "").split(",") if s.strip()]
    results = run_all_checks(only=names or None, seed=seed)
    values = {r["name"]: r.get("detail", "") for r in results}
    checks = [{"name": r["name"], "passed": r["passed"],
               "converged": r.get("converged", True)} for r in results]
    return values, {}, checks


_DISPATCH = {
    "deg": _run_deg,
    "deg-star": _run_deg_star,
    "gamma-limit": _run_gamma_limit,
    "localize": _run_localize,
    "flz-point": _run_flz_point,
    "index-report": _run_index_report,
}


def run(cfg: dict, resolution_scale: float = 1.0, seed: int = 0) -> RunReport:
    """Dispatch a parsed scenario and assemble its report."""
    kind = cfg.get("scenario")
    if kind not in SCENARIO_KINDS:
        raise ScenarioError(
            f"scenario: expected one of {', '.join(SCENARIO_KINDS)}, got {kind!r}")
    start = time.time()
    if kind == "verify":
        values, convergence, checks = _run_verify(cfg, resolution_scale, seed)
    else:
        values, convergence, checks = _DISPATCH[kind](cfg, resolution_scale)
    echo = dict(cfg)
    echo["effective.resolution_scale"] = repr(resolution_scale)
    echo["effective.seed"] = repr(seed)
    return RunReport(
        scenario=echo,
        values=values,
        convergence=convergence,
        checks=checks,
        wall_time=time.time() - start,
    )


def emit_report(report: RunReport, out_path=None, fmt: str = "json") -> str:
    """Serialize a report; writes to out_path when given, always returns text."""
    if fmt == "json":
        text = report.to_json()
    elif fmt == "csv":
        text = report.to_csv()
    else:
        raise ScenarioError(f"format: expected json or csv, got {fmt!r}")
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
