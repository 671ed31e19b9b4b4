"""Command-line front end: run a named verification scenario and emit a report.

Exit status is 0 when every verdict passes, 2 when some verdict fails and 1
on usage or configuration errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import cech, geometry, maurer_cartan, obstructions
from .geometry import STRIP, TetraCover, area_form, bump_form, degree_map, surface_integral
from .lie_core import REALS, SU2_MODEL, TAU_CENTER, Real, Sign
from .obstructions import (
    DEFAULT_SIGNS,
    PrequantizationSpec,
    SignConventions,
    verify_theorem1,
)

SCENARIOS = ("prequantization", "so3-clutching", "functoriality", "mc-selftest", "cech-selftest", "calibration")


class UnknownScenario(ValueError):
    pass


class ConfigInvalid(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    scenario: str = "prequantization"
    grid: int = 400
    steps: int = 2048
    flat_tol: float = maurer_cartan.FLAT_TOL
    center_tol: float = TAU_CENTER
    tol: float = 1e-2
    degree: int = 2
    area: float = 4 * math.pi
    winding: int = 1
    format: str = "json"
    out: str | None = None
    signs: str | None = None
    timings: bool = True

    def validate(self):
        if self.scenario not in SCENARIOS:
            raise UnknownScenario(f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}")
        if self.grid < 16 or self.steps < 16:
            raise ConfigInvalid("grid sizes must be at least 16")
        if min(self.flat_tol, self.center_tol, self.tol) <= 0:
            raise ConfigInvalid("tolerances must be positive")
        if self.degree < 0:
            raise ConfigInvalid("degree must be non-negative")
        if self.format not in ("json", "text"):
            raise ConfigInvalid(f"unknown format {self.format!r}")
        return self

    def load_signs(self):
        if self.signs is None or self.scenario == "calibration":
            return DEFAULT_SIGNS
        return SignConventions.from_json(Path(self.signs).read_text())


def _rel_close(value, expected, rtol, atol=1e-8):
    return bool(abs(value - expected) <= rtol * abs(expected) + atol)


def _report_doc(config, report=None, residuals=None, verdicts=None, timings=None, extra=None):
    doc = {
        "scenario": config.scenario,
        # the destination is not part of the computation
        "config": {k: v for k, v in asdict(config).items() if k != "out"},
        "obstructions": {"mackenzie": None, "crainic_fernandes": None, "meinrenken": None},
        "residuals": dict(residuals or {}),
        "verdicts": dict(verdicts or {}),
        "timings": dict(timings or {}) if config.timings else {},
    }
    if report is not None:
        doc["obstructions"] = report.obstructions()
        doc["residuals"].update(report.residuals)
        doc["grid"] = dict(report.grid)
        doc["theorem1_identity"] = report.theorem1_identity
        if config.timings:
            doc["timings"].update(report.timings)
    if extra:
        doc.update(extra)
    return doc


# ---------------------------------------------------------------------------
# scenarios


def _prequantization(config, signs):
    c = config.area
    spec = PrequantizationSpec(area_form(c / (4 * math.pi)))
    rep = verify_theorem1(spec, config.grid, config.steps, rtol=config.tol, center_tol=config.center_tol, signs=signs)
    verdicts = {
        "theorem1_identity": rep.theorem1_identity,
        "mackenzie_equals_area": _rel_close(rep.mackenzie_pairing.value, c, config.tol),
        "cf_equals_minus_area": _rel_close(rep.cf_monodromy.value, -c, config.tol),
        "clutching_equals_minus_area": _rel_close(rep.clutching.value, -c, config.tol),
    }
    return _report_doc(config, rep, verdicts=verdicts)


def _so3(config, signs):
    spec = obstructions.so3_clutching_spec(config.winding)
    rep = verify_theorem1(spec, config.grid, config.steps, rtol=config.tol, center_tol=config.center_tol, signs=signs)
    expected = Sign(-1 if config.winding % 2 else 1)
    verdicts = {
        "theorem1_identity": rep.theorem1_identity,
        "mackenzie_sign": rep.mackenzie_pairing == expected,
        "clutching_sign": rep.clutching == expected,
    }
    return _report_doc(config, rep, verdicts=verdicts)


def _functoriality(config, signs):
    d = config.degree
    base = PrequantizationSpec(area_form(config.area / (4 * math.pi)))
    spec = obstructions.pullback_spec(base, d)
    rep = verify_theorem1(spec, config.grid, config.steps, rtol=config.tol, center_tol=config.center_tol, signs=signs)
    c = config.area
    verdicts = {
        "theorem1_identity": rep.theorem1_identity,
        "mackenzie_scales_by_degree": _rel_close(rep.mackenzie_pairing.value, d * c, config.tol),
        "cf_scales_by_degree": _rel_close(rep.cf_monodromy.value, -d * c, config.tol),
        "clutching_scales_by_degree": _rel_close(rep.clutching.value, -d * c, config.tol),
    }
    return _report_doc(config, rep, verdicts=verdicts, extra={"degree": d})


def _mc_selftest(config, signs):
    t0 = time.perf_counter()
    n = config.steps
    b3 = geometry.OneFormField(lambda p: np.broadcast_to([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0]], p.shape[:-1] + (2, 3)), STRIP, 3)
    loop = maurer_cartan.PathSample.from_function(geometry.PolarCover().equator, n, STRIP)
    su2_loop = maurer_cartan.loop_monodromy(b3, loop, SU2_MODEL)
    c = config.area
    line = geometry.OneFormField(lambda p: np.broadcast_to([[c / (2 * math.pi)], [0.0]], p.shape[:-1] + (2, 1)), STRIP, 1)
    real_loop = maurer_cartan.loop_monodromy(line, loop, REALS)

    rng = np.random.default_rng(0)
    worst = 0.0
    model = SU2_MODEL
    for _ in range(100):
        A, B, v, p = rng.normal(size=(4, 3))
        f1 = lambda x, A=A: model.exp(x[0] * A + 0.3 * x[1] * A[::-1])
        f2 = lambda x, B=B: model.exp(x[1] * B - 0.2 * x[0] * B[::-1])
        prod = lambda x: model.mul(f1(x), f2(x))
        pt, dv = p[:2], v[:2]
        lhs = maurer_cartan.darboux_derivative(prod, pt, dv, model)
        rhs = maurer_cartan.darboux_derivative(f1, pt, dv, model) + model.Ad(f1(pt), maurer_cartan.darboux_derivative(f2, pt, dv, model))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    residuals = {
        "su2_equator_loop_vs_minus_identity": float(np.max(np.abs(su2_loop + np.eye(2)))),
        "real_equator_loop_vs_area": float(abs(real_loop[0, 0] - c)),
        "product_formula": worst,
    }
    verdicts = {
        "su2_equator_loop": residuals["su2_equator_loop_vs_minus_identity"] < 1e-6,
        "real_equator_loop": residuals["real_equator_loop_vs_area"] < 1e-6,
        "product_formula": worst < 1e-6,
    }
    return _report_doc(config, residuals=residuals, verdicts=verdicts, timings={"selftest": time.perf_counter() - t0})


def _cech_selftest(config, signs):
    t0 = time.perf_counter()
    cover = TetraCover()
    rng = np.random.default_rng(0)
    psi = cech.OrderedCochain1({p: (lambda x, v=Real(float(rng.normal())): v) for p in cover.nonempty(1)}, cover)
    wide = TetraCover(margin=1.7, n_samples=4000)
    psi_wide = cech.OrderedCochain1({p: (lambda x, v=Real(float(rng.normal())): v) for p in wide.nonempty(1)}, wide)
    _, delta_sq = cech.is_cocycle(cech.coboundary(psi_wide))
    killed = cech.fundamental_pairing(cech.coboundary(psi)).value
    residuals = {"delta_squared": delta_sq, "pairing_of_coboundary": abs(killed)}
    verdicts = {"delta_squared_zero": delta_sq < 1e-12, "pairing_kills_coboundaries": abs(killed) < 1e-12}
    forms = {"area": area_form(config.area / (4 * math.pi)), "bump": bump_form(total=1.0)}
    forms["sum"] = forms["area"] + forms["bump"]
    for name, om in forms.items():
        spec = PrequantizationSpec(om)
        pairing = obstructions.mackenzie_pairing(spec, config.steps, signs, cover).value
        direct = surface_integral(degree_map(1), om, config.grid)
        residuals[f"pairing_vs_integral_{name}"] = abs(pairing - direct) / abs(direct)
        verdicts[f"pairing_matches_integral_{name}"] = residuals[f"pairing_vs_integral_{name}"] < config.tol
    return _report_doc(config, residuals=residuals, verdicts=verdicts, timings={"selftest": time.perf_counter() - t0})


def _calibration(config, signs):
    t0 = time.perf_counter()
    found = obstructions.calibrate(config.grid, config.steps)
    if config.signs is not None:
        Path(config.signs).write_text(found.to_json(config.tol) + "\n")
    verdicts = {"matches_frozen_defaults": found == DEFAULT_SIGNS}
    return _report_doc(
        config,
        verdicts=verdicts,
        timings={"calibration": time.perf_counter() - t0},
        extra={"signs": asdict(found)},
    )


_RUNNERS = {
    "prequantization": _prequantization,
    "so3-clutching": _so3,
    "functoriality": _functoriality,
    "mc-selftest": _mc_selftest,
    "cech-selftest": _cech_selftest,
    "calibration": _calibration,
}


def run_scenario(config: RunConfig):
    """Run the configured scenario and return its report document (a dict)."""
    config.validate()
    return _RUNNERS[config.scenario](config, config.load_signs())


def all_pass(doc):
    return all(bool(v) for v in doc["verdicts"].values())


# ---------------------------------------------------------------------------
# serialization


def _round(obj):
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.12g}")
    return obj


def emit(doc, fmt="json"):
    """Serialize a report document deterministically."""
    if fmt == "json":
        return (json.dumps(_round(doc), sort_keys=True, indent=2) + "\n").encode()
    if fmt != "text":
        raise ConfigInvalid(f"unknown format {fmt!r}")
    doc = _round(doc)
    rows = [("scenario", doc["scenario"])]
    rows += [(f"obstruction.{k}", v) for k, v in sorted(doc["obstructions"].items())]
    if "theorem1_identity" in doc:
        rows.append(("theorem1_identity", doc["theorem1_identity"]))
    rows += [(f"residual.{k}", v) for k, v in sorted(doc["residuals"].items())]
    rows += [(f"verdict.{k}", "PASS" if v else "FAIL") for k, v in sorted(doc["verdicts"].items())]
    rows += [(f"timing.{k}", v) for k, v in sorted(doc["timings"].items())]
    width = max(len(k) for k, _ in rows)
    return ("\n".join(f"{k:<{width}}  {'-' if v is None else v}" for k, v in rows) + "\n").encode()


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    p = argparse.ArgumentParser(prog="algebroid-obstructions", description=__doc__.splitlines()[0])
    p.add_argument("--scenario", default="prequantization", help=f"one of: {', '.join(SCENARIOS)}")
    p.add_argument("--grid", type=int, default=400, help="surface grid size n")
    p.add_argument("--steps", type=int, default=2048, help="path integration steps")
    p.add_argument("--degree", type=int, default=2, help="pullback degree for functoriality")
    p.add_argument("--area", type=float, default=4 * math.pi, help="total integral of the area form")
    p.add_argument("--winding", type=int, default=1, help="winding of the SO(3) clutching loop")
    p.add_argument("--tol", type=float, default=1e-2, help="relative acceptance tolerance")
    p.add_argument("--flat-tol", type=float, default=maurer_cartan.FLAT_TOL)
    p.add_argument("--center-tol", type=float, default=TAU_CENTER)
    p.add_argument("--format", default="json", choices=("json", "text"))
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.add_argument("--signs", default=None, help="sign calibration file (written by the calibration scenario)")
    p.add_argument("--no-timings", action="store_true", help="omit wall-clock timings for byte-identical output")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    config = RunConfig(
        scenario=args.scenario,
        grid=args.grid,
        steps=args.steps,
        flat_tol=args.flat_tol,
        center_tol=args.center_tol,
        tol=args.tol,
        degree=args.degree,
        area=args.area,
        winding=args.winding,
        format=args.format,
        out=args.out,
        signs=args.signs,
        timings=not args.no_timings,
    )
    try:
        doc = run_scenario(config)
    except (UnknownScenario, ConfigInvalid, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    data = emit(doc, config.format)
    if config.out:
        Path(config.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
    return 0 if all_pass(doc) else 2


if __name__ == "__main__":
    sys.exit(main())
