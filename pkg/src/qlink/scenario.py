"""Declarative channel scenarios: parsing, evaluation, and flattening of the
resulting report for output.

A scenario file is a UTF-8 JSON object::

    {
      "name": "proxima_xray",
      "test_photon": {"energy": "100 keV", "pulse": {"peak": "600 THz", "width": "7 MHz"}},
      "segments": [{"label": "ism", "length": "1.3 pc", "environments": ["ism_electrons"]}],
      "gravity_legs": [{"body": "sun", "r_emit": "4e13 km", "r_receive": "1e8 km"}],
      "teleport_trials": {"count": 1000, "seed": 7}
    }

Unknown keys anywhere are rejected with their key path.
"""

from __future__ import annotations

import copy
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from . import environments as env
from .environments import ParticlePopulation, RadiationBackground
from .errors import CatalogError, InputError, ParseError, ValidationError
from .gravity import (BODIES, FidelityReport, GaussianPulse, SchwarzschildBody, coherence_status,
                      fidelity_report, max_coherent_path)
from .propagation import LinkBudgetReport, PathSegment, link_budget
from .quadrature import DEFAULT_QUADRATURE, QuadratureSpec
from .quantities import Quantity, as_quantity, convert, photon_energy
from .teleport import BellKind, TrialSummary, run_trials
from .xsec import SPECIES, AngleModel

TOP_KEYS = {"name", "test_photon", "segments", "gravity_legs", "teleport_trials", "options"}
COUPLING_NOTE = ("model choice: teleport dephasing p = 1 - (1 - dephase_p) * survival; "
                 "disable with couple_survival=false")


# -- parsing ---------------------------------------------------------------------

def _check_keys(obj, path, allowed, required=()):
    if not isinstance(obj, dict):
        raise ValidationError(f"{path or '<root>'}: expected an object")
    for key in obj:
        if key not in allowed:
            raise ValidationError(f"unknown key {_join(path, key)!r}")
    for key in required:
        if key not in obj:
            raise ValidationError(f"missing required key {_join(path, key)!r}")


def _join(path, key):
    return f"{path}.{key}" if path else key


def _quantity(value, path, unit):
    """Parse a quantity field and check it has the dimension of ``unit``."""
    try:
        return convert(as_quantity(value), unit)
    except InputError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def _number(value, path, kind=float, lo=None, hi=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{path}: expected a number")
    if kind is int and int(value) != value:
        raise ValidationError(f"{path}: expected an integer")
    v = kind(value)
    if (lo is not None and v < lo) or (hi is not None and v > hi):
        raise ValidationError(f"{path}: {v} outside [{lo}, {hi}]")
    return v


def _string(value, path):
    if not isinstance(value, str):
        raise ValidationError(f"{path}: expected a string")
    return value


@dataclass(frozen=True)
class PhotonSpec:
    energy: Quantity
    pulse: GaussianPulse | None = None


@dataclass(frozen=True)
class GravityLeg:
    body: SchwarzschildBody
    r_emit: Quantity
    r_receive: Quantity
    closest_approach: Quantity | None = None
    path_length: Quantity | None = None
    motion_factor: bool = False


@dataclass(frozen=True)
class TeleportTrials:
    count: int
    seed: int | None = None
    dephase_p: float = 0.0
    couple_survival: bool = True
    shared: BellKind = BellKind.PsiMinus


@dataclass(frozen=True)
class Scenario:
    name: str
    test_photon: PhotonSpec
    segments: tuple = ()
    gravity_legs: tuple = ()
    teleport_trials: TeleportTrials | None = None
    angle_model: AngleModel = AngleModel()
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE
    raw: dict = field(default=None, compare=False, repr=False)


def _parse_pulse(obj, path):
    _check_keys(obj, path, {"peak", "width"}, ("peak", "width"))
    try:
        return GaussianPulse(as_quantity(obj["peak"]), as_quantity(obj["width"]))
    except InputError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def _parse_test_photon(obj, path="test_photon"):
    _check_keys(obj, path, {"energy", "pulse"})
    if "energy" not in obj and "pulse" not in obj:
        raise ValidationError(f"{path}: give an energy, a pulse, or both")
    pulse = _parse_pulse(obj["pulse"], _join(path, "pulse")) if "pulse" in obj else None
    if "energy" in obj:
        try:
            energy = convert(photon_energy(as_quantity(obj["energy"])), "eV")
        except InputError as exc:
            raise ValidationError(f"{_join(path, 'energy')}: {exc}") from None
    elif pulse.peak.dimension == "energy":
        energy = convert(pulse.peak, "eV")
    else:
        energy = convert(photon_energy(pulse.peak), "eV")
    return PhotonSpec(energy, pulse)


def _parse_species(value, path):
    name = _string(value, path)
    if name not in SPECIES:
        raise ValidationError(f"{path}: unknown species {name!r}; known: {', '.join(SPECIES)}")
    return SPECIES[name]


def _parse_environment(item, path):
    if isinstance(item, str):
        try:
            return env.lookup(item)
        except CatalogError as exc:
            raise CatalogError(f"{path}: {exc}") from None
    _check_keys(item, path, {"name", "species", "density", "flux"}, ("name", "species"))
    if ("density" in item) == ("flux" in item):
        raise ValidationError(f"{path}: give exactly one of density, flux")
    kw = {}
    if "density" in item:
        kw["density"] = _quantity(item["density"], _join(path, "density"), "cm^-3")
    else:
        kw["flux"] = _quantity(item["flux"], _join(path, "flux"), "cm^-2 s^-1")
    try:
        return ParticlePopulation(_string(item["name"], _join(path, "name")),
                                  _parse_species(item["species"], _join(path, "species")), **kw)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def _parse_segment(obj, path):
    _check_keys(obj, path, {"label", "length", "environments", "mfp_overrides"}, ("length",))
    label = _string(obj.get("label", path), _join(path, "label"))
    length = _quantity(obj["length"], _join(path, "length"), "m")
    pops, bgs = [], []
    envs = obj.get("environments", [])
    if not isinstance(envs, list):
        raise ValidationError(f"{_join(path, 'environments')}: expected a list")
    for i, item in enumerate(envs):
        e = _parse_environment(item, f"{path}.environments[{i}]")
        (bgs if isinstance(e, RadiationBackground) else pops).append(e)
    overrides = []
    ovs = obj.get("mfp_overrides", [])
    if not isinstance(ovs, list):
        raise ValidationError(f"{_join(path, 'mfp_overrides')}: expected a list")
    for i, ov in enumerate(ovs):
        p = f"{path}.mfp_overrides[{i}]"
        _check_keys(ov, p, {"label", "mfp"}, ("label", "mfp"))
        overrides.append((_string(ov["label"], _join(p, "label")),
                          _quantity(ov["mfp"], _join(p, "mfp"), "m")))
    try:
        return PathSegment(label, length, pops, bgs, overrides)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def _parse_body(value, path):
    if isinstance(value, str):
        if value not in BODIES:
            raise CatalogError(f"{path}: unknown body {value!r}; known: {', '.join(BODIES)}")
        return BODIES[value]
    _check_keys(value, path, {"name", "schwarzschild_radius"}, ("name", "schwarzschild_radius"))
    rs = _quantity(value["schwarzschild_radius"], _join(path, "schwarzschild_radius"), "m")
    try:
        return SchwarzschildBody(_string(value["name"], _join(path, "name")), rs)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def _parse_leg(obj, path):
    _check_keys(obj, path, {"body", "r_emit", "r_receive", "closest_approach", "path_length",
                            "motion_factor"}, ("body", "r_emit", "r_receive"))
    body = _parse_body(obj["body"], _join(path, "body"))
    q = lambda k: _quantity(obj[k], _join(path, k), "m") if k in obj else None
    motion = obj.get("motion_factor", False)
    if not isinstance(motion, bool):
        raise ValidationError(f"{_join(path, 'motion_factor')}: expected true or false")
    return GravityLeg(body, q("r_emit"), q("r_receive"), q("closest_approach"),
                      q("path_length"), motion)


def _parse_trials(obj, path="teleport_trials"):
    _check_keys(obj, path, {"count", "seed", "dephase_p", "couple_survival", "shared"}, ("count",))
    count = _number(obj["count"], _join(path, "count"), int, 1, 10_000_000)
    seed = obj.get("seed")
    if seed is not None:
        seed = _number(seed, _join(path, "seed"), int, 0)
    p = _number(obj.get("dephase_p", 0.0), _join(path, "dephase_p"), float, 0.0, 1.0)
    couple = obj.get("couple_survival", True)
    if not isinstance(couple, bool):
        raise ValidationError(f"{_join(path, 'couple_survival')}: expected true or false")
    shared = BellKind.parse(_string(obj.get("shared", "PsiMinus"), _join(path, "shared")))
    return TeleportTrials(count, seed, p, couple, shared)


def _parse_options(obj, path="options"):
    _check_keys(obj, path, {"angle_model", "quadrature_method", "rtol", "solid_angle_factor"})
    angle = AngleModel.parse(_string(obj.get("angle_model", "isotropic_mean"),
                                     _join(path, "angle_model")))
    quad = QuadratureSpec(
        method=_string(obj.get("quadrature_method", DEFAULT_QUADRATURE.method),
                       _join(path, "quadrature_method")),
        rtol=_number(obj.get("rtol", DEFAULT_QUADRATURE.rtol), _join(path, "rtol"), float, 1e-14, 0.1),
        solid_angle_factor=_number(obj.get("solid_angle_factor", DEFAULT_QUADRATURE.solid_angle_factor),
                                   _join(path, "solid_angle_factor"), float, 0.0),
    )
    return angle, quad


def _list(obj, key):
    value = obj.get(key, [])
    if not isinstance(value, list):
        raise ValidationError(f"{key}: expected a list")
    return value


def parse_scenario(doc):
    """Build a :class:`Scenario` from a decoded JSON object."""
    _check_keys(doc, "", TOP_KEYS, ("name", "test_photon"))
    name = _string(doc["name"], "name")
    photon = _parse_test_photon(doc["test_photon"])
    segments = tuple(_parse_segment(s, f"segments[{i}]") for i, s in enumerate(_list(doc, "segments")))
    legs = tuple(_parse_leg(g, f"gravity_legs[{i}]") for i, g in enumerate(_list(doc, "gravity_legs")))
    if not segments and not legs:
        raise ValidationError("scenario needs at least one segment or gravity leg")
    trials = _parse_trials(doc["teleport_trials"]) if doc.get("teleport_trials") is not None else None
    angle, quad = _parse_options(doc.get("options", {}))
    return Scenario(name, photon, segments, legs, trials, angle, quad, raw=copy.deepcopy(doc))


def _reject_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ValidationError(f"duplicate key {k!r}")
        out[k] = v
    return out


def decode_json(data):
    """Decode UTF-8 JSON bytes, reporting failures with a byte offset."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"invalid UTF-8: {exc.reason}", exc.start) from None
    try:
        return json.loads(text, object_pairs_hook=_reject_duplicates,
                          parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        offset = len(text[:exc.pos].encode("utf-8"))
        raise ParseError(f"malformed JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})",
                         offset) from None


def _reject_constant(name):
    raise ValidationError(f"non-standard JSON constant {name}")


def builtin_scenario_dir():
    return Path(__file__).parent / "data" / "scenarios"


def resolve_scenario_path(ref):
    """A file path, or the name of a bundled or ``$QLINK_CATALOG_DIR`` scenario."""
    p = Path(ref)
    if p.is_file():
        return p
    dirs = []
    root = env.catalog_dir()
    if root is not None:
        dirs += [root / "scenarios", root]
    dirs.append(builtin_scenario_dir())
    for d in dirs:
        candidate = d / f"{ref}.json"
        if candidate.is_file():
            return candidate
    raise ValidationError(f"cannot read scenario {ref!r}: no such file or catalog scenario")


def load_scenario(ref):
    path = resolve_scenario_path(ref)
    return parse_scenario(decode_json(path.read_bytes()))


# -- parameter paths used by sweeps -------------------------------------------------

_STEP = re.compile(r"([A-Za-z_]\w*)(?:\[(\d+)\])?")


def _walk(doc, path):
    parts = path.split(".")
    node = doc
    for i, part in enumerate(parts):
        m = _STEP.fullmatch(part)
        if m is None:
            raise ValidationError(f"bad parameter path {path!r}")
        key, idx = m.group(1), m.group(2)
        last = i == len(parts) - 1 and idx is None
        if not isinstance(node, dict) or key not in node:
            raise ValidationError(f"unknown parameter path {path!r}")
        if last:
            return node, key
        node = node[key]
        if idx is not None:
            if not isinstance(node, list) or int(idx) >= len(node):
                raise ValidationError(f"unknown parameter path {path!r}")
            if i == len(parts) - 1:
                return node, int(idx)
            node = node[int(idx)]
    raise ValidationError(f"unknown parameter path {path!r}")  # pragma: no cover


def get_parameter(doc, path):
    container, key = _walk(doc, path)
    value = container[key]
    if isinstance(value, bool) or not isinstance(value, (str, int, float)):
        raise ValidationError(f"parameter {path!r} is not numeric")
    if isinstance(value, str):
        try:
            return as_quantity(value)
        except ParseError:
            raise ValidationError(f"parameter {path!r} is not numeric") from None
    return value


def with_parameter(doc, path, value):
    """Copy of ``doc`` with the field at ``path`` replaced by ``value``
    (a Quantity is written back in parse_quantity form with a repr float)."""
    out = copy.deepcopy(doc)
    container, key = _walk(out, path)
    if isinstance(value, Quantity):
        container[key] = f"{value.value!r} {value.unit}"
    else:
        container[key] = value
    return out


# -- evaluation --------------------------------------------------------------------

@dataclass(frozen=True)
class LegReport:
    body: str
    r_emit: Quantity
    r_receive: Quantity
    fidelity: FidelityReport
    closest_approach: Quantity
    bound: Quantity
    path_length: Quantity
    status: str


@dataclass(frozen=True)
class Verdict:
    survival: float
    total_optical_depth: float
    worst_overlap_sq: float | None
    tmax_violation: bool
    tmax_marginal: bool


@dataclass(frozen=True)
class ChannelReport:
    name: str
    link: LinkBudgetReport
    gravity: tuple
    teleport: TrialSummary | None
    teleport_dephase_p: float | None
    verdict: Verdict
    coupling_note: str | None = None


def _leg_report(leg, pulse, segments_length):
    fid = fidelity_report(leg.body, leg.r_emit, leg.r_receive, pulse, leg.motion_factor)
    ell = leg.closest_approach
    if ell is None:
        ell = min(leg.r_emit, leg.r_receive)
    bound = max_coherent_path(leg.body, ell)
    path = leg.path_length if leg.path_length is not None else Quantity(segments_length, "m")
    return LegReport(leg.body.name, leg.r_emit, leg.r_receive, fid, ell, bound, path,
                     coherence_status(path, bound))


def evaluate(scenario):
    """Compose the link budget, gravity legs and optional teleport trials."""
    link = link_budget(scenario.segments, scenario.test_photon.energy,
                       scenario.angle_model, scenario.quadrature)
    total_len = math.fsum(s.length.value for s in scenario.segments)
    legs = tuple(_leg_report(g, scenario.test_photon.pulse, total_len)
                 for g in scenario.gravity_legs)
    overlaps = [g.fidelity.overlap_sq for g in legs if g.fidelity.overlap_sq is not None]
    if scenario.test_photon.pulse is not None and not legs:
        overlaps = [1.0]
    verdict = Verdict(
        survival=link.survival,
        total_optical_depth=link.total_optical_depth,
        worst_overlap_sq=min(overlaps) if overlaps else None,
        tmax_violation=any(g.status == "violated" for g in legs),
        tmax_marginal=any(g.status == "marginal" for g in legs),
    )
    summary, p_eff, note = None, None, None
    tt = scenario.teleport_trials
    if tt is not None:
        p_eff = tt.dephase_p
        if tt.couple_survival:
            p_eff = 1.0 - (1.0 - tt.dephase_p) * link.survival
            note = COUPLING_NOTE
        p_eff = min(max(p_eff, 0.0), 1.0)
        summary = run_trials(tt.count, tt.seed, p_eff, tt.shared)
    return ChannelReport(scenario.name, link, legs, summary, p_eff, verdict, note)


# -- flattening ----------------------------------------------------------------------

def _q(q):
    return {"value": q.value, "unit": q.unit}


def _mfp_dict(mfp):
    if mfp.non_interacting:
        return {"value": None, "unit": "m", "non_interacting": True}
    return {"value": mfp.meters, "unit": "m", "non_interacting": False}


def report_to_dict(report):
    """JSON-ready nested dict; floats are left exact."""
    link = report.link
    out = {
        "name": report.name,
        "link": {
            "test_energy": _q(link.test_energy),
            "total_optical_depth": link.total_optical_depth,
            "survival": link.survival,
            "segments": [{
                "label": s.label,
                "length": _q(s.length),
                "optical_depth": s.optical_depth,
                "contributions": [{
                    "label": c.label, "kind": c.kind, "rate": _q(c.rate),
                    "mean_free_path": _mfp_dict(c.mfp), "optical_depth": c.optical_depth,
                } for c in s.contributions],
            } for s in link.segments],
        },
        "gravity": [{
            "body": g.body, "r_emit": _q(g.r_emit), "r_receive": _q(g.r_receive),
            "upsilon": g.fidelity.upsilon, "delta": g.fidelity.delta,
            "overlap": g.fidelity.overlap, "overlap_sq": g.fidelity.overlap_sq,
            "effectively_zero": g.fidelity.effectively_zero,
            "closest_approach": _q(g.closest_approach), "max_coherent_path": _q(g.bound),
            "path_length": _q(g.path_length), "status": g.status,
        } for g in report.gravity],
        "teleport": None,
        "verdict": {
            "survival": report.verdict.survival,
            "total_optical_depth": report.verdict.total_optical_depth,
            "worst_overlap_sq": report.verdict.worst_overlap_sq,
            "tmax_violation": report.verdict.tmax_violation,
            "tmax_marginal": report.verdict.tmax_marginal,
        },
    }
    if report.teleport is not None:
        t = report.teleport
        out["teleport"] = {"count": t.count, "seed": t.seed, "dephase_p": report.teleport_dephase_p,
                           "mean_fidelity": t.mean_fidelity, "min_fidelity": t.min_fidelity,
                           "histogram": dict(t.histogram), "note": report.coupling_note}
    return out


def report_rows(report):
    """Long-format rows ``(section, label, field, value, unit)``."""
    rows = []
    link = report.link
    rows.append(("link", "", "test_energy", link.test_energy.value, link.test_energy.unit))
    for s in link.segments:
        sec = f"segment:{s.label}"
        rows.append((sec, "", "length", s.length.value, s.length.unit))
        rows.append((sec, "", "optical_depth", s.optical_depth, "1"))
        for c in s.contributions:
            rows.append((sec, c.label, "rate", c.rate.value, c.rate.unit))
            rows.append((sec, c.label, "mean_free_path", c.mfp.meters, "m"))
            rows.append((sec, c.label, "optical_depth", c.optical_depth, "1"))
    for i, g in enumerate(report.gravity):
        sec = f"gravity[{i}]:{g.body}"
        rows += [
            (sec, "", "r_emit", g.r_emit.value, g.r_emit.unit),
            (sec, "", "r_receive", g.r_receive.value, g.r_receive.unit),
            (sec, "", "upsilon", g.fidelity.upsilon, "1"),
            (sec, "", "delta", g.fidelity.delta, "1"),
        ]
        if g.fidelity.overlap_sq is not None:
            rows.append((sec, "", "overlap_sq", g.fidelity.overlap_sq, "1"))
            rows.append((sec, "", "effectively_zero", g.fidelity.effectively_zero, "bool"))
        rows += [
            (sec, "", "max_coherent_path", g.bound.value, g.bound.unit),
            (sec, "", "path_length", g.path_length.value, g.path_length.unit),
            (sec, "", "status", g.status, ""),
        ]
    if report.teleport is not None:
        t = report.teleport
        rows.append(("teleport", "", "count", t.count, "1"))
        rows.append(("teleport", "", "dephase_p", report.teleport_dephase_p, "1"))
        rows.append(("teleport", "", "mean_fidelity", t.mean_fidelity, "1"))
        for k, v in t.histogram.items():
            rows.append(("teleport", k, "outcome_count", v, "1"))
    rows += verdict_rows(report.verdict)
    return rows


def verdict_rows(v):
    return [
        ("verdict", "", "survival", v.survival, "1"),
        ("verdict", "", "total_optical_depth", v.total_optical_depth, "1"),
        ("verdict", "", "worst_overlap_sq", v.worst_overlap_sq, "1"),
        ("verdict", "", "tmax_violation", v.tmax_violation, "bool"),
        ("verdict", "", "tmax_marginal", v.tmax_marginal, "bool"),
    ]


VERDICT_FIELDS = ("survival", "total_optical_depth", "worst_overlap_sq",
                  "tmax_violation", "tmax_marginal")
