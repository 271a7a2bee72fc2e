"""Fixture file loading and saving.

A fixture is a JSON document describing one microgrid: bases, nodes, lines
(series impedance in ohms, optionally carrying a switch), initial switch
states, ZIP loads, DG placements with their device parameters, and the
secondary-control gain block.  Device parameter keys follow the usual
nameplate notation (``x_d_prime``, ``t_d0_dprime``, ...).

Parse failures raise :class:`FixtureFormatError` carrying the offending
file and JSON path (for example ``dgs[2].params.x_d``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from gridloop.devices.params import IgParams, LoadSpec, SgParams
from gridloop.netmodel.types import (
    AdmittanceBlock,
    DgSpec,
    Line,
    NetworkTopology,
)

__all__ = ["Fixture", "FixtureControl", "FixtureFormatError",
           "load_fixture", "save_fixture", "builtin_fixture_path"]


class FixtureFormatError(ValueError):
    """A fixture file is missing fields or holds values of the wrong shape."""


@dataclass(frozen=True)
class FixtureControl:
    """Secondary-control gains shipped with a fixture."""

    p_f: float = 1.0
    i_f: float = 2.0
    t_l: float = 0.58
    t_h: float = 0.01
    t_s: float = 0.50
    d: float = 0.1                   # aggregate frequency damping, pu/pu


@dataclass(frozen=True)
class Fixture:
    """A parsed fixture: the network plus its control-gain block."""

    topology: NetworkTopology
    control: FixtureControl
    path: str = ""


def builtin_fixture_path(name: str = "feeder37") -> Path:
    """Path of a fixture shipped inside the package."""
    return Path(__file__).resolve().parent.parent / "fixtures" / f"{name}.json"


# ---------------------------------------------------------------------------
# parsing helpers

def _need(obj: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in obj:
        raise FixtureFormatError(f"missing field {where}.{key}")
    return obj[key]


def _num(obj: Mapping[str, Any], key: str, where: str,
         default: float | None = None) -> float:
    if key not in obj:
        if default is not None:
            return default
        raise FixtureFormatError(f"missing field {where}.{key}")
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise FixtureFormatError(f"{where}.{key} must be a number, got {val!r}")
    return float(val)


def _str(obj: Mapping[str, Any], key: str, where: str) -> str:
    val = _need(obj, key, where)
    if not isinstance(val, str):
        raise FixtureFormatError(f"{where}.{key} must be a string, got {val!r}")
    return val


_SG_KEYS = {
    "s_rated_mva": "s_rated", "m": "m_inertia",
    "x_d": "x_d", "x_d_prime": "x_d_t", "x_d_dprime": "x_d_st",
    "x_q": "x_q", "x_q_prime": "x_q_t", "x_q_dprime": "x_q_st",
    "r_s": "r_s", "x_l": "x_l",
    "t_d0_prime": "t_d0_t", "t_d0_dprime": "t_d0_st",
    "t_q0_prime": "t_q0_t", "t_q0_dprime": "t_q0_st",
    "t_a": "t_a", "k_a": "k_a",
    "t_1": "t1", "t_2": "t2", "t_3": "t3",
    "t_4": "t4", "t_5": "t5", "t_6": "t6",
    "r_f": "r_f", "m_droop": "droop_m",
}

_IG_KEYS = {
    "s_rated_mva": "s_rated", "v_dc_kv": "v_dc",
    "r_f_ohm": "r_f", "l_f_h": "l_f",
    "p_i": "p_i", "i_i": "i_i", "t_e": "t_e", "t_f": "t_f",
    "n": "droop_n", "k": "k_ire",
}

_SG_SCALE = {"s_rated_mva": 1e6}
_IG_SCALE = {"s_rated_mva": 1e6, "v_dc_kv": 1e3}


def _parse_sg_params(obj: Mapping[str, Any], where: str) -> SgParams:
    kwargs = {}
    for json_key, field in _SG_KEYS.items():
        if json_key in obj:
            kwargs[field] = _num(obj, json_key, where) * _SG_SCALE.get(json_key, 1.0)
    try:
        return SgParams(**kwargs)
    except (TypeError, ValueError) as exc:
        raise FixtureFormatError(f"invalid values in {where}: {exc}") from exc


def _parse_ig_params(obj: Mapping[str, Any], where: str) -> IgParams:
    kwargs = {}
    for json_key, field in _IG_KEYS.items():
        if json_key in obj:
            kwargs[field] = _num(obj, json_key, where) * _IG_SCALE.get(json_key, 1.0)
    try:
        return IgParams(**kwargs)
    except (TypeError, ValueError) as exc:
        raise FixtureFormatError(f"invalid values in {where}: {exc}") from exc


def _sg_params_to_json(p: SgParams) -> dict[str, float]:
    out = {}
    for json_key, field in _SG_KEYS.items():
        out[json_key] = getattr(p, field) / _SG_SCALE.get(json_key, 1.0)
    return out


def _ig_params_to_json(p: IgParams) -> dict[str, float]:
    out = {}
    for json_key, field in _IG_KEYS.items():
        out[json_key] = getattr(p, field) / _IG_SCALE.get(json_key, 1.0)
    return out


def _parse_zip(val: Any, where: str) -> tuple[float, float, float]:
    if (not isinstance(val, (list, tuple)) or len(val) != 3
            or any(isinstance(x, bool) or not isinstance(x, (int, float))
                   for x in val)):
        raise FixtureFormatError(
            f"{where} must be a 3-number list [z, i, p], got {val!r}")
    return float(val[0]), float(val[1]), float(val[2])


# ---------------------------------------------------------------------------
# top-level load/save

def loads_from_json(raw: Any, s_base: float, where: str = "loads"
                    ) -> tuple[LoadSpec, ...]:
    """Parse a list of load records (powers in MW/Mvar) into specs in pu."""
    if not isinstance(raw, list):
        raise FixtureFormatError(f"{where} must be a list")
    out = []
    for k, ld in enumerate(raw):
        w = f"{where}[{k}]"
        if not isinstance(ld, Mapping):
            raise FixtureFormatError(f"{w} must be an object")
        node = _str(ld, "node", w)
        p0 = _num(ld, "p_mw", w) * 1e6 / s_base
        q0 = _num(ld, "q_mvar", w) * 1e6 / s_base
        zp = _parse_zip(ld.get("zip_p", [1.4, -2.0, 1.6]), f"{w}.zip_p")
        zq = _parse_zip(ld.get("zip_q", [1.4, -2.0, 1.6]), f"{w}.zip_q")
        try:
            out.append(LoadSpec(
                node=node, p0=p0, q0=q0,
                z_p=zp[0], i_p=zp[1], p_p=zp[2],
                z_q=zq[0], i_q=zq[1], p_q=zq[2],
                damping=_num(ld, "damping", w, default=0.0)))
        except ValueError as exc:
            raise FixtureFormatError(f"invalid values in {w}: {exc}") from exc
    return tuple(out)


def load_fixture(path: str | Path) -> Fixture:
    """Read and validate a fixture JSON file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FixtureFormatError(f"cannot read fixture {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FixtureFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from exc
    if not isinstance(raw, Mapping):
        raise FixtureFormatError(f"{path}: top level must be an object")

    name = raw.get("name", path.stem)
    bases = _need(raw, "bases", "fixture")
    if not isinstance(bases, Mapping):
        raise FixtureFormatError("bases must be an object")
    s_base = _num(bases, "s_base_va", "bases")
    v_base = _num(bases, "v_base_v", "bases")
    f_0 = _num(bases, "f_0_hz", "bases")
    z_base = v_base * v_base / s_base

    nodes_raw = _need(raw, "nodes", "fixture")
    if (not isinstance(nodes_raw, list)
            or any(not isinstance(x, str) for x in nodes_raw)):
        raise FixtureFormatError("nodes must be a list of strings")
    nodes = tuple(nodes_raw)

    lines_raw = _need(raw, "lines", "fixture")
    if not isinstance(lines_raw, list):
        raise FixtureFormatError("lines must be a list")
    lines = []
    for k, ln in enumerate(lines_raw):
        w = f"lines[{k}]"
        if not isinstance(ln, Mapping):
            raise FixtureFormatError(f"{w} must be an object")
        switch = ln.get("switch")
        if switch is not None and not isinstance(switch, str):
            raise FixtureFormatError(f"{w}.switch must be a string or null")
        try:
            lines.append(Line(
                from_node=_str(ln, "from", w), to_node=_str(ln, "to", w),
                y=AdmittanceBlock.from_impedance(
                    _num(ln, "r_ohm", w), _num(ln, "x_ohm", w), z_base),
                switch_id=switch))
        except ValueError as exc:
            raise FixtureFormatError(f"invalid values in {w}: {exc}") from exc

    sw_raw = _need(raw, "switches", "fixture")
    if not isinstance(sw_raw, Mapping):
        raise FixtureFormatError("switches must be an object")
    for sid, state in sw_raw.items():
        if state not in ("open", "closed"):
            raise FixtureFormatError(
                f"switches.{sid} must be 'open' or 'closed', got {state!r}")

    loads = loads_from_json(_need(raw, "loads", "fixture"), s_base)

    dgs_raw = _need(raw, "dgs", "fixture")
    if not isinstance(dgs_raw, list):
        raise FixtureFormatError("dgs must be a list")
    dgs = []
    for k, dg in enumerate(dgs_raw):
        w = f"dgs[{k}]"
        if not isinstance(dg, Mapping):
            raise FixtureFormatError(f"{w} must be an object")
        kind = _str(dg, "kind", w)
        if kind not in ("sg", "ig"):
            raise FixtureFormatError(f"{w}.kind must be 'sg' or 'ig', got {kind!r}")
        params_raw = _need(dg, "params", w)
        if not isinstance(params_raw, Mapping):
            raise FixtureFormatError(f"{w}.params must be an object")
        params = (_parse_sg_params(params_raw, f"{w}.params") if kind == "sg"
                  else _parse_ig_params(params_raw, f"{w}.params"))
        try:
            dgs.append(DgSpec(
                dg_id=_str(dg, "id", w), node=_str(dg, "node", w), kind=kind,
                params=params,
                p_sched=_num(dg, "p_sched_pu", w, default=0.0),
                v_set=_num(dg, "v_set_pu", w, default=1.0),
                reference=bool(dg.get("reference", False)),
                alpha=_num(dg, "alpha", w, default=0.0),
                beta=_num(dg, "beta", w, default=0.0),
                gamma=_num(dg, "gamma", w, default=0.0)))
        except ValueError as exc:
            raise FixtureFormatError(f"invalid values in {w}: {exc}") from exc

    ctrl_raw = raw.get("control", {})
    if not isinstance(ctrl_raw, Mapping):
        raise FixtureFormatError("control must be an object")
    control = FixtureControl(
        p_f=_num(ctrl_raw, "p_f", "control", default=1.0),
        i_f=_num(ctrl_raw, "i_f", "control", default=2.0),
        t_l=_num(ctrl_raw, "t_l", "control", default=0.58),
        t_h=_num(ctrl_raw, "t_h", "control", default=0.01),
        t_s=_num(ctrl_raw, "t_s", "control", default=0.50),
        d=_num(ctrl_raw, "d", "control", default=0.1))

    try:
        topo = NetworkTopology(
            nodes=nodes, lines=tuple(lines), s_base=s_base, v_base=v_base,
            f_0=f_0, dgs=tuple(dgs), loads=loads,
            initial_switches=dict(sw_raw), name=name)
    except ValueError as exc:
        raise FixtureFormatError(f"{path}: {exc}") from exc
    return Fixture(topology=topo, control=control, path=str(path))


def save_fixture(fix: Fixture, path: str | Path) -> None:
    """Write a fixture back to JSON (inverse of :func:`load_fixture`)."""
    topo = fix.topology
    z_base = topo.z_base_ohm
    doc: dict[str, Any] = {
        "name": topo.name,
        "bases": {"s_base_va": topo.s_base, "v_base_v": topo.v_base,
                  "f_0_hz": topo.f_0},
        "nodes": list(topo.nodes),
        "lines": [
            {"from": ln.from_node, "to": ln.to_node,
             "r_ohm": (1.0 / ln.y.as_complex).real * z_base,
             "x_ohm": (1.0 / ln.y.as_complex).imag * z_base,
             "switch": ln.switch_id}
            for ln in topo.lines
        ],
        "switches": dict(topo.initial_switches),
        "loads": [
            {"node": ld.node,
             "p_mw": ld.p0 * topo.s_base / 1e6,
             "q_mvar": ld.q0 * topo.s_base / 1e6,
             "zip_p": [ld.z_p, ld.i_p, ld.p_p],
             "zip_q": [ld.z_q, ld.i_q, ld.p_q],
             "damping": ld.damping}
            for ld in topo.loads
        ],
        "dgs": [
            {"id": dg.dg_id, "node": dg.node, "kind": dg.kind,
             "reference": dg.reference, "p_sched_pu": dg.p_sched,
             "v_set_pu": dg.v_set, "alpha": dg.alpha, "beta": dg.beta,
             "gamma": dg.gamma,
             "params": (_sg_params_to_json(dg.params) if dg.kind == "sg"
                        else _ig_params_to_json(dg.params))}
            for dg in topo.dgs
        ],
        "control": {"p_f": fix.control.p_f, "i_f": fix.control.i_f,
                    "t_l": fix.control.t_l, "t_h": fix.control.t_h,
                    "t_s": fix.control.t_s, "d": fix.control.d},
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
