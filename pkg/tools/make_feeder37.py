"""Generate the bundled 37-node feeder fixture.

Line connectivity and lengths follow the public IEEE 37-node test feeder,
collapsed to a single dq equivalent per line using phase-averaged series
impedances per cable configuration.  Sectionalizing switches (SSW, normally
closed) sit on existing lines; tie switches (TSW, normally open) add four
loop-closing branches.  Loads are the standard spot loads with Q scaled so
the totals hit 2.5 MW + j0.8 Mvar; DG ratings and control shares follow the
shipped parameter presets.

Run:  python3 tools/make_feeder37.py
"""

from __future__ import annotations

import json
from pathlib import Path

S_BASE = 1e6            # VA
V_BASE = 4800.0         # V, phase-to-phase
F_0 = 60.0

# phase-averaged series impedance per configuration, ohm/mile
CONFIG_Z = {
    721: (0.2926, 0.1973),
    722: (0.4751, 0.2973),
    723: (1.2936, 0.6713),
    724: (2.0952, 0.7758),
}

# from, to, length_ft, config, switch (None = plain line)
LINES = [
    ("799", "701", 1850, 721, None),
    ("701", "702", 960, 722, None),
    ("702", "705", 400, 724, "SSW1"),
    ("702", "713", 360, 723, None),
    ("702", "703", 1320, 722, None),
    ("703", "727", 240, 724, "SSW4"),
    ("703", "730", 600, 723, None),
    ("704", "714", 80, 724, None),
    ("704", "720", 800, 723, "SSW2"),
    ("705", "742", 320, 724, None),
    ("705", "712", 240, 724, None),
    ("706", "725", 280, 724, None),
    ("707", "724", 760, 724, None),
    ("707", "722", 120, 724, None),
    ("708", "733", 320, 723, None),
    ("708", "732", 320, 724, None),
    ("709", "731", 600, 723, None),
    ("709", "708", 320, 723, None),
    ("710", "735", 200, 724, None),
    ("710", "736", 1280, 724, None),
    ("711", "741", 400, 723, "SSW6"),
    ("711", "740", 200, 724, None),
    ("713", "704", 520, 723, None),
    ("714", "718", 520, 724, None),
    ("720", "707", 920, 724, "SSW5"),
    ("720", "706", 600, 723, None),
    ("727", "744", 280, 723, None),
    ("730", "709", 200, 723, None),
    ("733", "734", 560, 723, "SSW3"),
    ("734", "737", 640, 723, None),
    ("734", "710", 520, 724, None),
    ("737", "738", 400, 723, None),
    ("738", "711", 400, 723, "SSW7"),
    ("744", "728", 200, 724, None),
    ("744", "729", 280, 724, None),
    # tie branches, normally open
    ("732", "736", 1000, 724, "TSW1"),
    ("736", "740", 800, 724, "TSW2"),
    ("728", "730", 600, 723, "TSW3"),
    ("744", "724", 800, 724, "TSW4"),
]

# transformer branch 709-775 (500 kVA): ~1% R, 8% X on its own rating
XFM_R = 0.01 * V_BASE**2 / 500e3
XFM_X = 0.08 * V_BASE**2 / 500e3

# spot loads, kW / kvar (phase totals of the published feeder)
RAW_LOADS = {
    "701": (630, 315), "712": (85, 40), "713": (85, 40), "714": (38, 18),
    "718": (85, 40), "720": (85, 40), "722": (161, 80), "724": (42, 21),
    "725": (42, 21), "727": (42, 21), "728": (126, 63), "729": (42, 21),
    "730": (85, 40), "731": (85, 40), "732": (42, 21), "733": (85, 40),
    "734": (42, 21), "735": (85, 40), "736": (42, 21), "737": (140, 70),
    "738": (126, 62), "740": (85, 40), "741": (42, 21), "742": (93, 44),
    "744": (42, 21),
}
TARGET_P_MW = 2.5
TARGET_Q_MVAR = 0.8

SG_PARAMS = {
    "s_rated_mva": 0.42, "m": 2.0,
    "x_d": 2.24, "x_d_prime": 0.17, "x_d_dprime": 0.12,
    "x_q": 1.02, "x_q_prime": 0.15, "x_q_dprime": 0.13,
    "r_s": 0.04, "x_l": 0.08,
    "t_d0_prime": 4.49, "t_d0_dprime": 0.0681,
    "t_q0_prime": 0.85, "t_q0_dprime": 0.034,
    "t_a": 0.02, "k_a": 200.0,
    "t_1": 0.16, "t_2": 0.03, "t_3": 0.017,
    "t_4": 0.13, "t_5": 0.08, "t_6": 0.031,
    "r_f": 0.05, "m_droop": 0.40,
}
IG_PARAMS = {
    "s_rated_mva": 0.31, "v_dc_kv": 0.38,
    "r_f_ohm": 1.22, "l_f_h": 0.05,
    "p_i": 20.0, "i_i": 30.0, "t_e": 0.03, "t_f": 0.05,
    "n": 0.10, "k": 5.0,
}

# id, node, kind, reference, alpha, beta, gamma
DGS = [
    ("SG1", "799", "sg", True, 0.15, 0.0, 0.0),
    ("SG2", "701", "sg", False, 0.15, 0.0, 0.0),
    ("SG3", "709", "sg", False, 0.15, 0.0, 0.0),
    ("SG4", "734", "sg", False, 0.15, 0.0, 0.0),
    ("IG1", "713", "ig", False, 0.0, 0.10, 0.30),
    ("IG2", "731", "ig", False, 0.0, 0.10, 0.30),
    ("IG3", "775", "ig", False, 0.0, 0.10, 0.20),
    ("IG4", "718", "ig", False, 0.0, 0.10, 0.20),
]


def main() -> None:
    raw_p = sum(p for p, _ in RAW_LOADS.values())
    raw_q = sum(q for _, q in RAW_LOADS.values())
    kp = TARGET_P_MW * 1000.0 / raw_p
    kq = TARGET_Q_MVAR * 1000.0 / raw_q

    lines = []
    for frm, to, length, cfg, switch in LINES:
        r_mi, x_mi = CONFIG_Z[cfg]
        miles = length / 5280.0
        lines.append({"from": frm, "to": to,
                      "r_ohm": round(r_mi * miles, 6),
                      "x_ohm": round(x_mi * miles, 6),
                      "switch": switch})
    lines.append({"from": "709", "to": "775",
                  "r_ohm": round(XFM_R, 6), "x_ohm": round(XFM_X, 6),
                  "switch": None})

    nodes = sorted({ln["from"] for ln in lines} | {ln["to"] for ln in lines})
    switches = {f"SSW{i}": "closed" for i in range(1, 8)}
    switches.update({f"TSW{i}": "open" for i in range(1, 5)})

    loads = [{"node": node,
              "p_mw": round(p * kp / 1000.0, 9),
              "q_mvar": round(q * kq / 1000.0, 9),
              "zip_p": [1.4, -2.0, 1.6],
              "zip_q": [1.4, -2.0, 1.6]}
             for node, (p, q) in sorted(RAW_LOADS.items())]

    # dispatch scheduled P proportionally to rating; slack picks up losses
    cap = {"sg": SG_PARAMS["s_rated_mva"], "ig": IG_PARAMS["s_rated_mva"]}
    total_cap = sum(cap[k] for _, _, k, *_ in DGS)
    gen_target = TARGET_P_MW * 1.03          # rough loss allowance
    dgs = []
    for dg_id, node, kind, ref, alpha, beta, gamma in DGS:
        p_sched = round(gen_target * cap[kind] / total_cap, 6)
        dgs.append({"id": dg_id, "node": node, "kind": kind,
                    "reference": ref, "p_sched_pu": p_sched,
                    "v_set_pu": 1.0, "alpha": alpha, "beta": beta,
                    "gamma": gamma,
                    "params": dict(SG_PARAMS if kind == "sg" else IG_PARAMS)})

    doc = {
        "name": "feeder37",
        "bases": {"s_base_va": S_BASE, "v_base_v": V_BASE, "f_0_hz": F_0},
        "nodes": nodes,
        "lines": lines,
        "switches": switches,
        "loads": loads,
        "dgs": dgs,
        "control": {"p_f": 1.0, "i_f": 2.0, "t_l": 0.58, "t_h": 0.01,
                    "t_s": 0.50, "d": 0.1},
    }
    _balance_voltage_setpoints(doc)
    out = Path(__file__).resolve().parent.parent / "src" / "gridloop" / "fixtures" / "feeder37.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {out}: {len(nodes)} nodes, {len(lines)} lines, "
          f"{len(loads)} loads, {len(dgs)} DGs")


def _balance_voltage_setpoints(doc: dict) -> None:
    """Pick DG voltage setpoints from the natural profile.

    Holding every DG terminal at exactly 1 pu would circulate large reactive
    flows on these resistive lines.  Solve once with the non-reference DGs
    modeled as negative constant-power loads carrying a rating-proportional
    share of P and Q, then adopt the voltages that emerge.
    """
    import dataclasses
    import sys

    sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))
    from gridloop.devices.params import LoadSpec
    from gridloop.netmodel import load_fixture, solve_operating_point
    import json as _json
    import tempfile

    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        _json.dump(doc, fh)
        tmp = fh.name
    topo = load_fixture(tmp).topology

    cap = {d["id"]: d["params"]["s_rated_mva"] for d in doc["dgs"]}
    total_cap = sum(cap.values())
    q_target = TARGET_Q_MVAR * 1.05
    extra = []
    for d in doc["dgs"]:
        if d["reference"]:
            continue
        share = cap[d["id"]] / total_cap
        extra.append(LoadSpec(
            node=d["node"], p0=-d["p_sched_pu"],
            q0=-q_target * share,
            z_p=0.0, i_p=0.0, p_p=1.0, z_q=0.0, i_q=0.0, p_q=1.0))

    slack_only = dataclasses.replace(
        topo, dgs=tuple(dg for dg in topo.dgs if dg.reference))
    op = solve_operating_point(slack_only, slack_only.initial_state(),
                               loads=tuple(topo.loads) + tuple(extra))
    index = {n: i for i, n in enumerate(topo.nodes)}
    for d in doc["dgs"]:
        if not d["reference"]:
            d["v_set_pu"] = round(abs(op.v0[index[d["node"]]]), 5)


if __name__ == "__main__":
    main()
