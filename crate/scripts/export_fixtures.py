#!/usr/bin/env python3
"""Regenerate the vendored graph fixtures in data/.

Karate Club and Les Miserables come from networkx. The 1354pegase branch
table is read from the case JSON shipped inside a pandapower wheel:

    python3 scripts/export_fixtures.py --pandapower-wheel pandapower-3.5.6-py3-none-any.whl
"""

import argparse
import hashlib
import io
import json
import math
import zipfile
from pathlib import Path

import networkx as nx
import pandas as pd

DATA = Path(__file__).resolve().parent.parent / "data"
PEGASE_MEMBER = "pandapower/networks/power_system_test_case_jsons/case1354pegase.json"


def write_edge_list(path, header, graph, labels):
    lines = [f"# {h}" for h in header]
    for u, v, d in graph.edges(data=True):
        w = d.get("weight", 1)
        lines.append(f"{labels(u)} {labels(v)} {w:g}")
    path.write_text("\n".join(lines) + "\n")


def export_karate():
    g = nx.karate_club_graph()
    write_edge_list(
        DATA / "karate.txt",
        [
            "Zachary's Karate Club, 34 nodes, 78 edges.",
            f"Source: networkx {nx.__version__} karate_club_graph(); third column is the",
            "interaction count (use --unweighted for the plain graph).",
        ],
        g,
        str,
    )


def export_lesmis():
    g = nx.les_miserables_graph()
    write_edge_list(
        DATA / "lesmis.txt",
        [
            "Les Miserables character co-occurrence, 77 nodes, 254 edges.",
            f"Source: networkx {nx.__version__} les_miserables_graph(); third column is the",
            "co-appearance count (use --unweighted for the plain graph).",
        ],
        g,
        lambda s: s.replace(" ", "_"),
    )


def frame(doc, key):
    return pd.read_json(io.StringIO(doc["_object"][key]["_object"]), orient="split")


def export_pegase(wheel):
    with zipfile.ZipFile(wheel) as z:
        doc = json.loads(z.read(PEGASE_MEMBER))
    lines = frame(doc, "line")
    trafos = frame(doc, "trafo")
    rows = []
    for _, l in lines.iterrows():
        if l.in_service:
            r = l.r_ohm_per_km * l.length_km
            x = l.x_ohm_per_km * l.length_km
            rows.append((int(l.from_bus), int(l.to_bus), r, x))
    for _, t in trafos.iterrows():
        if t.in_service:
            z_base = t.vn_hv_kv**2 / t.sn_mva
            z = t.vk_percent / 100 * z_base
            r = t.vkr_percent / 100 * z_base
            x = math.sqrt(max(z * z - r * r, 0.0))
            rows.append((int(t.hv_bus), int(t.lv_bus), r, x))
    out = [
        "# Case 1354pegase branch table: u v r x (ohms).",
        "# Lines: r, x per km times length. Transformers: short-circuit impedance",
        "# referred to the HV side, z = vk%/100 * vn_hv^2/sn, r = vkr%/100 * vn_hv^2/sn.",
        "# Parallel branches are listed; the loader keeps the first of each pair.",
        f"# Source: {PEGASE_MEMBER} from {Path(wheel).name}.",
    ]
    out += [f"{u} {v} {r:.10g} {x:.10g}" for u, v, r, x in rows]
    (DATA / "pegase1354.txt").write_text("\n".join(out) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pandapower-wheel", help="path to a pandapower wheel")
    args = ap.parse_args()
    DATA.mkdir(exist_ok=True)
    export_karate()
    export_lesmis()
    if args.pandapower_wheel:
        export_pegase(args.pandapower_wheel)
    for p in sorted(DATA.glob("*.txt")):
        print(f"{hashlib.sha256(p.read_bytes()).hexdigest()}  data/{p.name}")


if __name__ == "__main__":
    main()
