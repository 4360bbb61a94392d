"""DOT and JSON renderings of a component window."""

from __future__ import annotations

import json

from ..modk import Decomposition
from ..order import Lattice
from .window import ComponentWindow, QuiverEdge, QuiverVertex, SequenceRecord


def _q(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def emit_dot(W: ComponentWindow) -> str:
    """Solid arrows for irreducible maps, dashed arrows for tau; frontier vertices dotted."""
    lines = [
        "digraph component {",
        "  rankdir=LR;",
        '  node [shape=box, fontname="Helvetica"];',
    ]
    for v in W.ordered():
        attrs = [f'label="{v.id}\\nrank={v.rank}, d\'={v.dprime}"']
        if v.frontier:
            attrs.append("style=dotted")
        lines.append(f"  {_q(v.id)} [{', '.join(attrs)}];")
    for e in W.ordered_edges():
        extra = "" if e.valuation == (1, 1) else f' [label="({e.valuation[0]},{e.valuation[1]})"]'
        lines.append(f"  {_q(e.src)} -> {_q(e.dst)}{extra};")
    pos = {v.id: i for i, v in enumerate(W.ordered())}
    for src in sorted(W.tau_edges, key=lambda s: pos[s]):
        lines.append(f"  {_q(src)} -> {_q(W.tau_edges[src])} [style=dashed, constraint=false];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _seq_json(s: SequenceRecord) -> dict:
    return {
        "head": s.head,
        "tail": s.tail,
        "middle": [[sid, m] for sid, m in s.middle],
        "projective": s.projective,
        "head_dec": s.head_dec.to_json(),
        "tail_dec": s.tail_dec.to_json(),
        "middle_dec": s.middle_dec.to_json(),
        "left_needed": s.left_needed,
        "methods": list(s.methods),
    }


def _seq_from(d: dict) -> SequenceRecord:
    return SequenceRecord(
        d["head"],
        d["tail"],
        [(sid, int(m)) for sid, m in d["middle"]],
        int(d["projective"]),
        Decomposition.from_json(d["head_dec"]),
        Decomposition.from_json(d["tail_dec"]),
        Decomposition.from_json(d["middle_dec"]),
        bool(d["left_needed"]),
        list(d["methods"]),
    )


def window_to_dict(W: ComponentWindow, lattices: bool = False) -> dict:
    verts = []
    for v in W.ordered():
        entry = {
            "id": v.id,
            "rank": v.rank,
            "dprime": v.dprime,
            "coord": list(v.coord) if v.coord is not None else None,
            "frontier": v.frontier,
            "decomposition": v.decomposition.to_json(),
        }
        if lattices and v.lattice is not None:
            entry["lattice"] = v.lattice.to_json()
        verts.append(entry)
    pos = {v.id: i for i, v in enumerate(W.ordered())}
    return {
        "n_min": W.n_min,
        "n_max": W.n_max,
        "depth": W.depth,
        "p": W.p,
        "vertices": verts,
        "edges": [
            {"src": e.src, "dst": e.dst, "valuation": list(e.valuation), "certified": e.certified}
            for e in W.ordered_edges()
        ],
        "tau_edges": [{"src": s, "dst": W.tau_edges[s]} for s in sorted(W.tau_edges, key=lambda s: pos[s])],
        "sequences": [_seq_json(W.sequences[v.id]) for v in W.ordered() if v.id in W.sequences],
        "experimental": [_seq_json(s) for s in W.experimental],
    }


def emit_json(W: ComponentWindow, lattices: bool = False) -> str:
    return json.dumps(window_to_dict(W, lattices), indent=2, ensure_ascii=False) + "\n"


def parse(text: str) -> ComponentWindow:
    """Inverse of emit_json; lattices are restored when they were included."""
    d = json.loads(text)
    p = int(d["p"])
    W = ComponentWindow(int(d["n_min"]), int(d["n_max"]), int(d["depth"]), p)
    for e in d["vertices"]:
        L = Lattice.from_json(e["lattice"], p) if "lattice" in e else None
        coord = tuple(e["coord"]) if e["coord"] is not None else None
        W.vertices[e["id"]] = QuiverVertex(
            e["id"],
            L,
            int(e["rank"]),
            int(e["dprime"]),
            coord,
            bool(e["frontier"]),
            Decomposition.from_json(e["decomposition"]),
        )
    for e in d["edges"]:
        edge = QuiverEdge(e["src"], e["dst"], tuple(e["valuation"]), bool(e["certified"]))
        W.edges[(edge.src, edge.dst)] = edge
    for e in d["tau_edges"]:
        W.tau_edges[e["src"]] = e["dst"]
    for s in d["sequences"]:
        W.sequences[s["head"]] = _seq_from(s)
    W.experimental = [_seq_from(s) for s in d.get("experimental", [])]
    return W
