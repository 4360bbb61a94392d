"""Checks that a computed window has the shape of ZA_infinity with d' = 2(r + 1)."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List

from .window import ComponentWindow


@dataclass
class CheckResult:
    name: str
    passed: bool
    failures: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "failures": self.failures, "notes": self.notes}


@dataclass
class VerificationReport:
    checks: List[CheckResult]
    stats: Dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failing(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_json() for c in self.checks], "stats": self.stats}

    def text(self) -> str:
        lines = []
        for c in self.checks:
            lines.append(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}")
            lines += [f"    {m}" for m in c.failures]
            lines += [f"    note: {m}" for m in c.notes]
        lines.append("stats: " + ", ".join(f"{k}={v}" for k, v in self.stats.items()))
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def _check(name: str) -> CheckResult:
    return CheckResult(name, True)


def _fail(c: CheckResult, msg: str) -> None:
    c.passed = False
    c.failures.append(msg)


def verify_za_infinity(W: ComponentWindow) -> VerificationReport:
    """Audit a window against the ZA_infinity template.

    Checks (a)-(e) follow the grid coordinates: d' = 2(r + 1); one
    non-projective middle summand on row 0; middles {(r-1, n-1), (r+1, n)}
    above it; tau moves one column left; d' subadditive, additive off row 0.
    The remaining checks are mesh and arrow conditions on expanded vertices.
    """
    V = W.vertices
    expanded = [v for v in W.ordered() if not v.frontier]
    coord = {vid: v.coord for vid, v in V.items()}

    def inc(vid: str) -> Counter:
        out = Counter()
        for e in W.edges.values():
            if e.dst == vid:
                out[e.src] += e.valuation[0]
        return out

    a = _check("(a) d' = 2(r+1)")
    for v in W.ordered():
        if v.coord is None:
            _fail(a, f"{v.id} has no grid position")
        elif v.dprime != 2 * (v.coord[0] + 1):
            _fail(a, f"{v.id} at {v.coord}: d'={v.dprime}, expected {2 * (v.coord[0] + 1)}")

    b = _check("(b) row 0 middles have one non-projective summand")
    c = _check("(c) row r >= 1 middles are (r-1, n-1) + (r+1, n)")
    for v in expanded:
        if v.coord is None:
            continue
        r, n = v.coord
        mid = inc(v.id)
        if r == 0:
            if sum(mid.values()) != 1:
                _fail(b, f"{v.id}: non-projective middle {dict(mid)}")
            else:
                (sid,) = mid
                if coord.get(sid) != (1, n):
                    _fail(b, f"{v.id}: middle summand {sid} sits at {coord.get(sid)}, expected {(1, n)}")
            seq = W.sequences.get(v.id)
            if seq is not None and seq.projective:
                b.notes.append(f"{v.id}: {seq.projective} projective summand(s) in the middle term")
        else:
            want = Counter({(r - 1, n - 1): 1, (r + 1, n): 1})
            got = Counter()
            for sid, m in mid.items():
                got[coord.get(sid)] += m
            if got != want:
                _fail(c, f"{v.id}: middle at {dict(got)}, expected {dict(want)}")

    d = _check("(d) tau shifts columns by -1")
    for vid, tid in W.tau_edges.items():
        cv, ct = coord.get(vid), coord.get(tid)
        if cv is None or ct is None or ct != (cv[0], cv[1] - 1):
            _fail(d, f"tau({vid}) = {tid}: {cv} -> {ct}")
    for v in expanded:
        if v.id not in W.tau_edges:
            _fail(d, f"{v.id}: expanded without a tau edge")

    e = _check("(e) d' subadditive, additive off the Z-row")
    z_eq = z_strict = 0
    for v in expanded:
        tid = W.tau_edges.get(v.id)
        if tid is None:
            continue
        lhs = v.dprime + V[tid].dprime
        rhs = sum(V[s].dprime * m for s, m in inc(v.id).items())
        if lhs < rhs:
            _fail(e, f"{v.id}: {lhs} < {rhs}")
        elif v.coord is not None and v.coord[0] == 0:
            if lhs == rhs:
                z_eq += 1
            else:
                z_strict += 1
        elif lhs != rhs:
            _fail(e, f"{v.id}: {lhs} != {rhs} off the Z-row")
    e.notes.append(f"Z-row: {z_eq} equalities, {z_strict} strict")

    mesh = _check("mesh: x^- = (tau x)^+")
    for v in expanded:
        tid = W.tau_edges.get(v.id)
        if tid is None:
            continue
        into = Counter({s: m for s, m in inc(v.id).items()})
        out = Counter()
        for ed in W.edges.values():
            if ed.src == tid:
                out[ed.dst] += ed.valuation[1]
        if into != out:
            _fail(mesh, f"{v.id}: into {dict(into)} vs out of {tid} {dict(out)}")

    loops = _check("no loops")
    for ed in W.edges.values():
        if ed.src == ed.dst:
            _fail(loops, f"loop at {ed.src}")
    for vid, tid in W.tau_edges.items():
        if vid == tid:
            _fail(loops, f"{vid} is tau-periodic of period 1")

    val = _check("valuations (1,1), no multiple arrows")
    uncertified = 0
    for ed in W.edges.values():
        if ed.valuation != (1, 1):
            _fail(val, f"{ed.src} -> {ed.dst} valued {ed.valuation}")
        if not ed.certified:
            uncertified += 1
    if uncertified:
        val.notes.append(f"{uncertified} valuation(s) with one side computed")

    indeg = _check("at most 3 incoming arrows")
    realized = 0
    for v in W.ordered():
        k = sum(inc(v.id).values())
        realized = max(realized, k)
        if k > 3:
            _fail(indeg, f"{v.id}: {k} incoming")
    indeg.notes.append(f"realized maximum {realized}")

    tau_inv = _check("d' is tau-invariant")
    for vid, tid in W.tau_edges.items():
        if V[vid].dprime != V[tid].dprime:
            _fail(tau_inv, f"d'({vid})={V[vid].dprime} but d'({tid})={V[tid].dprime}")

    even = _check("d' positive and even")
    for v in W.ordered():
        if v.dprime <= 0 or v.dprime % 2:
            _fail(even, f"{v.id}: d'={v.dprime}")

    split = _check("reduced sequences split off the Z-row")
    for vid, seq in W.sequences.items():
        cv = coord.get(vid)
        if cv is not None and cv[0] == 0:
            continue
        if seq.middle_dec != seq.head_dec + seq.tail_dec:
            _fail(split, f"{vid}: {seq.middle_dec} != {seq.head_dec} + {seq.tail_dec}")

    stats = {
        "vertices": len(V),
        "expanded": len(expanded),
        "frontier": len(V) - len(expanded),
        "edges": len(W.edges),
        "tau_edges": len(W.tau_edges),
        "max_incoming": realized,
    }
    checks = [a, b, c, d, e, mesh, loops, val, indeg, tau_inv, even, split]
    return VerificationReport(checks, stats)
