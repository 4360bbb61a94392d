"""Finite windows of the stable AR component through the Heller lattices Z_n."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ..ars import Inconclusive, SplitFailed, almost_split, invariants, iso_test, split_lattice
from ..heller import heller, heller_z, syzygy
from ..modk import Decomposition, SummandLabel, decompose
from ..order import Lattice, tensor_k

Coord = Tuple[int, int]
ROW_NAMES = {0: "Z", 1: "E", 2: "F"}


def d_prime(L: Lattice) -> int:
    """Number of non-projective indecomposable summands of L (x) F_p."""
    if L.rank == 0:
        return 0
    return decompose(tensor_k(L)).nonprojective_count()


@dataclass(eq=False)
class QuiverVertex:
    id: str
    lattice: Optional[Lattice]
    rank: int
    dprime: int
    coord: Optional[Coord]
    frontier: bool = True
    decomposition: Decomposition = field(default_factory=Decomposition)

    @property
    def q(self) -> Optional[int]:
        return None if self.coord is None else self.coord[0] + 1

    @property
    def H(self) -> Optional[int]:
        return None if self.coord is None else self.coord[1]


@dataclass(frozen=True)
class QuiverEdge:
    src: str
    dst: str
    valuation: Tuple[int, int]
    # False when one side of the valuation was not computed and was set equal to the other
    certified: bool = True


@dataclass
class SequenceRecord:
    """Summary of the almost split sequence ending at a vertex."""

    head: str
    tail: str
    middle: List[Tuple[str, int]]
    projective: int
    head_dec: Decomposition
    tail_dec: Decomposition
    middle_dec: Decomposition
    left_needed: bool = False
    methods: List[str] = field(default_factory=list)


@dataclass
class BuildConfig:
    p: int = 3
    seed: int = 0
    iso_samples: int = 32
    split_samples: int = 32
    precision: int = 20
    precision_max: int = 60
    tau_frontier: bool = True


@dataclass(eq=False)
class ComponentWindow:
    n_min: int
    n_max: int
    depth: int
    p: int = 3
    vertices: Dict[str, QuiverVertex] = field(default_factory=dict)
    edges: Dict[Tuple[str, str], QuiverEdge] = field(default_factory=dict)
    tau_edges: Dict[str, str] = field(default_factory=dict)
    sequences: Dict[str, SequenceRecord] = field(default_factory=dict)
    experimental: List[SequenceRecord] = field(default_factory=list)
    _sides: Dict[Tuple[str, str], List[Optional[int]]] = field(default_factory=dict, repr=False)

    def at(self, coord: Coord) -> Optional[QuiverVertex]:
        for v in self.vertices.values():
            if v.coord == coord:
                return v
        return None

    @property
    def frontier(self) -> List[str]:
        return [v.id for v in self.ordered() if v.frontier]

    def ordered(self) -> List[QuiverVertex]:
        """Row-major, columns ascending; off-grid vertices last."""
        def key(v: QuiverVertex):
            if v.coord is None:
                return (1, 0, 0, v.id)
            return (0, v.coord[0], v.coord[1], v.id)
        return sorted(self.vertices.values(), key=key)

    def ordered_edges(self) -> List[QuiverEdge]:
        pos = {v.id: i for i, v in enumerate(self.ordered())}
        return sorted(self.edges.values(), key=lambda e: (pos[e.src], pos[e.dst]))

    def in_edges(self, vid: str) -> List[QuiverEdge]:
        return [e for e in self.ordered_edges() if e.dst == vid]

    def out_edges(self, vid: str) -> List[QuiverEdge]:
        return [e for e in self.ordered_edges() if e.src == vid]

    def tau_inverse(self, vid: str) -> Optional[str]:
        for a, b in self.tau_edges.items():
            if b == vid:
                return a
        return None


def vertex_name(coord: Optional[Coord], serial: int = 0) -> str:
    if coord is None:
        return f"X{serial}"
    r, n = coord
    return f"{ROW_NAMES.get(r, f'R{r}_')}{n}"


# ------------------------------------------------------------ expansion


@dataclass(eq=False)
class _Expansion:
    tail: Lattice
    middle: Lattice
    summands: List[Lattice]
    methods: List[str]
    projective: int
    left_needed: bool


def _expand(M: Lattice, candidates: Sequence[Lattice], cfg: BuildConfig, salt: str) -> _Expansion:
    seq = almost_split(M, M.name)
    rng = random.Random(f"{cfg.seed}:{salt}")
    cert = split_lattice(
        seq.middle,
        candidates=candidates,
        rng=rng,
        samples=cfg.split_samples,
        precision=cfg.precision,
        precision_max=cfg.precision_max,
    )
    nonproj = [(S, how) for S, how in zip(cert.summands, cert.methods) if how != "projective"]
    return _Expansion(
        seq.tail,
        seq.middle,
        [S for S, _ in nonproj],
        [how for _, how in nonproj],
        cert.projective_count,
        seq.left_needed,
    )


def _expand_json(job: dict) -> dict:
    p = job["p"]
    M = Lattice.from_json(job["head"], p)
    cands = [Lattice.from_json(c, p) for c in job["candidates"]]
    ex = _expand(M, cands, job["cfg"], job["salt"])
    return {
        "tail": ex.tail.to_json(),
        "middle": ex.middle.to_json(),
        "summands": [S.to_json() for S in ex.summands],
        "methods": ex.methods,
        "projective": ex.projective,
        "left_needed": ex.left_needed,
    }


def _from_json(data: dict, p: int) -> _Expansion:
    return _Expansion(
        Lattice.from_json(data["tail"], p),
        Lattice.from_json(data["middle"], p),
        [Lattice.from_json(s, p) for s in data["summands"]],
        list(data["methods"]),
        int(data["projective"]),
        bool(data["left_needed"]),
    )


# ------------------------------------------------------------ registry


class _Registry:
    def __init__(self, W: ComponentWindow, cfg: BuildConfig):
        self.W = W
        self.cfg = cfg
        self.inv: Dict[str, Tuple] = {}
        self.serial = 0

    def add(self, L: Lattice, coord: Optional[Coord]) -> QuiverVertex:
        if coord is not None and self.W.at(coord) is not None:
            coord = None
        if coord is None:
            self.serial += 1
        vid = vertex_name(coord, self.serial)
        L = L.renamed(vid)
        dec = decompose(tensor_k(L)) if L.rank else Decomposition()
        v = QuiverVertex(vid, L, L.rank, dec.nonprojective_count(), coord, True, dec)
        self.W.vertices[vid] = v
        self.inv[vid] = invariants(L)
        return v

    def _same(self, L: Lattice, inv: Tuple, v: QuiverVertex) -> bool:
        if self.inv[v.id] != inv:
            return False
        rng = random.Random(f"{self.cfg.seed}:iso:{v.id}")
        try:
            return iso_test(L, v.lattice, rng=rng, samples=self.cfg.iso_samples).iso
        except Inconclusive as e:
            e.vertex = v.id
            raise

    def identify(self, L: Lattice, allowed: Sequence[Coord]) -> QuiverVertex:
        """Known vertex isomorphic to L, else a new vertex in the first free allowed slot."""
        inv = invariants(L)
        tried = set()
        for c in allowed:
            v = self.W.at(c)
            if v is not None:
                tried.add(v.id)
                if self._same(L, inv, v):
                    return v
        for v in list(self.W.vertices.values()):
            if v.id not in tried and self._same(L, inv, v):
                return v
        for c in allowed:
            if c[0] >= 0 and self.W.at(c) is None:
                return self.add(L, c)
        return self.add(L, None)


# ------------------------------------------------------------ building


def build_component(
    n_min: int,
    n_max: int,
    depth: int,
    jobs: int = 1,
    config: Optional[BuildConfig] = None,
    band_seeds: Sequence[SummandLabel] = (),
    experimental_bands: bool = False,
) -> ComponentWindow:
    """Window of the component through Z_n, n_min <= n <= n_max.

    Row r is expanded for columns n_min + r .. n_max while r <= depth - 2;
    the last row, and every tail beyond the left edge, stays on the frontier.
    Arrows follow the ZA_infinity template (r, n) -> (r + 1, n + 1) and
    (r + 1, n) -> (r, n) with tau(r, n) = (r, n - 1); a summand that is not
    isomorphic to the vertex at its template slot takes the free slot or,
    failing that, an off-grid position so that verification can flag it.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if n_min > n_max:
        raise ValueError("empty column range")
    if band_seeds and not experimental_bands:
        raise ValueError("band seeds are refused unless experimental_bands is set")
    cfg = config or BuildConfig()
    p = cfg.p
    W = ComponentWindow(n_min, n_max, depth, p)
    reg = _Registry(W, cfg)
    for n in range(n_min, n_max + 1):
        reg.add(heller_z(n, p), (0, n))

    for r in range(0, depth - 1):
        heads = []
        for n in range(n_min + r, n_max + 1):
            v = W.at((r, n))
            if v is None:
                raise RuntimeError(f"template slot {(r, n)} is empty")
            heads.append(v)
        results = _run_row(heads, W, cfg, jobs)
        for v, ex in zip(heads, results):
            _record(W, reg, v, ex)

    if cfg.tau_frontier:
        _tau_frontier(W, reg)
    _fill_valuations(W)

    for lab in band_seeds:
        Z = heller(lab, p, name=f"Z[{lab}]")
        ex = _expand(Z, [Z], cfg, f"band:{lab}")
        W.experimental.append(_band_record(Z, ex))
    return W


def _candidates(W: ComponentWindow, v: QuiverVertex) -> List[Lattice]:
    r, n = v.coord
    out = []
    for c in ((r - 1, n - 1), (r + 1, n)):
        u = W.at(c)
        if u is not None and u.lattice is not None:
            out.append(u.lattice)
    return out


def _run_row(heads, W, cfg, jobs) -> List[_Expansion]:
    tagged = [(v, _candidates(W, v), f"{v.coord[0]}:{v.coord[1]}") for v in heads]
    if jobs <= 1 or len(heads) <= 1:
        out = []
        for v, cands, salt in tagged:
            out.append(_guarded(v.id, lambda: _expand(v.lattice, cands, cfg, salt)))
        return out
    payload = [
        {
            "p": cfg.p,
            "head": v.lattice.to_json(),
            "candidates": [c.to_json() for c in cands],
            "cfg": cfg,
            "salt": salt,
        }
        for v, cands, salt in tagged
    ]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_expand_json, job) for job in payload]
        return [_guarded(v.id, lambda f=f: _from_json(f.result(), cfg.p)) for (v, _, _), f in zip(tagged, futures)]


def _guarded(vid: str, fn):
    try:
        return fn()
    except (SplitFailed, Inconclusive) as e:
        e.vertex = vid
        raise


def _record(W: ComponentWindow, reg: _Registry, v: QuiverVertex, ex: _Expansion) -> None:
    r, n = v.coord
    tail = reg.identify(ex.tail, [(r, n - 1)])
    W.tau_edges[v.id] = tail.id
    counts: Dict[str, int] = {}
    for S in ex.summands:
        u = reg.identify(S, [(r + 1, n), (r - 1, n - 1)])
        counts[u.id] = counts.get(u.id, 0) + 1
    middle = sorted(counts.items(), key=lambda t: _pos(W, t[0]))
    for sid, m in middle:
        _set_side(W, sid, v.id, 0, m)
        _set_side(W, tail.id, sid, 1, m)
    W.sequences[v.id] = SequenceRecord(
        v.id,
        tail.id,
        middle,
        ex.projective,
        v.decomposition,
        tail.decomposition,
        decompose(tensor_k(ex.middle)),
        ex.left_needed,
        ex.methods,
    )
    v.frontier = False


def _pos(W: ComponentWindow, vid: str):
    c = W.vertices[vid].coord
    return (1, 0, 0) if c is None else (0,) + c


def _set_side(W: ComponentWindow, src: str, dst: str, side: int, m: int) -> None:
    W._sides.setdefault((src, dst), [None, None])[side] = m


def _fill_valuations(W: ComponentWindow) -> None:
    # a missing side equals the known one: every End ring in the window has residue field F_p
    for (src, dst), (a, b) in W._sides.items():
        val = (a if a is not None else b, b if b is not None else a)
        W.edges[(src, dst)] = QuiverEdge(src, dst, val, a is not None and b is not None)


def _tau_frontier(W: ComponentWindow, reg: _Registry) -> None:
    """tau-edges for unexpanded vertices whose left neighbour is in the window."""
    for v in W.ordered():
        if not v.frontier or v.coord is None or v.id in W.tau_edges:
            continue
        r, n = v.coord
        u = W.at((r, n - 1))
        if u is None:
            continue
        T = syzygy(v.lattice)
        if reg._same(T, invariants(T), u):
            W.tau_edges[v.id] = u.id


def _band_record(Z: Lattice, ex: _Expansion) -> SequenceRecord:
    mids = [(S.name or f"S{i}", 1) for i, S in enumerate(ex.summands)]
    return SequenceRecord(
        Z.name,
        ex.tail.name or f"tau({Z.name})",
        mids,
        ex.projective,
        decompose(tensor_k(Z)),
        decompose(tensor_k(ex.tail)),
        decompose(tensor_k(ex.middle)),
        ex.left_needed,
        ex.methods,
    )
