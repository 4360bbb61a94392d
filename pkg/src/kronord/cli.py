"""Command-line entry point: ``kronord <command> ...``.

Exit codes: 0 when the command succeeds and every check passes, 1 when a
verification step fails, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, fields
from typing import Optional, Sequence

from .dvr import is_prime
from .heller import ProjectiveInput, heller, syzygy
from .modk import Decomposition, LabelError, ModK, SummandLabel, decompose, parse_label
from .order import Lattice, tensor_k

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

FORMATS = ("json", "dot", "text")


class UsageError(ValueError):
    pass


@dataclass
class Config:
    p: int = 3
    precision: int = 20
    precision_max: int = 60
    iso_samples: int = 32
    seed: int = 0
    format: str = "json"
    jobs: int = 1

    def validate(self) -> None:
        if not is_prime(self.p):
            raise UsageError(f"p = {self.p} is not prime")
        if self.precision < 1 or self.precision > self.precision_max:
            raise UsageError("need 1 <= precision <= precision-max")
        if self.iso_samples < 1:
            raise UsageError("iso-samples must be at least 1")
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}")
        if self.jobs < 1:
            raise UsageError("jobs must be at least 1")

    def build_config(self):
        from .quiver import BuildConfig

        return BuildConfig(
            p=self.p,
            seed=self.seed,
            iso_samples=self.iso_samples,
            precision=self.precision,
            precision_max=self.precision_max,
        )


def load_config(path: Optional[str]) -> dict:
    """Keys of a TOML file, with dashes accepted in place of underscores."""
    if not path:
        return {}
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    data = data.get("kronord", data)
    known = {f.name for f in fields(Config)}
    out = {}
    for key, val in data.items():
        k = key.replace("-", "_")
        if k not in known:
            raise UsageError(f"unknown config key {key!r}")
        out[k] = val
    return out


def resolve_config(args: argparse.Namespace) -> Config:
    values = load_config(args.config)
    for f in fields(Config):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    cfg = Config(**values)
    cfg.validate()
    return cfg


# ------------------------------------------------------------------ inputs


def _read_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def load_lattice(spec: str, cfg: Config) -> Lattice:
    """A label (Heller lattice of it) or a path to lattice JSON."""
    if os.path.exists(spec):
        return Lattice.from_json(_read_json(spec), cfg.p)
    lab = parse_label(spec, cfg.p)
    return heller(lab, cfg.p, name=_z_name(lab) or f"Z[{lab}]")


def _z_name(lab: SummandLabel) -> str:
    if lab.kind == "H":
        return f"Z{lab.n}"
    if lab.kind == "V":
        return f"Z{-lab.n}"
    return ""


def _z_index(spec: str, cfg: Config) -> Optional[int]:
    if os.path.exists(spec):
        return None
    lab = parse_label(spec, cfg.p)
    return {"H": lab.n, "V": -lab.n}.get(lab.kind)


def _dec_text(d: Decomposition) -> str:
    return "[" + ", ".join(f"{lab}" + (f" x{k}" if k > 1 else "") for lab, k in d.sorted_items()) + "]"


def _lattice_entry(L: Lattice, full: bool = True) -> dict:
    out = {"name": L.name, "rank": L.rank}
    if L.rank:
        out["decomposition"] = decompose(tensor_k(L)).to_json()
    if full:
        out["lattice"] = L.to_json()
    return out


def _emit(cfg: Config, payload: dict, text: str) -> None:
    if cfg.format == "json":
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print(text)


def _no_dot(cfg: Config, cmd: str) -> None:
    if cfg.format == "dot":
        raise UsageError(f"--format dot is only available for quiver, not {cmd}")


# ---------------------------------------------------------------- commands


def cmd_heller(args, cfg: Config) -> int:
    _no_dot(cfg, "heller")
    lab = parse_label(args.label, cfg.p)
    L = heller(lab, cfg.p, name=_z_name(lab) or f"Z[{lab}]")
    dec = decompose(tensor_k(L))
    payload = {"label": str(lab), "p": cfg.p, **_lattice_entry(L)}
    _emit(cfg, payload, f"{L.name}: rank {L.rank}, reduction {_dec_text(dec)}")
    return 0


def cmd_tau(args, cfg: Config) -> int:
    from .ars import iso_test
    from .heller import heller_z

    _no_dot(cfg, "tau")
    if args.n < 0:
        raise UsageError("-n must be non-negative")
    L = load_lattice(args.input, cfg)
    z = _z_index(args.input, cfg)
    rng = random.Random(cfg.seed)
    chain = [{"step": 0, **_lattice_entry(L, full=False)}]
    lines = [f"0: {L.name or 'input'} rank {L.rank}"]
    ok = True
    cur = L
    for i in range(1, args.n + 1):
        cur = syzygy(cur, name=f"tau^{i}({L.name})" if L.name else "")
        entry = {"step": i, **_lattice_entry(cur, full=False)}
        if z is not None:
            target = heller_z(z - i, cfg.p)
            res = iso_test(cur, target, rng=rng, samples=cfg.iso_samples)
            entry.update(compare=target.name, iso=res.iso, certificate=res.reason)
            lines.append(f"{i}: rank {cur.rank} ~ {target.name}: {res.iso} ({res.reason})")
        else:
            res = iso_test(cur, L, rng=rng, samples=cfg.iso_samples)
            entry.update(compare="input", iso=res.iso, certificate=res.reason)
            lines.append(f"{i}: rank {cur.rank} ~ input: {res.iso} ({res.reason})")
        if res.iso and res.witness is not None:
            entry["witness"] = res.witness.to_json()
        ok = ok and res.iso
        chain.append(entry)
    if args.n and z is None and ok:
        lines.append("fixed point of tau")
    _emit(cfg, {"input": args.input, "p": cfg.p, "chain": chain, "passed": ok}, "\n".join(lines))
    return 0 if ok else 1


def cmd_ars(args, cfg: Config) -> int:
    from .ars import almost_split, split_lattice

    _no_dot(cfg, "ars")
    M = load_lattice(args.input, cfg)
    seq = almost_split(M)
    cert = split_lattice(
        seq.middle,
        candidates=[seq.tail, M],
        rng=random.Random(cfg.seed),
        precision=cfg.precision,
        precision_max=cfg.precision_max,
    )
    ok = cert.verify()
    summands = []
    for S, how in zip(cert.summands, cert.methods):
        if how == "projective":
            summands.append({"kind": "P", "rank": 4})
        else:
            summands.append({"kind": "nonprojective", "method": how, **_lattice_entry(S, full=False)})
    payload = {
        "head": _lattice_entry(M, full=False),
        "tail": _lattice_entry(seq.tail, full=False),
        "middle": _lattice_entry(seq.middle, full=False),
        "middle_summands": summands,
        "split_verified": ok,
        "sequence": seq.to_json() if args.full else None,
    }
    proj = cert.projective_count
    lines = [
        f"0 -> tau M (rank {seq.tail.rank}) -> E (rank {seq.middle.rank}) -> M (rank {M.rank}) -> 0",
        f"middle summands: " + ", ".join(
            (["P:%d" % proj] if proj else [])
            + [f"rank-{S.rank} {_dec_text(decompose(tensor_k(S)))}" for S in cert.nonprojective]
        ),
        f"split certificate: {'ok' if ok else 'FAIL'}",
    ]
    _emit(cfg, payload, "\n".join(lines))
    return 0 if ok else 1


def cmd_quiver(args, cfg: Config) -> int:
    from .quiver import build_component, emit_dot, verify_za_infinity
    from .quiver.emit import window_to_dict

    bands = [parse_label(s, cfg.p) for s in args.band]
    W = build_component(
        args.n_min,
        args.n_max,
        args.depth,
        jobs=cfg.jobs,
        config=cfg.build_config(),
        band_seeds=bands,
        experimental_bands=args.experimental_bands,
    )
    rep = verify_za_infinity(W)
    if cfg.format == "dot":
        sys.stdout.write(emit_dot(W))
        print(rep.text(), file=sys.stderr)
    elif cfg.format == "json":
        print(json.dumps({"window": window_to_dict(W), "verification": rep.to_json()}, indent=2, ensure_ascii=False))
    else:
        for v in W.ordered():
            flag = " (frontier)" if v.frontier else ""
            print(f"{v.id} {v.coord}: rank {v.rank}, d'={v.dprime}{flag}")
        print(rep.text())
    return 0 if rep.passed else 1


def cmd_treeclass(args, cfg: Config) -> int:
    from .quiver import tree_class_ledger

    _no_dot(cfg, "treeclass")
    proof = tree_class_ledger(args.shape)
    _emit(cfg, proof.to_json(), proof.report())
    return 0 if proof.verified else 1


def cmd_decompose(args, cfg: Config) -> int:
    _no_dot(cfg, "decompose")
    M = ModK.from_json(_read_json(args.file), cfg.p)
    dec = decompose(M)
    _emit(cfg, {"dim": M.dim, "decomposition": dec.to_json()}, _dec_text(dec))
    return 0


# ------------------------------------------------------------------ parser


def _common(ap: argparse.ArgumentParser) -> None:
    g = ap.add_argument_group("configuration")
    g.add_argument("--p", type=int, default=None, help="residue characteristic (default 3)")
    g.add_argument("--precision", type=int, default=None, help="p-adic lifting precision N")
    g.add_argument("--precision-max", dest="precision_max", type=int, default=None)
    g.add_argument("--iso-samples", dest="iso_samples", type=int, default=None)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--format", choices=FORMATS, default=None)
    g.add_argument("--jobs", type=int, default=None, help="worker processes for quiver rows")
    g.add_argument("--config", default=None, help="TOML file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kronord", description="Lattices over the Kronecker order and their AR theory.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("heller", help="Heller lattice of an indecomposable module")
    sp.add_argument("label", help="H:m | V:n | B:lam:n | Binf:n")
    sp.set_defaults(func=cmd_heller)

    sp = sub.add_parser("tau", help="iterate the syzygy and identify each step")
    sp.add_argument("input", help="label or lattice JSON file")
    sp.add_argument("-n", type=int, default=1, help="number of iterations")
    sp.set_defaults(func=cmd_tau)

    sp = sub.add_parser("ars", help="almost split sequence ending at a lattice")
    sp.add_argument("input", help="label or lattice JSON file")
    sp.add_argument("--full", action="store_true", help="include the sequence matrices")
    sp.set_defaults(func=cmd_ars)

    sp = sub.add_parser("quiver", help="build and verify a window of the component")
    sp.add_argument("n_min", type=int)
    sp.add_argument("n_max", type=int)
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--band", action="append", default=[], help="band label to expand (experimental)")
    sp.add_argument("--experimental-bands", action="store_true")
    sp.set_defaults(func=cmd_quiver)

    sp = sub.add_parser("treeclass", help="rank ledger contradiction for E6, E7 or E8")
    sp.add_argument("shape", choices=("E6", "E7", "E8"))
    sp.set_defaults(func=cmd_treeclass)

    sp = sub.add_parser("decompose", help="decompose a module given as ModK JSON")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_decompose)

    for p in sub.choices.values():
        _common(p)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except ProjectiveInput as exc:
        print(f"error: ProjectiveInput: {exc}", file=sys.stderr)
    except (UsageError, LabelError, OSError, json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
    ap.print_usage(sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
