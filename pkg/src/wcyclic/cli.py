"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 integrity error,
64 bad input, 65 a capacity cap was exceeded.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

import numpy as np

from . import twobox as tb
from .catalogue import DEFAULT_CATALOGUE, parse_group
from .config import Config
from .errors import CapacityError, IntegrityError, ParseError
from .export import lattice_to_dot, to_json
from .lattice import SubgroupLattice, boolean_chain_length, enumerate_subgroups, is_h_cyclic
from .perm import Group, Permutation, SubgroupHandle, generated_subgroup, parse_cycles
from .reps import character_table, fusion_coeffs, is_linearly_primitive
from .twobox import Model
from .verifiers import SUITES, VerificationReport, core_free_chain_length, exit_code, run_suites

EXIT_PARSE = 64
EXIT_CAPACITY = 65


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--json", action="store_true", help="emit JSON (same as --format json)")
    p.add_argument("--format", choices=("text", "json", "dot"), default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol-eigen", type=float, default=None, dest="eigen_tol")
    p.add_argument("--tol-round", type=float, default=None, dest="round_tol")
    p.add_argument("--tol-projection", type=float, default=None, dest="projection_tol")
    p.add_argument("--max-order", type=int, default=None)
    p.add_argument("--max-subgroups", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wcyclic", description="Subgroup lattices, characters and 2-box calculus.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("lattice", help="enumerate subgroups and profile the lattice")
    p.add_argument("group")
    _common(p)

    p = sub.add_parser("interval", help="analyze [H, K]; K defaults to the whole group")
    p.add_argument("group")
    p.add_argument("low", help='generators of H, e.g. "(0 1)" or "(0 1),(2 3)"')
    p.add_argument("--high", default=None, help="generators of K")
    _common(p)

    p = sub.add_parser("chain", help="shortest top or bottom Boolean chain")
    p.add_argument("group")
    p.add_argument("--mode", choices=("top", "bottom"), default="top")
    p.add_argument("--core-free", action="store_true", help="bottom mode starting at any core-free subgroup")
    _common(p)

    p = sub.add_parser("chartable", help="character table")
    p.add_argument("group")
    _common(p)

    p = sub.add_parser("fusion", help="tensor product multiplicities")
    p.add_argument("group")
    _common(p)

    p = sub.add_parser("twobox", help="2-box calculus demonstration")
    p.add_argument("group")
    p.add_argument("--demo", action="store_true", required=True)
    _common(p)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("group", nargs="?", default=None, help="group, or omit with --catalogue")
    p.add_argument("--suite", action="append", choices=SUITES, default=None)
    p.add_argument("--catalogue", action="store_true", help="run over the default catalogue")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--timings", action="store_true", help="record elapsed milliseconds (not reproducible)")
    _common(p)

    p = sub.add_parser("catalogue", help="list catalogue groups")
    p.add_argument("--list", action="store_true", required=True)
    _common(p)
    return parser


def _config(args) -> Config:
    fmt = "json" if getattr(args, "json", False) else getattr(args, "format", None)
    return Config.from_env(
        eigen_tol=args.eigen_tol, round_tol=args.round_tol, projection_tol=args.projection_tol,
        seed=args.seed, max_order=args.max_order, max_subgroups=args.max_subgroups,
        output_format=fmt, jobs=getattr(args, "jobs", None), samples=getattr(args, "samples", None),
    )


def _emit(out, cfg: Config, payload, text: str):
    if cfg.output_format == "json":
        out.write(to_json(payload) + "\n")
    elif cfg.output_format == "dot":
        raise ParseError("DOT output is only available for lattices")
    else:
        out.write(text.rstrip("\n") + "\n")


def _label(g: Group, lat: SubgroupLattice, node: int) -> str:
    return "<" + (",".join(g.label(x) for x in lat.generators[node]) or "()") + ">"


def _subgroup_from_gens(g: Group, text: str) -> SubgroupHandle:
    idx = []
    for part in (p for p in text.split(",") if p.strip()):
        perm = Permutation.from_cycles(parse_cycles(part), g.degree)
        try:
            idx.append(g.index(perm))
        except KeyError:
            raise ParseError(f"{part.strip()} is not an element of {g.name}") from None
    return generated_subgroup(g, idx)


# subcommands --------------------------------------------------------------

def cmd_lattice(args, cfg, out) -> int:
    g = parse_group(args.group, max_order=cfg.max_order)
    lat = enumerate_subgroups(g, max_subgroups=cfg.max_subgroups)
    if cfg.output_format == "dot":
        out.write(lattice_to_dot(lat, args.group))
        return 0
    prof = lat.profile(lat.bottom_index, lat.top_index)
    normal = set(lat.normal_nodes())
    payload = {
        "group": args.group,
        "order": g.order,
        "subgroups": [{"index": i, "order": h.order, "generators": _label(g, lat, i), "normal": i in normal,
                       "members": g.members(h)}
                      for i, h in enumerate(lat.nodes)],
        "leq": np.argwhere(lat.leq),
        "covers": sorted(lat.covers()),
        "profile": _profile_dict(prof),
    }
    text = [f"{args.group}: order {g.order}, {len(lat)} subgroups"]
    text.append(f"distributive={prof.is_distributive} boolean={prof.is_boolean} "
                f"top_boolean={prof.is_top_boolean} bottom_boolean={prof.is_bottom_boolean}")
    for i, h in enumerate(lat.nodes):
        text.append(f"  {i:4d}  order {h.order:4d}  {_label(g, lat, i)}{'  normal' if i in normal else ''}")
    _emit(out, cfg, payload, "\n".join(text))
    return 0


def _profile_dict(prof) -> dict:
    return {
        "distributive": prof.is_distributive,
        "boolean": prof.is_boolean,
        "boolean_rank": prof.boolean_rank,
        "top_boolean": prof.is_top_boolean,
        "bottom_boolean": prof.is_bottom_boolean,
        "atoms": list(prof.atoms),
        "coatoms": list(prof.coatoms),
        "top_interval": list(prof.top_interval),
        "bottom_interval": list(prof.bottom_interval),
    }


def cmd_interval(args, cfg, out) -> int:
    g = parse_group(args.group, max_order=cfg.max_order)
    lat = enumerate_subgroups(g, max_subgroups=cfg.max_subgroups)
    low = lat.index(_subgroup_from_gens(g, args.low))
    high = lat.top_index if args.high is None else lat.index(_subgroup_from_gens(g, args.high))
    if not lat.leq[low, high]:
        raise ParseError("H is not contained in K")
    iv = lat.interval(low, high)
    prof = lat.profile(low, high)
    witness = is_h_cyclic(iv)
    sub_ct_irrep = _interval_linear_primitivity(g, lat, low, high, cfg)
    low_l = _label(g, lat, low)
    high_l = args.group if high == lat.top_index else _label(g, lat, high)
    payload = {
        "group": args.group,
        "interval": {"low": low_l, "high": high_l},
        "size": len(iv),
        "profile": _profile_dict(prof),
        "h_cyclic_witness": None if witness is None else g.label(witness),
        "linearly_primitive_irrep": sub_ct_irrep,
    }
    top = "top Boolean" if prof.is_top_boolean else "not top Boolean"
    bottom = "bottom Boolean" if prof.is_bottom_boolean else "not bottom Boolean"
    cyc = f"H-cyclic witness {g.label(witness)}" if witness is not None else "not H-cyclic"
    prim = (f"linearly primitive via irrep {sub_ct_irrep}" if sub_ct_irrep is not None
            else "not linearly primitive")
    text = f"[{low_l},{high_l}] {top}; {cyc}\n[{low_l},{high_l}] {bottom}; {prim}"
    _emit(out, cfg, payload, text)
    return 0


def _interval_linear_primitivity(g: Group, lat: SubgroupLattice, low: int, high: int, cfg) -> Optional[int]:
    from .perm import subgroup_as_group

    sub, index_map = subgroup_as_group(g, lat.nodes[high])
    pos = np.full(g.order, -1)
    pos[index_map] = np.arange(len(index_map))
    mask = np.zeros(sub.order, dtype=bool)
    mask[pos[g.members(lat.nodes[low])]] = True
    ct = character_table(sub, eigen_tol=cfg.eigen_tol, round_tol=cfg.round_tol)
    return is_linearly_primitive(ct, SubgroupHandle.from_mask(mask))


def cmd_chain(args, cfg, out) -> int:
    g = parse_group(args.group, max_order=cfg.max_order)
    lat = enumerate_subgroups(g, max_subgroups=cfg.max_subgroups)
    if args.core_free:
        if args.mode != "bottom":
            raise ParseError("--core-free applies to bottom mode")
        from .verifiers import GroupContext

        ctx = GroupContext(g, max_subgroups=cfg.max_subgroups)
        ctx.__dict__["lattice"] = lat
        length, chain = core_free_chain_length(ctx)
    else:
        length, chain = boolean_chain_length(lat, args.mode)
    labels = [_label(g, lat, i) for i in chain]
    payload = {"group": args.group, "mode": args.mode, "core_free": args.core_free,
               "length": length, "chain": labels}
    _emit(out, cfg, payload, f"{args.mode} Boolean chain length {length}: " + " < ".join(labels))
    return 0


def cmd_chartable(args, cfg, out) -> int:
    g = parse_group(args.group, max_order=cfg.max_order)
    ct = character_table(g, eigen_tol=cfg.eigen_tol, round_tol=cfg.round_tol)
    chi = np.round(ct.chi, 10)
    payload = {
        "group": args.group,
        "order": g.order,
        "classes": [{"size": len(c), "representative": g.label(c[0])} for c in g.classes],
        "degrees": list(ct.degrees),
        "characters": chi,
        "orthogonality_residual": ct.orthogonality_residual(),
        "seed": ct.seed,
        "tolerances": {"eigen": cfg.eigen_tol, "round": cfg.round_tol},
    }
    lines = [f"{args.group}: {len(ct)} irreps, degrees {list(ct.degrees)}"]
    lines.append("class sizes " + " ".join(str(len(c)) for c in g.classes))
    for row in chi:
        lines.append("  " + " ".join(_fmt_complex(z) for z in row))
    _emit(out, cfg, payload, "\n".join(lines))
    return 0


def _fmt_complex(z: complex) -> str:
    re, im = round(z.real, 6) + 0.0, round(z.imag, 6) + 0.0
    if im == 0:
        return f"{re:g}"
    return f"{re:g}{im:+g}i"


def cmd_fusion(args, cfg, out) -> int:
    g = parse_group(args.group, max_order=cfg.max_order)
    ct = character_table(g, eigen_tol=cfg.eigen_tol, round_tol=cfg.round_tol)
    ft = fusion_coeffs(ct)
    payload = {"group": args.group, "degrees": list(ft.degrees), "n": ft.n}
    lines = [f"{args.group}: V_i (x) V_j = sum_k n[i,j,k] V_k"]
    k = len(ft.degrees)
    for i in range(k):
        for j in range(i, k):
            terms = [f"{n}*V{m}" if n > 1 else f"V{m}" for m, n in enumerate(ft.n[i, j]) if n]
            lines.append(f"  V{i} (x) V{j} = " + " + ".join(terms))
    _emit(out, cfg, payload, "\n".join(lines))
    return 0


def twobox_demo(g: Group, seed: int = 0) -> dict:
    """Small tour of both models: biprojections, generation, fusion supports."""
    lat = enumerate_subgroups(g)
    demo: dict = {"group": g.name, "delta": float(np.sqrt(g.order))}
    for model in Model:
        e1, one = tb.e1(model, g), tb.identity(model, g)
        demo[model.value] = {
            "trace_id": tb.trace(one).real,
            "trace_e1": tb.trace(e1).real,
            "e1_biprojection": tb.is_biprojection(e1).ok,
            "id_biprojection": tb.is_biprojection(one).ok,
            "biprojections_ok": all(
                tb.is_biprojection(tb.biprojection_of_subgroup(model, g, h).element).ok for h in lat.nodes),
        }
    gens = lat.generators[lat.top_index]
    cyclic = {g.label(x): tb.generate_biprojection(tb.basis(Model.FUNCTION, g, x)).subgroup.order
              for x in gens}
    demo["function"]["generated_cyclic_orders"] = cyclic
    ct = character_table(g)
    ps = tb.minimal_central_projections(ct)
    minimal = []
    for i, p in enumerate(ps):
        u = tb.minimal_projection_below(p, seed=seed)
        minimal.append({
            "irrep": i,
            "degree": ct.degrees[i],
            "trace": tb.trace(p).real,
            "generated_subgroup_order": tb.generate_biprojection(p).subgroup.order,
            "minimal_trace": tb.trace(u).real,
        })
    demo["group_algebra"]["central_projections"] = minimal
    return demo


def cmd_twobox(args, cfg, out) -> int:
    g = parse_group(args.group, max_order=cfg.max_order)
    demo = twobox_demo(g, cfg.seed)
    lines = [f"{args.group}: delta = {demo['delta']:.6g}"]
    for model in Model:
        d = demo[model.value]
        lines.append(f"{model.value}: tr(id) = {d['trace_id']:g}, tr(e1) = {d['trace_e1']:.6g}, "
                     f"all subgroup biprojections valid: {d['biprojections_ok']}")
    for x, order in demo["function"]["generated_cyclic_orders"].items():
        lines.append(f"  <e_{x}> has subgroup order {order}")
    for row in demo["group_algebra"]["central_projections"]:
        lines.append(f"  p{row['irrep']} (degree {row['degree']}): <p> has subgroup order "
                     f"{row['generated_subgroup_order']}")
    _emit(out, cfg, demo, "\n".join(lines))
    return 0


def _verify_one(name: str, suites, cfg: Config, timings: bool) -> list[VerificationReport]:
    g = parse_group(name, max_order=cfg.max_order)
    return run_suites(g, suites, seed=cfg.seed, timings=timings, samples=cfg.samples,
                      eigen_tol=cfg.eigen_tol, round_tol=cfg.round_tol,
                      projection_tol=cfg.projection_tol, max_subgroups=cfg.max_subgroups)


def cmd_verify(args, cfg, out) -> int:
    if args.catalogue == (args.group is not None):
        raise ParseError("give either a group or --catalogue")
    names = list(DEFAULT_CATALOGUE) if args.catalogue else [args.group]
    suites = tuple(args.suite) if args.suite else SUITES
    if cfg.jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            chunks = list(pool.map(_verify_one, names, [suites] * len(names),
                                   [cfg] * len(names), [args.timings] * len(names)))
    else:
        chunks = [_verify_one(n, suites, cfg, args.timings) for n in names]
    reports = [r for chunk in chunks for r in chunk]
    code = exit_code(reports)
    lines = []
    for name, chunk in zip(names, chunks):
        for suite in suites:
            rs = [r for r in chunk if r.suite == suite]
            counts = {v: sum(r.verdict == v for r in rs) for v in ("pass", "fail", "skip")}
            lines.append(f"{name:10s} {suite:14s} pass {counts['pass']:5d}  fail {counts['fail']:3d}  "
                         f"skip {counts['skip']:4d}")
            for r in rs:
                if r.verdict == "fail":
                    lines.append(f"    FAIL {r.interval} {r.witness}")
    lines.append({0: "all suites passed", 1: "verification failures", 2: "integrity errors"}[code])
    _emit(out, cfg, [r.to_dict() for r in reports], "\n".join(lines))
    return code


def cmd_catalogue(args, cfg, out) -> int:
    rows = []
    for name in DEFAULT_CATALOGUE:
        g = parse_group(name, max_order=cfg.max_order)
        rows.append({"name": name, "order": g.order, "degree": g.degree})
    _emit(out, cfg, rows, "\n".join(f"{r['name']:10s} order {r['order']:3d}  degree {r['degree']}" for r in rows))
    return 0


COMMANDS = {
    "lattice": cmd_lattice,
    "interval": cmd_interval,
    "chain": cmd_chain,
    "chartable": cmd_chartable,
    "fusion": cmd_fusion,
    "twobox": cmd_twobox,
    "verify": cmd_verify,
    "catalogue": cmd_catalogue,
}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg, out)
    except ParseError as exc:
        print(f"wcyclic: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapacityError as exc:
        print(f"wcyclic: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except IntegrityError as exc:
        print(f"wcyclic: integrity error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
