"""Command-line front end.

Every command prints a deterministic report: plain text by default, or a JSON
object carrying ``"schema": 1`` with ``--json``. The exit code is 0 exactly
when every requested check passed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import graphalg, invariant, moves, rotation, statesum
from .diagram import Diagram, decorate, parse
from .errors import BasePointOnSite, SpatialAlexError
from .fixtures import NAMES, fixture_text
from .ring import fraction_eq

SCHEMA = 1


# ------------------------------------------------------------------ helpers
def _read(source: str) -> tuple[str, str]:
    """Text of a diagram file, or of a bundled fixture given as ``fixture:NAME``."""
    if source.startswith("fixture:"):
        return source, fixture_text(source.split(":", 1)[1])
    return source, Path(source).read_text()


def _lattice(d: Diagram, basis_flag: str | None):
    """Lattice plus display names; ``--basis`` either picks basis edges or renames the default ones."""
    if not basis_flag:
        lat = rotation.diagram_lattice(d)
        return lat, list(lat.basis_names)
    names = [x.strip() for x in basis_flag.split(",") if x.strip()]
    if all(n in d.edges for n in names):
        lat = rotation.diagram_lattice(d, names)
        return lat, list(lat.basis_names)
    lat = rotation.diagram_lattice(d)
    if len(names) != lat.rank:
        raise SpatialAlexError(f"--basis gives {len(names)} names for a rank {lat.rank} lattice")
    return lat, names


def _coloring(d: Diagram, text: str) -> dict:
    if text == "auto":
        return graphalg.positive_coloring(d)
    out = {}
    for item in text.split(","):
        edge, _, value = item.partition("=")
        out[edge.strip()] = value.strip()
    missing = [e for e in d.edges if e not in out]
    if missing:
        raise SpatialAlexError(f"coloring has no value for edge {missing[0]!r}")
    return out


def _frac(x, names):
    return {"text": x.render(names), "json": x.to_json(names)}


def _mono(m, names):
    return {"text": m.render(names), "halves": list(m.halves)}


def _base(d: Diagram, flag: str | None) -> str:
    if flag is None:
        return d.default_base()
    if flag not in d.base_candidates():
        raise SpatialAlexError(f"unknown base arc {flag!r}")
    return flag


# ----------------------------------------------------------------- commands
def cmd_regions(d, args):
    lat, names = _lattice(d, args.basis)
    out = []
    for idx, comp in enumerate(d.components()):
        w = rotation.winding_numbers(d, lat, idx)
        unbounded = d.local_region(d.component_outer_key(idx))
        for region in sorted(w):
            out.append({"region": region, "component": idx, "winding": _mono(w[region], names),
                        "unbounded": region == unbounded})
    lines = [f"{r['region']}: {r['winding']['text']}" + ("  (unbounded)" if r["unbounded"] else "")
             for r in out]
    return {"basis": names, "regions": out}, lines, True


def cmd_rot(d, args):
    lat, names = _lattice(d, args.basis)
    r = rotation.rot(d, lat)
    return {"basis": names, "rot": _mono(r, names)}, [r.render(names)], True


def cmd_statesum(d, args):
    lat, names = _lattice(d, args.basis)
    base = _base(d, args.base)
    value = statesum.state_sum(decorate(d, base), lat)
    payload = {"basis": names, "base": base, "statesum": _frac(value, names)}
    ok = True
    if args.oracle == "on" and d.is_connected():
        via_det = statesum.state_sum_via_det(decorate(d, base), lat)
        ok = fraction_eq(via_det, value)
        payload["oracles"] = {"determinant": ok}
    return payload, [value.render(names)], ok


def cmd_alexander(d, args):
    lat, names = _lattice(d, args.basis)
    base = _base(d, args.base)
    a = invariant.alexander(d, lat, base)
    payload = {"basis": names, "base": base, "alexander": _frac(a.value, names),
               "rot": _mono(a.rot, names), "raw_sum": _frac(a.raw_sum, names)}
    poly = a.polynomial
    payload["polynomial"] = poly is not None
    if poly is not None:
        payload["polynomial_text"] = poly.render(names)
    ok = True
    if args.oracle == "on" and d.is_connected():
        ok = fraction_eq(statesum.base_point_sweep(d, lat).value, a.raw_sum)
        payload["oracles"] = {"base_point_sweep": ok}
    return payload, [a.value.render(names)], ok


def cmd_specialize(d, args):
    lat = rotation.diagram_lattice(d)
    coloring = _coloring(d, args.coloring)
    base = _base(d, args.base)
    multi = statesum.state_sum(decorate(d, base), lat)
    value = invariant.specialize(multi, d, lat, coloring)
    payload = {"coloring": {e: str(coloring[e]) for e in d.edges}, "base": base,
               "specialized": _frac(value, ["t"])}
    ok = True
    if args.oracle == "on":
        ok = fraction_eq(value, invariant.colored_state_sum(d, coloring, base))
        payload["oracles"] = {"single_variable_pipeline": ok}
    return payload, [value.render(["t"])], ok


def _check_results(d: Diagram, lat) -> dict:
    results = {}
    if not d.is_connected():
        value = statesum.state_sum(decorate(d, d.default_base()), lat)
        results["disconnected_statesum_zero"] = value.is_zero()
        return results
    sweep = statesum.base_point_sweep(d, lat)
    results["base_point_sweep"] = True
    base = d.default_base()
    dd = decorate(d, base)
    results["region_count"] = len(dd.regions) == len(dd.crossings) + 2
    results["determinant"] = fraction_eq(statesum.state_sum_via_det(dd, lat), sweep.value)
    results["integrality"] = rotation.node_product(d, lat).is_integral
    if not d.crossings and d.vertices:
        head = d.head[base][0]
        states = list(statesum.enumerate_states(dd, lat))
        results["arborescence_count"] = len(states) == graphalg.arborescence_count(d, head)
    for c in d.crossings:
        arc = next((a for a in d.base_candidates()
                    if not (a in d.arcs and d.tail[a][0] == c.id and d.head[a][0] == c.id)), None)
        try:
            results[f"skein:{c.id}"] = statesum.skein_check(d, c.id, arc, lat)
        except BasePointOnSite:
            continue
    return results


def cmd_check(d, args):
    lat = rotation.diagram_lattice(d)
    results = _check_results(d, lat)
    lines = [f"{'PASS' if ok else 'FAIL'} {name}" for name, ok in results.items()]
    return {"checks": results}, lines, all(results.values())


def _fuzz_report(run, names, lat):
    mer = lat.meridians()
    steps = moves.verify_run(run, mer)
    log = []
    for s, kinks in zip(steps, run.kinks):
        _, fb = moves.kink_factors(kinks, mer)
        log.append({"step": s.index, "kind": s.site.kind, "direction": s.site.direction,
                    "bracket_factor": _mono(fb, names), "ok": s.ok})
    return steps, log


def cmd_fuzz(d, args):
    lat, names = _lattice(d, args.basis)
    run = moves.fuzz(d, args.seed, args.moves, framed=args.framed)
    steps, log = _fuzz_report(run, names, lat)
    ok = all(s.ok for s in steps)
    payload = {"seed": args.seed, "framed": args.framed, "moves": len(run.sites), "script": run.script,
               "steps": log, "final_crossings": len(run.diagrams[-1].crossings)}
    if args.framed:
        payload["alexander"] = _frac(invariant.alexander(run.diagrams[-1], lat).value, names)
    lines = [f"{e['step']:3d} {e['direction']:6s} {e['kind']:8s} <D> x {e['bracket_factor']['text']}"
             f"{'' if e['ok'] else '  MISMATCH'}" for e in log]
    if args.script_out:
        Path(args.script_out).write_text(json.dumps(run.script, indent=2) + "\n")
    return payload, lines, ok


def cmd_replay(d, args):
    lat, names = _lattice(d, args.basis)
    script = json.loads(Path(args.script).read_text())
    diagrams = moves.replay(d, script)
    final = diagrams[-1]
    value = invariant.alexander(final, lat)
    payload = {"moves": len(script), "final_crossings": len(final.crossings),
               "rot": _mono(value.rot, names), "alexander": _frac(value.value, names),
               "diagram": final.to_dict()}
    return payload, [f"{len(script)} moves, {len(final.crossings)} crossings", value.value.render(names)], True


COMMANDS = {
    "regions": cmd_regions, "rot": cmd_rot, "statesum": cmd_statesum, "alexander": cmd_alexander,
    "specialize": cmd_specialize, "check": cmd_check, "fuzz": cmd_fuzz, "replay": cmd_replay,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spatial-alex", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("file", help=f"diagram JSON file, or fixture:NAME with NAME in {', '.join(NAMES)}")
        s.add_argument("--json", action="store_true", help="emit a JSON report")
        s.add_argument("--basis", help="comma separated basis edges, or new names for the default basis")
        s.add_argument("--oracle", choices=("on", "off"), default="on")
        s.add_argument("--timing", action="store_true", help="add wall-clock time (breaks byte identity)")
        if name in ("statesum", "alexander", "specialize"):
            s.add_argument("--base", help="arc carrying the base point")
        if name == "specialize":
            s.add_argument("--coloring", default="auto", help="'auto' or e1=c1,e2=c2,...")
        if name == "check":
            s.add_argument("--all", action="store_true", help="accepted for compatibility; all checks always run")
        if name == "fuzz":
            s.add_argument("--seed", type=int, default=0)
            s.add_argument("--moves", type=int, default=50)
            s.add_argument("--framed", action="store_true")
            s.add_argument("--script-out", help="also write the move script to this file")
        if name == "replay":
            s.add_argument("script", help="move script JSON file")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        source, text = _read(args.file)
        d = parse(text)
        payload, lines, ok = COMMANDS[args.command](d, args)
    except (SpatialAlexError, OSError, KeyError, ValueError) as exc:
        report = {"schema": SCHEMA, "command": args.command, "ok": False,
                  "error": {"type": type(exc).__name__, "message": str(exc)}}
        script = getattr(exc, "script", None)
        if script is not None:
            report["error"]["script"] = script
        if args.json:
            print(json.dumps(report, indent=2, sort_keys=True))
        else:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    report = {"schema": SCHEMA, "command": args.command, "input": source,
              "digest": hashlib.sha256(text.encode()).hexdigest(), "ok": ok, "result": payload}
    if args.timing:
        report["seconds"] = round(time.perf_counter() - t0, 6)
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))
        if not ok:
            print("FAIL", file=sys.stderr)
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
