"""Command-line interface.

Exit statuses: 0 success, 1 verified failure or mismatch, 2 usage error or
failed necessary condition, 3 unrealized or plan unavailable.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import catalog, latin, planner, search, spectra
from .core import DesignError, FlowerIntersectionCertificate, check_certificate, dump_json

OK, FAILED, USAGE, UNREALIZED = 0, 1, 2, 3
DEFAULT_BUDGET = 10**7


@dataclass
class CommandOutcome:
    status: int
    summary: str
    paths: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def to_dict(self):
        return {"status": self.status, "summary": self.summary,
                "paths": [str(p) for p in self.paths], "data": self.data}


def _out_dir(args):
    if args.out is None:
        return None
    p = Path(args.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


# -- verify -------------------------------------------------------------------------

def cmd_verify(args) -> CommandOutcome:
    try:
        raw = json.loads(Path(args.file).read_text())
    except (OSError, ValueError) as exc:
        return CommandOutcome(USAGE, f"cannot read {args.file}: {exc}")
    if isinstance(raw, dict) and "squares" in raw:
        return _verify_latin(raw)
    try:
        cert = FlowerIntersectionCertificate.from_dict(raw)
    except (KeyError, TypeError, ValueError) as exc:
        return CommandOutcome(USAGE, f"not a certificate: {exc}")
    res = check_certificate(cert)
    lines = [f"v={cert.v} r={cert.r} flower point={cert.flower_point} claimed k={cert.claimed_k}"]
    for name, passed, detail in res.checks:
        lines.append(f"  [{'pass' if passed else 'FAIL'}] {name}: {detail}")
    if res.ok:
        lines.append(f"k={res.k}")
        return CommandOutcome(OK, "\n".join(lines), data={"k": res.k, "flower_point": cert.flower_point})
    lines.append(f"{type(res.error).__name__}: {res.error}")
    return CommandOutcome(FAILED, "\n".join(lines),
                          data={"error": type(res.error).__name__, "k": res.k})


def _verify_latin(raw) -> CommandOutcome:
    try:
        t = latin.LatinTriple.from_dict(raw)
    except latin.LatinError as exc:
        return CommandOutcome(FAILED, f"{type(exc).__name__}: {exc}", data={"error": type(exc).__name__})
    except (KeyError, TypeError, ValueError) as exc:
        return CommandOutcome(USAGE, f"not a Latin triple: {exc}")
    return CommandOutcome(OK, f"Latin triple of order {t.n}: k={t.k} agreement cells", data={"k": t.k})


# -- realize ------------------------------------------------------------------------

def _realize_one(r, k, budget, seed):
    """Worker for one (r, k); returns plain data so it crosses processes."""
    rep = catalog.check_necessary_conditions(r, k)
    if not rep.ok:
        return {"k": k, "status": USAGE, "reason": str(rep)}
    try:
        cert, plan = planner.plan_and_realize(r, k, budget=budget, seed=seed)
    except planner.PlanUnavailable as exc:
        return {"k": k, "status": UNREALIZED, "reason": exc.component, "external": exc.external}
    except (DesignError, AssertionError) as exc:
        return {"k": k, "status": FAILED, "reason": f"{type(exc).__name__}: {exc}"}
    beyond = k in catalog.published_spectrum(r).undecided
    return {"k": k, "status": OK, "cert": cert.to_dict(), "plan": plan.to_dict(), "route": plan.step,
            "beyond_published": beyond}


def _write_result(out, r, res):
    paths = []
    if out is not None and res["status"] == OK:
        for kind in ("cert", "plan"):
            p = out / f"{kind}_r{r}_k{res['k']}.json"
            dump_json(res[kind], p)
            paths.append(p)
    return paths


def cmd_realize(args) -> CommandOutcome:
    r = args.r
    if not spectra.admissible(r):
        return CommandOutcome(USAGE, f"r={r} is not admissible (need r = 0 or 1 mod 3)")
    out = _out_dir(args)
    if args.k != "all":
        try:
            k = int(args.k)
        except ValueError:
            return CommandOutcome(USAGE, f"--k must be an integer or 'all', not {args.k!r}")
        res = _realize_one(r, k, args.budget, args.seed)
        if res["status"] == USAGE:
            return CommandOutcome(USAGE, f"(r={r}, k={k}) fails a necessary condition: {res['reason']}")
        if res["status"] == UNREALIZED:
            tag = "external" if res["external"] else "undecided"
            return CommandOutcome(UNREALIZED, f"(r={r}, k={k}) plan unavailable, blocked by [{tag}] "
                                              f"{res['reason']}", data=res)
        if res["status"] == FAILED:
            return CommandOutcome(FAILED, f"(r={r}, k={k}) failed: {res['reason']}", data=res)
        paths = _write_result(out, r, res)
        plan = planner.RealizationPlan.from_dict(res["plan"])
        text = f"(r={r}, k={k}) realized and verified via {res['route']}\n{plan.render()}"
        if res["beyond_published"]:
            text += (f"\nnote: k={k} is left undecided in the published record for r={r}; this certificate "
                     f"is a beyond-published finding for this single value, no wider claim is made")
        return CommandOutcome(OK, text, paths, {"k": k, "route": res["route"],
                                                "beyond_published": res["beyond_published"]})
    ks = sorted(spectra.i3f(r))
    jobs = max(1, args.jobs)
    if jobs == 1:
        results = [_realize_one(r, k, args.budget, args.seed) for k in ks]
    else:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_realize_one, [r] * len(ks), ks, [args.budget] * len(ks),
                                    [args.seed] * len(ks)))
    outcomes, paths, lines = {}, [], []
    for res in results:
        k = res["k"]
        if res["status"] == OK:
            outcomes[k] = f"realized:{res['route']}" + (":beyond-published" if res["beyond_published"] else "")
            paths += _write_result(out, r, res)
        elif res["status"] == UNREALIZED:
            outcomes[k] = f"unavailable:{res['reason']}"
        else:
            outcomes[k] = f"failed:{res['reason']}"
        lines.append(f"  k={k:4d}  {outcomes[k]}")
    if out is not None:
        from . import report

        paths += report.spectrum_report(out, r, outcomes)
    codes = {res["status"] for res in results}
    status = FAILED if FAILED in codes or USAGE in codes else UNREALIZED if UNREALIZED in codes else OK
    done = sum(s.startswith("realized") for s in outcomes.values())
    lines.insert(0, f"r={r}: {done}/{len(ks)} values of I^3_F({r}) realized and verified")
    return CommandOutcome(status, "\n".join(lines), paths, {"outcomes": {str(k): s for k, s in outcomes.items()}})


# -- enumerate / latin-realize --------------------------------------------------------

def cmd_enumerate(args) -> CommandOutcome:
    out = _out_dir(args)
    if (args.r is None) == (args.latin_n is None):
        return CommandOutcome(USAGE, "give exactly one of --r or --latin-n")
    if args.r is not None:
        if args.r not in (3, 4):
            return CommandOutcome(USAGE, "exhaustive flower enumeration covers r in {3, 4}")
        found = search.exhaustive_flower_spectrum(args.r)
        expected = catalog.published_spectrum(args.r).upper
        label = f"J^3_F({args.r})"
        paths = []
        if out is not None:
            from . import report

            paths.append(report.write_tsv(out / f"enumerate_r{args.r}.tsv", ["r", "k", "published"],
                                          [[args.r, k, int(k in expected)] for k in sorted(found)]))
    else:
        n = args.latin_n
        if not 1 <= n <= 4:
            return CommandOutcome(USAGE, "exhaustive Latin enumeration covers n <= 4")
        found = search.exhaustive_latin_3way(n)
        expected = spectra.published_jprime3(n)
        label = f"J'^3({n})"
        paths = []
        if out is not None:
            from . import report

            paths += report.latin_report(out, n, found, expected)
    match = found == expected
    text = f"{label} = {spectra.fmt_set(found)} ({'matches' if match else 'DIFFERS from'} published " \
           f"{spectra.fmt_set(expected)})"
    return CommandOutcome(OK if match else FAILED, text, list(paths), {"values": sorted(found)})


def cmd_latin_realize(args) -> CommandOutcome:
    try:
        t = latin.realize_three_way(args.n, args.k, budget=args.budget, seed=args.seed)
    except latin.TargetNotInSpectrum as exc:
        return CommandOutcome(USAGE, str(exc))
    except latin.Unrealized as exc:
        return CommandOutcome(UNREALIZED, f"unrealized: {exc}")
    k = len(latin.three_way_cells(*t.squares))
    if k != args.k:
        return CommandOutcome(FAILED, f"verification gave {k} agreement cells, wanted {args.k}")
    paths = []
    out = _out_dir(args)
    if out is not None:
        p = out / f"latin_n{args.n}_k{args.k}.json"
        dump_json(t.to_dict(), p)
        paths.append(p)
    rows = "\n".join("  " + "  ".join(" ".join(f"{x:2d}" for x in row) for row in rows3)
                     for rows3 in zip(*(s.rows for s in t.squares)))
    return CommandOutcome(OK, f"order {args.n}: verified triple with {k} agreement cells\n{rows}",
                          paths, {"k": k})


# -- paper-check / export-catalog -----------------------------------------------------

def cmd_paper_check(args) -> CommandOutcome:
    rows = catalog.reproduce_paper_checks()
    lines = [f"{'row':6s} {'printed':>7s} {'computed':>8s}  result  note"]
    for row in rows:
        comp = "-" if row.computed is None else str(row.computed)
        lines.append(f"{row.claim.row:6s} {row.claim.claimed_k:7d} {comp:>8s}  "
                     f"{'match ' if row.match else 'MISMATCH'}  {row.note}")
    good = sum(r.match for r in rows)
    lines.append(f"{good}/{len(rows)} rows match")
    paths = []
    out = _out_dir(args)
    if out is not None:
        from . import report

        paths += report.paper_check_report(out, rows)
        for row in rows:
            if row.match:
                p = out / f"paper_{row.claim.row}.json"
                dump_json(catalog.claim_certificate(row.claim.row).to_dict(), p)
                paths.append(p)
    data = {"rows": [{"row": r.claim.row, "claimed": r.claim.claimed_k, "computed": r.computed,
                      "match": r.match, "note": r.note} for r in rows]}
    return CommandOutcome(OK if good == len(rows) else FAILED, "\n".join(lines), paths, data)


def cmd_export_catalog(args) -> CommandOutcome:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for ident in catalog.identifiers():
        e = catalog.get(ident)
        body = {"identifier": ident, "kind": e.kind, "status": e.status,
                "provenance": e.provenance, "note": e.note, "payload": e.export()}
        p = out / f"{ident}.json"
        dump_json(body, p)
        paths.append(p)
    return CommandOutcome(OK, f"exported {len(paths)} catalog entries to {out}", paths,
                          {"identifiers": catalog.identifiers()})


# -- entry point ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS,
                        help="search budget in moves or nodes (default 10^7)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="directory for certificates and reports")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS, help="suppress text output")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                        help="worker processes for sweeps (default 1)")

    p = argparse.ArgumentParser(
        prog="triplex", parents=[common],
        description="Build and verify triples of Steiner triple systems sharing a flower. "
                    "External GDD/MOLS files are read from $TRIPLEX_DATA_DIR.",
        epilog="exit status: 0 ok, 1 verified failure or mismatch, 2 usage error or failed "
               "necessary condition, 3 unrealized or plan unavailable")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify", parents=[common], help="check a certificate or Latin triple file")
    s.add_argument("file")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("realize", parents=[common], help="plan, build and verify a certificate for (r, k)")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--k", required=True, help="an integer, or 'all' to sweep I^3_F(r)")
    s.set_defaults(func=cmd_realize)

    s = sub.add_parser("enumerate", parents=[common], help="exhaustive spectrum at small orders")
    s.add_argument("--r", type=int)
    s.add_argument("--latin-n", type=int)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("latin-realize", parents=[common], help="three Latin squares with k agreement cells")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.set_defaults(func=cmd_latin_realize)

    s = sub.add_parser("paper-check", parents=[common], help="recompute the printed permutation identities")
    s.set_defaults(func=cmd_paper_check)

    s = sub.add_parser("export-catalog", parents=[common], help="write every catalog entry as JSON")
    s.set_defaults(func=cmd_export_catalog)
    return p


_DEFAULTS = {"seed": 0, "budget": DEFAULT_BUDGET, "out": None, "quiet": False, "jobs": 1}


def run(argv=None) -> CommandOutcome:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return CommandOutcome(OK if exc.code == 0 else USAGE, "")
    for key, value in _DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    outcome = args.func(args)
    if args.out is not None and args.command != "export-catalog":
        out = _out_dir(args)
        p = out / f"{args.command}_report.json"
        outcome.paths.append(p)
        dump_json(outcome.to_dict(), p)
    if not args.quiet and outcome.summary:
        stream = sys.stdout if outcome.status == OK else sys.stderr
        print(outcome.summary, file=stream)
        for path in outcome.paths:
            print(f"wrote {path}", file=stream)
    return outcome


def main(argv=None) -> int:
    return run(argv).status


if __name__ == "__main__":
    sys.exit(main())
