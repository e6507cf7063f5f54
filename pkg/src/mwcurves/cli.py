"""Command-line front end.

Exit codes: 0 pass, 1 assertion failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
import dataclasses
from dataclasses import asdict, dataclass

from . import fields as fields_mod
from . import residues as residues_mod
from .audits import SUITES, run_suite
from .conventions import FINGERPRINT
from .fields import FieldError, FunctionField, extension, function_field, parse_element, parse_field_spec, parse_poly
from .gersten import CurveScheme, SupportedFamily, decide_coboundary, family_entry, h1_p1_class, total_residue
from .places import Place, infinity
from .residues import canonical_transfer, find_generator, geometric_transfer, mw_residue, mw_residue_twisted
from .symbols import MwClass, normalize, parse_expression


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    field: str | None = None
    degree: int | None = None
    seed: int = 0
    trials: int | None = None
    q_cap: int = fields_mod.DEFAULT_Q_CAP
    degree_cap: int = residues_mod.TRANSFER_DEGREE_CAP
    iteration_bound: int = residues_mod.ITERATION_BOUND
    out: str | None = None
    format: str = "json"
    extra: dict = dataclasses.field(default_factory=dict)

    def apply_caps(self):
        fields_mod.DEFAULT_Q_CAP = self.q_cap
        residues_mod.TRANSFER_DEGREE_CAP = self.degree_cap
        residues_mod.ITERATION_BOUND = self.iteration_bound

    def canonical(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d.pop("format")
        extra = d.pop("extra")
        d.update(extra)
        return d


# ---------------------------------------------------------------------------
# parsing helpers


def _field(spec: str | None, function: bool = False):
    if not spec:
        raise UsageError("--field is required")
    F = parse_field_spec(spec)
    if function and not isinstance(F, FunctionField):
        F = function_field(F)
    return F


def _place(text: str, ground) -> Place:
    text = text.strip()
    if text in ("inf", "infinity", "oo"):
        return infinity(ground)
    g = parse_poly(text, ground, "t")
    if len(g) < 2 or g[-1] != ground.one:
        raise FieldError(f"place polynomial {text!r} must be monic of positive degree")
    return Place(ground, g)


def _tower(base, text: str):
    """``mod1;mod2;...``: successive monic irreducible moduli."""
    tower = [base]
    for part in [s for s in text.split(";") if s.strip()]:
        top = tower[-1]
        names = set(top.names())
        idents = [w for w in re.findall(r"[A-Za-z_]\w*", part) if w not in names]
        if not idents:
            raise FieldError(f"modulus {part!r} names no new variable")
        var = idents[0]
        mod = parse_poly(part, top, var)
        tower.append(extension(top, mod, var))
    return tower


def _load_json(text: str):
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            return json.load(fh)
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return json.loads(text)
    with open(text, encoding="utf-8") as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# commands: each returns (result dict, passed flag)


def cmd_normalize(cfg: RunConfig, expr: str):
    F = _field(cfg.field)
    e = parse_expression(expr, F)
    x = normalize(e, cfg.degree)
    return {"expression": str(e), "class": x.to_json(), "is_zero": x.is_zero()}, True


def cmd_residue(cfg: RunConfig, expr: str, place: str, pi: str | None, section: str | None):
    Kt = _field(cfg.field, function=True)
    x = normalize(parse_expression(expr, Kt), cfg.degree)
    pl = _place(place, Kt.base)
    u = parse_element(pi, Kt) if pi else None
    out = {"class": x.to_json(), "place": pl.label,
           "uniformizer": str(u if u is not None else pl.uniformizer)}
    if section:
        tc = mw_residue_twisted(x, pl, section=parse_element(section, Kt), uniformizer=u)
        out["residue"] = tc.to_json()
    else:
        out["residue"] = mw_residue(x, pl, u).to_json()
    return out, True


def cmd_transfer(cfg: RunConfig, expr: str, tower_text: str, generators, route: str):
    K = _field(cfg.field)
    tower = _tower(K, tower_text)
    if len(tower) < 2:
        raise UsageError("--tower must name at least one extension")
    L = tower[-1]
    beta = normalize(parse_expression(expr, L), cfg.degree)
    gens = list(generators or [])
    if gens and len(gens) != len(tower) - 1:
        raise UsageError("give one --generator per tower step")
    steps = []
    x_geo = beta
    for i in range(len(tower) - 1, 0, -1):
        hi, lo = tower[i], tower[i - 1]
        th = parse_element(gens[i - 1], hi) if gens else find_generator(hi, lo)
        steps.append({"from": hi.spec, "to": lo.spec, "generator": str(th)})
        if route in ("geometric", "both"):
            x_geo = geometric_transfer(hi, lo, th, x_geo)
    out = {"tower": [F.spec for F in tower], "class": beta.to_json(), "steps": steps}
    passed = True
    if route in ("canonical", "both"):
        can = canonical_transfer(L, K, beta)
        out["canonical"] = can.to_json()
    if route in ("geometric", "both"):
        out["geometric"] = x_geo.to_json()
    if route == "both":
        out["agree"] = passed = can == x_geo
    return out, passed


_SCHEMES = {"P1": "projective_line", "A1": "affine_line", "Gm": "gm", "GM": "gm"}


def cmd_cohomology(cfg: RunConfig, scheme_name: str | None, twist: int, family: str | None, expr: str | None):
    B = _field(cfg.field)
    if isinstance(B, FunctionField):
        B = B.base
    data = _load_json(family) if family else {}
    scheme_name = scheme_name or data.get("scheme", "P1")
    kind = _SCHEMES.get(scheme_name, scheme_name)
    twist = twist if twist is not None else int(data.get("twist", 0))
    scheme = CurveScheme(kind, B, twist)
    n = cfg.degree if cfg.degree is not None else data.get("n")
    if expr:
        f = normalize(parse_expression(expr, function_field(B)), n)
        fam = total_residue(f, scheme)
    else:
        if n is None:
            raise UsageError("--n is required for a family")
        entries = {}
        for ent in data.get("entries", []):
            pl = _place(ent["place"], B)
            k = pl.residue_field
            cls = normalize(parse_expression(ent["class"], k), n - 1)
            sec = parse_element(ent["section"], function_field(B)) if ent.get("section") else None
            p, tc = family_entry(scheme, pl, cls, sec)
            entries[p] = tc
        fam = SupportedFamily(scheme, n, entries)
    out = {"family": fam.to_json()}
    if kind == "projective_line":
        out["h1"] = h1_p1_class(fam).to_json()
    res = decide_coboundary(fam)
    out["coboundary"] = res.is_coboundary
    if res.is_coboundary:
        out["preimage"] = res.preimage.to_json()
    else:
        out["obstruction"] = res.obstruction.to_json()
    return out, True


def cmd_audit(cfg: RunConfig, suite: str, qs, ns, corrupt: bool, quick: bool):
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if ns is None and cfg.degree is not None:
        ns = [cfg.degree]
    rep = run_suite(suite, qs=qs, ns=ns, trials=cfg.trials, seed=cfg.seed,
                    corrupt_oracle=corrupt, full=not quick)
    return rep, rep["passed"]


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mwcurves", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", help="field spec, e.g. p=5, q=9:s^2+1, p=5,F=Fq(t)")
    common.add_argument("--n", "--degree", dest="degree", type=int, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--q-cap", type=int, default=fields_mod.DEFAULT_Q_CAP)
    common.add_argument("--degree-cap", type=int, default=residues_mod.TRANSFER_DEGREE_CAP)
    common.add_argument("--iteration-bound", type=int, default=residues_mod.ITERATION_BOUND)
    common.add_argument("--out", help="write the canonical report here (timing goes to OUT.timing.json)")
    common.add_argument("--format", choices=("json", "text"), default="json")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", parents=[common], help="normal form of an expression")
    p.add_argument("--expr", required=True)

    p = sub.add_parser("residue", parents=[common], help="residue at a place of the line")
    p.add_argument("--expr", required=True)
    p.add_argument("--place", required=True, help="monic irreducible polynomial in t, or inf")
    p.add_argument("--pi", help="uniformizer override")
    p.add_argument("--section", help="local twist section; gives a twisted residue")

    p = sub.add_parser("transfer", parents=[common], help="transfer down a tower of finite fields")
    p.add_argument("--expr", required=True, help="class over the top field")
    p.add_argument("--tower", required=True, help="moduli separated by ';', e.g. 's^2+1;u^2+u+s'")
    p.add_argument("--generator", action="append", help="generator per step, bottom step first")
    p.add_argument("--route", choices=("canonical", "geometric", "both"), default="both")

    p = sub.add_parser("cohomology", parents=[common], help="H^1 class or preimage of a family")
    p.add_argument("--scheme", choices=("P1", "A1", "Gm"), default=None)
    p.add_argument("--twist", type=int, default=None)
    p.add_argument("--family", help="family JSON (inline, @file or path)")
    p.add_argument("--expr", help="use the residue family of this class instead")

    p = sub.add_parser("audit", parents=[common], help="run an audit suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--q", type=int, action="append", help="field order (repeatable)")
    p.add_argument("--n-values", type=int, action="append", dest="ns", help="degree (repeatable)")
    p.add_argument("--quick", action="store_true", help="sample generators instead of enumerating all")
    p.add_argument("--corrupt-oracle", action="store_true", help=argparse.SUPPRESS)
    return ap


def _text(obj, indent=0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(f"{pad}- {json.dumps(v, sort_keys=True)}" for v in obj)
    return f"{pad}{obj}"


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = RunConfig(field=args.field, degree=args.degree, seed=args.seed, trials=args.trials,
                    q_cap=args.q_cap, degree_cap=args.degree_cap, iteration_bound=args.iteration_bound,
                    out=args.out, format=args.format)
    cfg.apply_caps()
    t0 = time.perf_counter()
    try:
        if args.command == "normalize":
            cfg.extra = {"expr": args.expr}
            result, passed = cmd_normalize(cfg, args.expr)
        elif args.command == "residue":
            cfg.extra = {"expr": args.expr, "place": args.place, "pi": args.pi, "section": args.section}
            result, passed = cmd_residue(cfg, args.expr, args.place, args.pi, args.section)
        elif args.command == "transfer":
            cfg.extra = {"expr": args.expr, "tower": args.tower, "generator": args.generator, "route": args.route}
            result, passed = cmd_transfer(cfg, args.expr, args.tower, args.generator, args.route)
        elif args.command == "cohomology":
            cfg.extra = {"scheme": args.scheme, "twist": args.twist, "family": args.family, "expr": args.expr}
            result, passed = cmd_cohomology(cfg, args.scheme, args.twist, args.family, args.expr)
        else:
            cfg.extra = {"suite": args.suite, "q": args.q, "n_values": args.ns, "quick": args.quick}
            if args.corrupt_oracle:
                cfg.extra["corrupt_oracle"] = True
            result, passed = cmd_audit(cfg, args.suite, args.q, args.ns, args.corrupt_oracle, args.quick)
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"mwcurves: error: {exc}", file=sys.stderr)
        return 2
    elapsed = time.perf_counter() - t0
    report = {
        "command": args.command,
        "config": cfg.canonical(),
        "conventions": FINGERPRINT,
        "result": result,
        "passed": passed,
    }
    body = json.dumps(report, sort_keys=True, indent=2) + "\n" if cfg.format == "json" else _text(report) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(body)
        with open(cfg.out + ".timing.json", "w", encoding="utf-8") as fh:
            json.dump({"command": args.command, "wall_seconds": round(elapsed, 3)}, fh, sort_keys=True)
            fh.write("\n")
    else:
        sys.stdout.write(body)
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
