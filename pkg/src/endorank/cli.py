"""Command-line front end.

Exit codes: 0 when an answer was computed (negative answers included),
1 on input/usage errors, 2 when a resource budget or substitution search
ran out before an answer existed.

JSON output is deterministic byte-for-byte for a fixed input and seed:
payloads carry "schema": 1 and the seed, keys are sorted, indentation is
fixed, and every report embeds enough certificate data to be replayed
(chain certificates can be re-verified with `chain --verify`).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from .autgroup import SemiLinearAut, conjugate, verify_automorphism_properties
from .chains import (
    Chain,
    ChainPolicy,
    ChainStep,
    SubstitutionRecord,
    build_full_chain,
    verify_chain,
)
from .endo import (
    Endomorphism,
    compare,
    compose,
    equivalence_falsifier,
    rank,
)
from .errors import BudgetExceeded, EndoRankError, SearchExhausted
from .fields import GF4, QQ, FieldAutomorphism
from .groebner import invert_poly_map, set_budget
from .kronecker import (
    KroneckerSystem,
    classify_representation,
    normalize_base,
    verify_base_external,
    verify_subbase,
)
from .mpoly import MultiPoly
from .parsing import (
    load_automorphism,
    load_endomorphism,
    load_kronecker_system,
    parse_field_header,
    parse_polynomial,
)

_METHODS = {"elim": "elimination", "jacobian": "jacobian-probe"}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors by default; here 2 is reserved for
    exhausted budgets, so usage errors are remapped to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _images(e: Endomorphism) -> list[str]:
    return [str(img) for img in e.images]


def _endo_lines(e: Endomorphism) -> list[str]:
    return [f"x{k + 1} -> {img}" for k, img in enumerate(e.images)]


# -- rank / compare ---------------------------------------------------------------


def _cmd_rank(args) -> tuple[dict, list[str]]:
    endo = load_endomorphism(_read(args.file))
    cert = rank(endo, method=_METHODS[args.method], seed=args.seed)
    payload = {
        "schema": 1,
        "command": "rank",
        "seed": args.seed,
        "field": endo.spec.header(),
        "vars": endo.nvars,
        "rank": cert.value,
        "method": cert.method,
        "is_lower_bound": cert.is_lower_bound,
        "relation_generators": [str(g) for g in cert.relation_generators],
        "probe_point": (
            [str(v) for v in cert.probe_point]
            if cert.probe_point is not None
            else None
        ),
    }
    lines = [f"rank: {cert.value}", f"method: {cert.method}"]
    if cert.is_lower_bound:
        lines.append("note: probe ranks are lower bounds")
    if cert.relation_generators:
        lines.append("relation ideal generators:")
        lines.extend(f"  {g}" for g in cert.relation_generators)
    return payload, lines


def _cmd_compare(args) -> tuple[dict, list[str]]:
    phi = load_endomorphism(_read(args.file))
    psi = load_endomorphism(_read(args.other))
    verdict = compare(phi, psi)
    payload = {
        "schema": 1,
        "command": "compare",
        "seed": args.seed,
        "verdict": verdict.value,
        "falsifier": None,
    }
    lines = [f"verdict: {verdict.value}"]
    if args.falsify > 0:
        report = equivalence_falsifier(
            phi, psi, trials=args.falsify, seed=args.seed
        )
        payload["falsifier"] = {
            "samples": report.samples,
            "nonvacuous": report.nonvacuous,
            "implication_failures": report.implication_failures,
            "separation_witnesses": [
                str(w) for w in report.separation_witnesses
            ],
            "consistent": report.consistent,
        }
        lines.append(
            f"falsifier: {report.samples} samples, "
            f"{report.implication_failures} failures, "
            f"consistent={report.consistent}"
        )
    return payload, lines


# -- chains ------------------------------------------------------------------------


def _chain_payload(chain: Chain, seed: int) -> dict:
    steps = []
    for st in chain.steps:
        rec = st.record
        steps.append(
            {
                "kind": rec.kind,
                "variable": rec.variable,
                "source": rec.source,
                "exponent": rec.exponent,
                "value": str(rec.value) if rec.value is not None else None,
                "point": (
                    [str(v) for v in rec.point]
                    if rec.point is not None
                    else None
                ),
                "lift_to": (
                    rec.lifted_to.header()
                    if rec.lifted_to is not None
                    else None
                ),
                "rank_before": st.rank_before,
                "rank_after": st.rank_after,
                "field": st.after.spec.header(),
                "after": _images(st.after),
                "describe": rec.describe(),
            }
        )
    return {
        "schema": 1,
        "command": "chain",
        "seed": seed,
        "field": chain.start.spec.header(),
        "vars": chain.start.nvars,
        "start": _images(chain.start),
        "length": chain.length,
        "complete": chain.complete,
        "steps": steps,
    }


def _rebuild_chain(payload: dict) -> Chain:
    spec = parse_field_header("field " + payload["field"])
    n = int(payload["vars"])
    start = Endomorphism(
        spec, n, tuple(parse_polynomial(s, spec, n) for s in payload["start"])
    )
    cur = spec
    steps = []
    for sj in payload["steps"]:
        lift = (
            parse_field_header("field " + sj["lift_to"])
            if sj.get("lift_to")
            else None
        )
        step_spec = lift if lift is not None else cur
        value = None
        if sj.get("value") is not None:
            value = parse_polynomial(sj["value"], step_spec, n).constant_term()
        point = None
        if sj.get("point") is not None:
            point = tuple(
                parse_polynomial(s, step_spec, n).constant_term()
                for s in sj["point"]
            )
        rec = SubstitutionRecord(
            kind=sj["kind"],
            variable=sj["variable"],
            source=sj["source"],
            exponent=sj["exponent"],
            value=value,
            point=point,
            lifted_to=lift,
        )
        after = Endomorphism(
            step_spec,
            n,
            tuple(parse_polynomial(s, step_spec, n) for s in sj["after"]),
        )
        steps.append(ChainStep(rec, sj["rank_before"], sj["rank_after"], after))
        cur = step_spec
    return Chain(start, tuple(steps))


def _cmd_chain(args) -> tuple[dict, list[str]]:
    if args.verify:
        data = json.loads(_read(args.file))
        chain = _rebuild_chain(data)
        result = verify_chain(chain)
        payload = {
            "schema": 1,
            "command": "chain-verify",
            "ok": result.ok,
            "ranks": list(result.ranks),
            "problems": list(result.problems),
        }
        lines = [f"chain verification: {'ok' if result.ok else 'FAILED'}"]
        lines.append("ranks: " + " -> ".join(str(r) for r in result.ranks))
        lines.extend(f"problem: {p}" for p in result.problems)
        return payload, lines

    endo = load_endomorphism(_read(args.file))
    policy = ChainPolicy(r_max=args.r_max, seed=args.seed)
    chain = build_full_chain(endo, policy)
    payload = _chain_payload(chain, args.seed)
    lines = ["start:"] + [f"  {ln}" for ln in _endo_lines(chain.start)]
    for idx, st in enumerate(chain.steps, start=1):
        lines.append(
            f"step {idx}: {st.record.describe()} "
            f"[rank {st.rank_before} -> {st.rank_after}]"
        )
    lines.append(f"chain length: {chain.length}")
    return payload, lines


# -- Kronecker systems -----------------------------------------------------------


def _cmd_kron_verify(args) -> tuple[dict, list[str]]:
    system = load_kronecker_system(_read(args.file))
    report = verify_subbase(system)
    payload = {
        "schema": 1,
        "command": "kron-verify",
        "ok": report.ok,
        "relations_checked": report.relations_checked,
        "zero": _images(report.zero) if report.zero is not None else None,
        "problems": list(report.problems),
    }
    lines = [
        f"subbase: {'ok' if report.ok else 'FAILED'}",
        f"relations checked: {report.relations_checked}",
    ]
    if report.zero is not None:
        lines.append(f"common zero: {report.zero}")
    lines.extend(f"problem: {p}" for p in report.problems)
    return payload, lines


def _cmd_kron_classify(args) -> tuple[dict, list[str]]:
    system = load_kronecker_system(_read(args.file))
    kind = classify_representation(system)
    payload = {
        "schema": 1,
        "command": "kron-classify",
        "classification": kind.value,
    }
    return payload, [f"classification: {kind.value}"]


def _cmd_kron_base(args) -> tuple[dict, list[str]]:
    system = load_kronecker_system(_read(args.file))
    check = verify_base_external(system)
    failing = f"x{check.missing[0]}" if check.missing else None
    payload = {
        "schema": 1,
        "command": "kron-base",
        "is_base": check.is_base,
        "failing_generator_membership": failing,
        "missing": list(check.missing),
        "generators": [str(z) for z in check.generators],
        "witnesses": (
            [str(w) for w in check.certificate.witnesses]
            if check.certificate is not None
            else None
        ),
    }
    lines = [f"base: {'yes' if check.is_base else 'no'}"]
    lines.append(
        "generators: " + "; ".join(str(z) for z in check.generators)
    )
    if failing is not None:
        lines.append(f"not in the generated subalgebra: {failing}")
    return payload, lines


def _cmd_kron_normalize(args) -> tuple[dict, list[str]]:
    system = load_kronecker_system(_read(args.file))
    check = verify_base_external(system)
    if check.certificate is None:
        missing = ", ".join(f"x{k}" for k in check.missing)
        raise EndoRankError(
            f"not a base (membership fails for {missing}); "
            "nothing to normalize"
        )
    result = normalize_base(system, check.certificate)
    cert = result.certificate
    payload = {
        "schema": 1,
        "command": "kron-normalize",
        "normalized": cert.normalized,
        "generators": [str(z) for z in cert.generators],
        "witnesses": [str(w) for w in cert.witnesses],
        "gammas": [str(v) for v in result.gammas],
        "alphas": [str(v) for v in result.alphas],
        "scales": [[str(v) for v in row] for row in result.scales],
        "global_scale": str(result.global_scale),
    }
    lines = ["normalized generators:"]
    lines.extend(
        f"  z{k + 1} = {z}" for k, z in enumerate(cert.generators)
    )
    lines.append(f"global scale: {result.global_scale}")
    return payload, lines


# -- automorphisms ------------------------------------------------------------------


def _cmd_conj(args) -> tuple[dict, list[str]]:
    aut = load_automorphism(_read(args.aut))
    endo = load_endomorphism(_read(args.file))
    conj = conjugate(aut, endo)
    payload = {
        "schema": 1,
        "command": "conj",
        "seed": args.seed,
        "delta": str(aut.delta),
        "inner": aut.is_inner,
        "substitution": [str(f) for f in aut.s],
        "input": _images(endo),
        "conjugated": _images(conj),
        "properties": None,
    }
    lines = [f"delta: {aut.delta}", "conjugated:"]
    lines.extend(f"  {ln}" for ln in _endo_lines(conj))
    if args.properties:
        report = verify_automorphism_properties(
            aut, trials=args.trials, seed=args.seed
        )
        payload["properties"] = {
            "ok": report.ok,
            "inner": report.inner,
            "rank_pairs": [list(p) for p in report.rank_pairs],
            "kronecker_base_check": report.kronecker_base_check,
            "problems": list(report.problems),
        }
        lines.append(
            f"properties: {'ok' if report.ok else 'FAILED'} "
            f"(kronecker base check: {report.kronecker_base_check})"
        )
        lines.extend(f"problem: {p}" for p in report.problems)
    return payload, lines


def _cmd_invert(args) -> tuple[dict, list[str]]:
    endo = load_endomorphism(_read(args.file))
    inv = invert_poly_map(endo.images)
    payload = {
        "schema": 1,
        "command": "invert",
        "invertible": inv is not None,
        "inverse": [str(f) for f in inv] if inv is not None else None,
    }
    if inv is None:
        return payload, ["invertible: no"]
    lines = ["invertible: yes"]
    lines.extend(f"  x{k + 1} -> {f}" for k, f in enumerate(inv))
    return payload, lines


# -- selftest -----------------------------------------------------------------------

_GF2_COUNTEREXAMPLE = """\
field F 2
vars 2
x1 -> (x1^2 + x1) * (x2^2 + x2) * x1
x2 -> (x1^2 + x1) * (x2^2 + x2) * x2
"""

_KRON_TWO_GENERATOR = """\
# 2x2 family over Q built from u = x1 + x1*x2; a subbase but not a base.
field Q
vars 2
kron 2
e 1 1
x1 -> x1 + x1*x2
x2 -> 0
e 1 2
x1 -> 0
x2 -> x1 + x1*x2
e 2 1
x1 -> x2
x2 -> 0
e 2 2
x1 -> 0
x2 -> x2
zero
x1 -> 0
x2 -> 0
"""


def _selftest_checks():
    def gf2_rank() -> Optional[str]:
        endo = load_endomorphism(_GF2_COUNTEREXAMPLE)
        r = rank(endo).value
        return None if r == 2 else f"expected rank 2, got {r}"

    def gf2_specializations() -> Optional[str]:
        endo = load_endomorphism(_GF2_COUNTEREXAMPLE)
        spec = endo.spec
        for var in (1, 2):
            for raw in (0, 1):
                rec = SubstitutionRecord(
                    kind="specialize", variable=var, value=spec.element(raw)
                )
                after = compose(rec.sigma(spec, 2), endo)
                if any(not img.is_zero for img in after.images):
                    return f"x{var} := {raw} did not collapse to the zero map"
        return None

    def gf2_chain() -> Optional[str]:
        endo = load_endomorphism(_GF2_COUNTEREXAMPLE)
        chain = build_full_chain(endo, ChainPolicy(seed=1))
        if chain.length != 2:
            return f"expected a length-2 chain, got {chain.length}"
        first = chain.steps[0].record
        if first.kind != "power" or first.exponent > 4:
            return f"expected a small power step first, got {first.describe()}"
        result = verify_chain(chain)
        if not result.ok:
            return "; ".join(result.problems)
        return None

    def kron_subbase() -> Optional[str]:
        system = load_kronecker_system(_KRON_TWO_GENERATOR)
        report = verify_subbase(system)
        if not report.ok:
            return "; ".join(report.problems)
        return None

    def kron_not_base() -> Optional[str]:
        system = load_kronecker_system(_KRON_TWO_GENERATOR)
        check = verify_base_external(system)
        if check.is_base:
            return "two-generator family wrongly accepted as a base"
        if check.missing != (1,):
            return f"expected x1 to fail membership, got {check.missing}"
        return None

    def normalize_scaled() -> Optional[str]:
        system = KroneckerSystem.standard(QQ, 2)
        z = (
            MultiPoly.variable(QQ, 2, 0).scale(2),
            MultiPoly.variable(QQ, 2, 1).scale(3),
        )
        check = verify_base_external(system, Z=z)
        if not check.is_base or check.certificate is None:
            return "scaled generators rejected"
        result = normalize_base(system, check.certificate)
        want = (
            MultiPoly.variable(QQ, 2, 0),
            MultiPoly.variable(QQ, 2, 1),
        )
        if result.certificate.generators != want:
            return "normalization did not reduce scaled generators to x1, x2"
        return None

    def conj_frozen() -> Optional[str]:
        s = (
            parse_polynomial("x1 + x2^2", QQ, 2),
            parse_polynomial("x2", QQ, 2),
        )
        aut = SemiLinearAut.create(FieldAutomorphism.identity(QQ), s)
        g = Endomorphism(
            QQ,
            2,
            (
                MultiPoly.variable(QQ, 2, 1),
                MultiPoly.variable(QQ, 2, 0),
            ),
        )
        got = conjugate(aut, g)
        want = (
            parse_polynomial("x2 - (x1 + x2^2)^2", QQ, 2),
            parse_polynomial("x1 + x2^2", QQ, 2),
        )
        if got.images != want:
            return f"conjugate mismatch: {got}"
        return None

    def conj_frobenius() -> Optional[str]:
        xs = tuple(MultiPoly.variable(GF4, 2, k) for k in range(2))
        aut = SemiLinearAut.create(FieldAutomorphism(GF4, 1), xs)
        g = Endomorphism(GF4, 2, (xs[0].scale(GF4.generator()), xs[1]))
        got = conjugate(aut, g)
        want_coeff = GF4.element((1, 1))  # t + 1 = t^2
        want = Endomorphism(GF4, 2, (xs[0].scale(want_coeff), xs[1]))
        if got != want:
            return f"Frobenius twist mismatch: {got}"
        return None

    def json_determinism() -> Optional[str]:
        endo = load_endomorphism(_GF2_COUNTEREXAMPLE)
        blobs = []
        for _ in range(2):
            chain = build_full_chain(endo, ChainPolicy(seed=1))
            blobs.append(
                json.dumps(_chain_payload(chain, 1), indent=2, sort_keys=True)
            )
        return None if blobs[0] == blobs[1] else "chain payloads differ"

    return [
        ("gf2-counterexample-rank", gf2_rank),
        ("gf2-specializations-collapse", gf2_specializations),
        ("gf2-counterexample-chain", gf2_chain),
        ("kron-two-generator-subbase", kron_subbase),
        ("kron-two-generator-not-base", kron_not_base),
        ("kron-normalize-scaled", normalize_scaled),
        ("conj-regression", conj_frozen),
        ("conj-frobenius-gf4", conj_frobenius),
        ("json-determinism", json_determinism),
    ]


def _cmd_selftest(args) -> tuple[dict, list[str]]:
    results = []
    lines = ["selftest", "--------"]
    for name, fn in _selftest_checks():
        try:
            detail = fn()
        except Exception as exc:  # noqa: BLE001 - recorded, not hidden
            detail = f"{type(exc).__name__}: {exc}"
        ok = detail is None
        results.append({"name": name, "ok": ok, "detail": detail})
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name}")
        if detail is not None:
            lines.append(f"      {detail}")
    passed = sum(1 for r in results if r["ok"])
    lines.append(f"{passed} passed, {len(results) - passed} failed")
    payload = {
        "schema": 1,
        "command": "selftest",
        "ok": passed == len(results),
        "results": results,
    }
    return payload, lines


# -- wiring -------------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="endorank",
        description=(
            "Exact rank, order, chain, and matrix-unit computations for "
            "polynomial-algebra endomorphisms."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, seed=True, budget=True):
        p.add_argument(
            "--format",
            choices=("text", "json"),
            default="text",
            help="output format (default: text)",
        )
        if seed:
            p.add_argument("--seed", type=int, default=0, help="RNG seed")
        if budget:
            p.add_argument(
                "--budget",
                type=int,
                default=None,
                help="max polynomial reduction steps (overrides "
                "ENDORANK_BUDGET)",
            )

    p = sub.add_parser("rank", help="endomorphism rank with certificate")
    p.add_argument("file", help="endomorphism file")
    p.add_argument(
        "--method",
        choices=tuple(_METHODS),
        default="elim",
        help="elim = elimination ideal (exact); jacobian = probe "
        "(char 0 only, lower bound)",
    )
    common(p)
    p.set_defaults(handler=_cmd_rank)

    p = sub.add_parser("compare", help="order relation between two maps")
    p.add_argument("file", help="first endomorphism file")
    p.add_argument("other", help="second endomorphism file")
    p.add_argument(
        "--falsify",
        type=int,
        default=0,
        metavar="N",
        help="also run N falsifier trials on the verdict",
    )
    common(p)
    p.set_defaults(handler=_cmd_compare)

    p = sub.add_parser(
        "chain", help="rank-reducing substitution chain down to rank 0"
    )
    p.add_argument("file", help="endomorphism file (or chain JSON with --verify)")
    p.add_argument(
        "--r-max", type=int, default=8, help="largest power substitution tried"
    )
    p.add_argument(
        "--verify",
        action="store_true",
        help="treat FILE as a chain JSON report and replay it",
    )
    common(p)
    p.set_defaults(handler=_cmd_chain)

    p = sub.add_parser("kron-verify", help="matrix-unit relation audit")
    p.add_argument("file", help="Kronecker-system file")
    common(p, seed=False)
    p.set_defaults(handler=_cmd_kron_verify)

    p = sub.add_parser(
        "kron-classify", help="singular / nonsingular classification"
    )
    p.add_argument("file", help="Kronecker-system file")
    common(p, seed=False)
    p.set_defaults(handler=_cmd_kron_classify)

    p = sub.add_parser("kron-base", help="decide the base property")
    p.add_argument("file", help="Kronecker-system file")
    common(p, seed=False)
    p.set_defaults(handler=_cmd_kron_base)

    p = sub.add_parser(
        "kron-normalize", help="rescale/recenter a base to literal form"
    )
    p.add_argument("file", help="Kronecker-system file")
    common(p, seed=False)
    p.set_defaults(handler=_cmd_kron_normalize)

    p = sub.add_parser("conj", help="conjugate a map by an automorphism")
    p.add_argument("aut", help="automorphism file")
    p.add_argument("file", help="endomorphism file")
    p.add_argument(
        "--properties",
        action="store_true",
        help="also spot-check automorphism invariants",
    )
    p.add_argument(
        "--trials", type=int, default=6, help="samples for --properties"
    )
    common(p)
    p.set_defaults(handler=_cmd_conj)

    p = sub.add_parser("invert", help="invert a polynomial self-map")
    p.add_argument("file", help="endomorphism file")
    common(p, seed=False)
    p.set_defaults(handler=_cmd_invert)

    p = sub.add_parser("selftest", help="run the built-in regression fixtures")
    common(p, seed=False)
    p.set_defaults(handler=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    env_budget = os.environ.get("ENDORANK_BUDGET")
    try:
        if env_budget is not None:
            set_budget(int(env_budget))
        if getattr(args, "budget", None) is not None:
            set_budget(args.budget)
    except ValueError as exc:
        print(f"endorank: error: bad budget: {exc}", file=sys.stderr)
        return 1

    try:
        payload, lines = args.handler(args)
    except (BudgetExceeded, SearchExhausted) as exc:
        print(f"endorank: exhausted: {exc}", file=sys.stderr)
        return 2
    except (EndoRankError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"endorank: error: {exc}", file=sys.stderr)
        return 1

    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))

    if args.command == "selftest" and not payload["ok"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
