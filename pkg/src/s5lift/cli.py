"""Command-line front end.

Every subcommand reads one JSON value (``--input``, default stdin), writes
one JSON value (``--output``, default stdout) and exits with 0 when all
checks pass, 1 when a check fails and 2 on invalid input.
"""

import argparse
import json
import sys

from .actions import SymmetricAction, decompose_faithful, orbits, validate_action
from .algebras import (
    AlgebraHom,
    S5Algebra,
    algebra_to_frame,
    check_s5_axioms,
    frame_to_algebra,
    hom_to_pmorphism,
    pmorphism_to_hom,
)
from .errors import S5LiftError
from .frames import (
    ClusterFamily,
    FiniteFrame,
    PMorphism,
    cluster_signature,
    frame_coequalizer,
    frame_coproduct,
    from_cluster_family,
)
from .lifting import canonical_lifting, enumerate_nat_transformations, verify_lifting_conditions
from .presheaves import TruncatedPresheaf
from .surjections import Surjection, coequalizer_surj, enumerate_surjections, pushout_surj
from .theory import check_lex_preservation, check_T1, check_T2, classify_model, model_from_frame

OK, FAILED, INVALID = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load(args):
    if args.input in (None, "-"):
        text = sys.stdin.read()
    else:
        with open(args.input) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"input is not JSON: {exc}") from None


def _field(obj, key):
    if not isinstance(obj, dict) or key not in obj:
        raise UsageError(f"input needs a {key!r} field")
    return obj[key]


def _verdict(passed):
    return OK if passed else FAILED


# -- surj ------------------------------------------------------------------------

def surj_enumerate(args):
    if args.n is None or args.m is None:
        raise UsageError("surj enumerate needs --n and --m")
    return [s.to_json() for s in enumerate_surjections(args.n, args.m)], OK


def surj_coeq(args):
    obj = _load(args)
    f, g = Surjection.from_json(_field(obj, "f")), Surjection.from_json(_field(obj, "g"))
    return coequalizer_surj(f, g).to_json(), OK


def surj_pushout(args):
    obj = _load(args)
    f, g = Surjection.from_json(_field(obj, "f")), Surjection.from_json(_field(obj, "g"))
    a, b = pushout_surj(f, g)
    return {"f_push": a.to_json(), "g_push": b.to_json()}, OK


# -- frame -------------------------------------------------------------------------

def frame_coeq(args):
    obj = _load(args)
    f, g = PMorphism.from_json(_field(obj, "f")), PMorphism.from_json(_field(obj, "g"))
    quot, q = frame_coequalizer(f, g)
    return {"quotient": quot.to_json(), "projection": q.to_json()}, OK


def frame_coprod(args):
    obj = _load(args)
    frames = obj if isinstance(obj, list) else _field(obj, "frames")
    total, injections = frame_coproduct([FiniteFrame.from_json(fr) for fr in frames])
    return {"coproduct": total.to_json(), "injections": [i.to_json() for i in injections]}, OK


def frame_dual(args):
    obj = _load(args)
    if isinstance(obj, dict) and "map" in obj:
        return pmorphism_to_hom(PMorphism.from_json(obj), args.atom_cap).to_json(), OK
    return frame_to_algebra(FiniteFrame.from_json(obj), args.atom_cap).to_json(), OK


def frame_signature(args):
    obj = _load(args)
    if isinstance(obj, dict) and "sizes" in obj:
        frame = from_cluster_family(ClusterFamily.from_json(obj))
    else:
        frame = FiniteFrame.from_json(obj)
    return {"signature": cluster_signature(frame)}, OK


# -- algebra ---------------------------------------------------------------------

def algebra_check(args):
    report = check_s5_axioms(S5Algebra.from_json(_load(args)))
    return report.to_json(), _verdict(report.passed)


def algebra_dual(args):
    obj = _load(args)
    if isinstance(obj, dict) and "map" in obj:
        return hom_to_pmorphism(AlgebraHom.from_json(obj)).to_json(), OK
    return algebra_to_frame(S5Algebra.from_json(obj)).to_json(), OK


# -- action ----------------------------------------------------------------------

def action_validate(args):
    report = validate_action(SymmetricAction.from_json(_load(args)), args.cap)
    return report.to_json(), _verdict(report.passed)


def action_orbits(args):
    dec = orbits(SymmetricAction.from_json(_load(args)))
    return {"orbit_of": list(dec.orbit_of), "orbits": [list(o) for o in dec.orbits()]}, OK


def action_decompose(args):
    parts = decompose_faithful(SymmetricAction.from_json(_load(args)), cap=args.cap)
    return [
        {"base": p.base, "elements": list(p.elements),
         "perm_of": {str(x): i for x, i in sorted(p.perm_of.items())}}
        for p in parts
    ], OK


# -- lift --------------------------------------------------------------------------

def _lifting_json(L):
    out = L.to_json()
    out["unit"] = list(L.unit)
    out["labels"] = [[[x, list(q)] for x, q in level] for level in L.labels]
    return out


def lift_build(args):
    a = SymmetricAction.from_json(_load(args))
    return _lifting_json(canonical_lifting(a, args.level, args.cap)), OK


def lift_verify(args):
    obj = _load(args)
    if isinstance(obj, dict) and "action" in obj:
        a = SymmetricAction.from_json(obj["action"])
        if "presheaf" in obj:
            L = TruncatedPresheaf.from_json(obj["presheaf"])
            eta = _field(obj, "unit") if "unit" in obj else obj["presheaf"].get("unit")
            if eta is None:
                raise UsageError("verify needs the unit η next to the presheaf")
        else:
            L = canonical_lifting(a, args.level, args.cap)
            eta = L.unit
    else:
        a = SymmetricAction.from_json(obj)
        L = canonical_lifting(a, args.level, args.cap)
        eta = L.unit
    report = verify_lifting_conditions(L, a, tuple(eta))
    return report.to_json(), _verdict(report.passed)


def lift_homs(args):
    obj = _load(args)
    X = TruncatedPresheaf.from_json(_field(obj, "source"))
    Y = TruncatedPresheaf.from_json(_field(obj, "target"))
    homs = enumerate_nat_transformations(X, Y)
    return {"count": len(homs), "transformations": [h.to_json() for h in homs]}, OK


# -- theory ----------------------------------------------------------------------

def _structure(args):
    return TruncatedPresheaf.from_json(_load(args))


def theory_t1(args):
    report = check_T1(_structure(args))
    return report.to_json(), _verdict(report.passed)


def theory_t2(args):
    report = check_T2(_structure(args), fix_trivial_only=not args.all_elements)
    return report.to_json(), _verdict(report.passed)


def theory_lex(args):
    report = check_lex_preservation(_structure(args))
    return report.to_json(), _verdict(report.passed)


def theory_classify(args):
    return classify_model(_structure(args)).to_json(), OK


def theory_from_frame(args):
    obj = _load(args)
    if isinstance(obj, dict) and "blocks" in obj:
        sizes = cluster_signature(FiniteFrame.from_json(obj))
    elif isinstance(obj, dict):
        sizes = obj.get("sizes", obj)
    else:
        sizes = obj
    if isinstance(sizes, dict):
        try:
            sizes = {int(k): int(v) for k, v in sizes.items()}
        except (TypeError, ValueError):
            raise UsageError("cluster multiset keys and counts must be integers") from None
    elif not isinstance(sizes, list):
        raise UsageError("expected a frame, a size list or a size multiset")
    return model_from_frame(sizes, args.level).to_json(), OK


# -- suite ---------------------------------------------------------------------

def run_suite_command(args):
    from .suite import run_suite

    only = set(args.criterion) if args.criterion else None
    results = run_suite(seed=args.seed, only=only)
    for r in results:
        print(r.line(), file=sys.stderr)
    passed = all(r.passed for r in results)
    return {"seed": args.seed, "verdict": "pass" if passed else "fail",
            "criteria": [r.to_json() for r in results]}, _verdict(passed)


COMMANDS = {
    "surj": {"enumerate": surj_enumerate, "coeq": surj_coeq, "pushout": surj_pushout},
    "frame": {"coeq": frame_coeq, "coprod": frame_coprod, "dual": frame_dual, "signature": frame_signature},
    "algebra": {"check": algebra_check, "dual": algebra_dual},
    "action": {"validate": action_validate, "orbits": action_orbits, "decompose": action_decompose},
    "lift": {"build": lift_build, "verify": lift_verify, "homs": lift_homs},
    "theory": {
        "check-t1": theory_t1,
        "check-t2": theory_t2,
        "check-lex": theory_lex,
        "classify": theory_classify,
        "from-frame": theory_from_frame,
    },
}


def _common(p):
    p.add_argument("--input", default="-", help="JSON input file, '-' for stdin")
    p.add_argument("--output", default="-", help="JSON output file, '-' for stdout")
    p.add_argument("--level", type=int, default=5, help="truncation level N")
    p.add_argument("--cap", type=int, default=6, help="largest symmetric group enumerated")
    p.add_argument("--atom-cap", type=int, default=12, help="largest frame turned into an algebra")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json"], default="json")


def build_parser():
    parser = _Parser(prog="s5lift", description="Finite S5 duality, liftings and theory checks.")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)
    for group, subs in COMMANDS.items():
        gp = groups.add_parser(group)
        actions = gp.add_subparsers(dest="command", required=True, parser_class=_Parser)
        for name in subs:
            p = actions.add_parser(name)
            _common(p)
            if (group, name) == ("surj", "enumerate"):
                p.add_argument("--n", type=int)
                p.add_argument("--m", type=int)
            if (group, name) == ("theory", "check-t2"):
                p.add_argument("--all-elements", action="store_true",
                               help="quantify (6) over every element, not only fix-trivial ones")
    sp = groups.add_parser("suite")
    _common(sp)
    sp.add_argument("--criterion", type=int, action="append", choices=range(1, 10),
                    help="run only this criterion (repeatable)")
    return parser


def _emit(payload, dest):
    text = json.dumps(payload, sort_keys=False) + "\n"
    if dest in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(dest, "w") as fh:
            fh.write(text)


def run(argv=None):
    parser = build_parser()
    dest = None
    try:
        args = parser.parse_args(argv)
        dest = args.output
        if args.level < 1 or args.cap < 1:
            raise UsageError("--level and --cap must be positive")
        handler = run_suite_command if args.group == "suite" else COMMANDS[args.group][args.command]
        payload, code = handler(args)
    except UsageError as exc:
        _emit({"error": "usage", "message": str(exc)}, dest)
        return INVALID
    except S5LiftError as exc:
        _emit(exc.to_json(), dest)
        return INVALID
    except (AttributeError, KeyError, TypeError, ValueError) as exc:
        _emit({"error": "invalid", "message": f"{type(exc).__name__}: {exc}"}, dest)
        return INVALID
    except OSError as exc:
        _emit({"error": "io", "message": str(exc)}, None)
        return INVALID
    _emit(payload, dest)
    return code


def main():
    sys.exit(run())
