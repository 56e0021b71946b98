"""Command-line entry point: ``python -m g2scale <command> ...``.

JSON goes to stdout (or ``--out``), diagnostics to stderr. Exit codes: 0 when
everything passes, 1 when a verification fails, 2 for malformed input.
"""
import argparse
import json
import sys

from .config import conf
from .debug import de_bug
from .errors import (
    ClassificationError, ConfigError, ConstraintError, DegenerateFormError, ExpressionError,
    G2ScaleError, InputError, NormalizationError, RecoveryError,
)
from .forms import DIM, KForm, array
from .g2core import G2Structure, standard_structure
from .klog import klogger
from .scalars import ExactScalar, sign_of

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

# errors that mean the input itself is unusable
_INPUT_ERRORS = (
    InputError, ConfigError, ExpressionError, DegenerateFormError, ClassificationError,
    ConstraintError, NormalizationError,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message, "argv")


def build_parser():
    parser = _Parser(prog="g2scale", description="Almost Einstein (2,3,5) distributions.")
    parser.add_argument("--config", help="plain-text key = value settings file")
    parser.add_argument("--backend", choices=("exact", "float"))
    parser.add_argument("--log-level", dest="log_level")
    parser.add_argument("--log-file", dest="log_file")
    parser.add_argument("--out", dest="output", help="write JSON here instead of stdout")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--points", type=int)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    selftest = sub.add_parser("selftest", help="exact identity suites")
    selftest.add_argument("--suite", default="all", choices=("scalars", "forms", "g2core", "stabilizer", "all"))
    selftest.add_argument("--scale", type=float, default=1.0, help="shrink every trial count")

    family = sub.add_parser("family", help="a member of the family through the standard Phi")
    family.add_argument("--eps", type=int, required=True, choices=(-1, 0, 1))
    family.add_argument("--s", dest="S", help="comma separated S; defaults to a witness of the given eps")
    family.add_argument("--param", required=True, metavar="VARIANT:V1[,V2]",
                        help="raw:A,B | circle:COS,SIN | hyperbolic:COSH,SINH | parabolic:S"
                             " | angle:U | parameter:T (float backend only for the last two)")
    family.add_argument("--branch", default="-", choices=("-", "+"))

    recover = sub.add_parser("recover", help="recover S and the family parameters")
    recover.add_argument("--phi", required=True)
    recover.add_argument("--phi-prime", dest="phi_prime", required=True)

    classify = sub.add_parser("classify", help="curved orbit of the ray through X")
    classify.add_argument("--s", dest="S", required=True)
    classify.add_argument("--x", dest="X", required=True)

    gallery = sub.add_parser("gallery", help="worked examples")
    gsub = gallery.add_subparsers(dest="action", parser_class=_Parser)
    gsub.required = True
    gsub.add_parser("list")
    verify = gsub.add_parser("verify")
    verify.add_argument("name")
    verify.add_argument("--points", dest="verify_points", type=int)
    verify.add_argument("--seed", dest="verify_seed", type=int)
    verify.add_argument("--tol", type=float)
    verify.add_argument("--upsilon", type=float)
    verify.add_argument("--t", type=float)
    verify.add_argument("--branch", choices=("-", "+"))
    verify.add_argument("--I", type=float)
    verify.add_argument("--scale", dest="scales", action="append", metavar="EXPR",
                        help="replacement almost Einstein scale (submaximal only; repeatable)")
    verify.add_argument("--workers", type=int, default=1)
    curvature = gsub.add_parser("curvature")
    curvature.add_argument("name")
    curvature.add_argument("--x", dest="X", required=True)
    return parser


def parse_scalar(text, backend, field):
    text = text.strip()
    if backend == "float":
        try:
            return float(ExactScalar.parse(text)) if "sqrt2" in text or "/" in text else float(text)
        except (ValueError, InputError):
            raise InputError("malformed number {!r}".format(text), field) from None
    if any(c in text for c in ".eE"):
        raise InputError("float literal {!r} in the exact backend".format(text), field)
    try:
        return ExactScalar.parse(text)
    except InputError as error:
        raise InputError(str(error), field) from None


def parse_vector(text, backend, field, size=DIM):
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != size:
        raise InputError("expected {} comma separated entries, got {}".format(size, len(parts)), field)
    return array([parse_scalar(p, backend, field) for p in parts], backend)


def read_form(path, key, backend):
    """A 3-form record from ``path``; a family report is read at ``key``."""
    try:
        with open(path, "r") as handle:
            data = json.load(handle)
    except OSError as error:
        raise InputError("cannot read {}: {}".format(path, error), path) from None
    except json.JSONDecodeError as error:
        raise InputError("{} is not JSON: {}".format(path, error), path) from None
    if isinstance(data, dict) and key in data:
        data = data[key]
    try:
        form = KForm.from_json(data, backend)
    except InputError as error:
        raise InputError(str(error), "{}:{}".format(path, error.field)) from None
    if form.degree != 3:
        raise InputError("expected a 3-form", "{}:degree".format(path))
    return form


def _witness(eps, backend):
    from .selftest import WITNESSES
    return array(list(WITNESSES[eps]), backend)


def _family_param(values, branch, backend):
    from .stabilizer import FamilyParam
    variant, _, rest = values.partition(":")
    raw = [v for v in rest.split(",") if v.strip()]
    arity = {"raw": 2, "circle": 2, "hyperbolic": 2, "parabolic": 1, "angle": 1, "parameter": 1}
    if variant not in arity:
        raise InputError("unknown parameterization {!r}".format(variant), "param")
    if len(raw) != arity[variant]:
        raise InputError("{} takes {} value(s)".format(variant, arity[variant]), "param")
    if variant in ("angle", "parameter"):
        if backend != "float":
            raise InputError("{} needs transcendental values; use --backend float".format(variant), "param")
        x = parse_scalar(raw[0], backend, "param")
        if variant == "angle":
            return FamilyParam.from_angle(x)
        return FamilyParam.from_parameter(branch, x)
    nums = [parse_scalar(v, backend, "param") for v in raw]
    match variant:
        case "raw":
            return FamilyParam.raw(*nums)
        case "circle":
            return FamilyParam.circle(*nums)
        case "hyperbolic":
            return FamilyParam.hyperbolic(branch, *nums)
        case _:
            return FamilyParam.parabolic(*nums)


def _text(v):
    return str(v) if isinstance(v, ExactScalar) else float(v)


def cmd_selftest(args):
    from .selftest import run_suites
    report = run_suites(args.suite, conf.seed, args.scale)
    return report, report["overall"]


def cmd_family(args):
    from .stabilizer import family_member, make_stabilizer
    backend = conf.backend
    G = standard_structure(backend)
    S = parse_vector(args.S, backend, "s") if args.S else _witness(args.eps, backend)
    SD = make_stabilizer(G, S, conf.tol_identity)
    if SD.eps != args.eps:
        raise InputError("S has eps = {}, not {}".format(SD.eps, args.eps), "s")
    param = _family_param(args.param, args.branch, backend)
    member = family_member(SD, G, param, conf.tol_identity)
    report = {
        "backend": backend,
        "eps": SD.eps,
        "S": [_text(x) for x in SD.S],
        "param": param.to_json(),
        "phi": G.phi.to_json(),
        "phi_prime": member.to_json(),
    }
    return report, True


def cmd_recover(args):
    from .stabilizer import recover_scale
    backend = conf.backend
    phi = read_form(args.phi, "phi", backend)
    phi_prime = read_form(args.phi_prime, "phi_prime", backend)
    G = G2Structure(phi)
    try:
        result = recover_scale(G, phi_prime, conf.causal_rel, conf.causal_abs, conf.tol_order2)
    except RecoveryError as error:
        de_bug("recovery failed: {}".format(error), "ERROR")
        return {"backend": backend, "error": str(error), "branch": error.branch,
                "residual": error.residual}, False
    return dict(result.to_json(), backend=backend), True


def cmd_classify(args):
    from .stabilizer import classify_ray
    backend = conf.backend
    G = standard_structure(backend)
    S = parse_vector(args.S, backend, "s")
    X = parse_vector(args.X, backend, "x")
    label = classify_ray(G, S, X, tol=conf.tol_identity)
    eps = -sign_of(G.pairing(S, S), conf.tol_identity)
    return {"backend": backend, "eps": eps, "label": label,
            "S": [_text(x) for x in S], "X": [_text(x) for x in X]}, True


def cmd_gallery(args):
    from .gallery import available_examples, verify_example
    from .gallery.verify import curvature_report
    match args.action:
        case "list":
            return {"examples": available_examples()}, True
        case "curvature":
            x = [float(v) for v in parse_vector(args.X, "float", "x", size=5)]
            return curvature_report(args.name, x), True
        case _:
            overrides = {
                "points": args.verify_points or conf.points,
                "seed": args.verify_seed if args.verify_seed is not None else conf.seed,
                "tol": args.tol,
                "upsilon": args.upsilon,
                "t": args.t,
                "branch": args.branch,
                "I": args.I,
                "scales": args.scales,
                "workers": args.workers,
            }
            report = verify_example(args.name, overrides)
            return report.to_json(), report.overall


def configure(args):
    conf.reset()
    if args.config:
        conf.load(args.config)
    conf.update(backend=args.backend, log_level=args.log_level, log_file=args.log_file,
                output=args.output, seed=args.seed, points=args.points)
    klogger.set_level(conf.log_level)
    if conf.log_file:
        klogger.add_file_handler(conf.log_file)


def emit(report):
    text = json.dumps(report, sort_keys=True, indent=2)
    if conf.output:
        with open(conf.output, "w") as handle:
            handle.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def run(argv=None):
    try:
        args = build_parser().parse_args(argv)
        configure(args)
        klogger.debug("command {} with settings {}".format(args.command, conf.as_dict()))
        match args.command:
            case "selftest":
                report, passed = cmd_selftest(args)
            case "family":
                report, passed = cmd_family(args)
            case "recover":
                report, passed = cmd_recover(args)
            case "classify":
                report, passed = cmd_classify(args)
            case "gallery":
                report, passed = cmd_gallery(args)
            case _:
                raise InputError("unknown command {!r}".format(args.command), "command")
        emit(report)
    except _INPUT_ERRORS as error:
        field = getattr(error, "field", None)
        de_bug("{}{}".format("[{}] ".format(field) if field else "", error), "ERROR")
        return EXIT_USAGE
    except G2ScaleError as error:
        de_bug(error, "ERROR")
        return EXIT_FAILED
    except OSError as error:
        de_bug("cannot write output: {}".format(error), "ERROR")
        return EXIT_USAGE
    finally:
        klogger.remove_file_handler()
    if not passed:
        de_bug("verification failed", "WARNING")
    return EXIT_OK if passed else EXIT_FAILED


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
