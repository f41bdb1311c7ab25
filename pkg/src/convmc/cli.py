"""Command line interface: validation, homology, the two constructions,
Maurer-Cartan checks, twisted homotopy groups, Hopf invariants, homotopy
decisions, gauge certificate verification, component search, and
homotopy transfer.

Model arguments accept either a file path or a bundled model name (s2,
s3, s4, s2vs3, cp2, s2xs2, pi_s2, pi_s3, ab2, ab23).  Output is a single
JSON document on standard out, canonically ordered so identical inputs
give byte-identical bytes; --out writes it to a file instead.  Errors
are JSON on standard error with exit code 2.  Semantic failures (a
residual that is not zero, a certificate that does not verify) exit 1;
an undecided homotopy question exits 3.

The truncation window is taken from --window, then the CONVMC_WINDOW
environment variable, then a per-command default.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys

from . import hopf, mapping, modelio
from . import words as wd
from .barcobar import bar, cobar
from .convolution import ConvolutionAlgebra
from .gauge import Distinct, Equal, GaugePath, Unknown
from .graded import ChainComplex, contraction_from_complex
from .library import BUILTIN_COALGEBRAS, BUILTIN_TARGETS, builtin_model
from .models import CdgCoalgebra, LInfinityAlgebra, QuillenModel
from .modelio import ModelFileError
from .transfer import transfer_linfty

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_ERROR = 2
EXIT_UNKNOWN = 3

WINDOW_ENV = "CONVMC_WINDOW"


def _load(arg: str):
    """A model object from a file path or a bundled name."""
    if os.path.exists(arg):
        return modelio.record_to_object(modelio.load_record(arg))
    if arg in BUILTIN_COALGEBRAS or arg in BUILTIN_TARGETS:
        return builtin_model(arg)
    raise ModelFileError(arg, "no such file or bundled model")


def _load_coalgebra(arg: str) -> CdgCoalgebra:
    obj = _load(arg)
    if not isinstance(obj, CdgCoalgebra):
        raise ModelFileError(arg, "expected a coalgebra model")
    return obj


def _load_linfty(arg: str) -> LInfinityAlgebra:
    obj = _load(arg)
    if not isinstance(obj, LInfinityAlgebra):
        raise ModelFileError(arg, "expected a homotopy algebra model")
    return obj


def _load_element(arg: str) -> dict:
    rec = modelio.load_record(arg)
    if rec.get("kind") not in ("mc_element", "map"):
        raise ModelFileError(arg, "expected an mc_element or map record")
    return rec


def _window(args, fallback: int) -> int:
    if getattr(args, "window", None) is not None:
        return args.window
    env = os.environ.get(WINDOW_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise ModelFileError(WINDOW_ENV,
                                 f"not an integer: {env!r}") from None
    return fallback


def _top_degree(sp) -> int:
    return max(sp.degrees(), default=2)


def _emit(args, rec: dict) -> None:
    text = modelio.dumps_record(rec)
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands ------------------------------------------------------------

def cmd_validate(args) -> int:
    rec = modelio.load_record(args.file)
    obj = modelio.record_to_object(rec)
    if isinstance(obj, dict):
        for i, row in enumerate(obj.get("entries", [])):
            modelio.frac_from_str(row[2] if isinstance(row, list)
                                  and len(row) == 3 else None,
                                  f"entries[{i}]")
        _emit(args, {"kind": "validation_report", "valid": True,
                     "checked": obj.get("kind")})
        return EXIT_OK
    if isinstance(obj, GaugePath):
        ok = obj.path_check().is_zero()
        _emit(args, {"kind": "validation_report", "valid": ok,
                     "checked": "gauge_path"})
        return EXIT_OK if ok else EXIT_FAIL
    if isinstance(obj, (Equal, Distinct, Unknown)):
        ok = not isinstance(obj, Unknown) and obj.verify()
        _emit(args, {"kind": "validation_report", "valid": ok,
                     "checked": "certificate"})
        return EXIT_OK if ok else EXIT_FAIL
    obj.validate()
    _emit(args, {"kind": "validation_report", "valid": True,
                 "checked": rec.get("kind")})
    return EXIT_OK


def _as_complex(obj) -> ChainComplex:
    if isinstance(obj, CdgCoalgebra):
        return ChainComplex(obj.space, obj.d, name=obj.name)
    if isinstance(obj, (QuillenModel, LInfinityAlgebra)):
        return obj.as_chain_complex()
    raise ModelFileError("file", "no chain complex for this kind")


def cmd_homology(args) -> int:
    cx = _as_complex(_load(args.file))
    betti = cx.betti()
    if args.degree is not None:
        betti = {d: n for d, n in betti.items() if d == args.degree}
    _emit(args, {"kind": "homology_report", "name": cx.name,
                 "betti": modelio._betti_to_json(betti)})
    return EXIT_OK


def cmd_cobar(args) -> int:
    C = _load_coalgebra(args.file)
    window = _window(args, _top_degree(C.space) + 3)
    om = cobar(C, degree_max=window)
    rec = modelio.quillen_to_record(om)
    rec["window"] = window
    rec["exact_through"] = om.exact_through
    _emit(args, rec)
    return EXIT_OK


def cmd_bar(args) -> int:
    L = _load_linfty(args.file)
    window = _window(args, _top_degree(L.space) + 3)
    B = bar(L, window)
    rec = modelio.cdgc_to_record(B)
    rec["window"] = window
    rec["exact_through"] = B.exact_through
    _emit(args, rec)
    return EXIT_OK


def _conv_and_tau(args):
    C = _load_coalgebra(args.C)
    L = _load_linfty(args.L)
    conv = ConvolutionAlgebra(C, L)
    tau = modelio.element_from_record(_load_element(args.tau),
                                      C.space, L.space)
    return conv, tau


def cmd_mc_check(args) -> int:
    conv, tau = _conv_and_tau(args)
    res = conv.mc_check(tau)
    ok = res.is_zero()
    _emit(args, {"kind": "mc_report", "is_mc": ok,
                 "residual": modelio.gmap_to_json(res)})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_twist(args) -> int:
    conv, tau = _conv_and_tau(args)
    tw = conv.twist(tau)
    _emit(args, {"kind": "twist_report",
                 "betti": modelio._betti_to_json(tw.betti()),
                 "differential": modelio.gmap_to_json(tw.d)})
    return EXIT_OK


def cmd_pi(args) -> int:
    conv, tau = _conv_and_tau(args)
    if args.n < 1:
        raise ModelFileError("--n", "component homotopy starts at n = 1")
    con = contraction_from_complex(conv.twist(tau))
    H = con.small.space
    names = H.basis(args.n) if args.n in H.degrees() else ()
    classes = [{"name": modelio.encode_key(k),
                "representative": modelio.entries_to_json(
                    {k: con.i.column(k)})}
               for k in names]
    _emit(args, {"kind": "pi_report", "n": args.n, "dim": len(names),
                 "classes": classes})
    return EXIT_OK


def _map_representation(rec: dict, C: CdgCoalgebra, D: CdgCoalgebra,
                        model, window: int):
    if rec.get("kind") == "map":
        f = modelio.element_from_record(rec, C.space, D.space)
        return hopf.MapRepresentation.from_coalgebra_morphism(
            C, D, f, degree_max=window, name=rec.get("name", ""))
    tau = modelio.element_from_record(rec, C.space, model.algebra.space)
    return hopf.MapRepresentation.from_mc(C, model, tau,
                                          name=rec.get("name", ""))


def cmd_hopf(args) -> int:
    C = _load_coalgebra(args.C)
    D = _load_coalgebra(args.D)
    window = _window(args, _top_degree(D.space) + 2)
    model = hopf.loop_homology(D, window)
    rep = _map_representation(_load_element(args.map), C, D, model, window)
    inv = hopf.hopf_invariant(rep)
    _emit(args, {"kind": "hopf_report",
                 "source": C.name, "target": D.name, "window": window,
                 "fingerprint": inv.fingerprint,
                 "representative": modelio.gmap_to_json(inv.representative),
                 "verified": inv.verify()})
    return EXIT_OK


def cmd_homotopic(args) -> int:
    C = _load_coalgebra(args.C)
    D = _load_coalgebra(args.D)
    window = _window(args, _top_degree(D.space) + 2)
    model = hopf.loop_homology(D, window)
    fa = _map_representation(_load_element(args.f), C, D, model, window)
    fb = _map_representation(_load_element(args.g), C, D, model, window)
    cert = hopf.maps_homotopic(fa, fb)
    rec = {"kind": "homotopy_report", "outcome": cert.outcome,
           "window": window,
           "certificate": modelio.certificate_to_record(cert)}
    _emit(args, rec)
    if isinstance(cert, Equal):
        return EXIT_OK
    if isinstance(cert, Distinct):
        return EXIT_FAIL
    return EXIT_UNKNOWN


def cmd_gauge_check(args) -> int:
    obj = modelio.record_to_object(modelio.load_record(args.file))
    if isinstance(obj, GaugePath):
        ok = obj.path_check().is_zero()
        _emit(args, {"kind": "gauge_check_report", "checked": "gauge_path",
                     "valid": ok})
        return EXIT_OK if ok else EXIT_FAIL
    if isinstance(obj, (Equal, Distinct)):
        ok = obj.verify()
        _emit(args, {"kind": "gauge_check_report", "checked": "certificate",
                     "outcome": obj.outcome, "valid": ok})
        return EXIT_OK if ok else EXIT_FAIL
    if isinstance(obj, Unknown):
        _emit(args, {"kind": "gauge_check_report", "checked": "certificate",
                     "outcome": "unknown", "valid": False,
                     "reason": obj.reason})
        return EXIT_UNKNOWN
    raise ModelFileError(args.file, "expected a gauge path or certificate")


def cmd_components(args) -> int:
    source = _load(args.C)
    if not isinstance(source, (CdgCoalgebra, QuillenModel)):
        raise ModelFileError(args.C, "expected a coalgebra or free Lie model")
    L = _load_linfty(args.L)
    window = _window(args, None) if (args.window is not None
                                     or os.environ.get(WINDOW_ENV)) else None
    restrict = None
    if args.param is not None:
        try:
            rows = json.loads(args.param)
        except json.JSONDecodeError as exc:
            raise ModelFileError("--param", f"not valid JSON: {exc}") \
                from None
        restrict = [modelio.decode_key(r, "--param") for r in rows]
    samples = tuple(int(s) for s in args.samples.split(","))
    report = mapping.components(source, L, restrict_to=restrict,
                                samples=samples, degree_max=window)
    classes = [{"representative": modelio.gmap_to_json(c.representative),
                "verified": c.verify()} for c in report.classes]
    pairwise = [[i, j, cert.outcome] for i, j, cert in report.pairwise]
    _emit(args, {"kind": "components_report",
                 "summary": report.summary(),
                 "exhaustive": report.exhaustive,
                 "method": report.method,
                 "free_parameters": list(report.free_parameters),
                 "parametric": [
                     sorted([[modelio.encode_key(p), e]
                             for p, e in branch.items()],
                            key=lambda r: modelio._canon(r[0]))
                     for branch in report.parametric],
                 "classes": classes,
                 "pairwise": pairwise,
                 "notes": report.notes})
    return EXIT_OK


def cmd_transfer(args) -> int:
    C = _load_coalgebra(args.file)
    window = _window(args, _top_degree(C.space) + 2)
    t = transfer_linfty(cobar(C, degree_max=window), arity_max=args.arity)
    t.validate()

    def morphism_rows(m):
        sp = m.source.space
        keys = sorted(sp.all_keys(), key=sp.sort_key)
        rows = []
        for n in range(1, args.arity + 1):
            for combo in itertools.combinations_with_replacement(keys, n):
                sw = wd.sort_letters(sp, combo)
                if sw is None or sw[0] != combo:
                    continue
                for dst, c in m.component(n, combo).items():
                    rows.append([n, [modelio.encode_key(k) for k in combo],
                                 modelio.encode_key(dst),
                                 modelio.frac_to_str(c)])
        rows.sort(key=lambda r: (r[0], modelio._canon(r[1]),
                                 modelio._canon(r[2])))
        return rows

    alg = modelio.linfty_to_record(t.algebra, args.arity)
    _emit(args, {"kind": "transfer_report", "window": window,
                 "arity_max": args.arity,
                 "fingerprint": t.contraction.fingerprint,
                 "homology": alg["basis"],
                 "brackets": alg["brackets"],
                 "inclusion": morphism_rows(t.inclusion_infinity()),
                 "projection": morphism_rows(t.projection_infinity())})
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="convmc",
        description="exact rational homotopy computations over "
                    "convolution algebras")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--out", help="write the JSON report to this file")
        return p

    p = add("validate", cmd_validate, "validate a model file")
    p.add_argument("file")

    p = add("homology", cmd_homology, "betti numbers of a model")
    p.add_argument("file")
    p.add_argument("--degree", type=int, default=None)

    p = add("cobar", cmd_cobar, "free Lie model of a coalgebra")
    p.add_argument("file")
    p.add_argument("--window", type=int, default=None)

    p = add("bar", cmd_bar, "coalgebra model of a homotopy algebra")
    p.add_argument("file")
    p.add_argument("--window", type=int, default=None)

    for name, func, help_text in (
            ("mc-check", cmd_mc_check, "Maurer-Cartan residual of an "
                                       "element"),
            ("twist", cmd_twist, "twisted differential and betti numbers"),
            ("pi", cmd_pi, "homotopy groups of a component")):
        p = add(name, func, help_text)
        p.add_argument("C")
        p.add_argument("L")
        p.add_argument("tau")
        if name == "pi":
            p.add_argument("--n", type=int, required=True)

    p = add("hopf", cmd_hopf, "Hopf invariant of a map")
    p.add_argument("C")
    p.add_argument("D")
    p.add_argument("map")
    p.add_argument("--window", type=int, default=None)

    p = add("homotopic", cmd_homotopic, "decide whether two maps are "
                                        "homotopic")
    p.add_argument("C")
    p.add_argument("D")
    p.add_argument("f")
    p.add_argument("g")
    p.add_argument("--window", type=int, default=None)

    p = add("gauge-check", cmd_gauge_check, "verify a path or certificate")
    p.add_argument("file")

    p = add("components", cmd_components, "moduli classes of a mapping "
                                          "space")
    p.add_argument("C")
    p.add_argument("L")
    p.add_argument("--param", default=None,
                   help="JSON list of degree-0 basis pairs to search")
    p.add_argument("--samples", default="0,1,2")
    p.add_argument("--window", type=int, default=None)

    p = add("transfer", cmd_transfer, "transferred structure on loop "
                                      "homology")
    p.add_argument("file")
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--arity", type=int, default=3)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ModelFileError as exc:
        sys.stderr.write(json.dumps(
            {"error": str(exc), "where": exc.where}, sort_keys=True) + "\n")
        return EXIT_ERROR
    except (ValueError, KeyError, AssertionError, OSError) as exc:
        sys.stderr.write(json.dumps(
            {"error": str(exc)}, sort_keys=True) + "\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
