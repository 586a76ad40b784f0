"""Command-line surface.

Subcommands: gen, select-sym, select-gen, reduce, certify, report.
Exit codes: 0 success with all verdicts green, 2 completed but some
certificate verdict failed, 3 invalid or degenerate input, 4 oracle caps
exceeded. Diagnostics go to standard error, results to files.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import (BarrierStuck, CaratheodoryFailed, DegenerateInterior,
                     DegenerateSpan, EmptyBody, IllConditioned,
                     InvalidInstance, InvalidMatrix, JohnExtractionFailed,
                     NotInterior, OracleTooLarge, SharpnessGenFailed,
                     ShiftCertificateFailed, SolverStall, UnboundedBody)
from .io import (canonical_certificate_bytes, certificate_from_json,
                 certificate_to_json, load_certificate, load_instance,
                 save_certificate, save_instance, verify_certificate,
                 write_report)
from .oracle import (gen_halfspace_family, gen_sharpness_instance,
                     gen_slab_family)
from .pipeline import (diameter_report, reduce_to_2n, select_general,
                       select_symmetric)

EXIT_OK = 0
EXIT_VERDICT = 2
EXIT_INPUT = 3
EXIT_ORACLE = 4

_INPUT_ERRORS = (InvalidInstance, InvalidMatrix, EmptyBody, NotInterior,
                 DegenerateInterior, UnboundedBody, DegenerateSpan,
                 ValueError, OSError)
_RUN_ERRORS = (BarrierStuck, CaratheodoryFailed, IllConditioned,
               JohnExtractionFailed, SharpnessGenFailed,
               ShiftCertificateFailed, SolverStall)


def _cmd_gen(args) -> int:
    kind = "sharpness" if args.sharpness else args.kind
    if kind == "sharpness":
        family = gen_sharpness_instance(args.n, args.N, args.seed)
    elif kind == "slab":
        family = gen_slab_family(args.n, args.count, args.seed)
    elif kind == "halfspace":
        family = gen_halfspace_family(args.n, args.count, args.seed,
                                      margin=args.margin)
    else:
        raise InvalidInstance(f"unknown generator kind {kind!r}")
    save_instance(family, args.out)
    print(f"wrote {kind} instance ({family.dim}D, {len(family)} bodies) "
          f"to {args.out}")
    return EXIT_OK


def _cmd_select(args, mode: str) -> int:
    family = load_instance(args.infile)
    if mode == "symmetric":
        cert = select_symmetric(family, d=args.d, tol=args.tol)
        parameters = {"d": args.d, "tol": args.tol}
    else:
        cert = select_general(family, eps=args.eps, tol=args.tol)
        parameters = {"eps": args.eps, "tol": args.tol}
    diameter = None
    if args.exact_oracle:
        diam_sel, diam_full, ratio = diameter_report(family, cert,
                                                     exact=True)
        diameter = {"selected": diam_sel, "full": diam_full, "ratio": ratio}
    m = family.constraint_matrix()[0].shape[0]
    doc = certificate_to_json(cert, __version__, constraint_count=m,
                              seed=args.seed, parameters=parameters,
                              diameter=diameter)
    save_certificate(doc, args.out)
    failed = [k for k, ok in cert.verdicts.items() if not ok]
    print(f"s={cert.s} alpha={cert.alpha_measured:.6g} "
          f"bound={cert.bound_claimed:.6g} verdicts="
          f"{'all-pass' if not failed else 'FAILED:' + ','.join(failed)}")
    if failed:
        print(f"failed verdicts: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERDICT
    return EXIT_OK


def _cmd_reduce(args) -> int:
    family = load_instance(args.infile)
    doc = load_certificate(args.cert)
    cert = reduce_to_2n(family, certificate_from_json(doc))
    m = family.constraint_matrix()[0].shape[0]
    out_doc = certificate_to_json(cert, __version__, constraint_count=m,
                                  seed=doc.get("seed"),
                                  parameters=doc.get("parameters"))
    save_certificate(out_doc, args.out)
    print(f"reduced to s={cert.s} alpha={cert.alpha_measured:.6g}")
    return EXIT_OK if cert.all_pass else EXIT_VERDICT


def _cmd_certify(args) -> int:
    family = load_instance(args.infile)
    doc = load_certificate(args.cert)
    ok, problems = verify_certificate(family, doc)
    for p in problems:
        print(p, file=sys.stderr)
    print("certificate verified" if ok else "certificate REJECTED")
    return EXIT_OK if ok else EXIT_VERDICT


def _cmd_report(args) -> int:
    docs = [load_certificate(p) for p in args.certs]
    write_report(docs, args.out)
    print(f"wrote {len(docs)} rows to {args.out}")
    return EXIT_OK


def _cmd_canonical(args) -> int:
    doc = load_certificate(args.cert)
    sys.stdout.write(canonical_certificate_bytes(doc).decode("utf-8"))
    sys.stdout.write("\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hellycert",
        description="Certified small-subfamily selection for intersections "
                    "of convex bodies.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a seeded instance file")
    gen.add_argument("--kind", choices=("slab", "halfspace", "sharpness"),
                     default="slab")
    gen.add_argument("--sharpness", action="store_true",
                     help="shorthand for --kind sharpness")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--count", type=int, default=10,
                     help="number of bodies (slab/halfspace kinds)")
    gen.add_argument("--N", type=int, default=64,
                     help="number of slabs (sharpness kind)")
    gen.add_argument("--margin", type=float, default=0.1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    for name, mode in (("select-sym", "symmetric"),
                       ("select-gen", "general")):
        sel = sub.add_parser(name, help=f"run the {mode} selection pipeline")
        sel.add_argument("--in", dest="infile", required=True)
        sel.add_argument("--out", required=True)
        sel.add_argument("--d", type=float, default=4.0)
        sel.add_argument("--eps", type=float, default=0.5)
        sel.add_argument("--tol", type=float, default=1e-5)
        sel.add_argument("--seed", type=int, default=None)
        sel.add_argument("--exact-oracle", action="store_true",
                         help="also price diameters with the vertex oracle")
        sel.set_defaults(func=lambda a, m=mode: _cmd_select(a, m))

    red = sub.add_parser("reduce", help="greedy reduction to 2n bodies")
    red.add_argument("--in", dest="infile", required=True)
    red.add_argument("--cert", required=True)
    red.add_argument("--out", required=True)
    red.set_defaults(func=_cmd_reduce)

    cer = sub.add_parser("certify", help="re-verify a stored certificate")
    cer.add_argument("--in", dest="infile", required=True)
    cer.add_argument("--cert", required=True)
    cer.set_defaults(func=_cmd_certify)

    rep = sub.add_parser("report", help="summarize certificates as CSV")
    rep.add_argument("certs", nargs="+")
    rep.add_argument("--out", required=True)
    rep.set_defaults(func=_cmd_report)

    can = sub.add_parser("canonical",
                         help="print a certificate's canonical bytes")
    can.add_argument("--cert", required=True)
    can.set_defaults(func=_cmd_canonical)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OracleTooLarge as exc:
        print(f"oracle cap: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except _RUN_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VERDICT
    except _INPUT_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
