"""Command-line front end.

Exit codes: 0 success / checks passed, 1 domain violation or failed check,
2 usage, I/O or parse error.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from . import metric, oracle, pdo
from .document import document_dict, load_document, load_json, loads, parse_kernel, write_json
from .exceptions import BadFunctionFile, MissingKernel, SpecFormatError, UltrametricError
from .tree import generate_padic_tree, generate_random_tree
from .wavelets import full_basis

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


def _err(e: Exception) -> str:
    names = [c.__name__ for c in type(e).__mro__
             if c.__module__.endswith("exceptions") and c.__name__ not in ("UltrametricError", "SpecFormatError")]
    return f"error: {' / '.join(names) or type(e).__name__}: {e}"


def _kernel(doc, override):
    if override is not None:
        text = override
        if not text.lstrip().startswith("{"):
            return parse_kernel(load_json(text), doc.tree, doc.assignment)
        return parse_kernel(loads(text), doc.tree, doc.assignment)
    if doc.kernel is None:
        raise MissingKernel("no kernel in the document; pass --kernel")
    return doc.kernel


def cmd_validate(args) -> int:
    doc = load_document(args.path)
    tree, measure = doc.tree, doc.measure
    checks = []
    nu = measure.ball
    worst = 0.0
    for v in tree.internal:
        i = tree.index[v]
        s = tree.child_start[i]
        worst = max(worst, abs(nu[s:s + tree.n_children[i]].sum() - nu[i]) / nu[i])
    checks.append({"check": "additivity", "pass": bool(worst <= 1e-12), "worst_residual": float(worst),
                   "witness": None})
    rep = metric.verify_ultrametric(tree, doc.metric_or_standard, n_samples=args.samples)
    checks.append(rep.to_dict())
    ok = all(c["pass"] for c in checks)
    write_json({"valid": ok, "vertices": len(tree), "leaves": tree.n_leaves, "checks": checks})
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_spectrum(args) -> int:
    doc = load_document(args.path)
    kernel = _kernel(doc, args.kernel)
    spec = pdo.spectrum(doc.tree, doc.measure, kernel)
    out = spec.to_json()
    ok = True
    if args.verify:
        dense = oracle.dense_operator(doc.tree, doc.measure, kernel)
        reports = [oracle.verify_diagonalization(doc.tree, doc.measure, kernel, spectrum=spec, dense=dense),
                   oracle.verify_spectrum(dense, spec)]
        out["verification"] = [r.to_dict() for r in reports]
        ok = all(reports)
    write_json(out, args.json)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_wavelets(args) -> int:
    doc = load_document(args.path)
    basis = full_basis(doc.tree, doc.measure)
    rep = oracle.verify_orthonormality(basis)
    out = basis.to_json()
    out["size"] = len(basis)
    out["gram_residual"] = rep.worst_residual
    write_json(out, args.json)
    return EXIT_OK if rep else EXIT_VIOLATION


def _read_function(path, tree):
    try:
        data = load_json(path)
    except SpecFormatError as e:
        raise BadFunctionFile(str(e)) from None
    if not isinstance(data, dict):
        raise BadFunctionFile("function file must map leaf ids to numbers")
    if set(data) != set(tree.leaves):
        diff = sorted(set(data) ^ set(tree.leaves))
        raise BadFunctionFile(f"function file leaves do not match the tree (first mismatch {diff[0]!r})")
    vals = []
    for x in tree.leaves:
        v = data[x]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise BadFunctionFile(f"value for leaf {x!r} must be a real number")
        vals.append(float(v))
    return np.asarray(vals)


def cmd_diffuse(args) -> int:
    doc = load_document(args.path)
    kernel = _kernel(doc, args.kernel)
    f = _read_function(args.f, doc.tree)
    spec = pdo.spectrum(doc.tree, doc.measure, kernel)
    mean = float(pdo.weighted_mean(doc.measure, f))
    m = doc.measure.leaf_masses
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", *doc.tree.leaves, "deviation_norm"])
    for t in args.t:
        if t < 0:
            raise SpecFormatError(f"times must be non-negative, got {t}")
        ft = pdo.heat_apply(doc.tree, doc.measure, kernel, f, t, spec=spec).real
        dev = float(np.sqrt(np.sum(np.abs(ft - mean) ** 2 * m)))
        w.writerow([repr(float(t)), *(repr(float(x)) for x in ft), repr(dev)])
    if args.out in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    return EXIT_OK


def cmd_generate(args) -> int:
    kernel = {"type": "power", "alpha": args.power_kernel} if args.power_kernel is not None else None
    if args.padic:
        p, depth = args.padic
        tree = generate_padic_tree(p, depth)
        if args.random_kernel:
            raise SpecFormatError("--random-kernel needs --random")
        doc = document_dict(tree, kernel=kernel)
    else:
        n, seed = args.random
        rng = np.random.default_rng(seed)
        tree = generate_random_tree(n, rng)
        masses = rng.uniform(0.1, 1.0, tree.n_leaves)
        masses /= masses.sum()
        if args.random_kernel:
            kernel = {"type": "table",
                      "values": {v: float(x) for v, x in zip(tree.internal, rng.uniform(0.1, 2.0, len(tree.internal)))}}
        doc = document_dict(tree, leaf_masses=masses, kernel=kernel)
    write_json(doc, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    doc = load_document(args.path)
    kernel = _kernel(doc, args.kernel) if (args.kernel or doc.kernel is not None) else None
    reports = oracle.verify_all(doc.tree, doc.measure, kernel)
    reports.append(metric.verify_ultrametric(doc.tree, doc.metric_or_standard, n_samples=args.samples))
    ok = all(reports)
    write_json({"pass": ok, "reports": [r.to_dict() for r in reports]}, args.json)
    return EXIT_OK if ok else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ultrametric-pdo",
                                     description="Ultrametric wavelets and pseudodifferential operator spectra.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check tree, measure and metric invariants")
    p.add_argument("path")
    p.add_argument("--samples", type=int, default=100_000, help="sampled triples on trees above 50 vertices")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("spectrum", help="closed-form eigenvalues of the operator")
    p.add_argument("path")
    p.add_argument("--kernel", help="kernel JSON (inline object or file path) overriding the document's")
    p.add_argument("--json", help="output file (default stdout)")
    p.add_argument("--verify", action="store_true", help="cross-check against the dense oracle")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("wavelets", help="export the wavelet basis and its Gram residual")
    p.add_argument("path")
    p.add_argument("--json", help="output file (default stdout)")
    p.set_defaults(func=cmd_wavelets)

    p = sub.add_parser("diffuse", help="heat semigroup trace as CSV")
    p.add_argument("path")
    p.add_argument("--f", required=True, help="JSON file mapping leaf ids to values")
    p.add_argument("--t", required=True, type=float, nargs="+", help="times")
    p.add_argument("--kernel")
    p.add_argument("--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_diffuse)

    p = sub.add_parser("generate", help="write a tree-spec document")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--padic", type=int, nargs=2, metavar=("P", "DEPTH"))
    g.add_argument("--random", type=int, nargs=2, metavar=("LEAVES", "SEED"))
    p.add_argument("--power-kernel", type=float, metavar="ALPHA")
    p.add_argument("--random-kernel", action="store_true", help="random positive table kernel (with --random)")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="run every oracle check")
    p.add_argument("path")
    p.add_argument("--kernel")
    p.add_argument("--json", help="output file (default stdout)")
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except SpecFormatError as e:
        print(_err(e), file=sys.stderr)
        return EXIT_USAGE
    except UltrametricError as e:
        print(_err(e), file=sys.stderr)
        return EXIT_VIOLATION
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
