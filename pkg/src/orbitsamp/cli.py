"""Batch front end: problem files in, reports and CSV vectors out.

Problem definitions are JSON documents with a ``model`` of ``cyclic``,
``shift`` or ``lca``; complex scalars are ``[re, im]`` pairs.  Vectors are
emitted as CSV with header ``index,re,im``, floats at 17 significant digits
(value-preserving round trip) and exact rationals as ``p/q`` strings.

Exit codes: 0 on success/recoverable, 1 on a non-recoverable problem or a
failed certification, 2 on schema or usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import cyclic, lca, spectral
from .hilbert import DimensionMismatch, LinearOperator
from .laurent import CoprimalityError, LaurentPoly, bezout, positivity_certificate
from .spectral import FiniteSequence

__all__ = ["main", "SchemaError"]


class SchemaError(ValueError):
    pass


class NotRecoverable(RuntimeError):
    pass


# -- parsing helpers ---------------------------------------------------------


def _fmt(x):
    return format(float(x), ".17g")


def _fmt_vec(values):
    return " ".join(_fmt(v) for v in values)


def _complex_pair(v, where):
    if (
        not isinstance(v, (list, tuple))
        or len(v) != 2
        or not all(isinstance(t, (int, float)) for t in v)
    ):
        raise SchemaError(f"{where}: complex values must be [re, im] pairs, got {v!r}")
    return complex(v[0], v[1])


def _vector(data, where):
    if not isinstance(data, list) or not data:
        raise SchemaError(f"{where}: expected a nonempty list of [re, im] pairs")
    return np.array([_complex_pair(v, where) for v in data])


def _matrix(data, where):
    if not isinstance(data, list) or not data:
        raise SchemaError(f"{where}: expected a nonempty row-major matrix")
    rows = [_vector(row, where) for row in data]
    if len({r.size for r in rows}) != 1:
        raise SchemaError(f"{where}: rows have inconsistent lengths")
    return np.vstack(rows)


def _require(doc, key, where="problem"):
    if key not in doc:
        raise SchemaError(f"{where}: missing required field {key!r}")
    return doc[key]


def _sequence(doc, name):
    entry = doc.get(name)
    if entry is None:
        raise SchemaError(f"sequences: missing sequence {name!r}")
    if not isinstance(entry, dict) or "offset" not in entry or "values" not in entry:
        raise SchemaError(f"sequences.{name}: need 'offset' and 'values'")
    return FiniteSequence(
        offset=int(entry["offset"]), values=_vector(entry["values"], f"sequences.{name}")
    )


def load_problem(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read problem file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("problem file must hold a JSON object")
    model = _require(doc, "model")
    if model not in ("cyclic", "shift", "lca"):
        raise SchemaError(f"unknown model {model!r}")
    return doc


def _load_cyclic(doc):
    dim = int(_require(doc, "dimension"))
    op_m = _matrix(_require(doc, "operator"), "operator")
    if op_m.shape != (dim, dim):
        raise SchemaError(f"operator: expected {dim}x{dim}, got {op_m.shape}")
    try:
        op = LinearOperator(op_m)
        generators = [_vector(g, "generators") for g in _require(doc, "generators")]
        orders = [int(n) for n in _require(doc, "orders")]
        spec = cyclic.CyclicSubspaceSpec(operator=op, generators=generators, orders=orders)
        samplers = [_vector(b, "samplers") for b in _require(doc, "samplers")]
        scheme = cyclic.SamplingScheme.for_spec(spec, samplers, int(_require(doc, "r")))
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    return spec, scheme


def _load_shift(doc, grid, prefix="g"):
    seqs_doc = _require(doc, "sequences")
    if not isinstance(seqs_doc, dict):
        raise SchemaError("sequences: expected an object of named sequences")
    names = sorted(n for n in seqs_doc if n.startswith(prefix) and n[len(prefix) :].isdigit())
    if not names:
        raise SchemaError(f"sequences: need {prefix}1..{prefix}s entries")
    names.sort(key=lambda n: int(n[len(prefix) :]))
    seqs = [_sequence(seqs_doc, n) for n in names]
    r = int(doc.get("r", 1))
    Q = int(grid if grid is not None else doc.get("grid", 1024)) * r
    try:
        field = spectral.build_spectral_field(seqs, r, Q)
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    return seqs, field


def _load_lca(doc):
    group_doc = _require(doc, "group")
    for key in ("moduli", "H_gens", "M_gens"):
        _require(group_doc, key, "group")
    try:
        group = lca.FiniteAbelianGroup(tuple(int(d) for d in group_doc["moduli"]))
        H = lca.Subgroup(group, [tuple(g) for g in group_doc["H_gens"]])
        M_in_H = lca.Subgroup(group, [tuple(g) for g in group_doc["M_gens"]])
        M = lca.Subgroup(group, M_in_H.generators)
        if not M.is_subgroup_of(H):
            raise SchemaError("group: M_gens must generate a subgroup of H")
        if "operators" in doc:
            ops = [_matrix(m, "operators") for m in doc["operators"]]
        else:
            ops = [_matrix(_require(doc, "operator"), "operator")]
        rep = lca.GroupRepresentation(H, ops)
        a = _vector(_require(doc, "generators")[0], "generators")
        samplers = [_vector(b, "samplers") for b in _require(doc, "samplers")]
        spectrum = lca.build_group_G_matrix(rep, a, samplers, H, M)
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    return spectrum


# -- CSV ---------------------------------------------------------------------


def write_vector_csv(path, values, indices=None, exact=None):
    """Write ``index,re,im`` rows; ``exact`` supplies Fraction pairs instead."""
    n = len(exact) if exact is not None else len(values)
    if indices is None:
        indices = range(n)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "re", "im"])
        if exact is not None:
            for i, (re, im) in zip(indices, exact):
                writer.writerow([i, str(Fraction(re)), str(Fraction(im))])
        else:
            for i, v in zip(indices, values):
                v = complex(v)
                writer.writerow([i, _fmt(v.real), _fmt(v.imag)])


def _parse_cell(text):
    try:
        return Fraction(text) if "/" in text else float(text)
    except ValueError as exc:
        raise SchemaError(f"malformed CSV cell {text!r}") from exc


def read_vector_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["index", "re", "im"]:
            raise SchemaError(f"{path}: expected header index,re,im")
        indices, values = [], []
        for row in reader:
            if len(row) != 3:
                raise SchemaError(f"{path}: malformed row {row!r}")
            indices.append(int(row[0]))
            values.append(complex(_parse_cell(row[1]), _parse_cell(row[2])))
    return indices, np.array(values, dtype=complex)


# -- commands ----------------------------------------------------------------


def cmd_analyze(args):
    doc = load_problem(args.input)
    model = doc["model"]
    print(f"model: {model}")
    if model == "cyclic":
        spec, scheme = _load_cyclic(doc)
        R = cyclic.build_sample_matrix(spec, scheme)
        report = cyclic.check_rank(R, rank_tol=args.tol)
        print(f"rank {report.rank}/{report.cols}")
        print(f"singular values: {_fmt_vec(report.singular_values)}")
        print(f"recoverable: {'yes' if report.full_rank else 'no'}")
        return 0 if report.full_rank else 1
    if model == "shift":
        _, field = _load_shift(doc, args.grid)
        fc = spectral.frame_constants(field)
        print(f"alpha_G = {_fmt(fc.alpha_G)}")
        print(f"beta_G = {_fmt(fc.beta_G)}")
        print(f"det_min = {_fmt(fc.det_min)}")
        ok = fc.alpha_G > args.tol
        print(f"recoverable: {'yes' if ok else 'no'}")
        return 0 if ok else 1
    spectrum = _load_lca(doc)
    print(
        f"|H| = {spectrum.rep.H.order}, |M| = {spectrum.M.order}, "
        f"r = {spectrum.r}, |Omega| = {len(spectrum.omega.representatives)}"
    )
    print(f"alpha_G = {_fmt(spectrum.alpha_G)}")
    print(f"beta_G = {_fmt(spectrum.beta_G)}")
    ok = spectrum.alpha_G > args.tol
    print(f"recoverable: {'yes' if ok else 'no'}")
    return 0 if ok else 1


def _out_prefix(args, default):
    return args.out if args.out else default


def _load_u_matrix(path):
    if path is None:
        return None
    try:
        with open(path) as fh:
            return _matrix(json.load(fh), "u-matrix")
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read U matrix: {exc}") from exc


def cmd_dual(args):
    doc = load_problem(args.input)
    model = doc["model"]
    U = _load_u_matrix(args.u_matrix)
    if model == "cyclic":
        spec, scheme = _load_cyclic(doc)
        R = cyclic.build_sample_matrix(spec, scheme)
        report = cyclic.check_rank(R, rank_tol=args.tol)
        if not report.full_rank:
            print(f"not recoverable: rank {report.rank}/{report.cols}")
            return 1
        try:
            hs = cyclic.structurize_left_inverse(R, U=U, tol=args.tol)
        except cyclic.LeftInverseError as exc:
            print(f"structured inverse failed: {exc}")
            return 1
        basis = cyclic.reconstruction_vectors(spec, hs)
        print(f"left-inverse residual: {_fmt(hs.residual(R))}")
        prefix = _out_prefix(args, "dual")
        for j, c in enumerate(basis.vectors, start=1):
            path = f"{prefix}.c{j}.csv"
            write_vector_csv(path, c)
            print(f"wrote {path}")
        if R.rows == R.cols:
            print("interpolation table L_j' c_j(r n) (rows: j', n; columns: j):")
            for jp in range(scheme.s):
                for n in range(scheme.ell):
                    row = [
                        cyclic.take_samples(spec, scheme, c)[jp * scheme.ell + n]
                        for c in basis.vectors
                    ]
                    cells = " ".join(_fmt(abs(v)) for v in row)
                    print(f"  j'={jp + 1} n={n}: {cells}")
        return 0
    if model == "shift":
        seqs, field = _load_shift(doc, args.grid)
        method = doc.get("method", "pseudoinverse")
        prefix = _out_prefix(args, "dual")
        if method == "bezout":
            if len(seqs) != 2 or field.r != 1:
                raise SchemaError("bezout duals need exactly two sequences and r = 1")
            polys = []
            for seq in seqs:
                if np.max(np.abs(seq.values.imag)) != 0 or np.any(
                    seq.values.real != np.round(seq.values.real)
                ):
                    raise SchemaError("bezout duals need integer-valued sequences")
                polys.append(
                    LaurentPoly(seq.offset, [int(v.real) for v in seq.values])
                )
            # cofactors of the reflected polynomials: their own coefficients
            # are the reconstruction coefficient sequences
            try:
                q1, q2 = bezout(
                    polys[0].conj_reciprocal(), polys[1].conj_reciprocal()
                )
            except CoprimalityError as exc:
                print(f"coprimality failure: {exc}")
                return 1
            for j, cpoly in enumerate((q1, q2), start=1):
                print(f"c{j}(z) = {cpoly}")
                path = f"{prefix}.c{j}.csv"
                exact = [(Fraction(c), Fraction(0)) for c in cpoly.coeffs]
                write_vector_csv(path, None, indices=cpoly.exponents(), exact=exact)
                print(f"wrote {path}")
            return 0
        try:
            dual = spectral.dual_field(field, U=U)
        except spectral.FrameError as exc:
            print(str(exc))
            return 1
        print(f"dual residual: {_fmt(dual.residual_max)}")
        length = int(doc.get("dual_length", 65))
        try:
            coeffs = spectral.reconstruction_coefficients(dual, length)
        except spectral.TailEnergyError as exc:
            print(f"truncation refused: {exc}")
            return 1
        for j, per_gen in enumerate(coeffs, start=1):
            for l, seq in enumerate(per_gen, start=1):
                suffix = f"c{j}" if field.L == 1 else f"c{j}g{l}"
                path = f"{prefix}.{suffix}.csv"
                write_vector_csv(path, seq.values, indices=seq.support())
                print(f"wrote {path}")
        return 0
    spectrum = _load_lca(doc)
    try:
        gdual = lca.group_duals(spectrum, U=U, threshold=args.tol)
    except lca.GroupFrameError as exc:
        print(str(exc))
        return 1
    prefix = _out_prefix(args, "dual")
    for j, c in enumerate(gdual.vectors, start=1):
        path = f"{prefix}.c{j}.csv"
        write_vector_csv(path, c)
        print(f"wrote {path}")
    return 0


RESIDUAL_FLAG = 1e-6


def cmd_reconstruct(args):
    doc = load_problem(args.input)
    model = doc["model"]
    if model == "shift":
        raise SchemaError(
            "reconstruct supports the cyclic and lca models; use pr-check for filter banks"
        )
    _, samples = read_vector_csv(args.samples)
    prefix = _out_prefix(args, "reconstruction")
    if model == "cyclic":
        spec, scheme = _load_cyclic(doc)
        expected = scheme.s * scheme.ell
        if samples.size != expected:
            print(f"sample count {samples.size} does not match s*ell = {expected}")
            return 2
        R = cyclic.build_sample_matrix(spec, scheme)
        report = cyclic.check_rank(R, rank_tol=args.tol)
        if not report.full_rank:
            print(f"not recoverable: rank {report.rank}/{report.cols}")
            return 1
        hs = cyclic.structurize_left_inverse(R, tol=args.tol)
        basis = cyclic.reconstruction_vectors(spec, hs)
        x = cyclic.reconstruct(spec, scheme, basis, samples)
        alpha = np.concatenate(cyclic.filter_bank_coefficients(hs, samples, spec))
    else:
        spectrum = _load_lca(doc)
        expected = spectrum.s * len(spectrum.sample_points)
        if samples.size != expected:
            print(f"sample count {samples.size} does not match s*|M| = {expected}")
            return 2
        try:
            gdual = lca.group_duals(spectrum, threshold=args.tol)
        except lca.GroupFrameError as exc:
            print(str(exc))
            return 1
        x = lca.group_reconstruct(gdual, samples)
        orbit = spectrum.orbit_matrix()
        alpha, *_ = np.linalg.lstsq(orbit, x, rcond=None)
    write_vector_csv(f"{prefix}.x.csv", x)
    write_vector_csv(f"{prefix}.alpha.csv", alpha)
    print(f"wrote {prefix}.x.csv and {prefix}.alpha.csv")
    if "truth" in doc:
        truth = _vector(doc["truth"], "truth")
        if truth.size != x.size:
            raise SchemaError("truth vector dimension does not match the reconstruction")
        denom = max(float(np.linalg.norm(truth)), 1e-300)
        resid = float(np.linalg.norm(x - truth)) / denom
        print(f"relative residual vs truth: {_fmt(resid)}")
        if resid > RESIDUAL_FLAG:
            print(f"residual exceeds {RESIDUAL_FLAG:.1e}: samples inconsistent with truth")
            return 1
    return 0


def cmd_spline_demo(args):
    t0 = time.perf_counter()
    if args.K % 2 == 0:
        raise SchemaError("K must be odd")
    try:
        sb = spectral.bspline_filter_bank(args.K, args.p)
    except CoprimalityError as exc:
        print(f"coprimality failure for K={args.K}, p={args.p}: {exc}")
        return 1
    mp = sb.mp
    print(f"M_{args.p} values on |n| <= {mp.radius}: {' '.join(str(v) for v in mp.values)}")
    g1, g2 = sb.g_polys
    h1, h2 = sb.h_polys
    print(f"G1(z) = {g1}")
    print(f"G2(z) = {g2}")
    print(f"H1(z) = {h1}")
    print(f"H2(z) = {h2}")
    residual_poly = g1 * h1 + g2 * h2 - LaurentPoly.one()
    print(f"bezout residual polynomial: {residual_poly} (exact)")
    grid = args.grid if args.grid is not None else 1024
    pr = spectral.perfect_reconstruction_check(sb.bank, torus_grid=grid)
    print(f"PR torus residual on {pr.torus_grid} points: {_fmt(pr.max_residual)}")
    print(f"time-domain round-trip max relative error: {_fmt(pr.roundtrip_error)}")
    print(f"perfect reconstruction: {'pass' if pr.passed else 'fail'}")
    cert = positivity_certificate(g1, grid)
    verdict = "strictly positive" if cert.positive else "NOT strictly positive"
    print(
        f"g1 on {cert.grid} grid points: min {_fmt(cert.min_value)} "
        f"at w = {_fmt(cert.argmin)} ({verdict})"
    )
    print(f"runtime: {_fmt(time.perf_counter() - t0)} s")
    return 0 if pr.passed and residual_poly.is_zero else 1


def cmd_pr_check(args):
    doc = load_problem(args.input)
    if doc["model"] != "shift":
        raise SchemaError("pr-check needs a shift-model problem with filter sequences")
    seqs_doc = _require(doc, "sequences")
    r = int(doc.get("r", 1))
    hs, gs = [], []
    j = 1
    while f"h{j}" in seqs_doc:
        hs.append(_sequence(seqs_doc, f"h{j}"))
        gs.append(_sequence(seqs_doc, f"g{j}"))
        j += 1
    if not hs:
        raise SchemaError("sequences: need analysis/synthesis pairs h1/g1, h2/g2, ...")
    bank = spectral.FilterBank(analysis=hs, synthesis=gs, r=r)
    Hp, Gp = spectral.polyphase(bank)
    print("analysis polyphase matrix H(z):")
    for jrow, row in enumerate(Hp, start=1):
        for k, entry in enumerate(row):
            print(f"  H[{jrow},{k}] = {entry}")
    print("synthesis polyphase matrix G(z):")
    for k, row in enumerate(Gp):
        for jcol, entry in enumerate(row, start=1):
            print(f"  G[{k},{jcol}] = {entry}")
    grid = args.grid if args.grid is not None else 1024
    pr = spectral.perfect_reconstruction_check(bank, torus_grid=grid)
    print(f"PR torus residual on {pr.torus_grid} points: {_fmt(pr.max_residual)}")
    print(f"time-domain round-trip max relative error: {_fmt(pr.roundtrip_error)}")
    print(f"perfect reconstruction: {'pass' if pr.passed else 'fail'}")
    return 0 if pr.passed else 1


_DEFAULT_LCA_DEMO = {
    "model": "lca",
    "dimension": 4,
    "operator": [
        [[0, 0], [0, 0], [0, 0], [1, 0]],
        [[1, 0], [0, 0], [0, 0], [0, 0]],
        [[0, 0], [1, 0], [0, 0], [0, 0]],
        [[0, 0], [0, 0], [1, 0], [0, 0]],
    ],
    "generators": [[[1, 0], [0, 0], [0, 0], [0, 0]]],
    "samplers": [
        [[1, 0], [0, 0], [0, 0], [0, 0]],
        [[0, 0], [1, 0], [0, 0], [0, 0]],
    ],
    "group": {"moduli": [4], "H_gens": [[1]], "M_gens": [[2]]},
}


def cmd_lca_demo(args):
    if args.input:
        doc = load_problem(args.input)
        if doc["model"] != "lca":
            raise SchemaError("lca-demo needs an lca-model problem")
    else:
        doc = _DEFAULT_LCA_DEMO
        print("using the built-in Z_4 demo problem")
    spectrum = _load_lca(doc)
    print(
        f"|H| = {spectrum.rep.H.order}, |M| = {spectrum.M.order}, r = {spectrum.r}"
    )
    print(f"annihilator labels: {list(spectrum.perp)}")
    print(f"section labels: {list(spectrum.omega.representatives)}")
    print(f"alpha_G = {_fmt(spectrum.alpha_G)}")
    print(f"beta_G = {_fmt(spectrum.beta_G)}")
    if spectrum.alpha_G <= args.tol:
        print("recoverable: no")
        return 1
    gdual = lca.group_duals(spectrum, threshold=args.tol)
    rng = np.random.default_rng(0)
    n = spectrum.rep.H.order
    coeff = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x = spectrum.orbit_matrix() @ coeff
    x_hat = lca.group_reconstruct(gdual, lca.take_group_samples(spectrum, x))
    resid = float(np.linalg.norm(x_hat - x) / np.linalg.norm(x))
    print(f"round-trip relative residual on a random subspace element: {_fmt(resid)}")
    ok = resid <= 1e-8
    print(f"recoverable: {'yes' if ok else 'no'}")
    return 0 if ok else 1


# -- entry point -------------------------------------------------------------


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="problem file (JSON)")
    common.add_argument("--out", help="output path prefix for CSV files")
    common.add_argument(
        "--tol", type=float, default=1e-10, help="rank/recoverability tolerance"
    )
    common.add_argument(
        "--grid", type=int, default=None, help="grid points per unit interval"
    )
    parser = argparse.ArgumentParser(
        prog="orbitsamp",
        description="Generalized sampling analysis, duals and reconstruction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("analyze", parents=[common], help="recoverability report")
    p.set_defaults(func=cmd_analyze, needs_input=True)
    p = sub.add_parser("dual", parents=[common], help="reconstruction vectors to CSV")
    p.add_argument("--u-matrix", help="JSON file with a left-inverse perturbation matrix")
    p.set_defaults(func=cmd_dual, needs_input=True)
    p = sub.add_parser("reconstruct", parents=[common], help="rebuild a vector from samples")
    p.add_argument("--samples", required=True, help="CSV of samples (index,re,im)")
    p.set_defaults(func=cmd_reconstruct, needs_input=True)
    p = sub.add_parser("spline-demo", parents=[common], help="compact-support dual demo")
    p.add_argument("--K", type=int, required=True, help="node spacing (odd)")
    p.add_argument("--p", type=int, required=True, help="B-spline order")
    p.set_defaults(func=cmd_spline_demo, needs_input=False)
    p = sub.add_parser("pr-check", parents=[common], help="filter-bank certification")
    p.set_defaults(func=cmd_pr_check, needs_input=True)
    p = sub.add_parser("lca-demo", parents=[common], help="finite-group pipeline demo")
    p.set_defaults(func=cmd_lca_demo, needs_input=False)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "needs_input", False) and not args.input:
        print("error: --input is required for this command", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (SchemaError, DimensionMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
