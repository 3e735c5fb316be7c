"""Command-line interface: ``echkit <verb> ...``.

Exit codes: 0 success, 1 usage or parse error, 2 validation or precondition failure.

Model arguments are either a complex file or one of the specs

    ellipsoid:a,b,L     boundary of E(a, b) truncated at action L
    s3:N                E(1, 141421/100000) with N generators
    s1xs2:N             synthetic S^1 x S^2 model with gradings 0 .. 2N-1
    random:seed,n,d     seeded random complex with U (n generators, density d)
    unit                the one-generator complex {empty}
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import asymptotics, connect, index, io as eio, models, spectral
from .asymptotics import ResolutionError
from .ech_core import FilteredTower, LDegeneracyError
from .f2 import SparseF2Matrix, f2_rank
from .homalg import GradedComplex, MissingUMapError, ValidationError, homology, tensor, validate
from .index import CZDegeneracyError

__all__ = ["main", "build_parser", "parse_model", "UsageError"]


class UsageError(Exception):
    """Bad command line or unparsable input (exit code 1)."""


class PreconditionError(Exception):
    """Input parses but violates a precondition (exit code 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _frac(s: str) -> Fraction:
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse {s!r} as a rational number") from None


def _frac_list(s: str) -> list[Fraction]:
    parts = [p for p in s.split(",") if p.strip()]
    if not parts:
        raise UsageError("empty list")
    return [_frac(p) for p in parts]


def parse_model(spec: str) -> GradedComplex:
    """Turn a model spec string or file path into a complex."""
    kind, _, args = spec.partition(":")
    try:
        if kind == "ellipsoid" and args:
            a, b, L = (_frac(x) for x in args.split(","))
            return models.ellipsoid(a, b, L).complex
        if kind == "s3" and args:
            return models.s3(int(args))
        if kind == "s1xs2" and args:
            return models.s1_x_s2(int(args)).complex
        if kind == "random" and args:
            seed, n, d = args.split(",")
            return models.random_model(int(seed), int(n), float(d))
        if spec == "unit":
            return models.unit_complex()
    except UsageError:
        raise
    except (models.EllipsoidDegeneracyError, LDegeneracyError) as exc:
        raise PreconditionError(str(exc)) from None
    except ValueError as exc:
        raise UsageError(f"bad model spec {spec!r}: {exc}") from None
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"{spec!r} is neither a model spec nor an existing file")
    try:
        return eio.read_complex(path)
    except eio.FormatError as exc:
        raise UsageError(f"{spec}: {exc}") from None


def _require_valid(c: GradedComplex, name: str) -> None:
    bad = validate(c)
    if bad:
        raise ValidationError(bad, what=name)


def _emit(out, rows: list[list], header: list[str], fmt: str) -> None:
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)] if rows else [len(h) for h in header]
    out.write("  ".join(h.rjust(w) for h, w in zip(header, widths)) + "\n")
    for r in rows:
        out.write("  ".join(str(x).rjust(w) for x, w in zip(r, widths)) + "\n")


def _fs(x: Fraction | None) -> str:
    return "" if x is None else spectral.fraction_str(x)


# verbs


def cmd_homology(args, out) -> int:
    c = parse_model(args.model)
    _require_valid(c, args.model)
    h = homology(c)
    rows = []
    for g in sorted(h.dims):
        row = [g, h.dim(g)]
        if args.u_ranks:
            m = h.induced_u.get(g) if h.induced_u is not None else None
            row.append("" if m is None else f2_rank(m))
        rows.append(row)
    header = ["grading", "dim"] + (["u_rank"] if args.u_ranks else [])
    _emit(out, rows, header, args.format)
    return 0


def _k_map(args, c1, c2):
    """Homotopy K from ``--k-file`` (JSON list of [source, target] tensor ids) or ``--k-seed``."""
    if args.k_file:
        t = tensor(c1, c2)
        try:
            raw = json.loads(Path(args.k_file).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read K file {args.k_file}: {exc}") from None
        if isinstance(raw, dict):
            raw = raw.get("k")
        if not isinstance(raw, list):
            raise UsageError("K file must be a JSON array of [source, target] pairs")
        where = t.index
        entries = []
        for p in raw:
            if not (isinstance(p, list) and len(p) == 2 and all(x in where for x in p)):
                raise UsageError(f"K entry {p!r} does not name two tensor generators")
            entries.append((where[p[1]], where[p[0]]))
        return SparseF2Matrix(len(t), len(t), entries)
    if args.k_seed is not None:
        return connect.random_k_map(tensor(c1, c2), args.k_seed)
    return None


def cmd_consum(args, out) -> int:
    c1, c2 = parse_model(args.model1), parse_model(args.model2)
    for name, c in ((args.model1, c1), (args.model2, c2)):
        if c.umap is None:
            raise MissingUMapError(f"{name} carries no U-map")
        _require_valid(c, name)
    eps = None if args.eps is None else _frac(args.eps)
    try:
        d = connect.ConeData(c1, c2, eps, _k_map(args, c1, c2))
    except ValueError as exc:
        if isinstance(exc, (ValidationError, MissingUMapError)):
            raise
        raise PreconditionError(str(exc)) from None
    cone = connect.build_cone_complex(d)
    if args.output:
        eio.write_complex(cone, args.output)
        Path(str(args.output) + ".blocks.json").write_text(json.dumps(connect.block_sidecar(d), indent=1) + "\n")
    rows = [[r.grading, r.cone_dim, r.derived_dim, r.status] for r in connect.theorem_comparison(d)]
    _emit(out, rows, ["grading", "cone_dim", "derived_dim", "status"], args.format)
    return 0 if all(r[3] != "FAIL" for r in rows) else 2


def cmd_conjecture(args, out) -> int:
    eps_list = _frac_list(args.eps_list)
    if any(e <= 0 for e in eps_list):
        raise UsageError("eps values must be positive")
    c1, c2 = parse_model(args.model1), parse_model(args.model2)
    for name, c in ((args.model1, c1), (args.model2, c2)):
        _require_valid(c, name)
    try:
        res = spectral.conjecture_sweep(c1, c2, args.kmax, eps_list)
    except ValueError as exc:
        if isinstance(exc, (ValidationError, MissingUMapError)):
            raise
        raise PreconditionError(str(exc)) from None
    if args.format == "csv":
        out.write(res.to_csv())
    else:
        rows = [
            [_fs(r.eps), r.k, _fs(r.c_k_cone) or "insufficient", _fs(r.maxconv) or "insufficient", _fs(r.diff),
             "true" if r.converged else "false"]
            for r in res.rows
        ]
        _emit(out, rows, ["eps", "k", "c_k_cone", "maxconv", "diff", "converged"], "table")
    return 0


def cmd_index(args, out) -> int:
    rows = []
    if args.preset:
        c = index.preset(args.preset)
        r = index.check_index_inequality(c)
        rows.append([args.preset, r.ind, r.I, "ok" if r.ok else "violated", index.check_adjunction(c)])
        if args.format == "csv":
            _emit(out, rows, ["preset", "ind", "I", "inequality", "adjunction_residual"], "csv")
        else:
            out.write(f"{args.preset}: ind={r.ind} I={r.I} inequality={'ok' if r.ok else 'violated'} "
                      f"adjunction_residual={index.check_adjunction(c)}\n")
    if args.cz:
        orbit = index.CZ_PRESETS.get(args.cz)
        if orbit is None:
            raise UsageError(f"unknown CZ preset {args.cz!r}; choose from {sorted(index.CZ_PRESETS)}")
        cz = index.cz_iterate(orbit, 1)
        if args.format == "csv":
            _emit(out, [[args.cz, cz]], ["orbit", "cz"], "csv")
        else:
            out.write(f"CZ_tau0({args.cz}) = {cz}\n")
    if not args.preset and not args.cz:
        raise UsageError("index: give --preset and/or --cz")
    return 0


def cmd_flow(args, out) -> int:
    times = asymptotics.DEFAULT_TIMES if args.t is None else (args.t,)
    rep = asymptotics.flow_report(times)
    rows = [[name, "PASS" if ok else "FAIL"] for name, ok in rep.checks().items()]
    if args.t is not None:
        s = asymptotics.weinstein_flow(args.t)
        if args.format == "table":
            out.write(f"Phi({args.t}) =\n{np.array2string(s.matrix, precision=10)}\n")
    rows += [
        ["expm_error", f"{rep.expm_error:.3e}"],
        ["group_law_error", f"{rep.group_law_error:.3e}"],
        ["symplectic_error", f"{rep.symplectic_error:.3e}"],
        ["derivative_rel_error", f"{rep.derivative_rel_error:.3e}"],
        ["cz_h", str(rep.cz_h)],
    ]
    _emit(out, rows, ["check", "result"], args.format)
    return 0 if rep.ok else 2


def cmd_spectrum(args, out) -> int:
    vals = [float(x) for x in _frac_list(args.S)]
    if len(vals) != 4:
        raise UsageError("--S needs four entries s11,s12,s21,s22")
    S = np.array(vals).reshape(2, 2)
    if S[0, 1] != S[1, 0]:
        raise UsageError("--S must be symmetric")
    rep = asymptotics.spectrum_report(S, args.modes)
    if args.format == "csv":
        _emit(out, [[f"{lam:.12g}", w] for lam, w in rep.spectrum], ["eigenvalue", "winding"], "csv")
        return 0
    near = [(lam, w) for lam, w in rep.spectrum if abs(w) <= 1]
    _emit(out, [[f"{lam:.12g}", w] for lam, w in near], ["eigenvalue", "winding"], "table")
    out.write(
        f"monotone={rep.monotone} two_dimensional={rep.two_dimensional} "
        f"w_plus={rep.w_plus} w_minus={rep.w_minus} cz={rep.cz}\n"
    )
    return 0 if rep.ok else 2


def cmd_spectral(args, out) -> int:
    c = parse_model(args.model)
    _require_valid(c, args.model)
    table = spectral.spectrum_table(c, args.kmax)
    rows = [[e.k, _fs(e.value) or "insufficient", " ".join(e.witness)] for e in table.entries]
    _emit(out, rows, ["k", "c_k", "witness"], args.format)
    return 0


def cmd_export(args, out) -> int:
    c = parse_model(args.model)
    _require_valid(c, args.model)
    eio.write_complex(c, args.output)
    if args.tower:
        idx = eio.export_tower(FilteredTower.auto(c), args.tower)
        out.write(f"tower index written to {idx}\n")
    if args.lattice:
        kind, _, rest = args.model.partition(":")
        if kind == "ellipsoid":
            a, b, L = (_frac(x) for x in rest.split(","))
            m = models.ellipsoid(a, b, L)
        elif kind == "s3":
            m = models.ellipsoid_with_generators(1, models.SQRT2, int(rest))
        else:
            raise UsageError("--lattice is only available for ellipsoid and s3 models")
        Path(args.lattice).write_text(eio.lattice_csv(m.lattice_rows()))
    out.write(f"wrote {args.output} ({len(c)} generators)\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="echkit", description="Embedded contact homology at desk scale.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--format", choices=["table", "csv"], default="table")
        sp.add_argument("--seed", type=int, default=0, help="seed for any randomness (default 0)")
        sp.set_defaults(func=func)
        return sp

    sp = add("homology", cmd_homology, "graded homology dimensions of a complex")
    sp.add_argument("model")
    sp.add_argument("--u-ranks", action="store_true", help="also print ranks of the induced U map")

    sp = add("consum", cmd_consum, "connected-sum cone and its comparison with the derived tensor product")
    sp.add_argument("model1")
    sp.add_argument("model2")
    sp.add_argument("--eps", help="action of the special orbit h (default: smallest positive action / 10^6)")
    sp.add_argument("--k-file", help="complex file whose differential pairs give the homotopy K")
    sp.add_argument("--k-seed", type=int, help="use a seeded random homotopy K")
    sp.add_argument("-o", "--output", help="write the cone complex here (plus a .blocks.json sidecar)")

    sp = add("conjecture", cmd_conjecture, "c_k of the connected sum against max_{i+j=k} c_i + c_j")
    sp.add_argument("model1")
    sp.add_argument("model2")
    sp.add_argument("--kmax", type=int, default=10)
    sp.add_argument("--eps-list", default="1/1000,1/1000000")

    sp = add("index", cmd_index, "index presets for the handle planes and the orbit h")
    sp.add_argument("--preset", choices=sorted(index.PRESETS))
    sp.add_argument("--cz", help="print the CZ index of a preset orbit (h)")

    sp = add("flow", cmd_flow, "diagnostics of the linearized flow at h")
    sp.add_argument("--t", type=float, help="single time to check (default: 0.1, 0.2, ..., 10)")

    sp = add("spectrum", cmd_spectrum, "spectrum and windings of J0 d/dt + S")
    sp.add_argument("--S", default="2,0,0,-1", help="entries s11,s12,s21,s22")
    sp.add_argument("--modes", type=int, default=64)

    sp = add("spectral", cmd_spectral, "ECH spectral invariants c_0 .. c_kmax of a model")
    sp.add_argument("model")
    sp.add_argument("--kmax", type=int, default=10)

    sp = add("export", cmd_export, "write a model as a complex file")
    sp.add_argument("model")
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--tower", help="also export a filtered tower into this directory")
    sp.add_argument("--lattice", help="also write the lattice-point CSV (ellipsoid models)")
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    buf = io.StringIO()
    try:
        args = build_parser().parse_args(argv)
        code = args.func(args, buf)
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return 1
    except eio.FormatError as exc:
        err.write(f"parse error: {exc}\n")
        return 1
    except ValidationError as exc:
        err.write(f"validation error: {exc}\n")
        return 2
    except (PreconditionError, MissingUMapError, LDegeneracyError, CZDegeneracyError, ResolutionError,
            spectral.InsufficientDepthError, spectral.ZeroClassError, connect.EquivalenceError) as exc:
        err.write(f"precondition failed: {exc}\n")
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    out.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
