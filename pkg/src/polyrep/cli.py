"""Command-line front end: info, build, verify, field.

Exit codes: 0 success/pass, 2 bad input, 3 search budget exhausted,
4 certification failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .poly import PolynomialError
from .geometry import (
    Polytope, Halfspace, from_halfspaces, facet_form, GeometryError,
    UnboundedInputError, DegenerateInputError,
)
from .builder import (
    Representation, BuildSettings, SearchBudgetError, BuildError,
    build_polygon, build_polytope3, build_unbounded, certify_unbounded,
)
from . import certify as cert

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_FAIL = 4


class InputError(ValueError):
    pass


def load_polytope_spec(path: str) -> tuple[int, list[Halfspace], dict]:
    try:
        payload = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON: {exc}")
    if not isinstance(payload, dict):
        raise InputError(f"{path}: top level must be an object")
    if "dim" not in payload:
        raise InputError(f"{path}: missing field 'dim'")
    if "halfspaces" not in payload:
        raise InputError(f"{path}: missing field 'halfspaces'")
    dim = payload["dim"]
    if dim not in (2, 3):
        raise InputError(f"{path}: 'dim' must be 2 or 3, got {dim!r}")
    hs = []
    for i, h in enumerate(payload["halfspaces"]):
        if "a" not in h or "b" not in h:
            raise InputError(f"{path}: halfspace {i} needs fields 'a' and 'b'")
        a = np.asarray(h["a"], dtype=float)
        if a.shape != (dim,):
            raise InputError(f"{path}: halfspace {i}: 'a' must have length {dim}")
        try:
            hs.append(Halfspace(a, float(h["b"])))
        except GeometryError as exc:
            raise InputError(f"{path}: halfspace {i}: {exc}")
    return dim, hs, payload


def build_polytope_checked(dim: int, hs: list[Halfspace], payload: dict) -> Polytope:
    P = from_halfspaces(dim, hs)
    if "vertices" in payload:
        given = np.asarray(payload["vertices"], dtype=float)
        if given.ndim != 2 or given.shape[1] != dim:
            raise InputError("'vertices' must be a list of points of the right dimension")
        tol = 1e-6 * max(1.0, P.diameter)
        for v in given:
            if np.linalg.norm(P.vertices - v, axis=1).min() > tol:
                raise InputError(f"given vertex {v.tolist()} not found by enumeration")
        for v in P.vertices:
            if np.linalg.norm(given - v, axis=1).min() > tol:
                raise InputError(f"enumerated vertex {v.tolist()} missing from 'vertices'")
    return P


def polytope_summary(P: Polytope) -> dict:
    out = {
        "dim": P.dim,
        "halfspaces": [{"a": h.a.tolist(), "b": h.b} for h in P.halfspaces],
        "vertices": [v.tolist() for v in P.vertices],
        "facet_incidence": [[int(i) for i in sorted(vs)]
                            for vs in P.facet_vertices],
        "diameter": P.diameter,
        "n_vertices": P.n_vertices,
        "n_facets": P.n_facets,
        "facet_forms": [facet_form(P, j).to_payload()
                        for j in range(P.n_facets)],
    }
    if P.dim == 3:
        out["edges"] = [[int(i), int(j)] for i, j in P.edges]
        out["n_edges"] = len(P.edges)
        out["euler_characteristic"] = int(P.euler_characteristic())
    return out


def _settings_from_args(args) -> BuildSettings:
    budgets = cert.default_budgets()
    if args.budget_interior:
        budgets["interior"] = args.budget_interior
    if args.budget_shell:
        budgets["shell"] = args.budget_shell
    if args.budget_far:
        budgets["far"] = args.budget_far
    return BuildSettings(seed=args.seed, budgets=budgets,
                         max_triples=args.max_triples,
                         l0_start=args.l0)


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")


def cmd_info(args) -> int:
    dim, hs, payload = load_polytope_spec(args.input)
    P = build_polytope_checked(dim, hs, payload)
    print(json.dumps(polytope_summary(P), indent=1, sort_keys=True))
    return EXIT_OK


def cmd_build(args) -> int:
    dim, hs, payload = load_polytope_spec(args.input)
    settings = _settings_from_args(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.input).stem
    try:
        try:
            P = build_polytope_checked(dim, hs, payload)
            bounded = True
        except UnboundedInputError:
            bounded = False
        if bounded:
            if dim == 2:
                rep, report = build_polygon(P, settings)
            else:
                rep, report = build_polytope3(P, settings)
        else:
            rep, report = build_unbounded(dim, hs, settings)
    except SearchBudgetError as exc:
        print(f"search budget exhausted: {exc}", file=sys.stderr)
        best = getattr(exc, "best", None)
        if best is not None and not isinstance(best, BuildError):
            try:
                _, *rest = best
                for item in rest:
                    if isinstance(item, Representation):
                        _write_json(out_dir / f"{stem}.rep.json", item.to_payload())
                    elif isinstance(item, cert.CertReport):
                        _write_json(out_dir / f"{stem}.cert.json", item.to_payload())
            except (TypeError, ValueError):
                pass
        return EXIT_BUDGET
    rep_path = out_dir / f"{stem}.rep.json"
    cert_path = out_dir / f"{stem}.cert.json"
    _write_json(rep_path, rep.to_payload())
    _write_json(cert_path, report.to_payload())
    print(f"representation: {rep_path}")
    print(f"certificate:    {cert_path}  verdict={report.verdict}")
    return EXIT_OK if report.verdict == "pass" else EXIT_FAIL


def load_representation(path: str) -> Representation:
    try:
        payload = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON: {exc}")
    try:
        return Representation.from_payload(payload)
    except (KeyError, ValueError, PolynomialError) as exc:
        raise InputError(f"{path}: bad representation payload: {exc}")


def cmd_verify(args) -> int:
    dim, hs, payload = load_polytope_spec(args.polytope)
    rep = load_representation(args.representation)
    if rep.dim != dim:
        raise InputError(
            f"dimension mismatch: polytope is {dim}-d, representation is {rep.dim}-d")
    budgets = cert.default_budgets()
    if args.budget_interior:
        budgets["interior"] = args.budget_interior
    if args.budget_shell:
        budgets["shell"] = args.budget_shell
    if args.budget_far:
        budgets["far"] = args.budget_far
    if rep.mode == "unbounded":
        report = certify_unbounded(dim, hs, rep.polys, seed=args.seed,
                                   budgets=budgets)
    else:
        P = build_polytope_checked(dim, hs, payload)
        report = cert.certify_representation(P, rep.polys, seed=args.seed,
                                             budgets=budgets)
    out = json.dumps(report.to_payload(), sort_keys=True, indent=1)
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        path = Path(args.out) / (Path(args.representation).stem + ".verify.json")
        path.write_text(out + "\n")
        print(f"report: {path}")
    print(f"verdict: {report.verdict}")
    for name, c in sorted(report.per_check.items()):
        mark = "ok" if c.passed else "FAIL"
        extra = f" witness={c.witness}" if (not c.passed and c.witness) else ""
        print(f"  [{mark}] {name}: worst={c.worst_value:.6g} n={c.n}{extra}")
    return EXIT_OK if report.verdict == "pass" else EXIT_FAIL


def field_grid(P_bbox, rep: Representation, selector: str, res: int,
               margin: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    lo, hi = P_bbox
    lo = lo - margin
    hi = hi + margin
    dim = rep.dim
    axes = [np.linspace(lo[i], hi[i], res) for i in range(dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.reshape(-1) for m in mesh], axis=1)
    # x-fastest ordering
    order = np.arange(res ** dim).reshape([res] * dim, order="C")
    flat = order.transpose(*range(dim - 1, -1, -1)).reshape(-1)
    pts = pts[flat]
    vals = rep.membership_values(pts)
    if selector == "min":
        out = vals.min(axis=0)
    else:
        out = vals[int(selector)]
    spacing = (hi - lo) / (res - 1) if res > 1 else np.ones(dim)
    return lo, spacing, out


def write_vtk(path: Path, origin, spacing, counts, values, name="field"):
    counts3 = list(counts) + [1] * (3 - len(counts))
    origin3 = list(map(float, origin)) + [0.0] * (3 - len(origin))
    spacing3 = list(map(float, spacing)) + [1.0] * (3 - len(spacing))
    lines = [
        "# vtk DataFile Version 3.0",
        name,
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        f"DIMENSIONS {counts3[0]} {counts3[1]} {counts3[2]}",
        f"ORIGIN {origin3[0]!r} {origin3[1]!r} {origin3[2]!r}",
        f"SPACING {spacing3[0]!r} {spacing3[1]!r} {spacing3[2]!r}",
        f"POINT_DATA {len(values)}",
        f"SCALARS {name} double 1",
        "LOOKUP_TABLE default",
    ]
    lines.extend(repr(float(v)) for v in values)
    path.write_text("\n".join(lines) + "\n")


def cmd_field(args) -> int:
    dim, hs, payload = load_polytope_spec(args.polytope)
    rep = load_representation(args.representation)
    if rep.dim != dim:
        raise InputError("dimension mismatch between polytope and representation")
    if args.poly != "min":
        sel = int(args.poly)
        if not 0 <= sel < len(rep.polys):
            raise InputError(f"--poly {sel} out of range")
    try:
        P = build_polytope_checked(dim, hs, payload)
        bbox = P.bounding_box()
    except UnboundedInputError:
        bbox = (np.full(dim, -10.0), np.full(dim, 10.0))
    origin, spacing, values = field_grid(bbox, rep, args.poly, args.res,
                                         args.margin)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.polytope).stem
    vtk_path = out_dir / f"{stem}.{args.poly}.vtk"
    write_vtk(vtk_path, origin, spacing, [args.res] * dim, values,
              name=f"poly_{args.poly}")
    csv_path = out_dir / f"{stem}.{args.poly}.csv"
    with csv_path.open("w") as fh:
        cols = ",".join(f"x{i}" for i in range(dim))
        fh.write(f"{cols},value\n")
        idx = np.unravel_index(np.arange(len(values)),
                               [args.res] * dim, order="F")
        for row in range(len(values)):
            coords = [origin[i] + spacing[i] * idx[i][row] for i in range(dim)]
            fh.write(",".join(repr(float(c)) for c in coords)
                     + f",{float(values[row])!r}\n")
    print(f"field: {vtk_path}")
    print(f"csv:   {csv_path}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="polyrep",
        description="Represent 2- and 3-dimensional polyhedra by d polynomial "
                    "inequalities and certify the result by seeded sampling.")
    sub = ap.add_subparsers(dest="command", required=True)

    p_info = sub.add_parser("info", help="summarize a polytope file")
    p_info.add_argument("input")
    p_info.set_defaults(func=cmd_info)

    p_build = sub.add_parser("build", help="build and certify a representation")
    p_build.add_argument("input")
    p_build.add_argument("--seed", type=int, default=0)
    p_build.add_argument("--out", default=".")
    p_build.add_argument("--max-triples", type=int, default=200)
    p_build.add_argument("--l0", type=int, default=1)
    p_build.add_argument("--budget-interior", type=int, default=None)
    p_build.add_argument("--budget-shell", type=int, default=None)
    p_build.add_argument("--budget-far", type=int, default=None)
    p_build.set_defaults(func=cmd_build)

    p_verify = sub.add_parser("verify", help="re-certify a stored representation")
    p_verify.add_argument("polytope")
    p_verify.add_argument("representation")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--out", default=None)
    p_verify.add_argument("--budget-interior", type=int, default=None)
    p_verify.add_argument("--budget-shell", type=int, default=None)
    p_verify.add_argument("--budget-far", type=int, default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_field = sub.add_parser("field", help="export a scalar field grid")
    p_field.add_argument("polytope")
    p_field.add_argument("representation")
    p_field.add_argument("--poly", default="min",
                         choices=["0", "1", "2", "min"])
    p_field.add_argument("--res", type=int, default=32)
    p_field.add_argument("--margin", type=float, default=0.5)
    p_field.add_argument("--out", default=".")
    p_field.set_defaults(func=cmd_field)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DegenerateInputError, GeometryError) as exc:
        print(f"geometry error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SearchBudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
