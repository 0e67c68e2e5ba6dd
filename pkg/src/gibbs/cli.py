"""Command-line front end with JSON input and output.

Every run echoes its fully resolved job specification (defaults included)
into the output document, so a result can be reproduced from the document
alone.  Rational numbers serialize as "p/q" strings, polynomials in the
canonical text form, and anything non-reproducible (wall-clock times) is
confined to a metadata block.

Exit codes: 0 on success, 1 on mathematical failure (budget exhaustion,
non-convergence) with a machine-readable reason, 2 on input errors.
"""

import json
import math
import sys
import time
from fractions import Fraction

import click

from .gibbs_solver import SdpInstance, entropic_path, gibbs_point, project_to_gibbs_plane
from .groebner import BudgetExceededError, DEFAULT_BUDGET, Ideal, buchberger, reduced_basis_strings
from .implicit_num import implicitize_numeric
from .implicit_sym import dimension_check, implicitize
from .pencils import banded_relations, block_det_constraints, canonical_pencil, dx_minors, parse_segre, x_ring
from .qot import QotShape, qot_gibbs_point, qot_space, segre_equations
from .ratpoly import format_rat, parse_poly
from .spectra import MatrixSpace

__all__ = ["main", "run_jobspec", "run_check"]


class InputError(Exception):
    """Schema or file problem in the input documents (exit code 2)."""


class MathFailure(Exception):
    """A pipeline that parsed fine but could not finish (exit code 1)."""


# ---------------------------------------------------------------------------
# JSON (de)serialization: rationals as strings, matrices as row lists


def _rat_out(v):
    return format_rat(Fraction(v))


def _rat_in(v):
    try:
        if isinstance(v, str):
            return Fraction(v)
        if isinstance(v, int):
            return Fraction(v)
        if isinstance(v, float):
            return Fraction(v).limit_denominator(10**12)
    except (ValueError, ZeroDivisionError) as err:
        raise InputError("bad rational %r: %s" % (v, err))
    raise InputError("bad rational %r" % (v,))


def _matrix_out(M):
    return [[_rat_out(v) for v in row] for row in M]


def _matrix_in(doc, what="matrix"):
    if not isinstance(doc, list) or not doc or any(not isinstance(r, list) for r in doc):
        raise InputError("%s must be a list of rows" % what)
    n = len(doc)
    if any(len(r) != n for r in doc):
        raise InputError("%s must be square" % what)
    return [[_rat_in(v) for v in row] for row in doc]


def _float_matrix_in(doc, what="matrix"):
    M = _matrix_in(doc, what)
    return [[float(v) for v in row] for row in M]


def space_to_json(L):
    return {
        "n": L.n,
        "A0": _matrix_out(L.A0),
        "basis": [_matrix_out(B) for B in L.basis],
    }


def space_from_json(doc):
    if not isinstance(doc, dict) or "basis" not in doc:
        raise InputError("matrix-space document needs a 'basis' list")
    basis = [_matrix_in(B, "basis matrix") for B in doc["basis"]]
    if "A0" in doc and doc["A0"] is not None:
        A0 = _matrix_in(doc["A0"], "A0")
    else:
        n = len(basis[0]) if basis else int(doc.get("n", 0))
        A0 = [[Fraction(0)] * n for _ in range(n)]
    try:
        return MatrixSpace(A0, basis)
    except ValueError as err:
        raise InputError(str(err))


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise InputError("cannot read %s: %s" % (path, err))


def _ideal_out(gens):
    return [str(g) for g in gens]


def _document(jobspec, result, t_start):
    return {
        "jobspec": jobspec,
        "result": result,
        "metadata": {
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "runtime_seconds": round(time.time() - t_start, 3),
        },
    }


def _emit(doc, out):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# command bodies (shared by the CLI and the regression harness)


def _run_implicitize(spec):
    L = space_from_json(_load_json(spec["input"]))
    if spec["mode"] == "symbolic":
        try:
            res = implicitize(L, budget=spec["budget"], seed=spec["seed"], precision=spec["precision"])
        except BudgetExceededError as err:
            raise MathFailure("budget exhausted after %d pairs" % err.pairs_done)
        except RuntimeError as err:
            raise MathFailure(str(err))
        diag = res.diagnostics
        return {
            "certification": res.certification,
            "generators": _ideal_out(res.ideal_J.generators),
            "gibbs_plane": _ideal_out(res.gibbs_plane),
            "route": diag.get("route"),
            "eigenvalue_multiplicities": list(diag.get("multiplicities") or []),
            "lattice_rank": diag.get("lattice_rank"),
        }
    kb, polys = implicitize_numeric(
        L,
        spec["degree"],
        margin=spec["samples"],
        seed=spec["seed"],
        precision=spec["precision"],
    )
    return {
        "degree": kb.degree,
        "kernel_dimension": len(kb.vectors),
        "polynomials": [None if p is None else str(p) for p in polys],
        "verified": list(kb.verified),
        "trailing_singular_values": ["%.3e" % s for s in kb.singular_values],
    }


def _run_solve(spec):
    doc = _load_json(spec["input"])
    if "space" not in doc or "b" not in doc:
        raise InputError("instance document needs 'space' and 'b'")
    L = space_from_json(doc["space"])
    b = [float(Fraction(str(v)) if isinstance(v, str) else v) for v in doc["b"]]
    C = None
    if doc.get("C") is not None:
        C = _float_matrix_in(doc["C"], "C")
    inst = SdpInstance(L, b, C)
    if spec.get("plane"):
        plane_doc = _load_json(spec["plane"])
        ring = x_ring(L.n)
        try:
            plane = [parse_poly(ring, s) for s in plane_doc]
        except (ValueError, KeyError) as err:
            raise InputError("bad plane polynomial: %s" % err)
        inst = project_to_gibbs_plane(inst, plane)
    try:
        if spec.get("path"):
            e0, e1 = spec["path"]
            schedule = []
            eps = e0
            while eps > e1 * (1 + 1e-12):
                schedule.append(eps)
                eps = eps * 10 ** -0.5
            schedule.append(e1)
            results = entropic_path(inst, schedule)
            final = results[-1]
            path_out = [
                {"epsilon": r.epsilon, "objective": r.objective, "iterations": r.iterations}
                for r in results
            ]
        else:
            eps = spec["epsilon"] if spec.get("epsilon") is not None else math.inf
            final = gibbs_point(inst, epsilon=eps)
            path_out = None
    except RuntimeError as err:
        raise MathFailure(str(err))
    out = {
        "X_star": [[repr(float(v)) for v in row] for row in final.X_star],
        "y_star": [repr(float(v)) for v in final.y_star],
        "epsilon": "inf" if final.epsilon == math.inf else final.epsilon,
        "objective": final.objective,
        "residual_primal": "%.3e" % final.residual_primal,
        "residual_stationarity": "%.3e" % final.residual_stationarity,
        "iterations": final.iterations,
    }
    if path_out is not None:
        out["path"] = path_out
    return out


def _run_qot(spec):
    shape = QotShape(spec["d1"], spec["d2"])
    out = {}
    Y = Z = None
    if spec.get("margins"):
        doc = _load_json(spec["margins"])
        if "Y" not in doc or "Z" not in doc:
            raise InputError("margins document needs 'Y' and 'Z'")
        Y = _matrix_in(doc["Y"], "Y")
        Z = _matrix_in(doc["Z"], "Z")
        try:
            point = qot_gibbs_point(Y, Z)
        except ValueError as err:
            raise InputError(str(err))
        out["gibbs_point"] = _matrix_out(point)
    if spec.get("cost"):
        if Y is None:
            raise InputError("--cost requires --margins")
        C = _float_matrix_in(_load_json(spec["cost"]), "cost")
        L = qot_space(shape)
        b = []
        for A in L.basis:
            coupling_margin = sum(
                float(A[i][j]) * float(_qot_margin_entry(Y, Z, shape, i, j))
                for i in range(shape.n)
                for j in range(shape.n)
            )
            b.append(coupling_margin)
        inst = SdpInstance(L, b, C)
        e0, e1 = spec.get("path") or (1.0, 1e-4)
        schedule = []
        eps = e0
        while eps > e1 * (1 + 1e-12):
            schedule.append(eps)
            eps = eps * 10 ** -0.5
        schedule.append(e1)
        try:
            results = entropic_path(inst, schedule)
        except RuntimeError as err:
            raise MathFailure(str(err))
        final = results[-1]
        out["entropic_path"] = {
            "final_epsilon": final.epsilon,
            "final_objective": final.objective,
            "X_final": [[repr(float(v)) for v in row] for row in final.X_star],
        }
    if not out:
        ideal = segre_equations(shape)
        out["segre_equations"] = _ideal_out(ideal.generators)
    return out


def _qot_margin_entry(Y, Z, shape, i, j):
    """Entry (i, j) of the coupling whose marginals are (Y, Z): Y (x) Z / tr(Y)."""
    i1, j1 = divmod(i, shape.d2)
    i2, j2 = divmod(j, shape.d2)
    trY = sum(Y[k][k] for k in range(shape.d1))
    return Fraction(Y[i1][i2]) * Fraction(Z[j1][j2]) / Fraction(trY)


def _run_pencil(spec):
    try:
        symbol = parse_segre(spec["segre"], alphas=spec.get("alpha"))
    except ValueError as err:
        raise InputError(str(err))
    L = canonical_pencil(symbol)
    if spec["emit"] == "space":
        return {"space": space_to_json(L)}
    return {
        "block_det_constraints": _ideal_out(block_det_constraints(symbol)),
        "space": space_to_json(L),
    }


_RUNNERS = {
    "implicitize": _run_implicitize,
    "solve": _run_solve,
    "qot": _run_qot,
    "pencil": _run_pencil,
}


def run_jobspec(spec):
    """Execute a fully resolved job specification; returns the result dict."""
    command = spec.get("command")
    if command not in _RUNNERS:
        raise InputError("unknown command %r" % (command,))
    return _RUNNERS[command](spec)


def run_check(corpus_dir):
    """Run every fixture in a corpus directory and report pass/fail.

    A fixture is a JSON file with a "jobspec" and an "expected" result; the
    comparison ignores the metadata block.
    """
    import pathlib

    fixtures = sorted(pathlib.Path(corpus_dir).glob("*.json"))
    report = []
    for fx in fixtures:
        entry = {"fixture": fx.name}
        try:
            doc = _load_json(str(fx))
            if "jobspec" not in doc or "expected" not in doc:
                raise InputError("fixture needs 'jobspec' and 'expected'")
            got = run_jobspec(doc["jobspec"])
            entry["passed"] = got == doc["expected"]
            if not entry["passed"]:
                entry["got"] = got
        except (InputError, MathFailure) as err:
            entry["passed"] = False
            entry["error"] = str(err)
        report.append(entry)
    return report


# ---------------------------------------------------------------------------
# click surface


@click.group()
def main():
    """Gibbs manifolds, varieties, and points of symmetric-matrix spaces."""


def _finish(spec, runner, out):
    t_start = time.time()
    try:
        result = runner(spec)
    except InputError as err:
        _emit({"error": {"kind": "input", "reason": str(err)}, "jobspec": spec}, out)
        sys.exit(2)
    except MathFailure as err:
        _emit({"error": {"kind": "math", "reason": str(err)}, "jobspec": spec}, out)
        sys.exit(1)
    _emit(_document(spec, result, t_start), out)


@main.command("implicitize")
@click.option("--mode", type=click.Choice(["symbolic", "numeric"]), default="symbolic", show_default=True)
@click.option("--input", "input_", required=True, type=click.Path(exists=True), help="matrix-space JSON")
@click.option("--degree", type=int, default=2, show_default=True, help="degree cap (numeric mode)")
@click.option("--samples", type=int, default=200, show_default=True, help="oversampling margin (numeric mode)")
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--precision", type=int, default=None, help="bits; defaults: 256 symbolic, 53 numeric")
@click.option("--budget", type=int, default=DEFAULT_BUDGET, show_default=True)
@click.option("--out", type=click.Path(), default=None)
def implicitize_cmd(mode, input_, degree, samples, seed, precision, budget, out):
    """Implicit equations of the exponential image of a matrix space."""
    spec = {
        "command": "implicitize",
        "mode": mode,
        "input": input_,
        "degree": degree,
        "samples": samples,
        "seed": seed,
        "precision": precision if precision is not None else (256 if mode == "symbolic" else 53),
        "budget": budget,
    }
    _finish(spec, _run_implicitize, out)


@main.command()
@click.option("--input", "input_", required=True, type=click.Path(exists=True), help="instance JSON: space, b, optional C")
@click.option("--epsilon", type=float, default=None, help="single regularization value; omit for entropy maximization")
@click.option("--path", "path_", default=None, help="E0:E1 geometric schedule")
@click.option("--plane", type=click.Path(exists=True), default=None, help="JSON list of affine-linear forms")
@click.option("--out", type=click.Path(), default=None)
def solve(input_, epsilon, path_, plane, out):
    """Gibbs point / entropic-regularization path of an SDP instance."""
    spec = {
        "command": "solve",
        "input": input_,
        "epsilon": epsilon,
        "path": _parse_path(path_),
        "plane": plane,
    }
    _finish(spec, _run_solve, out)


@main.command()
@click.option("--d1", type=int, required=True)
@click.option("--d2", type=int, required=True)
@click.option("--margins", type=click.Path(exists=True), default=None, help="JSON with PD matrices Y and Z")
@click.option("--cost", type=click.Path(exists=True), default=None, help="cost matrix JSON")
@click.option("--path", "path_", default=None, help="E0:E1 schedule for the entropic path")
@click.option("--out", type=click.Path(), default=None)
def qot(d1, d2, margins, cost, path_, out):
    """Quantum-optimal-transport Gibbs points and Segre equations."""
    spec = {
        "command": "qot",
        "d1": d1,
        "d2": d2,
        "margins": margins,
        "cost": cost,
        "path": _parse_path(path_),
    }
    _finish(spec, _run_qot, out)


@main.command()
@click.option("--segre", required=True, help='Segre symbol, e.g. "[3,1]" or "[(2,2)]"')
@click.option("--alpha", default=None, help="comma-separated eigenvalue parameters")
@click.option("--emit", type=click.Choice(["equations", "space"]), default="equations", show_default=True)
@click.option("--out", type=click.Path(), default=None)
def pencil(segre, alpha, emit, out):
    """Canonical pencil of a Segre symbol and its structural equations."""
    alphas = None
    if alpha:
        try:
            alphas = [Fraction(a) for a in alpha.split(",")]
        except ValueError as err:
            raise click.BadParameter(str(err), param_hint="--alpha")
    spec = {"command": "pencil", "segre": segre, "alpha": alphas and [str(a) for a in alphas], "emit": emit}
    # parse_segre wants Fractions, the echoed spec wants strings
    run_spec = dict(spec, alpha=alphas)
    _finish(run_spec, _run_pencil, out)


@main.command()
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out", type=click.Path(), default=None)
def check(corpus_dir, out):
    """Run the bundled regression fixtures and report pass/fail."""
    t_start = time.time()
    report = run_check(corpus_dir)
    doc = _document({"command": "check", "corpus": str(corpus_dir)}, {"fixtures": report}, t_start)
    _emit(doc, out)
    if any(not e["passed"] for e in report):
        sys.exit(1)


def _parse_path(text):
    if text is None:
        return None
    try:
        e0, e1 = text.split(":")
        e0, e1 = float(e0), float(e1)
    except ValueError:
        raise click.BadParameter("expected E0:E1", param_hint="--path")
    if not (e0 > e1 > 0):
        raise click.BadParameter("need E0 > E1 > 0", param_hint="--path")
    return [e0, e1]


if __name__ == "__main__":
    main()
