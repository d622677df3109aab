"""Command-line frontend: manifests in, deterministic reports out.

Exit codes: 0 success, 2 malformed input (bad JSON, schema violation, bad
flags), 3 a mathematical precondition failed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Any, Callable

import jsonschema

from . import canonical as cn
from . import fibresum as fs
from . import lattice as lat
from . import manifold as mf
from . import obstruction as ob
from . import seibergwitten as sw
from .errors import PreconditionError
from .fibresum import FibreSumResult, GluingClass
from .manifold import AlgebraicSurfaceData, Fibred4Manifold

SAFE_INT = 2**53 - 1

_int_list = {"type": "array", "items": {"type": "integer"}}
_matrix = {"type": "array", "items": _int_list}


def _op(name: str, props: dict, required: tuple[str, ...] = ()) -> dict:
    return {
        "type": "object",
        "properties": {"op": {"const": name}, **props},
        "required": ["op", *required],
        "additionalProperties": False,
    }


_pos = {"type": "integer", "minimum": 1}
_nonneg = {"type": "integer", "minimum": 0}
_bool = {"type": "boolean"}

MANIFEST_SCHEMA: dict = {
    "type": "object",
    "properties": {
        "description": {"type": "string"},
        "surface": {
            "oneOf": [
                {"type": "string", "enum": list(mf.PRESETS)},
                {
                    "type": "object",
                    "properties": {
                        "name": {"type": "string"},
                        "K_squared": {"type": "integer"},
                        "euler": {"type": "integer"},
                        "gram": _matrix,
                        "canonical": _int_list,
                        "hyperplane": _int_list,
                        "ample": _int_list,
                        "minimal_general_type": {"type": "boolean"},
                    },
                    "required": ["name", "K_squared", "euler", "gram", "canonical", "hyperplane"],
                    "additionalProperties": False,
                },
            ]
        },
        "embedding": {
            "oneOf": [
                {
                    "type": "object",
                    "properties": {"s": _pos, "k": _pos},
                    "required": ["s", "k"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {"hyperplane": _int_list},
                    "required": ["hyperplane"],
                    "additionalProperties": False,
                },
            ]
        },
        "operations": {
            "type": "array",
            "items": {
                "oneOf": [
                    _op("invariants", {"n": _pos, "m": _pos, "a": _int_list, "include_gram": _bool}),
                    _op("iterate", {"n": _pos, "include_gram": _bool}, ("n",)),
                    _op("fibresum", {"m": _pos, "n": _pos, "a": _int_list, "include_gram": _bool},
                        ("m", "n")),
                    _op("canonical", {"m": _pos, "n": _pos, "a": _int_list}, ("n",)),
                    _op("sw-classes", {"n": _pos}),
                    _op("mst", {"n": {"type": "integer", "minimum": 2}}, ("n",)),
                    _op("obstruction", {"a": _nonneg, "n": _pos, "d": _nonneg}, ("a", "n")),
                    _op("pencil-params", {"d": _pos, "s0": _pos, "k0": _pos,
                                          "use_surface": _bool}, ("d", "s0", "k0")),
                    _op("classify", {"n": _pos, "m": _pos, "a": _int_list}),
                ]
            },
        },
        "output": {
            "type": "object",
            "properties": {"format": {"enum": ["human", "json"]}},
            "additionalProperties": False,
        },
    },
    "required": ["operations"],
    "additionalProperties": False,
}


class ManifestError(ValueError):
    """Malformed manifest or command-line input."""


def validate_manifest(doc: Any) -> None:
    try:
        jsonschema.validate(doc, MANIFEST_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ManifestError(f"manifest invalid at {path}: {exc.message}") from None
    needs_surface = any(op["op"] != "pencil-params" or op.get("use_surface")
                        for op in doc["operations"])
    if needs_surface and "surface" not in doc:
        raise ManifestError("manifest needs a 'surface' for the requested operations")


# ---------------------------------------------------------------------------
# building the base fibration

def _surface(spec: Any) -> Fibred4Manifold | AlgebraicSurfaceData:
    if isinstance(spec, str):
        return mf.build_preset(spec)
    L = lat.IntegralLattice(spec["gram"], spec["name"])
    ample = L.vector(spec["ample"]) if "ample" in spec else None
    return AlgebraicSurfaceData(
        spec["name"], spec["K_squared"], spec["euler"], L, L.vector(spec["canonical"]),
        L.vector(spec["hyperplane"]), ample, spec.get("minimal_general_type", False),
    )


def _embedded(surface: AlgebraicSurfaceData, embedding: dict | None) -> AlgebraicSurfaceData:
    if embedding is None:
        return surface
    if "hyperplane" in embedding:
        return surface.with_hyperplane(surface.lattice.vector(embedding["hyperplane"]))
    if surface.ample is None:
        raise PreconditionError(f"{surface.name}: no ample class recorded for an (s, k) embedding")
    s, k = embedding["s"], embedding["k"]
    K, L = surface.canonical, surface.ample
    ob.ample_threshold(K @ K, K @ L, L @ L)  # checks the numeric preconditions
    return surface.with_hyperplane(k * (K + s * L))


class Session:
    """The base fibration of a manifest plus the surface it came from."""

    def __init__(self, doc: dict):
        self.surface: AlgebraicSurfaceData | None = None
        self.M: Fibred4Manifold | None = None
        if "surface" not in doc:
            return
        built = _surface(doc["surface"])
        if isinstance(built, Fibred4Manifold):
            if "embedding" in doc:
                raise PreconditionError(f"{built.name} is already fibred; no embedding applies")
            self.M = built
        else:
            self.surface = _embedded(built, doc.get("embedding"))
            self.M = mf.blow_up(self.surface, self.surface.degree)

    @property
    def base(self) -> Fibred4Manifold:
        if self.M is None:
            raise PreconditionError("no surface given")
        return self.M


# ---------------------------------------------------------------------------
# report blocks

def _form(L: lat.IntegralLattice) -> str | None:
    pos, neg, _ = lat.signature(L)
    if pos == 0 or neg == 0:
        return None
    return lat.classify_indefinite_unimodular(L).decomposition


def _canonical_block(M: Fibred4Manifold) -> dict:
    K = M.canonical
    return {
        "K.Sigma": K @ M.fibre,
        "K.B": K @ M.section,
        "K.K": K @ K,
        "divisibility": lat.divisibility(M.lattice, K),
    }


def normal_form_block(X: FibreSumResult, include_gram: bool = False) -> dict:
    """Basis-dependent data: role tags and ``K_X`` in the normal-form basis."""
    c = X.manifold.canonical.coords
    p_nonzero = sum(1 for i, t in enumerate(X.labels) if t[0] == "P" and c[i])
    rim = [c[i] for i in X.r_indices]
    terms = ["P-part"] if p_nonzero else []
    terms += [f"{v}·R{i + 1}" for i, v in enumerate(rim) if v]
    for coeff, sym in ((c[X.b_index], "B"), (c[X.sigma_index], "Σ")):
        if coeff:
            terms.append(f"{coeff}·{sym}")
    block: dict[str, Any] = {
        "labels": list(X.labels),
        "K": {
            "P_zero": p_nonzero == 0,
            "P_nonzero_entries": p_nonzero,
            "rim": rim,
            "B": c[X.b_index],
            "Sigma": c[X.sigma_index],
            "expression": " + ".join(terms) if terms else "0",
        },
    }
    if include_gram:
        L = X.manifold.lattice
        block["lattice"] = {"rank": L.rank, "gram": [list(row) for row in L.gram]}
    return block


def invariants_block(M: Fibred4Manifold) -> dict:
    """Invariants that do not depend on a choice of basis."""
    pos, neg, _ = lat.signature(M.lattice)
    return {
        "euler": M.euler,
        "sigma": M.sigma,
        "b2": M.b2,
        "b2plus": pos,
        "b2minus": neg,
        "genus": M.genus,
        "parity": lat.parity(M.lattice),
        "spin": mf.is_spin(M),
        "form": _form(M.lattice),
        "singular_fibres": mf.count_singular_fibres(M),
        "canonical": _canonical_block(M),
    }


def _manifold_record(M: Fibred4Manifold, X: FibreSumResult | None, include_gram: bool) -> dict:
    record: dict[str, Any] = {"manifold": M.name, "invariants": invariants_block(M)}
    if X is not None and X.summand_count > 1:
        record["normal_form"] = normal_form_block(X, include_gram)
    elif include_gram:
        record["lattice"] = {"rank": M.lattice.rank, "gram": [list(r) for r in M.lattice.gram]}
    return record


def _sum_for(session: Session, op: dict) -> FibreSumResult:
    M = session.base
    n = op.get("n", 1)
    if "m" in op:
        a = op.get("a") or [0] * (2 * M.genus)
        return fs.twisted_sum(op["m"], n, M, GluingClass(a))
    if "a" in op:
        raise PreconditionError("a gluing class needs both m and n")
    return fs.iterated_fibre_sum(M, n)


def op_invariants(session: Session, op: dict) -> dict:
    X = _sum_for(session, op)
    return _manifold_record(X.manifold, X, op.get("include_gram", False))


def op_canonical(session: Session, op: dict) -> dict:
    M = session.base
    n = op["n"]
    if "m" in op:
        C = GluingClass(op.get("a") or [0] * (2 * M.genus))
        closed = cn.canonical_MmnC(M, op["m"], n, C)
        X = fs.twisted_sum(op["m"], n, M, C)
        formula = cn.div_K_MmnC(M, op["m"], n, C)
    else:
        closed = cn.canonical_Mn(M, n)
        X = fs.iterated_fibre_sum(M, n)
        formula = cn.div_K_Mn(M, n)
    Xm = X.manifold
    direct = lat.divisibility(Xm.lattice, Xm.canonical)
    return {
        "d": cn.d_of(M),
        "closed_form_matches_gluing": closed.K_X == Xm.canonical,
        "r": list(closed.r),
        "b_X": closed.b_X,
        "sigma_X": closed.sigma_X_coeff,
        "divisibility_formula": formula,
        "divisibility_lattice": direct,
        "normal_form": normal_form_block(X) if X.summand_count > 1 else None,
    }


def op_sw_classes(session: Session, op: dict) -> dict:
    M = session.base
    n = op.get("n", 1)
    if n == 1:
        S = sw.basic_classes_blowup(M)
        top = sw.max_fibre_filter(S, M.fibre, M.genus)
        return {
            "count": len(S),
            "max_fibre_survivors": len(top),
            "survivor_is_K": top.classes == [M.canonical],
            "squares": sorted({c @ c for c in S.classes}),
        }
    S = sw.basic_classes_Mn_fibre_nonzero(M, n)
    X = fs.iterated_fibre_sum(M, n).manifold
    return {
        "count": len(S),
        "classes": ["K" if c == X.canonical else "-K" for c in S.classes],
        "sw": [v for _, v in S.entries],
        "notes": list(S.notes),
    }


def op_mst(session: Session, op: dict) -> dict:
    M = session.base
    n = op["n"]
    X = fs.iterated_fibre_sum(M, n)
    SM = sw.basic_classes_blowup(M)
    SN = sw.summand_basic_classes(M, n - 1)
    dec = sw.decompose_characteristic(X, X.manifold.canonical, basic_class_mode=True)
    value = sw.mst_sum(dec, SM, SN, M.genus)
    cands = list(sw.maximal_pairing_candidates(X, SM, SN))
    nonzero = [c for c in cands if sw.mst_sum(c, SM, SN, M.genus)]
    return {
        "mst_K": value,
        "candidates": len(cands),
        "nonzero_candidates": len(nonzero),
        "only_K_nonzero": nonzero == [dec],
    }


def op_obstruction(session: Session, op: dict) -> dict:
    if "d" in op:
        d, genus = op["d"], session.M.genus if session.M is not None else None
    else:
        M = session.base
        d, genus = cn.d_of(M), M.genus
    v = ob.extension_obstructed(d, op["a"], op["n"], genus)
    return {
        "obstructed": v.obstructed,
        "verdict": v.verdict,
        "d": v.d,
        "a": v.a,
        "n": v.n,
        "genus": v.genus,
        "witness_m": v.witness_m,
        "div_untwisted": v.div_untwisted,
        "div_twisted": v.div_twisted,
    }


def op_pencil(session: Session, op: dict) -> dict:
    surface = None
    if op.get("use_surface"):
        S = session.surface
        if S is None or S.ample is None:
            raise PreconditionError("use_surface needs an algebraic surface with an ample class")
        K, L = S.canonical, S.ample
        surface = (K @ K, K @ L, L @ L)
    p = ob.choose_pencil_params(op["d"], op["s0"], op["k0"], surface)
    return {"d": p.d, "s": p.s, "k": p.k, "s0": p.s0, "k0": p.k0, "genus": p.genus, "degree": p.degree}


def op_classify(session: Session, op: dict) -> dict:
    X = _sum_for(session, op)
    desc = mf.classify_homeo(X.manifold)
    return {
        "name": X.manifold.name,
        "form": desc.decomposition,
        "rank": desc.rank,
        "signature": desc.signature,
        "parity": desc.parity,
    }


OPERATIONS: dict[str, Callable[[Session, dict], dict]] = {
    "invariants": op_invariants,
    "iterate": op_invariants,
    "fibresum": op_invariants,
    "canonical": op_canonical,
    "sw-classes": op_sw_classes,
    "mst": op_mst,
    "obstruction": op_obstruction,
    "pencil-params": op_pencil,
    "classify": op_classify,
}


def execute(doc: dict) -> dict:
    validate_manifest(doc)
    session = Session(doc)
    report: dict[str, Any] = {}
    if "description" in doc:
        report["description"] = doc["description"]
    if session.M is not None:
        report["base"] = {"manifold": session.M.name, "invariants": invariants_block(session.M)}
    results = []
    for op in doc["operations"]:
        record = {"op": op["op"], "input": {k: v for k, v in op.items() if k != "op"}}
        record.update(OPERATIONS[op["op"]](session, op))
        results.append(record)
    report["results"] = results
    return report


# ---------------------------------------------------------------------------
# serialization

def encode(obj: Any) -> Any:
    """Make ``obj`` JSON-safe; integers beyond 53 bits become decimal strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj if -SAFE_INT <= obj <= SAFE_INT else str(obj)
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_json(report: Any) -> str:
    return json.dumps(encode(report), indent=2, ensure_ascii=False)


def _human(obj: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in
                                                          (v.values() if isinstance(v, dict) else v)):
                lines.append(f"{pad}{k}:")
                lines += _human(v, indent + 1)
            elif isinstance(v, dict):
                inner = ", ".join(f"{a}={b}" for a, b in v.items())
                lines.append(f"{pad}{k}: {inner}")
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        for item in obj:
            if isinstance(item, dict):
                lines.append(f"{pad}-")
                lines += _human(item, indent + 1)
            else:
                lines.append(f"{pad}- {item}")
    return lines


def dump_human(report: Any) -> str:
    return "\n".join(_human(report))


# ---------------------------------------------------------------------------
# self test

def selftest(seed: int, count: int = 25) -> dict:
    """Randomized structural checks on fibre sums of random models."""
    rng = random.Random(seed)
    failures = []
    for trial in range(count):
        g = rng.randint(1, 3)
        M = mf.random_model(rng, 10, g)
        N = mf.random_model(rng, 10, g)
        C = GluingClass([rng.randint(-2, 2) for _ in range(2 * g)])
        try:
            X = fs.generalized_fibre_sum(M, N, C).manifold
            ok = (lat.is_unimodular(X.lattice) and X.lattice.rank == X.euler - 2
                  and lat.signature_value(X.lattice) == M.sigma + N.sigma
                  and lat.is_characteristic(X.lattice, X.canonical))
        except PreconditionError as exc:
            ok = False
            failures.append({"trial": trial, "error": str(exc)})
            continue
        if not ok:
            failures.append({"trial": trial, "error": "structural check failed"})
    return {"seed": seed, "trials": count, "passed": count - len(failures), "failures": failures}


# ---------------------------------------------------------------------------
# argument parsing

def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lefsum", description=__doc__.splitlines()[0])
    parser.add_argument("--manifest", type=Path, help="JSON manifest to execute")
    parser.add_argument("--output", choices=("json", "human"), default=None)
    parser.add_argument("--seed", type=int, default=0, help="seed for selftest")
    sub = parser.add_subparsers(dest="command")

    def common(p: argparse.ArgumentParser, surface: bool = True) -> None:
        if surface:
            p.add_argument("--surface", default="quintic", choices=mf.PRESETS)
            p.add_argument("--s", type=int, help="embedding parameter s (Σ' = k(K + sL))")
            p.add_argument("--k", type=int, help="embedding parameter k")
        p.add_argument("--output", choices=("json", "human"), default=None)

    for name in ("invariants", "classify"):
        p = sub.add_parser(name)
        common(p)
        p.add_argument("--n", type=int, default=1)
        p.add_argument("--m", type=int)
        p.add_argument("--a", type=int, nargs="+")
        if name == "invariants":
            p.add_argument("--gram", action="store_true", help="include the Gram matrix")
    p = sub.add_parser("fibresum")
    common(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--a", type=int, nargs="+")
    p.add_argument("--gram", action="store_true", help="include the Gram matrix")
    p = sub.add_parser("canonical")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--a", type=int, nargs="+")
    p = sub.add_parser("sw-classes")
    common(p)
    p.add_argument("--n", type=int, default=1)
    p = sub.add_parser("mst")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p = sub.add_parser("obstruction")
    common(p)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int)
    p = sub.add_parser("pencil-params")
    common(p, surface=False)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--s0", type=int, required=True)
    p.add_argument("--k0", type=int, required=True)
    p = sub.add_parser("selftest")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--count", type=int, default=25)
    p.add_argument("--output", choices=("json", "human"), default=None)
    return parser


_OP_KEYS = ("m", "n", "a", "d", "s0", "k0")


def manifest_from_args(args: argparse.Namespace) -> dict:
    op: dict[str, Any] = {"op": args.command}
    for key in _OP_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            op[key] = value
    if getattr(args, "gram", False):
        op["include_gram"] = True
    if args.command in ("invariants", "classify") and op.get("n") == 1 and "m" not in op:
        op.pop("n")
    doc: dict[str, Any] = {"operations": [op]}
    if args.command != "pencil-params":
        doc["surface"] = args.surface
        if args.s is not None or args.k is not None:
            if args.s is None or args.k is None:
                raise ManifestError("--s and --k must be given together")
            doc["embedding"] = {"s": args.s, "k": args.k}
    return doc


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "selftest":
            report = selftest(args.seed, args.count)
            fmt = args.output or "json"
            code = 0 if not report["failures"] else 1
        else:
            if args.manifest is not None:
                if args.command is not None:
                    raise ManifestError("use either --manifest or a subcommand, not both")
                try:
                    doc = json.loads(args.manifest.read_text())
                except (OSError, json.JSONDecodeError) as exc:
                    raise ManifestError(f"cannot read manifest: {exc}") from None
            elif args.command is not None:
                doc = manifest_from_args(args)
            else:
                parser.print_usage(sys.stderr)
                return 2
            fmt = args.output or (doc.get("output", {}) if isinstance(doc, dict) else {}).get("format", "json")
            report = execute(doc)
            code = 0
    except ManifestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return 3
    print(dump_json(report) if fmt == "json" else dump_human(report))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
