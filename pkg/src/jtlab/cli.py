"""``jtlab`` command-line front end.

Single operations print one JSON document on stdout.  ``jtlab suite NAME``
writes a report (JSON or CSV) to ``--out`` or stdout.  Exit codes: 0 success
or passed suite, 1 internal inconsistency or failed suite, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .approximation import SolverConfig, Subspace, uniqueness_probe
from .errors import InconsistencyError, JtlabError, NotInvertibleError, ValidationError
from .experiments import (
    _jsonable,
    suite_axioms,
    suite_line_chebyshev,
    suite_meb_oracle,
    suite_peirce_coincidence,
    suite_subalgebra_dichotomy,
    suite_subtriple_classification,
)
from .factors import Element, norm, parse_factor, triple_product
from .linalg import DEFAULT_REL_TOL
from .meb import min_enclosing_ball
from .regularity import bp_quasi_invertible, generalized_inverse, regular_inverse_residuals
from .tripotents import (
    TRIPOTENT_TOL,
    annihilator_basis,
    is_tripotent,
    orthogonality_tests,
    peirce,
    range_tripotent,
    relation,
)

EVAL_COMMANDS = ("product", "norm", "peirce", "range-tripotent", "gen-inverse", "bpq", "relation", "dist",
                 "meb", "annihilator")
SUITE_NAMES = ("axioms", "theorem-2.6", "prop-3.5-3.6", "theorem-3.8-a", "theorem-3.8-b", "theorem-3.8-c",
               "theorem-3.8-d", "corollary-3.9", "meb-oracle")


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _default_seed() -> int:
    raw = os.environ.get("JTLAB_SEED")
    if raw is None or raw.strip() == "":
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise UsageError(f"JTLAB_SEED must be an integer, got {raw!r}") from exc


def _positive(kind):
    def parse(text):
        try:
            v = kind(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"expected a {kind.__name__}, got {text!r}") from exc
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
        return v
    return parse


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default: $JTLAB_SEED or 0)")
    common.add_argument("--tol", type=_positive(float), default=None,
                        help="tripotent / rank tolerance (defaults 1e-9)")
    common.add_argument("--eps-f", type=_positive(float), default=1e-6, help="objective slack for near-optima")
    common.add_argument("--delta", type=_positive(float), default=1e-2, help="separation for witness pairs")
    common.add_argument("--out", type=Path, default=None, help="write output here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = _Parser(prog="jtlab", description="Triple-product calculus and best-approximation experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in EVAL_COMMANDS:
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--in", dest="inputs", action="append", type=Path, default=[],
                       help="element JSON file (repeatable)")
        if name == "dist":
            s.add_argument("--basis", type=Path, required=True, help="JSON list of subspace basis elements")
            s.add_argument("--starts", type=int, default=16)
        if name == "meb":
            s.add_argument("--points", type=Path, required=True, help="JSON list of real points")
    s = sub.add_parser("suite", parents=[common])
    s.add_argument("name")
    s.add_argument("--factor", default=None, help="rect:m,n | sym:n | asym:n | spin:d | sum:<factor>,<factor>")
    s.add_argument("--trials", type=_positive(int), default=None)
    s.add_argument("--max-points", type=_positive(int), default=8)
    s.add_argument("--dim", type=_positive(int), default=4)
    s.add_argument("--n", type=_positive(int), default=None, help="matrix size for corollary-3.9")
    return p


def _read_json(path: Path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise UsageError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from exc


def _elements(paths, count: int | None = None) -> list[Element]:
    out = []
    for path in paths:
        obj = _read_json(path)
        items = obj if isinstance(obj, list) else [obj]
        for item in items:
            if not isinstance(item, dict):
                raise UsageError(f"{path}: expected an element object")
            out.append(Element.from_json(item))
    if count is not None and len(out) != count:
        raise UsageError(f"expected {count} element(s) via --in, got {len(out)}")
    return out


def _eval(args) -> dict:
    tol = args.tol
    rel = tol or DEFAULT_REL_TOL
    cmd = args.command
    if cmd == "product":
        x, y, z = _elements(args.inputs, 3)
        return {"product": triple_product(x, y, z).to_json()}
    if cmd == "norm":
        (x,) = _elements(args.inputs, 1)
        return {"norm": norm(x)}
    if cmd == "peirce":
        items = _elements(args.inputs)
        if not items or len(items) > 2:
            raise UsageError("peirce takes a tripotent and optionally an element to split")
        cert = is_tripotent(items[0], tol or TRIPOTENT_TOL)
        out = {"tripotent": cert.to_json()}
        if len(items) == 2:
            D = peirce(cert)
            out["components"] = {str(k): D.component(k, items[1]).to_json() for k in (2, 1, 0)}
        return out
    if cmd == "range-tripotent":
        (a,) = _elements(args.inputs, 1)
        return {"range_tripotent": range_tripotent(a, rel).to_json()}
    if cmd == "gen-inverse":
        (a,) = _elements(args.inputs, 1)
        b = generalized_inverse(a, rel)
        return {"generalized_inverse": b.to_json(), "residuals": regular_inverse_residuals(a, b, rel)}
    if cmd == "bpq":
        (a,) = _elements(args.inputs, 1)
        return bp_quasi_invertible(a, rel).to_json()
    if cmd == "relation":
        a, b = _elements(args.inputs, 2)
        return {"relation": relation(a, b).value, "orthogonality_tests": orthogonality_tests(a, b)}
    if cmd == "dist":
        (x,) = _elements(args.inputs, 1)
        basis = _elements([args.basis])
        V = Subspace(x.factor, basis)
        cfg = SolverConfig(starts=args.starts, eps_f=args.eps_f, delta=args.delta, seed=args.seed)
        return uniqueness_probe(x, V, cfg=cfg).to_json()
    if cmd == "meb":
        pts = _read_json(args.points)
        return min_enclosing_ball(pts).to_json()
    if cmd == "annihilator":
        (a,) = _elements(args.inputs, 1)
        return {"annihilator": [b.to_json() for b in annihilator_basis(a, rel)]}
    raise UsageError(f"unknown command {cmd!r}")


def _suite(args):
    name = args.name
    if name not in SUITE_NAMES:
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    cfg = SolverConfig(eps_f=args.eps_f, delta=args.delta, seed=args.seed)
    factor = parse_factor(args.factor) if args.factor else None
    seed, trials = args.seed, args.trials
    if name == "axioms":
        return suite_axioms(factor or parse_factor("rect:2,3"), trials or 1000, seed, args.tol or 1e-8)
    if name == "theorem-2.6":
        return suite_line_chebyshev(factor or parse_factor("rect:2,2"), trials or 100, seed, cfg)
    if name == "prop-3.5-3.6":
        return suite_peirce_coincidence(seed=seed, cfg=cfg)
    if name.startswith("theorem-3.8-"):
        return suite_subtriple_classification(name[-1], trials, seed, cfg, factor)
    if name == "corollary-3.9":
        return suite_subalgebra_dichotomy(args.n or 2, trials or 50, seed, cfg)
    return suite_meb_oracle(trials or 200, args.max_points, args.dim, seed)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text if text.endswith("\n") else text + "\n")


def _error(kind: str, message: str, code: int) -> int:
    sys.stdout.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.seed is None:
            args.seed = _default_seed()
        if args.command == "suite":
            rep = _suite(args)
            text = rep.to_csv() if args.format == "csv" else rep.dumps()
            _emit(text, args.out)
            if args.out is not None:
                print(json.dumps(_jsonable({"suite": rep.suite, "passed": rep.passed, "summary": rep.summary,
                                            "out": str(args.out)})))
            return 0 if rep.passed else 1
        result = _jsonable(_eval(args))
        _emit(json.dumps(result, indent=2), args.out)
        return 0
    except InconsistencyError as exc:
        return _error("inconsistency", str(exc), 1)
    except (ValidationError, NotInvertibleError) as exc:
        return _error(type(exc).__name__, str(exc), 2)
    except JtlabError as exc:
        return _error(type(exc).__name__, str(exc), 1)


if __name__ == "__main__":
    sys.exit(main())
