"""Command-line interface.

Commands
--------
milnor      total / degree-k / truncated invariants of a braid or tuple
longitudes  the normalised longitude words of a braid
level       the Milnor filtration level of an input
expansion   build or check special expansions (JSON files)
trees       tree-diagram form of an invariant, with optional DOT export
homology    dimension tables of the Koszul homology
morita      the refined H3-valued invariant plus the diagram check
verify      the full structural property suite on one input

Braid words are whitespace-separated tokens ``A(i,j)`` with an optional
integer power ``^k``; square brackets ``[ w1 , w2 ]`` form group
commutators and may nest and carry powers.  Longitude tuples come from
JSON files: {"n": ..., "truncation": ..., "words": [[gen, exp], ...] per
strand}.

Exit codes: 0 success, 2 argument or input parse error, 3 violated
mathematical precondition (filtration, speciality, scale), 4 internal
invariant failure.  All randomness is seed-controlled and echoed in the
output, and output is byte-deterministic given the configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .expansions import (Expansion, build_special, filtration_degree,
                         is_special)
from .koszul import NotACycleError, homology
from .milnor import (FiltrationError, milnor_degree, special_artin,
                     total_milnor, truncated_milnor)
from .morita import (MoritaInput, d2_composition, diagram_sides, morita_milnor,
                     required_truncation, sigma)
from .trees import ScaleError, eta_inverse
from .words import Braid, LongitudeTuple, Word, longitudes

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_INTERNAL = 4


class BraidSyntaxError(ValueError):
    pass


# -- braid word grammar --------------------------------------------------------

def _tokenize(text: str) -> list[str]:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "[],":
            out.append(ch)
            i += 1
        elif ch == "A":
            j = text.find(")", i)
            if j < 0:
                raise BraidSyntaxError(f"unterminated generator at offset {i}")
            j += 1
            if j < len(text) and text[j] == "^":
                j += 1
                if j < len(text) and text[j] == "-":
                    j += 1
                while j < len(text) and text[j].isdigit():
                    j += 1
            out.append(text[i:j])
            i = j
        elif ch == "^":
            j = i + 1
            if j < len(text) and text[j] == "-":
                j += 1
            while j < len(text) and text[j].isdigit():
                j += 1
            out.append(text[i:j])
            i = j
        else:
            raise BraidSyntaxError(f"unexpected character {ch!r} at offset {i}")
    return out


def parse_braid(text: str, n: int) -> Braid:
    """Parse the braid grammar; empty input is the identity braid."""
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def parse_power() -> int:
        nonlocal pos
        tok = peek()
        if tok is not None and tok.startswith("^"):
            pos += 1
            try:
                return int(tok[1:])
            except ValueError:
                raise BraidSyntaxError(f"bad power {tok!r}")
        return 1

    def parse_atom() -> Braid:
        nonlocal pos
        tok = peek()
        if tok is None:
            raise BraidSyntaxError("unexpected end of braid word")
        if tok == "[":
            pos += 1
            left = parse_word(stop={",", "]"})
            if peek() != ",":
                raise BraidSyntaxError("commutator needs two comma-separated parts")
            pos += 1
            right = parse_word(stop={"]"})
            if peek() != "]":
                raise BraidSyntaxError("unclosed commutator bracket")
            pos += 1
            base = left * right * left.inverse() * right.inverse()
            return base ** parse_power()
        if tok.startswith("A("):
            pos += 1
            body = tok[2:]
            close = body.index(")")
            inside = body[:close]
            rest = body[close + 1:]
            try:
                i_str, j_str = inside.split(",")
                i, j = int(i_str), int(j_str)
            except ValueError:
                raise BraidSyntaxError(f"bad generator token {tok!r}")
            power = 1
            if rest:
                if not rest.startswith("^"):
                    raise BraidSyntaxError(f"bad generator token {tok!r}")
                power = int(rest[1:])
            power *= parse_power()
            try:
                return Braid.gen(n, i, j, power)
            except ValueError as exc:
                raise BraidSyntaxError(str(exc))
        raise BraidSyntaxError(f"unexpected token {tok!r}")

    def parse_word(stop=frozenset()) -> Braid:
        nonlocal pos
        out = Braid.identity(n)
        while True:
            tok = peek()
            if tok is None or tok in stop:
                return out
            out = out * parse_atom()

    word = parse_word()
    if pos != len(tokens):
        raise BraidSyntaxError(f"trailing tokens from {tokens[pos]!r}")
    return word


def load_longitude_tuple(path: str) -> LongitudeTuple:
    with open(path) as fh:
        doc = json.load(fh)
    n = doc["n"]
    words = tuple(Word.of(n, (tuple(l) for l in letters)) for letters in doc["words"])
    return LongitudeTuple(n, words, doc.get("truncation"))


# -- shared helpers -------------------------------------------------------------

def _resolve_input(args) -> "Braid | LongitudeTuple":
    if getattr(args, "longitude_file", None):
        return load_longitude_tuple(args.longitude_file)
    return parse_braid(args.braid or "", args.n)


def _resolve_expansion(args, trunc: int) -> tuple[Expansion, dict]:
    spec = getattr(args, "expansion", "canonical")
    seed = getattr(args, "seed", 0)
    if spec == "canonical":
        return build_special(args.n, trunc), {"expansion": "canonical"}
    if spec == "randomized":
        return (build_special(args.n, trunc, strategy="randomized", seed=seed),
                {"expansion": "randomized", "seed": seed})
    theta = Expansion.load(spec)
    if theta.n != args.n:
        raise ValueError(f"expansion file has n={theta.n}, expected {args.n}")
    if theta.trunc < trunc:
        raise ValueError(f"expansion file truncation {theta.trunc} < required {trunc}")
    return theta, {"expansion": os.path.basename(spec)}


def _emit(args, document: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(document, indent=2, sort_keys=True))
    else:
        print(text)


def _invariant_text(value) -> str:
    return str(value) if not value.is_zero() else "0"


def _output_dir(args) -> str:
    out = getattr(args, "output_dir", None) or os.environ.get(
        "STRINGLINKS_OUTPUT_DIR", ".")
    os.makedirs(out, exist_ok=True)
    return out


# -- commands -------------------------------------------------------------------

def cmd_milnor(args) -> int:
    data = _resolve_input(args)
    if args.mode != "total" and args.k is None:
        raise ValueError(f"--k is required for mode {args.mode}")
    if args.mode == "total":
        degree = args.trunc or (2 * (args.k or 1) + 1)
        theta, meta = _resolve_expansion(args, degree + 1)
        value = total_milnor(data, theta, degree)
    elif args.mode == "degree":
        theta, meta = _resolve_expansion(args, args.k + 1)
        value = milnor_degree(data, theta, args.k)
    else:
        theta, meta = _resolve_expansion(args, 2 * args.k)
        value = truncated_milnor(data, theta, args.k)
    doc = {"command": "milnor", "mode": args.mode, "n": args.n, "k": args.k,
           "entries": value.to_json_entries(), **meta}
    _emit(args, doc, _invariant_text(value))
    return EXIT_OK


def cmd_longitudes(args) -> int:
    data = _resolve_input(args)
    tuple_ = longitudes(data) if isinstance(data, Braid) else data
    doc = {"command": "longitudes", "n": args.n,
           "words": [[list(l) for l in y.letters] for y in tuple_.words],
           "rendered": [str(y) for y in tuple_.words]}
    _emit(args, doc, "\n".join(f"y_{i} = {y}" for i, y in
                               enumerate(tuple_.words, start=1)))
    return EXIT_OK


def cmd_level(args) -> int:
    data = _resolve_input(args)
    level = filtration_degree(data, args.max_k)
    doc = {"command": "level", "n": args.n, "maxK": args.max_k, "level": level}
    _emit(args, doc, str(level))
    return EXIT_OK


def cmd_expansion(args) -> int:
    if args.action == "build":
        theta = build_special(args.n, args.trunc, strategy=args.strategy,
                              seed=args.seed)
        doc = theta.to_json_dict()
        doc["strategy"] = args.strategy
        if args.strategy == "randomized":
            doc["seed"] = args.seed
        if args.out:
            with open(args.out, "w") as fh:
                json.dump(doc, fh, indent=2, sort_keys=True)
            print(f"wrote {args.out}")
        else:
            print(json.dumps(doc, indent=2, sort_keys=True))
        return EXIT_OK
    theta = Expansion.load(args.file)
    report = is_special(theta)
    doc = {"command": "expansion check", "n": theta.n, "truncation": theta.trunc,
           "groupLike": report.grouplike, "tangential": report.tangential,
           "normalized": report.normalized, "special": report.is_special,
           "failure": report.failure, "failureDegree": report.failure_degree}
    _emit(args, doc,
          "special" if report.is_special else f"NOT special: {report.failure}")
    return EXIT_OK if report.is_special else EXIT_PRECONDITION


def cmd_trees(args) -> int:
    data = _resolve_input(args)
    theta, meta = _resolve_expansion(args, 2 * args.k)
    value = truncated_milnor(data, theta, args.k)
    comb = eta_inverse(value)
    entries = [{"tree": str(t), "degree": t.degree, "coefficient": str(c)}
               for t, c in comb.sorted_terms()]
    doc = {"command": "trees", "n": args.n, "k": args.k, "terms": entries, **meta}
    text_lines = [f"{c} * {t}" for t, c in comb.sorted_terms()] or ["0"]
    if args.dot:
        out_dir = _output_dir(args)
        paths = []
        for idx, (t, _c) in enumerate(comb.sorted_terms()):
            path = os.path.join(out_dir, f"tree_{idx:03d}.dot")
            with open(path, "w") as fh:
                fh.write(t.to_dot(name=f"tree_{idx:03d}"))
            paths.append(path)
        doc["dotFiles"] = paths
        text_lines.append(f"wrote {len(paths)} DOT file(s) to {out_dir}")
    _emit(args, doc, "\n".join(text_lines))
    return EXIT_OK


def cmd_homology(args) -> int:
    basis = homology(3, args.n, args.k - 1)
    table = basis.degree_table()
    doc = {"command": "homology", "n": args.n, "k": args.k,
           "quotientClass": args.k - 1,
           "fingerprint": basis.fingerprint(),
           "dimension": basis.dimension,
           "byInternalDegree": {str(d): row for d, row in table.items()}}
    lines = [f"H_3 of the class-{args.k - 1} quotient, n={args.n}: "
             f"dim = {basis.dimension}   [{basis.fingerprint()}]"]
    for d, row in table.items():
        lines.append(f"  degree {d}: chains {row['chains']}, cycles {row['cycles']},"
                     f" boundaries {row['boundaries']}, H {row['homology']}")
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def cmd_morita(args) -> int:
    data = _resolve_input(args)
    theta, meta = _resolve_expansion(args, required_truncation(args.k))
    inp = MoritaInput(data, theta, args.k)
    lhs, rhs = diagram_sides(inp)
    mu_next = d2_composition(lhs)
    doc = {"command": "morita", "n": args.n, "k": args.k, **meta,
           "class": lhs.to_json_dict(),
           "diagramCommutes": lhs == rhs,
           "degreeProjection": mu_next.to_json_entries()}
    lines = [f"class: {lhs}",
             f"diagram commutes: {lhs == rhs}",
             f"degree-{args.k + 1} projection:",
             _invariant_text(mu_next)]
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK if lhs == rhs else EXIT_INTERNAL


def cmd_verify(args) -> int:
    data = _resolve_input(args)
    checks: list[tuple[str, bool]] = []
    level = filtration_degree(data, max_k=args.k or 6)
    k = args.k or max(level, 1)
    theta, meta = _resolve_expansion(args, required_truncation(k))
    report = is_special(theta)
    checks.append(("expansion is special", report.is_special))
    aut = special_artin(data, theta)
    checks.append(("action fixes X_1+...+X_n", aut.speciality_defect().is_zero()))
    value = aut.invariant()
    checks.append((f"filtration level >= {k}",
                   all(d >= k for d in value.degrees())))
    deg = value.degree_component(k)
    checks.append((f"degree-{k} part in the bracket kernel",
                   deg.bracket_map().is_zero()))
    alt = build_special(theta.n, theta.trunc, strategy="randomized", seed=17)
    alt_deg = special_artin(data, alt).invariant().degree_component(k)
    checks.append((f"degree-{k} part expansion-independent", deg == alt_deg))
    if level > k:
        checks.append((f"input is actually deeper than level {k} "
                       f"(level {level}); refined checks skipped", True))
        ok = all(flag for _, flag in checks)
    else:
        inp = MoritaInput(data, theta, k - 1) if k >= 2 else None
        if inp is not None:
            sig = sigma(inp)
            checks.append(("sigma is a 2-cycle", True))  # sigma() raises otherwise
            lhs, rhs = diagram_sides(inp)
            checks.append(("commutative diagram", lhs == rhs))
            checks.append((
                "class independent of the bounding chain",
                morita_milnor(inp, "forward") == morita_milnor(inp, "backward")))
            checks.append((f"d2 composition equals mu_{k}",
                           d2_composition(lhs) == milnor_degree(data, theta, k)))
        ok = all(flag for _, flag in checks)
    doc = {"command": "verify", "n": args.n, "k": k, **meta,
           "checks": [{"name": name, "ok": flag} for name, flag in checks],
           "ok": ok}
    _emit(args, doc, "\n".join(
        f"[{'PASS' if flag else 'FAIL'}] {name}" for name, flag in checks))
    return EXIT_OK if ok else EXIT_INTERNAL


# -- parser ---------------------------------------------------------------------

def _add_common(p, braid=True, expansion=True, k=True, k_required=False):
    p.add_argument("--n", type=int, required=True, help="number of strands")
    if braid:
        group = p.add_mutually_exclusive_group()
        group.add_argument("--braid", default="", help="braid word")
        group.add_argument("--longitude-file", help="JSON longitude tuple")
    if expansion:
        p.add_argument("--expansion", default="canonical",
                       help="canonical | randomized | path to a JSON expansion")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for the randomized expansion")
    if k:
        p.add_argument("--k", type=int, required=k_required,
                       help="filtration degree")
    p.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stringlinks",
        description="Exact Milnor invariants of pure braids and string links")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("milnor", help="total / degree / truncated invariant")
    _add_common(p)
    p.add_argument("--mode", choices=("total", "degree", "truncated"),
                   default="degree")
    p.add_argument("--trunc", type=int, help="truncation for --mode total")
    p.set_defaults(func=cmd_milnor)

    p = sub.add_parser("longitudes", help="longitude words of a braid")
    _add_common(p, expansion=False, k=False)
    p.set_defaults(func=cmd_longitudes)

    p = sub.add_parser("level", help="Milnor filtration level")
    _add_common(p, expansion=False, k=False)
    p.add_argument("--max-k", type=int, default=6)
    p.set_defaults(func=cmd_level)

    p = sub.add_parser("expansion", help="build or check special expansions")
    psub = p.add_subparsers(dest="action", required=True)
    pb = psub.add_parser("build")
    pb.add_argument("--n", type=int, required=True)
    pb.add_argument("--trunc", type=int, required=True)
    pb.add_argument("--strategy", choices=("canonical", "randomized"),
                    default="canonical")
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--out", help="output JSON path")
    pb.set_defaults(func=cmd_expansion)
    pc = psub.add_parser("check")
    pc.add_argument("file")
    pc.add_argument("--format", choices=("text", "json"), default="text")
    pc.set_defaults(func=cmd_expansion)

    p = sub.add_parser("trees", help="tree-diagram form of the invariant")
    _add_common(p, k_required=True)
    p.add_argument("--dot", action="store_true", help="write DOT files")
    p.add_argument("--output-dir", help="directory for DOT files "
                   "(default $STRINGLINKS_OUTPUT_DIR or .)")
    p.set_defaults(func=cmd_trees)

    p = sub.add_parser("homology", help="Koszul homology dimension table")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True,
                   help="H_3 of the quotient by degrees >= k")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("morita", help="refined H3-valued invariant")
    _add_common(p, k_required=True)
    p.set_defaults(func=cmd_morita)

    p = sub.add_parser("verify", help="structural property suite on one input")
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "k", None) is not None and args.k < 1:
        print("error: --k must be >= 1", file=sys.stderr)
        return EXIT_PARSE
    try:
        return args.func(args)
    except (BraidSyntaxError, json.JSONDecodeError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (FiltrationError, NotACycleError, ScaleError) as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except RuntimeError as exc:
        print(f"internal invariant failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
