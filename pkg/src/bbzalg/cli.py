"""Command-line front end.

Exit codes: 0 success, 1 denominator identity failed, 2 bad input,
3 invariant breach, 4 cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from . import bbzmult, monster, quiver as quiver_mod, schofield
from .cartan import BorcherdsCartanDatum, ChargeCapError, DatumError, RootVec, Weight, vertex_key
from .interpolation import InterpolationError
from .kmweights import FreudenthalError
from .series import DegreeBox

EXIT_OK, EXIT_DENOM_FAIL, EXIT_SCHEMA, EXIT_INVARIANT, EXIT_CAP = 0, 1, 2, 3, 4


class SchemaError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    box: str | None = None
    J: str | None = None
    fields: tuple[int, ...] = (2, 3, 4, 5)
    cap: int | None = None
    format: str = "tsv"
    output: str | None = None
    preset: str | None = None
    extra: dict = field(default_factory=dict)


# -- parsing helpers ---------------------------------------------------------------


def _vertex(token: str, known: Sequence | None = None):
    token = token.strip()
    if known is not None:
        for v in known:
            if str(v) == token:
                return v
        raise SchemaError(f"unknown vertex {token!r}")
    try:
        return int(token)
    except ValueError:
        return token


def parse_box(text: str | None, vertices: Sequence) -> DegreeBox:
    if text is None:
        raise SchemaError("--box is required")
    text = text.strip()
    if not text:
        return DegreeBox({})
    parts = [p for p in text.split(",") if p.strip()]
    limits = {}
    if all("=" in p for p in parts):
        for p in parts:
            k, v = p.split("=", 1)
            limits[_vertex(k, vertices or None)] = _int(v)
    elif any("=" in p for p in parts):
        raise SchemaError("--box mixes positional and named limits")
    elif not vertices:
        raise SchemaError("--box must name its vertices here, e.g. -1=2,1=4")
    else:
        if len(parts) != len(vertices):
            raise SchemaError(f"--box has {len(parts)} entries for {len(vertices)} vertices")
        limits = {v: _int(p) for v, p in zip(vertices, parts)}
    for v, k in limits.items():
        if k < 0:
            raise SchemaError(f"negative box limit at {v!r}")
    return DegreeBox({v: k for v, k in limits.items() if k})


def _int(text) -> int:
    try:
        return int(str(text).strip())
    except ValueError:
        raise SchemaError(f"expected an integer, got {text!r}") from None


def parse_J(text: str | None, vertices: Sequence) -> tuple:
    if text is None or text.strip().lower() in ("", "none", "empty", "{}"):
        return ()
    return tuple(_vertex(t, vertices) for t in text.strip("{} ").split(",") if t.strip())


def parse_vec(text: str, vertices: Sequence | None = None) -> dict:
    out = {}
    for p in text.split(","):
        if not p.strip():
            continue
        if "=" not in p:
            raise SchemaError(f"expected vertex=value, got {p!r}")
        k, v = p.split("=", 1)
        out[_vertex(k, vertices)] = _int(v)
    return out


def parse_root(text: str, vertices: Sequence) -> RootVec:
    """Root from positional ``1,2`` (datum vertex order) or named ``0=1,1=2``."""
    if "=" in text:
        return RootVec(parse_vec(text, vertices))
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != len(vertices):
        raise SchemaError(f"root {text!r} has {len(parts)} entries for {len(vertices)} vertices")
    return RootVec({v: _int(p) for v, p in zip(vertices, parts)})


def _load_json(path: str | None) -> Any:
    if path is None:
        raise SchemaError("--input is required")
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None


def datum_from_json(data: Any, box: str | None = None) -> BorcherdsCartanDatum:
    if not isinstance(data, dict) or "vertices" not in data or "matrix" not in data:
        raise SchemaError("datum JSON needs 'vertices' and 'matrix'")
    vertices = list(data["vertices"])
    matrix = data["matrix"]
    charge = data.get("charge")
    sym = data.get("symmetrizers")
    if isinstance(matrix, dict):
        if matrix.get("rule") != "monster":
            raise SchemaError(f"unknown matrix rule {matrix.get('rule')!r}")
        for v in vertices:
            if not isinstance(v, int) or (v != -1 and v < 1):
                raise SchemaError("monster rule needs integer vertices -1, 1, 2, ...")

        def entry(i, j):
            return 2 if i == j == -1 else -(i + j)

    else:
        entry = matrix
    if isinstance(charge, dict) and "rule" in charge:
        if charge["rule"] != "j-coefficients":
            raise SchemaError(f"unknown charge rule {charge['rule']!r}")
        K = max([v for v in vertices if isinstance(v, int)] + [2])
        coeffs = monster.j_coefficients(max(K, 2))
        charge = {v: (1 if v == -1 else coeffs(v)) for v in vertices}
    elif isinstance(charge, dict):
        charge = {_vertex(k, vertices): _int(v) for k, v in charge.items()}
    elif charge is not None:
        raise SchemaError("charge must be an object")
    if sym is not None and not isinstance(sym, list):
        raise SchemaError("symmetrizers must be a list")
    try:
        return BorcherdsCartanDatum(vertices, entry, sym, charge)
    except DatumError as exc:
        raise SchemaError(str(exc)) from None


def monster_preset_datum(box: DegreeBox) -> BorcherdsCartanDatum:
    K = max([v for v in box.vertices if isinstance(v, int) and v >= 1] + [1])
    return monster.monster_datum(K, monster.j_coefficients(max(K, 2)))


def _fmt_vec(alpha: RootVec, vertices: Sequence) -> str:
    return "(" + ",".join(str(alpha[v]) for v in vertices) + ")"


def _fmt_num(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _vec_json(alpha: RootVec) -> dict:
    return {str(v): k for v, k in alpha.items}


# -- commands ---------------------------------------------------------------------


def _datum_and_box(cfg: RunConfig):
    if cfg.preset == "monster":
        box = parse_box(cfg.box, [])
        for v in box.vertices:
            if not isinstance(v, int) or (v != -1 and v < 1):
                raise SchemaError(f"{v!r} is not a Monster vertex")
        datum = monster_preset_datum(box)
        J = parse_J(cfg.J, datum.vertices) if cfg.J is not None else (-1,)
        return datum, box, J
    datum = datum_from_json(_load_json(cfg.input))
    box = parse_box(cfg.box, datum.vertices)
    for v in box.vertices:
        if v not in datum:
            raise SchemaError(f"box vertex {v!r} not in the datum")
    J = parse_J(cfg.J, datum.vertices)
    for j in J:
        if not datum.is_real(j):
            raise SchemaError(f"J vertex {j!r} is not real")
    return datum, box, J


def cmd_mult(cfg: RunConfig) -> tuple[int, str]:
    datum, box, J = _datum_and_box(cfg)
    if not box.vertices:
        return EXIT_OK, "" if cfg.format == "tsv" else json.dumps([], sort_keys=True)
    table = bbzmult.MultiplicityEngine(datum, J, box).table()
    rows = sorted(table.items(), key=lambda t: tuple(t[0][v] for v in datum.vertices))
    if cfg.format == "json":
        return EXIT_OK, json.dumps([{"alpha": _vec_json(a), "mult": str(m)} for a, m in rows], sort_keys=True)
    return EXIT_OK, "\n".join(f"{_fmt_vec(a, datum.vertices)}\t{m}" for a, m in rows)


def cmd_denom_check(cfg: RunConfig) -> tuple[int, str]:
    datum, box, J = _datum_and_box(cfg)
    override = None
    if cfg.extra.get("override"):
        alpha_txt, val = cfg.extra["override"].rsplit(":", 1)
        override = {parse_root(alpha_txt, datum.vertices): _int(val)}
    rep = bbzmult.verify_denominator(datum, J, box, multiplicity_override=override)
    payload = {
        "passed": rep.passed,
        "J": sorted((str(j) for j in rep.J)),
        "full_identity_passed": rep.full_identity_passed,
        "first_mismatch": None
        if rep.first_mismatch is None
        else {
            "alpha": _vec_json(rep.first_mismatch[0]),
            "lhs": _fmt_num(rep.first_mismatch[1]),
            "rhs": _fmt_num(rep.first_mismatch[2]),
        },
        "multiplicities": [
            {"alpha": _vec_json(a), "mult": str(m)}
            for a, m in sorted(rep.multiplicities.items(), key=lambda t: tuple(t[0][v] for v in datum.vertices))
        ],
    }
    code = EXIT_OK if rep.passed else EXIT_DENOM_FAIL
    if cfg.format == "json":
        return code, json.dumps(payload, sort_keys=True)
    lines = [f"status\t{'pass' if rep.passed else 'fail'}"]
    if rep.first_mismatch is not None:
        a, l, r = rep.first_mismatch
        lines.append(f"first_mismatch\t{_fmt_vec(a, datum.vertices)}\t{_fmt_num(l)}\t{_fmt_num(r)}")
    lines += [f"{_fmt_vec(a, datum.vertices)}\t{m}" for a, m in
              sorted(rep.multiplicities.items(), key=lambda t: tuple(t[0][v] for v in datum.vertices))]
    return code, "\n".join(lines)


def cmd_character(cfg: RunConfig) -> tuple[int, str]:
    datum, box, J = _datum_and_box(cfg)
    lam = parse_vec(cfg.extra.get("weight") or "", datum.vertices)
    try:
        ch = bbzmult.bbz_character(datum, Weight(lam), box, J)
    except DatumError as exc:
        raise SchemaError(str(exc)) from None
    if cfg.format == "json":
        return EXIT_OK, json.dumps(ch.to_records(), sort_keys=True)
    rows = sorted(ch, key=lambda t: tuple(t[0][v] for v in datum.vertices))
    return EXIT_OK, "\n".join(f"{_fmt_vec(k, datum.vertices)}\t{_fmt_num(c)}" for k, c in rows)


def cmd_jcoeffs(cfg: RunConfig) -> tuple[int, str]:
    N = _int(cfg.extra.get("N") or 64)
    coeffs = monster.j_coefficients(N)
    if cfg.format == "json":
        return EXIT_OK, json.dumps({str(n): str(coeffs(n)) for n in range(-1, N + 1)}, sort_keys=True)
    return EXIT_OK, "\n".join(f"{n}\t{coeffs(n)}" for n in range(-1, N + 1))


def cmd_monster(cfg: RunConfig) -> tuple[int, str]:
    kind = cfg.extra.get("kind") or "bozec"
    if kind in ("lie", "bozec", "d"):
        mn = cfg.extra.get("mn")
        if not mn:
            raise SchemaError("--mn m,n is required")
        m, n = (_int(x) for x in mn.split(","))
        coeffs = monster.j_coefficients(max(m * n, m + n, 4))
        fn = {"lie": monster.monster_lie_mult, "bozec": monster.monster_bozec_mult, "d": monster.monster_bozec_d}[kind]
        val = fn(m, n, coeffs)
        if cfg.format == "json":
            return EXIT_OK, json.dumps({"m": m, "n": n, "dim": str(val), "kind": kind}, sort_keys=True)
        return EXIT_OK, f"{m}\t{n}\t{val}"
    if kind == "root":
        alpha = RootVec(parse_vec(cfg.extra.get("alpha") or ""))
        if alpha.is_zero():
            raise SchemaError("--alpha is required for --kind root")
        val = monster.monster_bozec_root_mult(alpha)
        if cfg.format == "json":
            return EXIT_OK, json.dumps({"alpha": _vec_json(alpha), "dim": str(val)}, sort_keys=True)
        label = ",".join(f"{v}={k}" for v, k in alpha.items)
        return EXIT_OK, f"{label}\t{val}"
    raise SchemaError(f"unknown monster kind {kind!r}")


def _quiver(cfg: RunConfig) -> quiver_mod.Quiver:
    data = _load_json(cfg.input)
    if not isinstance(data, dict) or "vertices" not in data:
        raise SchemaError("quiver JSON needs 'vertices' and 'arrows'")
    try:
        return quiver_mod.Quiver.from_json(data)
    except (KeyError, ValueError, TypeError, AttributeError) as exc:
        raise SchemaError(f"bad quiver JSON: {exc}") from None


def cmd_quiver_kac(cfg: RunConfig) -> tuple[int, str]:
    Q = _quiver(cfg)
    dims = parse_vec(cfg.extra.get("dims") or "", Q.vertices)
    cap = cfg.cap or quiver_mod.DEFAULT_POINT_CAP
    poly = quiver_mod.kac_polynomial_1nil(Q, dims, cfg.fields, cap=cap)
    payload = {"dims": {str(k): v for k, v in dims.items()}, "polynomial": poly.to_json(), "A(0)": str(poly(0))}
    if cfg.format == "json":
        return EXIT_OK, json.dumps(payload, sort_keys=True)
    lines = [f"q={q}\t{n}" for q, n in poly.samples] + [f"polynomial\t{poly}", f"A(0)\t{poly(0)}"]
    return EXIT_OK, "\n".join(lines)


def cmd_quiver_roots(cfg: RunConfig) -> tuple[int, str]:
    Q = _quiver(cfg)
    box = parse_box(cfg.box, Q.vertices)
    cap = cfg.cap or quiver_mod.DEFAULT_POINT_CAP
    rep = quiver_mod.check_root_correspondence(Q, box, cfg.fields, cap=cap)
    rows = [
        {"alpha": _vec_json(a), "mult": str(m), "kac_at_0": str(a0), "equal": m == a0}
        for a, m, a0, _ in rep.rows
    ]
    code = EXIT_OK if rep.all_equal and rep.roots_match else EXIT_INVARIANT
    if cfg.format == "json":
        return code, json.dumps({"rows": rows, "roots_match": rep.roots_match}, sort_keys=True)
    lines = [f"{_fmt_vec(a, Q.vertices)}\t{m}\t{a0}\t{'ok' if m == a0 else 'MISMATCH'}" for a, m, a0, _ in rep.rows]
    lines.append(f"roots_match\t{rep.roots_match}")
    return code, "\n".join(lines)


class _FieldListFamily(schofield.IntegerFamily):
    def __init__(self, quiver, dims, maps, fields):
        super().__init__(quiver, dims, maps)
        self._fields = tuple(fields)

    def sample_fields(self):
        yield from self._fields
        yield from (q for q in schofield.SAMPLE_PRIME_POWERS if q > max(self._fields))


def cmd_schofield_pair(cfg: RunConfig) -> tuple[int, str]:
    Q = _quiver(cfg)
    mod = _load_json(cfg.extra.get("module"))
    if not isinstance(mod, dict) or "dims" not in mod:
        raise SchemaError("module JSON needs 'dims' and 'maps'")
    dims = {_vertex(k, Q.vertices): _int(v) for k, v in mod["dims"].items()}
    maps = {}
    ids = {str(a.id): a.id for a in Q.arrows}
    for k, m in mod.get("maps", {}).items():
        if k not in ids:
            raise SchemaError(f"unknown arrow id {k!r}")
        maps[ids[k]] = m
    try:
        fam = _FieldListFamily(Q, dims, maps, cfg.fields)
        fam.at(cfg.fields[0])
        word = schofield.parse_word(cfg.extra.get("word") or "")
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    res = schofield.pairing(fam, word, cfg.cap or schofield.DEFAULT_VECTOR_CAP)
    if cfg.format == "json":
        return EXIT_OK, json.dumps(res.to_json(), sort_keys=True)
    lines = []
    for w, (c, poly) in sorted(res.per_word.items()):
        if poly is not None:
            lines += [f"{w}\tq={q}\t{n}" for q, n in poly.samples]
            lines.append(f"{w}\tpolynomial\t{poly}")
    lines.append(f"chi\t{res.value}")
    return EXIT_OK, "\n".join(lines)


def cmd_serre_check(cfg: RunConfig) -> tuple[int, str]:
    Q = _quiver(cfg)
    i = _vertex(cfg.extra.get("i") or "", Q.vertices)
    j = _vertex(cfg.extra.get("j") or "", Q.vertices)
    l = _int(cfg.extra.get("l") or 1)
    k = cfg.extra.get("k")
    try:
        if k is None:
            element = schofield.serre_element(Q, i, j, l)
        else:
            element = schofield.commuting_element(Q, i, _int(k), j, l)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    deg = schofield.degree(next(iter(element))) if element else RootVec()
    modules = []
    for q in cfg.fields:
        modules += schofield.all_modules(Q, dict(deg.items), q)
    rep = schofield.check_serre(Q, element, modules, cfg.cap or schofield.DEFAULT_VECTOR_CAP)
    payload = {
        "element": {schofield.word_str(w): str(c) for w, c in element.items()},
        "checked": rep.checked,
        "passed": rep.passed,
        "witnesses": [{"module": repr(f), "chi": str(v)} for f, v in rep.witnesses],
        "scope": rep.scope,
    }
    code = EXIT_OK if rep.passed else EXIT_INVARIANT
    if cfg.format == "json":
        return code, json.dumps(payload, sort_keys=True)
    return code, f"checked\t{rep.checked}\npassed\t{rep.passed}"


COMMANDS = {
    "mult": cmd_mult,
    "denom-check": cmd_denom_check,
    "character": cmd_character,
    "monster": cmd_monster,
    "jcoeffs": cmd_jcoeffs,
    "quiver-kac": cmd_quiver_kac,
    "quiver-roots": cmd_quiver_roots,
    "schofield-pair": cmd_schofield_pair,
    "serre-check": cmd_serre_check,
}

HELP = """\
TSV columns:
  mult            alpha<TAB>dim g_alpha          (alpha listed in datum vertex order)
  denom-check     status line, optional first_mismatch line, then alpha<TAB>mult
  character       beta<TAB>coefficient of e^(lambda - beta)
  monster         m<TAB>n<TAB>dim  (lie/bozec/d)  or  alpha<TAB>dim (root)
  jcoeffs         n<TAB>c(n) for -1 <= n <= N
  quiver-kac      q=<q><TAB>count per sample, polynomial, A(0)
  quiver-roots    alpha<TAB>dim g<TAB>A(0)<TAB>ok|MISMATCH, then roots_match
  schofield-pair  word<TAB>q=<q><TAB>count, word<TAB>polynomial, chi
  serre-check     checked<TAB>n, passed<TAB>bool
Named boxes that start with a negative vertex need '=': --box=-1=1,1=4,2=2
Exit codes: 0 ok, 1 denominator identity failed, 2 bad input, 3 invariant breach, 4 cap exceeded.
"""


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bbzalg", description="Borcherds-Bozec multiplicity engine",
                                epilog=HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--input", help="datum or quiver JSON file")
    p.add_argument("--box", help="degree box: positional '4,4' or named '0=4,1=4'")
    p.add_argument("--J", dest="J", help="comma-separated real vertices (default: empty)")
    p.add_argument("--fields", default="2,3,4,5", help="sample field orders, e.g. 2,3,4,5")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("--cap", type=int, help="enumeration cap")
    p.add_argument("--preset", choices=("monster",))
    p.add_argument("--output", help="write to this file instead of stdout")
    p.add_argument("--weight", help="highest weight pairings for character, e.g. 0=1")
    p.add_argument("--kind", choices=("lie", "bozec", "d", "root"), help="monster quantity")
    p.add_argument("--mn", help="monster grade m,n")
    p.add_argument("--alpha", help="monster root, e.g. -1=2,1=4,2=2")
    p.add_argument("--N", help="number of j coefficients")
    p.add_argument("--dims", help="dimension vector, e.g. 0=2")
    p.add_argument("--module", help="module JSON for schofield-pair")
    p.add_argument("--word", help="word such as S(1,1)S(2,1)")
    p.add_argument("--i", help="vertex i for serre-check")
    p.add_argument("--j", help="vertex j for serre-check")
    p.add_argument("--k", help="k for the commuting relation [S_(i,k), S_(j,l)]")
    p.add_argument("--l", help="l for serre-check (default 1)")
    p.add_argument("--override", help=argparse.SUPPRESS)  # test hook: alpha:value
    return p


def run(argv: Sequence[str] | None = None) -> tuple[int, str]:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_OK if exc.code == 0 else EXIT_SCHEMA), ""
    try:
        fields = tuple(_int(x) for x in ns.fields.split(",") if x.strip())
        if ns.cap is not None and ns.cap <= 0:
            raise SchemaError("--cap must be positive")
        cfg = RunConfig(
            ns.command, ns.input, ns.box, ns.J, fields, ns.cap, ns.format, ns.output, ns.preset,
            {k: getattr(ns, k) for k in ("weight", "kind", "mn", "alpha", "N", "dims", "module", "word", "i", "j", "k", "l", "override")},
        )
        return COMMANDS[ns.command](cfg)
    except SchemaError as exc:
        return EXIT_SCHEMA, f"error: {exc}"
    except (bbzmult.InvariantBreach, FreudenthalError, InterpolationError, ArithmeticError, DatumError) as exc:
        return EXIT_INVARIANT, f"invariant breach: {exc}"
    except (quiver_mod.CapExceeded, ChargeCapError, OverflowError) as exc:
        return EXIT_CAP, f"cap exceeded: {exc}"
    except (ValueError, KeyError, TypeError) as exc:
        return EXIT_SCHEMA, f"error: {exc}"


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    code, text = run(argv)
    known, _ = build_parser().parse_known_args(argv) if code != EXIT_SCHEMA else (None, None)
    if code in (EXIT_SCHEMA, EXIT_CAP) or text.startswith("invariant breach"):
        print(text, file=sys.stderr)
    elif known is not None and known.output:
        with open(known.output, "w") as fh:
            fh.write(text + ("\n" if text else ""))
    elif text:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
