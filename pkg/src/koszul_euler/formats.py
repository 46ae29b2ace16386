"""Instance files: one JSON document per instance, integers only.

Exponent vectors are little-endian by variable index and matrices are
row-major lists of rows with entries in ``[0, p^k)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .coeff import CoeffRing
from .graded import GradedIdeal, GradedPresentation, KoszulSequenceEntry, as_sequence, poly
from .koszul import ActionSystem
from .lab import p_monomial_system

SCHEMA_VERSION = 1
BACKENDS = ("finite-length", "graded")
FINITE_TYPES = ("elementary", "p-monomial-quotient")
GRADED_TYPES = ("graded", "ideal-quotient")
MAX_DEGREE = 64


class InstanceError(ValueError):
    """Invalid instance; ``where`` names the offending field or line."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


def _int(value, where: str, lo: int | None = None, hi: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceError(f"expected an integer, got {value!r}", where)
    if lo is not None and value < lo:
        raise InstanceError(f"{value} is below the minimum {lo}", where)
    if hi is not None and value > hi:
        raise InstanceError(f"{value} exceeds the maximum {hi}", where)
    return value


def _list(value, where: str) -> list:
    if not isinstance(value, list):
        raise InstanceError(f"expected a list, got {type(value).__name__}", where)
    return value


def _get(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise InstanceError("expected an object", where)
    if key not in obj:
        raise InstanceError(f"missing field {key!r}", where)
    return obj[key]


def _polynomial(value, nvars: int, q: int, where: str) -> list[dict]:
    terms = []
    for t, term in enumerate(_list(value, where)):
        w = f"{where}[{t}]"
        coeff = _int(_get(term, "coeff", w), f"{w}.coeff", 0, q - 1)
        exps = _list(_get(term, "exponents", w), f"{w}.exponents")
        if len(exps) != nvars:
            raise InstanceError(f"needs {nvars} exponents, got {len(exps)}", f"{w}.exponents")
        exps = [_int(e, f"{w}.exponents[{i}]", 0, MAX_DEGREE) for i, e in enumerate(exps)]
        terms.append({"coeff": coeff, "exponents": exps})
    return terms


def _poly_dict(ring: CoeffRing, terms: list[dict]) -> dict:
    return poly(ring, [(t["coeff"], t["exponents"]) for t in terms])


@dataclass
class Instance:
    p: int
    k: int
    n: int
    backend: str
    module: dict
    sequence: list = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION

    @property
    def ring(self) -> CoeffRing:
        return CoeffRing(self.p, self.k)

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "p": self.p,
            "k": self.k,
            "n": self.n,
            "backend": self.backend,
            "module": self.module,
            "sequence": self.sequence,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data) -> Instance:
        if not isinstance(data, dict):
            raise InstanceError("top level must be an object")
        version = _int(_get(data, "schema_version", ""), "schema_version")
        if version != SCHEMA_VERSION:
            raise InstanceError(f"unsupported schema version {version}", "schema_version")
        p = _int(_get(data, "p", ""), "p", 2)
        k = _int(_get(data, "k", ""), "k", 1)
        try:
            ring = CoeffRing(p, k)
        except ValueError as exc:
            raise InstanceError(str(exc), "p") from None
        q = ring.q
        n = _int(_get(data, "n", ""), "n", 1, 16)
        backend = _get(data, "backend", "")
        if backend not in BACKENDS:
            raise InstanceError(f"backend must be one of {BACKENDS}", "backend")
        module = _get(data, "module", "")
        mtype = _get(module, "type", "module")
        seq = data.get("sequence")
        if backend == "finite-length":
            if mtype == "elementary":
                exps = [_int(e, f"module.exponents[{i}]", 1, k) for i, e in enumerate(_list(_get(module, "exponents", "module"), "module.exponents"))]
                s = len(exps)
                acts = _list(_get(module, "actions", "module"), "module.actions")
                actions = []
                for a, mat in enumerate(acts):
                    w = f"module.actions[{a}]"
                    rows = _list(mat, w)
                    if len(rows) != s:
                        raise InstanceError(f"needs {s} rows, got {len(rows)}", w)
                    clean = []
                    for r, row in enumerate(rows):
                        row = _list(row, f"{w}[{r}]")
                        if len(row) != s:
                            raise InstanceError(f"needs {s} entries, got {len(row)}", f"{w}[{r}]")
                        clean.append([_int(x, f"{w}[{r}][{c}]", 0, q - 1) for c, x in enumerate(row)])
                    actions.append(clean)
                module = {"type": mtype, "exponents": exps, "actions": actions}
                available = len(actions)
            elif mtype == "p-monomial-quotient":
                nvars = _int(_get(module, "nvars", "module"), "module.nvars", 1, 16)
                gens = []
                for g, gen in enumerate(_list(_get(module, "generators", "module"), "module.generators")):
                    w = f"module.generators[{g}]"
                    mono = _list(_get(gen, "monomial", w), f"{w}.monomial")
                    if len(mono) != nvars:
                        raise InstanceError(f"needs {nvars} exponents", f"{w}.monomial")
                    gens.append({
                        "pexp": _int(_get(gen, "pexp", w), f"{w}.pexp", 0, k),
                        "monomial": [_int(e, f"{w}.monomial[{i}]", 0, MAX_DEGREE) for i, e in enumerate(mono)],
                    })
                module = {"type": mtype, "nvars": nvars, "generators": gens}
                available = nvars
            else:
                raise InstanceError(f"type must be one of {FINITE_TYPES}", "module.type")
            if seq is None:
                seq = list(range(n))
            seq = [_int(x, f"sequence[{i}]", 0, available - 1) for i, x in enumerate(_list(seq, "sequence"))]
        else:
            nvars = _int(_get(module, "nvars", "module"), "module.nvars", 1, 16)
            if mtype == "graded":
                rows = [_int(d, f"module.row_degrees[{i}]", -MAX_DEGREE, MAX_DEGREE) for i, d in enumerate(_list(_get(module, "row_degrees", "module"), "module.row_degrees"))]
                cols = [_int(d, f"module.col_degrees[{i}]", -MAX_DEGREE, MAX_DEGREE) for i, d in enumerate(_list(module.get("col_degrees", []), "module.col_degrees"))]
                entries = []
                for e, ent in enumerate(_list(module.get("entries", []), "module.entries")):
                    w = f"module.entries[{e}]"
                    entries.append({
                        "row": _int(_get(ent, "row", w), f"{w}.row", 0, len(rows) - 1),
                        "col": _int(_get(ent, "col", w), f"{w}.col", 0, len(cols) - 1),
                        "terms": _polynomial(_get(ent, "terms", w), nvars, q, f"{w}.terms"),
                    })
                module = {"type": mtype, "nvars": nvars, "row_degrees": rows, "col_degrees": cols, "entries": entries}
            elif mtype == "ideal-quotient":
                gens = [_polynomial(g, nvars, q, f"module.generators[{i}]") for i, g in enumerate(_list(_get(module, "generators", "module"), "module.generators"))]
                module = {"type": mtype, "nvars": nvars, "generators": gens}
            else:
                raise InstanceError(f"type must be one of {GRADED_TYPES}", "module.type")
            if seq is None:
                raise InstanceError("graded instances need an explicit sequence", "sequence")
            seq = [_polynomial(f, nvars, q, f"sequence[{i}]") for i, f in enumerate(_list(seq, "sequence"))]
        if len(seq) != n:
            raise InstanceError(f"n = {n} but the sequence has {len(seq)} entries", "sequence")
        inst = cls(p, k, n, backend, module, seq, version)
        inst.validate()
        return inst

    def validate(self):
        """Build the mathematical objects once so that structural errors surface at parse time."""
        try:
            if self.backend == "finite-length":
                self.action_system()
            else:
                M = self.graded_module()
                as_sequence(self.ring, self.graded_sequence(), M.nvars)
        except InstanceError:
            raise
        except (ValueError, ArithmeticError) as exc:
            raise InstanceError(str(exc), "module") from None

    # --- builders -------------------------------------------------------------

    def action_system(self) -> ActionSystem:
        if self.backend != "finite-length":
            raise InstanceError("not a finite-length instance", "backend")
        ring = self.ring
        if self.module["type"] == "elementary":
            base = ActionSystem.from_matrices(ring, self.module["exponents"], self.module["actions"])
            actions = tuple(base.actions[i] for i in self.sequence)
        else:
            gens = [(g["pexp"], tuple(g["monomial"])) for g in self.module["generators"]]
            base = p_monomial_system(ring, self.module["nvars"], gens)
            actions = tuple(base.actions[i] for i in self.sequence)
        return ActionSystem(base.module, actions, {"source": "instance", **(base.origin or {})})

    def graded_module(self):
        ring = self.ring
        m = self.module
        if m["type"] == "graded":
            entries = [[{} for _ in m["col_degrees"]] for _ in m["row_degrees"]]
            for ent in m["entries"]:
                f = _poly_dict(ring, ent["terms"])
                cur = entries[ent["row"]][ent["col"]]
                for e, c in f.items():
                    cur[e] = (cur.get(e, 0) + c) % ring.q
            return GradedPresentation(ring, m["nvars"], m["row_degrees"], m["col_degrees"], entries)
        if m["type"] == "ideal-quotient":
            return self.ideal().quotient()
        raise InstanceError("not a graded instance", "module.type")

    def ideal(self) -> GradedIdeal:
        if self.module.get("type") != "ideal-quotient":
            raise InstanceError("instance does not specify an ideal J", "module.type")
        ring = self.ring
        return GradedIdeal(ring, self.module["nvars"], [_poly_dict(ring, g) for g in self.module["generators"]])

    def graded_sequence(self) -> list[dict]:
        return [_poly_dict(self.ring, f) for f in self.sequence]

    def koszul_sequence(self) -> tuple[KoszulSequenceEntry, ...]:
        return as_sequence(self.ring, self.graded_sequence(), self.module["nvars"])


def loads(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return Instance.from_dict(data)


def load(path) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InstanceError(str(exc), str(path)) from None
    return loads(text)


def instance_from_system(sys: ActionSystem) -> Instance:
    """Serialize an elementary action system."""
    return Instance(
        sys.ring.p,
        sys.ring.k,
        sys.n,
        "finite-length",
        {"type": "elementary", "exponents": list(sys.module.exponents), "actions": sys.matrices()},
        list(range(sys.n)),
    )


def polynomial_terms(f: dict) -> list[dict]:
    return [{"coeff": c, "exponents": list(e)} for e, c in sorted(f.items(), reverse=True)]
