"""The Koszul chain complex of free nilpotent Lie algebras, with homology.

The quotient by all degrees beyond ``degree_cap`` is the free nilpotent
Lie algebra of that class; its ordered basis here is the Lyndon basis in
degrees 1..degree_cap.  Exterior powers carry the boundary

    d_p (h_1 ^ ... ^ h_p)
        = sum_{a<b} (-1)^{a+b} [h_a, h_b] ^ h_1 ^ ... ^h_a^ ... ^h_b^ ... ^ h_p

so in particular d_2(a ^ b) = -[a, b].  The boundary preserves the
internal degree (the sum of member degrees), so all linear algebra runs
per internal-degree block; homology bases and projections are
deterministic (reduced echelon pivots over Lyndon-lexicographic tuple
order) and therefore reproducible across runs.
"""

from __future__ import annotations

import functools
import hashlib
from fractions import Fraction

from . import linalg
from .lie import LieElement, lyndon_words
from .tensor import Q0, Q1

IndexTuple = tuple[int, ...]


class NilpotentBasis:
    """Ordered Lyndon basis of the free nilpotent quotient of a given class."""

    def __init__(self, n: int, degree_cap: int):
        if degree_cap < 1:
            raise ValueError("degree cap must be >= 1")
        self.n = n
        self.degree_cap = degree_cap
        words: list = []
        for d in range(1, degree_cap + 1):
            words.extend(lyndon_words(n, d))
        self.words = tuple(words)
        self.index = {w: k for k, w in enumerate(self.words)}
        self.degrees = tuple(len(w) for w in self.words)
        self._bracket_cache: dict[tuple[int, int], tuple] = {}

    def __len__(self) -> int:
        return len(self.words)

    def __eq__(self, other) -> bool:
        return (isinstance(other, NilpotentBasis) and self.n == other.n
                and self.degree_cap == other.degree_cap)

    def __hash__(self):
        return hash((self.n, self.degree_cap))

    def element(self, k: int) -> LieElement:
        return LieElement(self.n, {self.words[k]: Q1})

    def reduce_lie(self, x: LieElement) -> dict[int, Fraction]:
        """Coordinates of the image of x in the quotient (higher degrees die)."""
        out = {}
        for w, c in x.coords.items():
            if len(w) <= self.degree_cap:
                out[self.index[w]] = c
        return out

    def bracket_entry(self, a: int, b: int) -> tuple:
        """Basis coordinates of [e_a, e_b] in the quotient, as (index, coeff) pairs."""
        key = (a, b)
        cached = self._bracket_cache.get(key)
        if cached is None:
            if self.degrees[a] + self.degrees[b] > self.degree_cap:
                cached = ()
            else:
                br = self.element(a).bracket(self.element(b))
                cached = tuple(sorted(self.reduce_lie(br).items()))
            self._bracket_cache[key] = cached
        return cached


@functools.lru_cache(maxsize=None)
def nilpotent_basis(n: int, degree_cap: int) -> NilpotentBasis:
    return NilpotentBasis(n, degree_cap)


class ExteriorChain:
    """An element of an exterior power of the nilpotent quotient.

    Coordinates are indexed by strictly increasing tuples of basis indices;
    the internal degree of a tuple is the sum of its members' degrees.
    """

    __slots__ = ("basis", "p", "coords")

    def __init__(self, basis: NilpotentBasis, p: int,
                 coords: dict[IndexTuple, Fraction] | None = None):
        if p < 0:
            raise ValueError("exterior power must be >= 0")
        self.basis = basis
        self.p = p
        if coords and not all(coords.values()):
            coords = {t: c for t, c in coords.items() if c}
        self.coords = {} if coords is None else coords

    @classmethod
    def zero(cls, basis: NilpotentBasis, p: int) -> "ExteriorChain":
        return cls(basis, p)

    @classmethod
    def wedge(cls, basis: NilpotentBasis, factors: list[LieElement]) -> "ExteriorChain":
        """The wedge of Lie elements, reduced into the quotient."""
        p = len(factors)
        out: dict[IndexTuple, Fraction] = {}
        reduced = [basis.reduce_lie(x) for x in factors]

        def rec(pos: int, chosen: list[int], coeff: Fraction):
            if pos == p:
                order = sorted(range(p), key=lambda t: chosen[t])
                idx = tuple(chosen[t] for t in order)
                if len(set(idx)) < p:
                    return
                inversions = sum(1 for a in range(p) for b in range(a + 1, p)
                                 if chosen[a] > chosen[b])
                sign = -1 if inversions % 2 else 1
                v = out.get(idx, Q0) + sign * coeff
                if v:
                    out[idx] = v
                else:
                    del out[idx]
                return
            for k, c in reduced[pos].items():
                rec(pos + 1, chosen + [k], coeff * c)

        rec(0, [], Q1)
        return cls(basis, p, out)

    def _check(self, other: "ExteriorChain") -> None:
        if self.basis != other.basis or self.p != other.p:
            raise ValueError("mixed exterior powers")

    def __eq__(self, other) -> bool:
        return (isinstance(other, ExteriorChain) and self.basis == other.basis
                and self.p == other.p and self.coords == other.coords)

    def __add__(self, other: "ExteriorChain") -> "ExteriorChain":
        self._check(other)
        out = dict(self.coords)
        for t, c in other.coords.items():
            v = out.get(t, Q0) + c
            if v:
                out[t] = v
            else:
                out.pop(t, None)
        return ExteriorChain(self.basis, self.p, out)

    def __sub__(self, other: "ExteriorChain") -> "ExteriorChain":
        return self + other.scale(-1)

    def scale(self, s) -> "ExteriorChain":
        s = Fraction(s)
        if not s:
            return ExteriorChain(self.basis, self.p)
        return ExteriorChain(self.basis, self.p,
                             {t: s * c for t, c in self.coords.items()})

    def is_zero(self) -> bool:
        return not self.coords

    def tuple_degree(self, t: IndexTuple) -> int:
        return sum(self.basis.degrees[k] for k in t)

    def internal_degrees(self) -> list[int]:
        return sorted({self.tuple_degree(t) for t in self.coords})

    def degree_component(self, d: int) -> "ExteriorChain":
        return ExteriorChain(self.basis, self.p,
                             {t: c for t, c in self.coords.items()
                              if self.tuple_degree(t) == d})

    def reduce_to(self, basis: NilpotentBasis) -> "ExteriorChain":
        """Image in a smaller quotient: tuples with dropped members die."""
        if basis.n != self.basis.n or basis.degree_cap > self.basis.degree_cap:
            raise ValueError("can only reduce into a smaller quotient")
        out: dict[IndexTuple, Fraction] = {}
        for t, c in self.coords.items():
            words = [self.basis.words[k] for k in t]
            if all(len(w) <= basis.degree_cap for w in words):
                out[tuple(basis.index[w] for w in words)] = c
        return ExteriorChain(basis, self.p, out)

    def __str__(self) -> str:
        if not self.coords:
            return "0"
        parts = []
        for t in sorted(self.coords):
            mono = " ^ ".join(str(self.basis.words[k]) for k in t)
            parts.append(f"{self.coords[t]} * ({mono})")
        return "  +  ".join(parts)

    def __repr__(self) -> str:
        return (f"ExteriorChain(p={self.p}, n={self.basis.n}, "
                f"cap={self.basis.degree_cap}, {len(self.coords)} terms)")


def boundary(chain: ExteriorChain) -> ExteriorChain:
    """The Koszul boundary; preserves internal degree and squares to zero."""
    basis = chain.basis
    p = chain.p
    out: dict[IndexTuple, Fraction] = {}
    for t, coeff in chain.coords.items():
        for a in range(p):
            for b in range(a + 1, p):
                entry = basis.bracket_entry(t[a], t[b])
                if not entry:
                    continue
                rest = [t[x] for x in range(p) if x != a and x != b]
                base_sign = -1 if (a + b) % 2 else 1  # (-1)^{(a+1)+(b+1)}
                for k, cbr in entry:
                    if k in rest:
                        continue
                    inversions = sum(1 for x in rest if x < k)
                    sign = -base_sign if inversions % 2 else base_sign
                    idx = tuple(sorted(rest + [k]))
                    v = out.get(idx, Q0) + sign * coeff * cbr
                    if v:
                        out[idx] = v
                    else:
                        del out[idx]
    return ExteriorChain(basis, p - 1, out)


@functools.lru_cache(maxsize=None)
def exterior_basis(basis: NilpotentBasis, p: int, d: int) -> tuple[IndexTuple, ...]:
    """Strictly increasing index p-tuples of internal degree d, lex ordered."""
    out: list[IndexTuple] = []

    def rec(start: int, left: int, acc: list[int], deg: int):
        if left == 0:
            if deg == d:
                out.append(tuple(acc))
            return
        for k in range(start, len(basis)):
            nd = deg + basis.degrees[k]
            if nd + (left - 1) > d:
                continue
            acc.append(k)
            rec(k + 1, left - 1, acc, nd)
            acc.pop()

    rec(0, p, [], 0)
    return tuple(out)


def _boundary_columns(basis: NilpotentBasis, p: int, d: int) -> tuple[list, list]:
    """Columns of d_p on the degree-d block, plus the codomain tuple list."""
    domain = exterior_basis(basis, p, d)
    codomain = exterior_basis(basis, p - 1, d)
    cod_index = {t: k for k, t in enumerate(codomain)}
    columns = []
    for t in domain:
        image = boundary(ExteriorChain(basis, p, {t: Q1}))
        col = [Q0] * len(codomain)
        for tt, c in image.coords.items():
            col[cod_index[tt]] = c
        columns.append(col)
    return columns, list(codomain)


class NotACycleError(ValueError):
    pass


class HomologyBasis:
    """Deterministic basis data for H_p of one nilpotent quotient.

    Per internal degree d the block holds cycle representatives extending a
    basis of the boundary space; a cycle projects to coordinates over the
    representatives by one exact solve.  Representative order (and hence
    class coordinates) is fixed by the echelon pivot rule.
    """

    def __init__(self, p: int, n: int, degree_cap: int):
        self.p = p
        self.n = n
        self.degree_cap = degree_cap
        self.basis = nilpotent_basis(n, degree_cap)
        self.blocks: dict[int, dict] = {}
        self.rep_index: list[tuple[int, int]] = []  # (degree, index inside block)
        for d in range(p, p * degree_cap + 1):
            block = self._build_block(d)
            if block is not None:
                self.blocks[d] = block
                for k in range(len(block["reps"])):
                    self.rep_index.append((d, k))

    def _build_block(self, d: int):
        domain = exterior_basis(self.basis, self.p, d)
        if not domain:
            return None
        dom_index = {t: k for k, t in enumerate(domain)}
        columns, _ = _boundary_columns(self.basis, self.p, d)
        rows = [[columns[c][r] for c in range(len(domain))]
                for r in range(len(columns[0]))] if columns and columns[0] else []
        kernel = linalg.nullspace(rows) if rows else [
            [Q1 if i == j else Q0 for j in range(len(domain))]
            for i in range(len(domain))]

        image_cols, _ = _boundary_columns(self.basis, self.p + 1, d)
        # keep only image columns that increase the rank, in input order
        span: list[list[Fraction]] = []
        current_rank = 0
        for col in image_cols:
            candidate = span + [col]
            r = linalg.column_rank(candidate)
            if r > current_rank:
                span.append(col)
                current_rank = r
        image_basis = span

        reps = []
        rank_now = linalg.column_rank(image_basis)
        combined = list(image_basis)
        for vec in kernel:
            r = linalg.column_rank(combined + [vec])
            if r > rank_now:
                combined.append(vec)
                reps.append(vec)
                rank_now = r
        return {
            "tuples": domain,
            "tuple_index": dom_index,
            "image_basis": image_basis,
            "reps": reps,
        }

    @property
    def dimension(self) -> int:
        return len(self.rep_index)

    def dimension_in_degree(self, d: int) -> int:
        block = self.blocks.get(d)
        return len(block["reps"]) if block else 0

    def degree_table(self) -> dict[int, dict[str, int]]:
        """Per internal degree: chain, cycle, boundary and homology dimensions."""
        out = {}
        for d, block in sorted(self.blocks.items()):
            total = len(block["tuples"])
            boundaries = len(block["image_basis"])
            hom = len(block["reps"])
            columns, _ = _boundary_columns(self.basis, self.p, d)
            rk = linalg.column_rank(columns)
            out[d] = {"chains": total, "cycles": total - rk,
                      "boundaries": boundaries, "homology": hom}
        return out

    def representative(self, k: int) -> ExteriorChain:
        d, inside = self.rep_index[k]
        block = self.blocks[d]
        vec = block["reps"][inside]
        return ExteriorChain(self.basis, self.p,
                             {t: c for t, c in zip(block["tuples"], vec) if c})

    def project(self, chain: ExteriorChain) -> "HomologyClass":
        """Class of a cycle; raises NotACycleError otherwise."""
        if chain.basis != self.basis or chain.p != self.p:
            raise ValueError("chain lives in the wrong complex")
        if not boundary(chain).is_zero():
            raise NotACycleError("chain is not a cycle")
        coords = [Q0] * self.dimension
        offset = 0
        for d in sorted(self.blocks):
            block = self.blocks[d]
            nreps = len(block["reps"])
            component = chain.degree_component(d)
            if not component.is_zero():
                target = [Q0] * len(block["tuples"])
                for t, c in component.coords.items():
                    target[block["tuple_index"][t]] = c
                columns = block["image_basis"] + block["reps"]
                sol = linalg.solve_in_span(columns, target)
                if sol is None:
                    raise RuntimeError("cycle failed to project; homology basis "
                                       "is corrupt")
                for k in range(nreps):
                    coords[offset + k] = sol[len(block["image_basis"]) + k]
            offset += nreps
        return HomologyClass(self, tuple(coords))

    def zero_class(self) -> "HomologyClass":
        return HomologyClass(self, tuple([Q0] * self.dimension))

    def fingerprint(self) -> str:
        """Stable hash of the representative matrix, for cross-run comparison."""
        payload = repr((self.p, self.n, self.degree_cap,
                        [(d, [[str(c) for c in rep] for rep in blk["reps"]])
                         for d, blk in sorted(self.blocks.items())]))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


@functools.lru_cache(maxsize=None)
def homology(p: int, n: int, degree_cap: int) -> HomologyBasis:
    """Homology data of the Koszul complex of the class-``degree_cap`` quotient."""
    return HomologyBasis(p, n, degree_cap)


class HomologyClass:
    """Coordinates of a homology class over a fixed HomologyBasis."""

    __slots__ = ("homology", "coords")

    def __init__(self, homology_basis: HomologyBasis, coords: tuple[Fraction, ...]):
        if len(coords) != homology_basis.dimension:
            raise ValueError("coordinate length mismatch")
        self.homology = homology_basis
        self.coords = coords

    def _check(self, other: "HomologyClass") -> None:
        if self.homology is not other.homology:
            raise ValueError("classes over different homology bases")

    def __eq__(self, other) -> bool:
        return (isinstance(other, HomologyClass)
                and self.homology is other.homology
                and self.coords == other.coords)

    def __add__(self, other: "HomologyClass") -> "HomologyClass":
        self._check(other)
        return HomologyClass(self.homology,
                             tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "HomologyClass") -> "HomologyClass":
        self._check(other)
        return HomologyClass(self.homology,
                             tuple(a - b for a, b in zip(self.coords, other.coords)))

    def scale(self, s) -> "HomologyClass":
        s = Fraction(s)
        return HomologyClass(self.homology, tuple(s * c for c in self.coords))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def degree_component(self, d: int) -> "HomologyClass":
        """Component in one internal degree of the graded decomposition."""
        coords = list(self.coords)
        for k, (deg, _) in enumerate(self.homology.rep_index):
            if deg != d:
                coords[k] = Q0
        return HomologyClass(self.homology, tuple(coords))

    def nonzero_degrees(self) -> list[int]:
        return sorted({self.homology.rep_index[k][0]
                       for k, c in enumerate(self.coords) if c})

    def to_json_dict(self) -> dict:
        return {
            "homology": {"p": self.homology.p, "n": self.homology.n,
                         "degreeCap": self.homology.degree_cap,
                         "fingerprint": self.homology.fingerprint()},
            "coordinates": [{"degree": self.homology.rep_index[k][0],
                             "value": str(c)} for k, c in enumerate(self.coords)],
        }

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        return ", ".join(f"e{k}[deg {self.homology.rep_index[k][0]}]: {c}"
                         for k, c in enumerate(self.coords) if c)


def phi_class(comb, k: int) -> HomologyClass:
    """Class in H_3 of the class-(k-1) quotient defined by fission.

    The tree combination must have degrees within [k, 2k-2]; fission shifts
    internal degree by +1 and the reduced chain is a cycle.
    """
    from .trees import fission_combination  # deferred: trees imports this module

    for d in comb.degrees():
        if not k <= d <= 2 * k - 2:
            raise ValueError(f"tree degree {d} outside [k, 2k-2] = [{k}, {2 * k - 2}]")
    basis = nilpotent_basis(comb.n, k - 1)
    chain = fission_combination(comb, basis)
    return homology(3, comb.n, k - 1).project(chain)
