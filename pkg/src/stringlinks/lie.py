"""The graded free Lie algebra on X_1..X_n in Lyndon coordinates.

Basis convention: for each degree d the Lyndon words of length d over the
alphabet {1..n}, ordered lexicographically, with the left-standard
bracketing beta(w) = [beta(u), beta(v)] where w = uv is the standard
factorisation (v the lexicographically smallest proper suffix).

The tensor expansion of beta(w) is triangular: it equals w plus a
combination of lexicographically larger words of the same length, with
coefficient 1 on w itself.  ``LieElement.from_tensor`` exploits this to
convert any primitive series back to Lyndon coordinates by repeatedly
stripping the smallest remaining word; a non-Lyndon minimal word proves
the input was not a Lie element.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .tensor import Q0, Q1, TensorSeries, Wd


# -- Lyndon words ------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def lyndon_words(n: int, d: int) -> tuple[Wd, ...]:
    """All Lyndon words of length d over {1..n}, lexicographically ordered."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    out = []
    w = [0]
    while w:
        w[-1] += 1
        m = len(w)
        if m == d:
            out.append(tuple(w))
        while len(w) < d:
            w.append(w[-m])
        while w and w[-1] == n:
            w.pop()
    return tuple(sorted(out))


def is_lyndon(w: Wd) -> bool:
    return len(w) > 0 and all(w < w[k:] + w[:k] for k in range(1, len(w)))


def moebius(m: int) -> int:
    r, d = 1, 2
    while d * d <= m:
        if m % d == 0:
            m //= d
            if m % d == 0:
                return 0
            r = -r
        d += 1
    return -r if m > 1 else r


def witt_dim(n: int, d: int) -> int:
    """Dimension of the degree-d part of the free Lie algebra on n generators."""
    total = sum(moebius(d // e) * n**e for e in range(1, d + 1) if d % e == 0)
    return total // d


def standard_factorization(w: Wd) -> tuple[Wd, Wd]:
    """w = u v with v the lexicographically smallest proper suffix."""
    if len(w) < 2:
        raise ValueError("letters do not factor")
    k = min(range(1, len(w)), key=lambda i: w[i:])
    return w[:k], w[k:]


def bracketing(w: Wd):
    """Nested-tuple form of the standard bracketing of a Lyndon word."""
    if len(w) == 1:
        return w[0]
    u, v = standard_factorization(w)
    return (bracketing(u), bracketing(v))


def bracketing_str(w: Wd) -> str:
    def fmt(t):
        if isinstance(t, int):
            return f"X{t}"
        return f"[{fmt(t[0])},{fmt(t[1])}]"
    return fmt(bracketing(w))


# -- homogeneous tensor expansions of basis elements -------------------------

@functools.lru_cache(maxsize=None)
def _lyndon_tensor(w: Wd) -> dict[Wd, int]:
    """Tensor coefficients of the standard bracketing of a Lyndon word.

    These are always integers, and all the basis-level machinery here
    stays in exact integer arithmetic; rationals only enter through
    element coordinates.
    """
    if len(w) == 1:
        return {w: 1}
    u, v = standard_factorization(w)
    a, b = _lyndon_tensor(u), _lyndon_tensor(v)
    out: dict[Wd, int] = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            for word, sign in ((wa + wb, 1), (wb + wa, -1)):
                val = out.get(word, 0) + sign * ca * cb
                if val:
                    out[word] = val
                else:
                    del out[word]
    return out


@functools.lru_cache(maxsize=None)
def _basis_bracket(wa: Wd, wb: Wd) -> tuple[tuple[Wd, int], ...]:
    """Lyndon coordinates of [beta(wa), beta(wb)]; integer by triangularity."""
    if wa == wb:
        return ()
    out: dict[Wd, int] = {}
    a, b = _lyndon_tensor(wa), _lyndon_tensor(wb)
    for ua, ca in a.items():
        for ub, cb in b.items():
            for word, sign in ((ua + ub, 1), (ub + ua, -1)):
                val = out.get(word, 0) + sign * ca * cb
                if val:
                    out[word] = val
                else:
                    del out[word]
    return tuple(_extract_lyndon(out).items())


def _extract_lyndon(tensor: dict) -> dict:
    """Triangular extraction of Lyndon coordinates from a Lie tensor.

    Works over any exact coefficient domain (int or Fraction): the
    triangular system is unipotent, so no division ever happens.
    """
    residue = dict(tensor)
    coords: dict = {}
    while residue:
        w = min(residue, key=lambda t: (len(t), t))
        if not is_lyndon(w):
            raise ValueError(f"series is not a Lie element (stray word {w})")
        c = residue[w]
        coords[w] = c
        for word, cw in _lyndon_tensor(w).items():
            val = residue.get(word, 0) - c * cw
            if val:
                residue[word] = val
            else:
                residue.pop(word, None)
    return coords


# -- Lie elements -------------------------------------------------------------

class LieElement:
    """A finitely supported element of the graded free Lie algebra."""

    __slots__ = ("n", "coords")

    def __init__(self, n: int, coords: dict[Wd, Fraction] | None = None):
        self.n = n
        if coords and not all(coords.values()):
            coords = {w: c for w, c in coords.items() if c}
        self.coords = {} if coords is None else coords

    @classmethod
    def zero(cls, n: int) -> "LieElement":
        return cls(n)

    @classmethod
    def generator(cls, n: int, i: int) -> "LieElement":
        if not 1 <= i <= n:
            raise ValueError(f"generator index {i} out of range 1..{n}")
        return cls(n, {(i,): Q1})

    @classmethod
    def from_coords(cls, n: int, terms) -> "LieElement":
        out: dict[Wd, Fraction] = {}
        for w, c in terms:
            w = tuple(w)
            if not is_lyndon(w) or any(not 1 <= g <= n for g in w):
                raise ValueError(f"{w} is not a Lyndon word over 1..{n}")
            v = out.get(w, Q0) + Fraction(c)
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        return cls(n, out)

    @classmethod
    def from_tensor(cls, series: TensorSeries) -> "LieElement":
        """Lyndon coordinates of a primitive series (exact round trip)."""
        if series.constant_term() != 0:
            raise ValueError("not primitive: nonzero constant term")
        return cls(series.n, _extract_lyndon(series.coeffs))

    def _check(self, other: "LieElement") -> None:
        if self.n != other.n:
            raise ValueError("mixed free Lie algebras")

    def __eq__(self, other) -> bool:
        return (isinstance(other, LieElement) and self.n == other.n
                and self.coords == other.coords)

    def __hash__(self):
        return hash((self.n, frozenset(self.coords.items())))

    def is_zero(self) -> bool:
        return not self.coords

    def coefficient(self, w) -> Fraction:
        return self.coords.get(tuple(w), Q0)

    def min_degree(self) -> int | None:
        return min((len(w) for w in self.coords), default=None)

    def max_degree(self) -> int | None:
        return max((len(w) for w in self.coords), default=None)

    def degree_component(self, d: int) -> "LieElement":
        return LieElement(self.n, {w: c for w, c in self.coords.items() if len(w) == d})

    def truncated(self, max_degree: int) -> "LieElement":
        return LieElement(self.n,
                          {w: c for w, c in self.coords.items() if len(w) <= max_degree})

    def degrees(self) -> list[int]:
        return sorted({len(w) for w in self.coords})

    def __add__(self, other: "LieElement") -> "LieElement":
        self._check(other)
        out = dict(self.coords)
        for w, c in other.coords.items():
            v = out.get(w, Q0) + c
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        return LieElement(self.n, out)

    def __sub__(self, other: "LieElement") -> "LieElement":
        return self + other.scale(-1)

    def __neg__(self) -> "LieElement":
        return self.scale(-1)

    def scale(self, s) -> "LieElement":
        s = Fraction(s)
        if not s:
            return LieElement(self.n)
        return LieElement(self.n, {w: s * c for w, c in self.coords.items()})

    def bracket(self, other: "LieElement") -> "LieElement":
        self._check(other)
        out: dict[Wd, Fraction] = {}
        for wa, ca in self.coords.items():
            for wb, cb in other.coords.items():
                c = ca * cb
                for w, cw in _basis_bracket(wa, wb):
                    v = out.get(w, Q0) + c * cw
                    if v:
                        out[w] = v
                    else:
                        del out[w]
        return LieElement(self.n, out)

    def to_tensor(self, trunc: int) -> TensorSeries:
        out: dict[Wd, Fraction] = {}
        for w, c in self.coords.items():
            if len(w) > trunc:
                continue
            for word, cw in _lyndon_tensor(w).items():
                v = out.get(word, Q0) + c * cw
                if v:
                    out[word] = v
                else:
                    del out[word]
        return TensorSeries(self.n, trunc, out)

    def sorted_terms(self) -> list[tuple[Wd, Fraction]]:
        return sorted(self.coords.items(), key=lambda t: (len(t[0]), t[0]))

    def __str__(self) -> str:
        if not self.coords:
            return "0"
        return "\n".join(f"{c} * {bracketing_str(w)}" for w, c in self.sorted_terms())

    def __repr__(self) -> str:
        return f"LieElement(n={self.n}, {len(self.coords)} terms)"


# -- H (x) L: carriers of invariant values ------------------------------------

@dataclass(frozen=True)
class HTensorLie:
    """An element sum_i X_i (x) Y_i of H tensor the free Lie algebra."""

    n: int
    entries: tuple[LieElement, ...]

    def __post_init__(self):
        if len(self.entries) != self.n:
            raise ValueError("need one Lie partner per generator")
        for y in self.entries:
            if y.n != self.n:
                raise ValueError("entry rank mismatch")

    @classmethod
    def zero(cls, n: int) -> "HTensorLie":
        return cls(n, tuple(LieElement.zero(n) for _ in range(n)))

    def __add__(self, other: "HTensorLie") -> "HTensorLie":
        if self.n != other.n:
            raise ValueError("rank mismatch")
        return HTensorLie(self.n, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "HTensorLie") -> "HTensorLie":
        if self.n != other.n:
            raise ValueError("rank mismatch")
        return HTensorLie(self.n, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def scale(self, s) -> "HTensorLie":
        return HTensorLie(self.n, tuple(y.scale(s) for y in self.entries))

    def is_zero(self) -> bool:
        return all(y.is_zero() for y in self.entries)

    def degree_component(self, d: int) -> "HTensorLie":
        return HTensorLie(self.n, tuple(y.degree_component(d) for y in self.entries))

    def degree_range(self, lo: int, hi: int) -> "HTensorLie":
        """Entries restricted to degrees lo..hi inclusive."""
        return HTensorLie(self.n, tuple(
            LieElement(self.n, {w: c for w, c in y.coords.items() if lo <= len(w) <= hi})
            for y in self.entries))

    def degrees(self) -> list[int]:
        return sorted({d for y in self.entries for d in y.degrees()})

    def is_pure_degree(self) -> bool:
        return len(self.degrees()) <= 1

    def bracket_map(self) -> LieElement:
        """sum_i [X_i, Y_i], the value of the bracket contraction."""
        out = LieElement.zero(self.n)
        for i, y in enumerate(self.entries, start=1):
            out = out + LieElement.generator(self.n, i).bracket(y)
        return out

    def in_bracket_kernel(self) -> bool:
        return self.bracket_map().is_zero()

    def coordinates(self, d: int) -> list[Fraction]:
        """Coordinates of the degree-d part in the (i, Lyndon word) basis."""
        basis = lyndon_words(self.n, d)
        vec = []
        for i in range(1, self.n + 1):
            y = self.entries[i - 1]
            vec.extend(y.coords.get(w, Q0) for w in basis)
        return vec

    def to_json_entries(self) -> list[dict]:
        out = []
        for i, y in enumerate(self.entries, start=1):
            for w, c in y.sorted_terms():
                out.append({"i": i, "lyndonWord": list(w),
                            "bracketing": bracketing_str(w),
                            "coefficient": str(c)})
        return out

    def __str__(self) -> str:
        lines = []
        for i, y in enumerate(self.entries, start=1):
            for w, c in y.sorted_terms():
                lines.append(f"X{i} (x) {c} * {bracketing_str(w)}")
        return "\n".join(lines) if lines else "0"


def bracket_map_matrix(n: int, d: int) -> list[list[Fraction]]:
    """Matrix of H (x) L_d -> L_{d+1}, columns indexed by (i, Lyndon word)."""
    domain = [(i, w) for i in range(1, n + 1) for w in lyndon_words(n, d)]
    codomain = lyndon_words(n, d + 1)
    cod_index = {w: k for k, w in enumerate(codomain)}
    rows = [[Q0] * len(domain) for _ in codomain]
    for col, (i, w) in enumerate(domain):
        image = LieElement.generator(n, i).bracket(LieElement(n, {w: Q1}))
        for ww, c in image.coords.items():
            rows[cod_index[ww]][col] = c
    return rows


def d_dimension(n: int, d: int) -> int:
    """dim of the kernel of the bracket map on H (x) L_d, computed by rank."""
    m = bracket_map_matrix(n, d)
    return n * witt_dim(n, d) - linalg.rank(m)


@functools.lru_cache(maxsize=None)
def _ad_generator_system(n: int, d: int, i: int) -> "linalg.PresolvedSystem":
    """Presolved system for [u, X_i] = r with u of degree d."""
    domain = lyndon_words(n, d)
    codomain = lyndon_words(n, d + 1)
    cod_index = {w: k for k, w in enumerate(codomain)}
    rows = [[Q0] * len(domain) for _ in codomain]
    for col, w in enumerate(domain):
        img = LieElement(n, {w: Q1}).bracket(LieElement.generator(n, i))
        for ww, c in img.coords.items():
            rows[cod_index[ww]][col] = c
    return linalg.PresolvedSystem(rows, ncols=len(domain))


def conjugating_element(target: LieElement, i: int, max_degree: int) -> LieElement:
    """The normalised Y with exp(ad Y)(X_i) = target through degree max_degree + 1.

    Y is supported in degrees 1..max_degree.  Solved degree by degree: the
    degree d+1 component of the equation is an inhomogeneous linear system
    for the degree-d part of Y, whose kernel is spanned by X_i in degree 1
    (killed by the normalisation: the X_i coordinate of Y is 0) and trivial
    in higher degrees.  Raises ValueError when some degree is inconsistent,
    i.e. the target is not a conjugate of X_i.
    """
    n = target.n
    if target.degree_component(1) != LieElement.generator(n, i):
        raise ValueError(f"target is not conjugate to X{i}: degree-1 part differs")
    y = LieElement.zero(n)
    for d in range(1, max_degree + 1):
        current = _exp_ad(y, i, d + 1)
        residue = (target - current).degree_component(d + 1)
        codomain = lyndon_words(n, d + 1)
        cod_index = {w: k for k, w in enumerate(codomain)}
        rhs = [Q0] * len(codomain)
        for w, c in residue.coords.items():
            rhs[cod_index[w]] = c
        sol = _ad_generator_system(n, d, i).solve(rhs)
        if sol is None:
            raise ValueError(f"target is not conjugate to X{i}: "
                             f"obstruction in degree {d + 1}")
        domain = lyndon_words(n, d)
        update = {domain[k]: sol[k] for k in range(len(domain)) if sol[k]}
        if d == 1:
            update.pop((i,), None)  # normalisation: no X_i component
        y = y + LieElement(n, update)
    return y


def _exp_ad(y: LieElement, i: int, trunc: int) -> LieElement:
    """exp(ad y)(X_i) through degree trunc."""
    n = y.n
    out = LieElement.generator(n, i)
    term = out
    fact = 1
    for m in range(1, trunc):
        term = y.bracket(term).truncated(trunc)
        if term.is_zero():
            break
        fact *= m
        out = out + term.scale(Fraction(1, fact))
    return out
