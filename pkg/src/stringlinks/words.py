"""Free group words, pure braid words, the Artin action and longitudes.

Conventions, fixed once and used consistently everywhere:

* ``F_n`` has generators ``x_1, ..., x_n`` (n >= 2).  Words are stored
  freely reduced as tuples of ``(generator, exponent)`` with exponent
  ``+1`` or ``-1``.

* The pure braid group on n strands is generated by the band generators
  ``A_ij`` (1 <= i < j <= n).  The positive generator acts on the free
  generators by

      x_i  |->  (x_i x_j) x_i (x_i x_j)^-1
      x_j  |->  x_i x_j x_i^-1
      x_k  |->  [x_i, x_j] x_k [x_i, x_j]^-1      (i < k < j)
      x_k  |->  x_k                               (otherwise)

  where ``[a, b] = a b a^-1 b^-1``.  This action fixes the boundary word
  ``x_1 ... x_n`` and satisfies the standard conjugation relation table;
  the test suite asserts both.  The opposite handedness would flip the
  sign of odd-degree invariants downstream.

* Braid words compose by concatenation and ``artin_action`` is a
  homomorphism for that order: ``Art(b1 * b2) = Art(b1) o Art(b2)``.
  Concretely the rightmost letter of a braid word is substituted first.

* Longitudes: ``Art(L)(x_i) = y_i x_i y_i^-1`` with ``y_i`` normalised so
  that its exponent sum in ``x_i`` is zero, which pins ``y_i`` uniquely.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

Letter = tuple[int, int]          # (generator index, +-1)
BraidLetter = tuple[int, int, int]  # (i, j, +-1) with i < j


def _reduce(letters) -> tuple[Letter, ...]:
    out: list[Letter] = []
    for g, e in letters:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A freely reduced word in the free group on ``x_1 .. x_n``."""

    n: int
    letters: tuple[Letter, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("free group rank must be at least 2")
        for g, e in self.letters:
            if not 1 <= g <= self.n:
                raise ValueError(f"generator index {g} out of range 1..{self.n}")
            if e not in (1, -1):
                raise ValueError(f"letter exponent must be +-1, got {e}")
        if self.letters != _reduce(self.letters):
            raise ValueError("word is not freely reduced; use Word.of")

    @classmethod
    def of(cls, n: int, letters) -> "Word":
        """Build a word from any letter sequence, reducing it freely."""
        return cls(n, _reduce(letters))

    @classmethod
    def identity(cls, n: int) -> "Word":
        return cls(n, ())

    @classmethod
    def gen(cls, n: int, i: int, exponent: int = 1) -> "Word":
        if exponent == 0:
            return cls.identity(n)
        e = 1 if exponent > 0 else -1
        return cls(n, tuple((i, e) for _ in range(abs(exponent))))

    def __mul__(self, other: "Word") -> "Word":
        if self.n != other.n:
            raise ValueError("rank mismatch")
        return Word(self.n, _reduce(self.letters + other.letters))

    def inverse(self) -> "Word":
        return Word(self.n, tuple((g, -e) for g, e in reversed(self.letters)))

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        out = Word.identity(self.n)
        for _ in range(abs(k)):
            out = out * base
        return out

    def exponent_sum(self, i: int) -> int:
        return sum(e for g, e in self.letters if g == i)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        parts = []
        for (g, e), run in itertools.groupby(self.letters):
            k = e * sum(1 for _ in run)
            parts.append(f"x{g}" if k == 1 else f"x{g}^{k}")
        return "*".join(parts)


def commutator(a: Word, b: Word) -> Word:
    return a * b * a.inverse() * b.inverse()


@dataclass(frozen=True)
class Braid:
    """A word in the band generators ``A_ij`` of the pure braid group."""

    n: int
    letters: tuple[BraidLetter, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("braid group needs at least 2 strands")
        for i, j, e in self.letters:
            if not 1 <= i < j <= self.n:
                raise ValueError(f"bad band generator indices ({i},{j}) for n={self.n}")
            if e not in (1, -1):
                raise ValueError(f"braid letter exponent must be +-1, got {e}")

    @classmethod
    def identity(cls, n: int) -> "Braid":
        return cls(n, ())

    @classmethod
    def gen(cls, n: int, i: int, j: int, exponent: int = 1) -> "Braid":
        if exponent == 0:
            return cls.identity(n)
        e = 1 if exponent > 0 else -1
        return cls(n, tuple((i, j, e) for _ in range(abs(exponent))))

    def __mul__(self, other: "Braid") -> "Braid":
        if self.n != other.n:
            raise ValueError("strand count mismatch")
        return Braid(self.n, self.letters + other.letters)

    def inverse(self) -> "Braid":
        return Braid(self.n, tuple((i, j, -e) for i, j, e in reversed(self.letters)))

    def __pow__(self, k: int) -> "Braid":
        base = self if k >= 0 else self.inverse()
        out = Braid.identity(self.n)
        for _ in range(abs(k)):
            out = out * base
        return out

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(f"A({i},{j})" if e == 1 else f"A({i},{j})^-1"
                        for i, j, e in self.letters)


def braid_commutator(a: Braid, b: Braid) -> Braid:
    return a * b * a.inverse() * b.inverse()


def _generator_images(n: int, i: int, j: int, e: int) -> dict[int, Word]:
    """Images of x_1..x_n under Art(A_ij^e); identity entries are omitted."""
    xi, xj = Word.gen(n, i), Word.gen(n, j)
    img: dict[int, Word] = {}
    if e == 1:
        img[i] = xi * xj * xi * xj.inverse() * xi.inverse()
        img[j] = xi * xj * xi.inverse()
        conj = commutator(xi, xj)
    else:
        img[i] = xj.inverse() * xi * xj
        img[j] = xj.inverse() * xi.inverse() * xj * xi * xj
        conj = commutator(xj.inverse(), xi.inverse())
    for k in range(i + 1, j):
        img[k] = conj * Word.gen(n, k) * conj.inverse()
    return img


def artin_action(braid: Braid, word: Word) -> Word:
    """Image of ``word`` under the Artin automorphism of ``braid``."""
    if braid.n != word.n:
        raise ValueError("strand count and free group rank differ")
    current = word
    for i, j, e in reversed(braid.letters):
        img = _generator_images(braid.n, i, j, e)
        pieces = []
        for g, ex in current.letters:
            piece = img.get(g)
            if piece is None:
                pieces.append(((g, ex),))
            else:
                pieces.append(piece.letters if ex == 1 else piece.inverse().letters)
        current = Word.of(braid.n, itertools.chain.from_iterable(pieces))
    return current


@dataclass(frozen=True)
class LongitudeTuple:
    """The longitude words ``(y_1, ..., y_n)`` determining an Artin-type action.

    ``truncation`` is None for braid-derived tuples (the boundary condition
    then holds exactly) and an integer K for user-supplied string-link
    data, in which case consumers may only trust the action modulo the
    lower central series term of index K+1.
    """

    n: int
    words: tuple[Word, ...]
    truncation: int | None = None

    def __post_init__(self):
        if len(self.words) != self.n:
            raise ValueError("need exactly one longitude per strand")
        for i, y in enumerate(self.words, start=1):
            if y.n != self.n:
                raise ValueError("longitude rank mismatch")
            if y.exponent_sum(i) != 0:
                raise ValueError(f"longitude y_{i} is not normalised "
                                 f"(exponent sum of x_{i} must be 0)")

    def substituted(self, word: Word) -> Word:
        """Image of ``word`` under x_i |-> y_i x_i y_i^-1."""
        pieces = []
        for g, ex in word.letters:
            y = self.words[g - 1]
            conj = y * Word.gen(self.n, g) * y.inverse()
            pieces.append(conj.letters if ex == 1 else conj.inverse().letters)
        return Word.of(self.n, itertools.chain.from_iterable(pieces))

    def boundary_defect(self) -> Word:
        """The word ``phi(x_1...x_n) (x_1...x_n)^-1``; trivial for braid data."""
        boundary = Word.of(self.n, ((k, 1) for k in range(1, self.n + 1)))
        return self.substituted(boundary) * boundary.inverse()


def longitudes(braid: Braid) -> LongitudeTuple:
    """Extract the normalised longitude words of a pure braid.

    The image of each generator under the Artin action is a conjugate of
    that generator; the conjugator is peeled off the reduced word and then
    normalised by a power of x_i.  Failure to peel signals a bug, not bad
    input, since every valid braid word acts by such conjugations.
    """
    n = braid.n
    ys = []
    for i in range(1, n + 1):
        letters = artin_action(braid, Word.gen(n, i)).letters
        lo, hi = 0, len(letters) - 1
        while lo < hi:
            g, e = letters[lo]
            if letters[hi] != (g, -e):
                raise RuntimeError(
                    f"Artin image of x_{i} is not visibly a conjugate; "
                    "this indicates a bug in the action")
            lo += 1
            hi -= 1
        if letters[lo:hi + 1] != ((i, 1),):
            raise RuntimeError(f"Artin image of x_{i} does not wrap x_{i}")
        y = Word(n, letters[:lo])  # a prefix of a reduced word is reduced
        y = y * Word.gen(n, i, -y.exponent_sum(i))
        ys.append(y)
    return LongitudeTuple(n, tuple(ys))


def pure_braid_relations(n: int) -> list[tuple[Braid, Braid]]:
    """All defining relation instances ``(A_rs A_ij A_rs^-1, rhs)`` for PB_n."""
    rels = []
    gens = list(itertools.combinations(range(1, n + 1), 2))
    A = Braid.gen
    for (r, s), (i, j) in itertools.product(gens, gens):
        lhs = A(n, r, s) * A(n, i, j) * A(n, r, s, -1)
        if s < i or (i < r and s < j):
            rhs = A(n, i, j)
        elif s == i:
            rhs = A(n, r, j, -1) * A(n, i, j) * A(n, r, j)
        elif i == r and s < j:
            rhs = A(n, r, j, -1) * A(n, s, j, -1) * A(n, i, j) * A(n, s, j) * A(n, r, j)
        elif r < i < s < j:
            rhs = (A(n, r, j, -1) * A(n, s, j, -1) * A(n, r, j) * A(n, s, j)
                   * A(n, i, j)
                   * A(n, s, j, -1) * A(n, r, j, -1) * A(n, s, j) * A(n, r, j))
        else:
            continue
        rels.append((lhs, rhs))
    return rels
