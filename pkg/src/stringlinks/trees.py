"""Colored tree Jacobi diagrams modulo antisymmetry; comm, eta and fission.

A diagram of degree l is a connected tree with l+1 univalent leaves, each
carrying a color in {1..n}, and l-1 trivalent vertices, each carrying a
cyclic order of its three edges.  Diagrams are stored rooted at a leaf as
a presentation ``(root_color, expr)`` where ``expr`` is either a color or
an ordered pair ``(left, right)``; the pair reads as the bracket
``[left, right]`` and encodes the counterclockwise cyclic order
``(parent, right, left)`` at its vertex.  Re-rooting is therefore
sign-free and deterministic:

    entering a node from the parent edge p with children (L, R),
    re-rooting through L yields children (R, p-branch),
    re-rooting through R yields children (p-branch, L).

Antisymmetry is normal-formed: swapping the children of a node flips the
sign, and the canonical representative is the lexicographically least
presentation over all leaf rootings with children sorted.  A diagram
whose canonicalisation meets an exact symmetry is zero (T = -T).  The IHX
relation is NOT normal-formed; ``enumerate_trees`` returns a spanning set
and all quotient-level questions are settled by linear algebra on eta
images, which is safe because eta kills IHX relators (property-tested).

``comm`` assigns to a rooted diagram the iterated Lie bracket of its leaf
colors, ``eta`` sums col(v) (x) comm over all rootings, and ``fission``
splits the diagram at each trivalent vertex r into the wedge
comm(branch 3) ^ comm(branch 2) ^ comm(branch 1) of its three branches
numbered along the cyclic order.  With these conventions the boundary of
a fission chain equals sum_v col(v) ^ comm(T_v) exactly, which the
acceptance suite checks for every enumerated tree.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .koszul import ExteriorChain, NilpotentBasis
from .lie import HTensorLie, LieElement
from .tensor import Q0

MAX_COLORS = 4
MAX_DEGREE = 5


class ScaleError(ValueError):
    """Enumeration request beyond the supported desk scale."""


def _check_expr(n: int, expr) -> int:
    """Validate an expression and return its leaf count."""
    if isinstance(expr, int):
        if not 1 <= expr <= n:
            raise ValueError(f"leaf color {expr} out of range 1..{n}")
        return 1
    if isinstance(expr, tuple) and len(expr) == 2:
        return _check_expr(n, expr[0]) + _check_expr(n, expr[1])
    raise ValueError(f"malformed tree expression {expr!r}")


def _encode(expr) -> tuple:
    if isinstance(expr, int):
        return ("L", expr)
    return ("N", _encode(expr[0]), _encode(expr[1]))


def _sort_expr(expr):
    """Child-sorted form and the accumulated antisymmetry sign; (None, 0) if zero."""
    if isinstance(expr, int):
        return expr, 1
    left, s_left = _sort_expr(expr[0])
    right, s_right = _sort_expr(expr[1])
    if left is None or right is None:
        return None, 0
    sign = s_left * s_right
    e_left, e_right = _encode(left), _encode(right)
    if e_left == e_right:
        return None, 0
    if e_left > e_right:
        return (right, left), -sign
    return (left, right), sign


def _presentations(root: int, expr):
    """All presentations of the abstract tree, one per leaf; sign-free."""
    out = [(root, expr)]

    def walk(node, context):
        if isinstance(node, int):
            out.append((node, context))
            return
        left, right = node
        walk(left, (right, context))
        walk(right, (context, left))

    if isinstance(expr, int):
        out.append((expr, root))
    else:
        walk(expr, root)
    return out


@dataclass(frozen=True)
class TreeDiagram:
    """Canonical representative of a nonzero tree diagram modulo AS."""

    n: int
    root: int
    expr: "int | tuple"
    _token: object = field(repr=False, compare=False, default=None)

    _GUARD = object()

    def __post_init__(self):
        if self._token is not TreeDiagram._GUARD:
            raise ValueError("construct diagrams via TreeDiagram.build")

    @classmethod
    def build(cls, n: int, root: int, expr) -> tuple["TreeDiagram | None", int]:
        """Canonicalise a presentation; returns (diagram, sign) or (None, 0)."""
        if not 1 <= root <= n:
            raise ValueError(f"root color {root} out of range 1..{n}")
        _check_expr(n, expr)
        best_key = None
        best = None
        best_sign = 0
        signs_seen: dict[tuple, int] = {}
        for r, ex in _presentations(root, expr):
            sorted_ex, sign = _sort_expr(ex)
            if sorted_ex is None:
                return None, 0
            key = (r, _encode(sorted_ex))
            if key in signs_seen and signs_seen[key] != sign:
                return None, 0
            signs_seen[key] = sign
            if best_key is None or key < best_key:
                best_key, best, best_sign = key, (r, sorted_ex), sign
        diagram = cls(n, best[0], best[1], _token=cls._GUARD)
        return diagram, best_sign

    @property
    def degree(self) -> int:
        return _check_expr(self.n, self.expr)

    def presentations(self) -> list[tuple[int, "int | tuple"]]:
        """One (root_color, expr) presentation per leaf, in a fixed order."""
        return _presentations(self.root, self.expr)

    def leaves(self) -> list[int]:
        """Leaf colors in presentation order."""
        return [r for r, _ in self.presentations()]

    def comm(self, leaf_index: int) -> LieElement:
        """Iterated bracket of the diagram rooted at the given leaf."""
        pres = self.presentations()
        if not 0 <= leaf_index < len(pres):
            raise ValueError(f"leaf index {leaf_index} out of range")
        _, expr = pres[leaf_index]
        return _expr_lie(self.n, expr)

    def trivalent_branches(self) -> list[tuple]:
        """For each trivalent vertex, its three branch expressions in cyclic order."""
        out = []

        def walk(node, context):
            if isinstance(node, int):
                return
            left, right = node
            out.append((context, right, left))
            walk(left, (right, context))
            walk(right, (context, left))

        if not isinstance(self.expr, int):
            walk(self.expr, self.root)
        return out

    def to_dot(self, name: str = "tree") -> str:
        """Graphviz rendering; leaves are labelled circles, internal vertices
        points, and the out-edge order at each internal vertex encodes the
        cyclic order (parent, right, left) counterclockwise."""
        lines = [f"graph {name} {{", "  node [fontsize=10];"]
        counter = [0]

        def fresh(kind: str) -> str:
            counter[0] += 1
            return f"{kind}{counter[0]}"

        def emit(node, parent: str):
            if isinstance(node, int):
                vid = fresh("leaf")
                lines.append(f'  {vid} [shape=circle, label="{node}"];')
                lines.append(f"  {parent} -- {vid};")
                return
            vid = fresh("v")
            lines.append(f'  {vid} [shape=point];')
            lines.append(f"  {parent} -- {vid};")
            emit(node[0], vid)
            emit(node[1], vid)

        rid = fresh("leaf")
        lines.append(f'  {rid} [shape=circle, label="{self.root}"];')
        emit(self.expr, rid)
        lines.append("}")
        return "\n".join(lines)

    def __str__(self) -> str:
        def fmt(e):
            if isinstance(e, int):
                return str(e)
            return f"[{fmt(e[0])},{fmt(e[1])}]"
        return f"<{self.root}|{fmt(self.expr)}>"


@functools.lru_cache(maxsize=None)
def _expr_lie_cached(n: int, expr) -> LieElement:
    if isinstance(expr, int):
        return LieElement.generator(n, expr)
    return _expr_lie_cached(n, expr[0]).bracket(_expr_lie_cached(n, expr[1]))


def _expr_lie(n: int, expr) -> LieElement:
    return _expr_lie_cached(n, expr)


class TreeCombination:
    """A formal rational combination of canonical tree diagrams."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict[TreeDiagram, Fraction] | None = None):
        self.n = n
        self.terms = {} if terms is None else terms

    @classmethod
    def zero(cls, n: int) -> "TreeCombination":
        return cls(n)

    def add_tree(self, root: int, expr, coeff) -> "TreeCombination":
        """Add coeff times the presented tree (canonicalising, tracking sign)."""
        diagram, sign = TreeDiagram.build(self.n, root, expr)
        out = dict(self.terms)
        if diagram is not None:
            v = out.get(diagram, Q0) + sign * Fraction(coeff)
            if v:
                out[diagram] = v
            else:
                out.pop(diagram, None)
        return TreeCombination(self.n, out)

    def add_diagram(self, diagram: TreeDiagram, coeff) -> "TreeCombination":
        out = dict(self.terms)
        v = out.get(diagram, Q0) + Fraction(coeff)
        if v:
            out[diagram] = v
        else:
            out.pop(diagram, None)
        return TreeCombination(self.n, out)

    def __add__(self, other: "TreeCombination") -> "TreeCombination":
        if self.n != other.n:
            raise ValueError("color count mismatch")
        out = dict(self.terms)
        for t, c in other.terms.items():
            v = out.get(t, Q0) + c
            if v:
                out[t] = v
            else:
                del out[t]
        return TreeCombination(self.n, out)

    def scale(self, s) -> "TreeCombination":
        s = Fraction(s)
        if not s:
            return TreeCombination(self.n)
        return TreeCombination(self.n, {t: s * c for t, c in self.terms.items()})

    def __sub__(self, other: "TreeCombination") -> "TreeCombination":
        return self + other.scale(-1)

    def __eq__(self, other) -> bool:
        return (isinstance(other, TreeCombination) and self.n == other.n
                and self.terms == other.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> list[int]:
        return sorted({t.degree for t in self.terms})

    def degree_component(self, d: int) -> "TreeCombination":
        return TreeCombination(self.n,
                               {t: c for t, c in self.terms.items() if t.degree == d})

    def sorted_terms(self) -> list[tuple[TreeDiagram, Fraction]]:
        return sorted(self.terms.items(),
                      key=lambda t: (t[0].degree, t[0].root, _encode(t[0].expr)))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return "\n".join(f"{c} * {t}" for t, c in self.sorted_terms())


def eta(diagram: TreeDiagram) -> HTensorLie:
    """sum over leaves v of col(v) (x) comm of the diagram rooted at v."""
    entries = [LieElement.zero(diagram.n) for _ in range(diagram.n)]
    for color, expr in diagram.presentations():
        entries[color - 1] = entries[color - 1] + _expr_lie(diagram.n, expr)
    return HTensorLie(diagram.n, tuple(entries))


def eta_combination(comb: TreeCombination) -> HTensorLie:
    out = HTensorLie.zero(comb.n)
    for diagram, c in comb.terms.items():
        out = out + eta(diagram).scale(c)
    return out


@functools.lru_cache(maxsize=None)
def _shapes(leaf_count: int) -> tuple:
    """All full binary tree shapes with the given number of leaves."""
    if leaf_count == 1:
        return ("*",)
    out = []
    for k in range(1, leaf_count):
        for a in _shapes(k):
            for b in _shapes(leaf_count - k):
                out.append((a, b))
    return tuple(out)


def _colorings(n: int, shape):
    if shape == "*":
        for c in range(1, n + 1):
            yield c
    else:
        for a in _colorings(n, shape[0]):
            for b in _colorings(n, shape[1]):
                yield (a, b)


@functools.lru_cache(maxsize=None)
def enumerate_trees(n: int, degree: int) -> tuple[TreeDiagram, ...]:
    """All nonzero canonical diagrams of the given degree (a spanning set).

    The enumeration walks every rooted shape and coloring and keeps the
    distinct canonical forms, so it spans the diagram space modulo AS by
    construction; spanning modulo IHX as well is certified in the tests by
    comparing the eta-image rank with the bracket-kernel dimension.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if n > MAX_COLORS or degree > MAX_DEGREE:
        raise ScaleError(f"enumeration supported for n <= {MAX_COLORS}, "
                         f"degree <= {MAX_DEGREE}")
    seen: dict[TreeDiagram, None] = {}
    for shape in _shapes(degree):
        for root in range(1, n + 1):
            for expr in _colorings(n, shape):
                diagram, _sign = TreeDiagram.build(n, root, expr)
                if diagram is not None:
                    seen.setdefault(diagram, None)
    return tuple(sorted(seen, key=lambda t: (t.root, _encode(t.expr))))


def eta_inverse(value: HTensorLie) -> TreeCombination:
    """A tree combination with eta image equal to ``value``.

    Requires the bracket-kernel membership that characterises eta's image;
    the representative is the deterministic row-reduced solution over the
    enumerated spanning set, degree by degree.
    """
    n = value.n
    if not value.in_bracket_kernel():
        raise ValueError("value is not in the kernel of the bracket map")
    out = TreeCombination.zero(n)
    for d in value.degrees():
        component = value.degree_component(d)
        span = enumerate_trees(n, d)
        columns = [eta(t).coordinates(d) for t in span]
        target = component.coordinates(d)
        sol = linalg.solve_in_span(columns, target)
        if sol is None:
            raise RuntimeError(f"enumerated degree-{d} trees failed to span; "
                               "this indicates an enumeration bug")
        for t, c in zip(span, sol):
            if c:
                out = out.add_diagram(t, c)
    return out


def fission(diagram: TreeDiagram, basis: NilpotentBasis) -> ExteriorChain:
    """The 3-chain sum_r comm(T_r^(3)) ^ comm(T_r^(2)) ^ comm(T_r^(1)).

    Branch Lie elements of degree beyond the basis cap are dropped, which
    is exactly the reduction of the chain into the nilpotent quotient.
    """
    if basis.n != diagram.n:
        raise ValueError("color count does not match the basis")
    chain = ExteriorChain.zero(basis, 3)
    for b1, b2, b3 in diagram.trivalent_branches():
        l1 = _expr_lie(diagram.n, b1)
        l2 = _expr_lie(diagram.n, b2)
        l3 = _expr_lie(diagram.n, b3)
        chain = chain + ExteriorChain.wedge(basis, [l3, l2, l1])
    return chain


def fission_combination(comb: TreeCombination, basis: NilpotentBasis) -> ExteriorChain:
    out = ExteriorChain.zero(basis, 3)
    for diagram, c in comb.terms.items():
        out = out + fission(diagram, basis).scale(c)
    return out
