"""The H3-valued refinement of the truncated Milnor invariant.

For an input L in the (k+1)-st Milnor filtration level the conjugating
data Y_i(L) start in degree k+1.  The 2-chain

    sigma_L = sum_i sum_{l=k+1}^{2k+1} X_i ^ Y_i^(l)(L)

over the class-(2k+1) quotient is a cycle (its boundary is the per-degree
bracket contraction, which speciality kills).  Its reduction to the
class-2k quotient bounds; a solution t_L of  d_3 t = {sigma_L}  reduces to
a 3-cycle in the class-k quotient whose homology class is the refined
invariant.  The class does not depend on the choice of t_L, is additive
under stacking, agrees with the fission route through tree diagrams, and
its composition with the degree projection recovers the degree-(k+1)
Milnor invariant; every one of these is an acceptance property.

Degree bookkeeping: Y_i must be exact through degree 2k+1, so the
underlying special expansion needs truncation degree at least 2k+2 (one
more than the top Y degree, since the top component of a conjugator needs
one degree of headroom).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import linalg
from .expansions import Expansion
from .koszul import (ExteriorChain, HomologyClass, NotACycleError, boundary,
                     exterior_basis, homology, nilpotent_basis)
from .lie import HTensorLie
from .milnor import FiltrationError, special_artin
from .trees import TreeCombination, enumerate_trees, eta, eta_inverse
from .words import Braid, LongitudeTuple


def required_truncation(k: int) -> int:
    """Smallest expansion truncation supporting the full degree-k pipeline."""
    return 2 * k + 2


@dataclass(frozen=True)
class MoritaInput:
    """A filtration-(k+1) input together with the expansion to use."""

    data: "Braid | LongitudeTuple"
    theta: Expansion
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("filtration parameter k must be >= 1")
        if self.theta.trunc < required_truncation(self.k):
            raise ValueError(
                f"expansion truncation {self.theta.trunc} too small; the "
                f"degree-{self.k} pipeline needs {required_truncation(self.k)}")

    def conjugating_data(self) -> HTensorLie:
        value = special_artin(self.data, self.theta,
                              max_degree=2 * self.k + 1).invariant()
        for d in value.degrees():
            if d < self.k + 1:
                raise FiltrationError(self.k + 1, d)
        return value


def sigma(inp: MoritaInput) -> ExteriorChain:
    """The 2-cycle sum_i sum_l X_i ^ Y_i^(l) over the class-(2k+1) quotient."""
    k = inp.k
    value = inp.conjugating_data()
    basis = nilpotent_basis(inp.theta.n, 2 * k + 1)
    chain = ExteriorChain.zero(basis, 2)
    for i in range(1, inp.theta.n + 1):
        x_i = basis.element(basis.index[(i,)])
        y = value.entries[i - 1]
        for l in range(k + 1, 2 * k + 2):
            part = y.degree_component(l)
            if not part.is_zero():
                chain = chain + ExteriorChain.wedge(basis, [x_i, part])
    defect = boundary(chain)
    if not defect.is_zero():
        raise RuntimeError("sigma is not a cycle; speciality of the Artin "
                           "data must have been violated")
    return chain


def solve_boundary(target: ExteriorChain, pivot_order: str = "forward") -> ExteriorChain:
    """A 3-chain t with boundary equal to the given 2-cycle.

    Solved per internal-degree block with the deterministic row-reduced
    solution; ``pivot_order`` "forward" or "backward" selects the column
    preference, giving two genuinely different solutions on underdetermined
    blocks (the final homology class must not see the difference).
    Raises when no solution exists, which for in-contract inputs means a bug.
    """
    if pivot_order not in ("forward", "backward"):
        raise ValueError(f"unknown pivot order {pivot_order!r}")
    if not boundary(target).is_zero():
        raise NotACycleError("boundary target is not a cycle")
    basis = target.basis
    out = ExteriorChain.zero(basis, 3)
    for d in target.internal_degrees():
        component = target.degree_component(d)
        domain = exterior_basis(basis, 3, d)
        codomain = exterior_basis(basis, 2, d)
        cod_index = {t: j for j, t in enumerate(codomain)}
        columns = []
        for t in domain:
            img = boundary(ExteriorChain(basis, 3, {t: 1}))
            col = [0] * len(codomain)
            for tt, c in img.coords.items():
                col[cod_index[tt]] = c
            columns.append(col)
        rhs = [0] * len(codomain)
        for tt, c in component.coords.items():
            rhs[cod_index[tt]] = c
        order = None
        if pivot_order == "backward":
            order = list(range(len(domain)))[::-1]
        sol = linalg.solve_in_span(columns, rhs, column_order=order)
        if sol is None:
            raise RuntimeError(f"no bounding 3-chain in internal degree {d}; "
                               "H_2 triviality must have been violated")
        for t, c in zip(domain, sol):
            if c:
                out = out + ExteriorChain(basis, 3, {t: c})
    return out


def morita_milnor(inp: MoritaInput, pivot_order: str = "forward") -> HomologyClass:
    """The refined invariant in H_3 of the class-k quotient."""
    k = inp.k
    n = inp.theta.n
    full_sigma = sigma(inp)
    mid_basis = nilpotent_basis(n, 2 * k)
    reduced_sigma = full_sigma.reduce_to(mid_basis)
    t_chain = solve_boundary(reduced_sigma, pivot_order=pivot_order)
    small_basis = nilpotent_basis(n, k)
    reduced_t = t_chain.reduce_to(small_basis)
    return homology(3, n, k).project(reduced_t)


def diagram_sides(inp: MoritaInput) -> tuple[HomologyClass, HomologyClass]:
    """Both routes to H_3: the boundary-solving one and the fission one.

    The fission route sends the truncated invariant (degrees k+1..2k)
    through eta-inversion into tree diagrams and applies the fission map.
    """
    from .koszul import phi_class

    k = inp.k
    value = inp.conjugating_data().degree_range(k + 1, 2 * k)
    trees = eta_inverse(value)
    return morita_milnor(inp), phi_class(trees, k + 1)


def verify_commutative_diagram(inp: MoritaInput) -> bool:
    """Exact equality of the two homology classes."""
    lhs, rhs = diagram_sides(inp)
    return lhs == rhs


def d2_composition(cls: HomologyClass) -> HTensorLie:
    """The spectral-sequence differential applied to a degree-k refined class.

    Realised as eta of the lowest tree-degree component of the fission
    preimage: for classes of morita_milnor this recovers the degree-(k+1)
    Milnor invariant.  The preimage is only defined modulo the common
    kernel of fission and eta on the enumerated span, which eta then
    kills, so the output is well defined.
    """
    from .koszul import phi_class

    cap = cls.homology.degree_cap
    if cls.homology.p != 3:
        raise ValueError("d2 composition expects an H_3 class")
    k_plus_1 = cap + 1
    n = cls.homology.n
    span = []
    for l in range(k_plus_1, 2 * k_plus_1 - 1):
        span.extend(enumerate_trees(n, l))
    columns = []
    for t in span:
        single = TreeCombination(n).add_diagram(t, 1)
        columns.append(list(phi_class(single, k_plus_1).coords))
    target = list(cls.coords)
    sol = linalg.solve_in_span(columns, target)
    if sol is None:
        raise RuntimeError("class is outside the fission image; the span "
                           "rank must be deficient")
    out = HTensorLie.zero(n)
    for t, c in zip(span, sol):
        if c and t.degree == k_plus_1:
            out = out + eta(t).scale(c)
    return out
