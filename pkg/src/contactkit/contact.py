"""Contact charts, contact vector fields, and the Lagrange bracket.

The bracket is *defined* through vector-field commutators: for hamiltonians
F, G the commutator [V_F, V_G] is again a contact vector field, and its
hamiltonian is the bracket (F, G).  ``lagrange_bracket`` is the closed form
of that definition,

    (F, G) = F_u G - F G_u + p_i (F_{p_i} G_u - F_u G_{p_i})
             + F_{p_i} G_{q_i} - F_{q_i} G_{p_i},

and ``lagrange_bracket_oracle`` recomputes it from the commutator so the two
routes check each other.  Note the closed form differs from some published
tables in the sign of the first two terms; see ``commutation_table`` which
reports both readings for the coordinate functions.
"""

from __future__ import annotations

from .errors import ForeignVariable, NotContact, SingularForm
from .forms import DifferentialForm
from .symbols import Symbol, contact_vars, p_names, q_names


def darboux_form(vars, n):
    """The standard contact form du - sum_i p_i dq^i."""
    coeffs = {"u": Symbol.constant(vars, 1)}
    for qn, pn in zip(q_names(n), p_names(n)):
        coeffs[qn] = -Symbol.variable(vars, pn)
    return DifferentialForm.one_form(vars, coeffs)


class ContactChart:
    """Darboux chart on R^(2n+1) with registry (u, q_i, p_i).

    The contact condition alpha ^ (d alpha)^n != 0 is verified exactly (as
    a nonzero top-form polynomial) at construction.
    """

    def __init__(self, n, alpha=None, extra=()):
        self.n = n
        self.vars = contact_vars(n, extra)
        self.alpha = alpha if alpha is not None else darboux_form(self.vars, n)
        top = self.alpha
        dalpha = self.alpha.d()
        for _ in range(n):
            top = top.wedge(dalpha)
        if top.is_zero:
            raise SingularForm("alpha ^ (d alpha)^n vanishes identically")
        self.top_form = top

    @property
    def q(self):
        return q_names(self.n)

    @property
    def p(self):
        return p_names(self.n)

    def symbol(self, name):
        return Symbol.variable(self.vars, name)

    def constant(self, value):
        return Symbol.constant(self.vars, value)

    def check_member(self, sym):
        if sym.vars != self.vars:
            raise ForeignVariable(
                f"symbol registry {sym.vars} is not this chart's {self.vars}"
            )


class ContactVectorField:
    """Vector field with Symbol components keyed by coordinate name."""

    __slots__ = ("vars", "components")

    def __init__(self, vars, components):
        self.vars = tuple(vars)
        zero = Symbol.zero(self.vars)
        self.components = {name: components.get(name, zero) for name in self.vars}

    def apply(self, f):
        """Directional derivative V(f)."""
        out = Symbol.zero(self.vars)
        for name, comp in self.components.items():
            if comp.is_zero:
                continue
            out = out + comp * f.differentiate(name)
        return out

    def commutator(self, other):
        comps = {}
        for name in self.vars:
            comps[name] = self.apply(other.components[name]) - other.apply(
                self.components[name]
            )
        return ContactVectorField(self.vars, comps)

    def __eq__(self, other):
        if not isinstance(other, ContactVectorField):
            return NotImplemented
        return self.vars == other.vars and self.components == other.components

    def __str__(self):
        parts = []
        for name in self.vars:
            comp = self.components[name]
            if comp.is_zero:
                continue
            parts.append(f"({comp})*d/d{name}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"ContactVectorField({self})"


def contact_vector_field(F, chart):
    """The unique contact vector field with hamiltonian F.

    Components in the Darboux chart:
        V^u     = p_i F_{p_i} - F
        V^{q^i} = F_{p_i}
        V^{p_i} = -F_{q^i} - p_i F_u
    It satisfies i_V alpha = -F and L_V alpha = (-F_u) alpha exactly.
    """
    chart.check_member(F)
    F_u = F.differentiate("u")
    comps = {}
    v_u = -F
    for qn, pn in zip(chart.q, chart.p):
        F_p = F.differentiate(pn)
        p_sym = chart.symbol(pn)
        v_u = v_u + p_sym * F_p
        comps[qn] = F_p
        comps[pn] = -F.differentiate(qn) - p_sym * F_u
    comps["u"] = v_u
    return ContactVectorField(chart.vars, comps)


def hamiltonian_of(V, chart):
    """Recover F = -i_V alpha; raises NotContact when V is not contact."""
    F = -chart.alpha.interior(V.components).scalar()
    if contact_vector_field(F, chart) != V:
        raise NotContact(
            "vector field is not contact: L_V alpha is not proportional to alpha"
        )
    return F


def conformal_factor(V, chart):
    """The function g_V with L_V alpha = g_V alpha (NotContact if none)."""
    lie = chart.alpha.lie(V.components)
    g = lie.coefficient(("u",))
    if lie != chart.alpha.scale(g):
        raise NotContact("L_V alpha is not a multiple of alpha")
    return g


def lagrange_bracket(F, G, chart):
    """Closed-form Lagrange bracket matching the commutator oracle exactly."""
    chart.check_member(F)
    chart.check_member(G)
    F_u = F.differentiate("u")
    G_u = G.differentiate("u")
    out = F_u * G - F * G_u
    for qn, pn in zip(chart.q, chart.p):
        F_p = F.differentiate(pn)
        G_p = G.differentiate(pn)
        p_sym = chart.symbol(pn)
        out = out + p_sym * (F_p * G_u - F_u * G_p)
        out = out + F_p * G.differentiate(qn) - F.differentiate(qn) * G_p
    return out


def lagrange_bracket_oracle(F, G, chart):
    """Ground truth: hamiltonian of [V_F, V_G]."""
    V = contact_vector_field(F, chart)
    W = contact_vector_field(G, chart)
    C = V.commutator(W)
    # -i_C alpha without the round-trip check (the commutator of two contact
    # fields is contact by construction; tests verify it independently).
    return -chart.alpha.interior(C.components).scalar()


def check_generalized_leibniz(F, G, H, chart):
    """Defect of the generalized Leibniz rule; zero for a Jacobi bracket.

    Returns (F, GH) - (F, G)H - G(F, H) - (1, F)GH.
    """
    one = chart.constant(1)
    b = lambda a, c: lagrange_bracket(a, c, chart)
    return b(F, G * H) - b(F, G) * H - G * b(F, H) - b(one, F) * G * H


# Entries of the printed n=1 commutation table, keyed by coordinate pair.
# "w" names the constant function 1.  The vector-field oracle disagrees with
# the printed table on (u, q) and (u, p); both readings are retained.
_PRINTED_TABLE = {
    ("p", "q"): "w",
    ("w", "q"): "0",
    ("w", "p"): "0",
    ("u", "q"): "0",
    ("u", "p"): "p",
    ("u", "w"): "w",
}


def commutation_table(chart=None):
    """Regenerate the n=1 coordinate commutation table from the oracle.

    Each entry carries the oracle value, the printed value, and whether the
    two agree.  The constant function is reported under the name "w".
    """
    if chart is None:
        chart = ContactChart(1)
    if chart.n != 1:
        raise ForeignVariable("the commutation table is defined for n=1")

    def resolve(name):
        return chart.constant(1) if name == "w" else chart.symbol(name)

    entries = []
    for (a, b), printed in _PRINTED_TABLE.items():
        oracle = lagrange_bracket_oracle(resolve(a), resolve(b), chart)
        closed = lagrange_bracket(resolve(a), resolve(b), chart)
        printed_sym = (
            chart.constant(0)
            if printed == "0"
            else resolve(printed)
        )
        entries.append(
            {
                "pair": [a, b],
                "oracle": oracle.to_json(),
                "closed_form": closed.to_json(),
                "printed": printed_sym.to_json(),
                "printed_text": printed,
                "matches_printed": oracle == printed_sym,
            }
        )
    return {
        "convention": "bracket defined by [V_F, V_G] = V_(F,G); 'w' is the constant 1",
        "entries": entries,
    }
