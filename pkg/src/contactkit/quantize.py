"""Star-product quantization of the contact algebra.

Contact hamiltonians F(u, q, p) lift to the symplectification in
coordinates (w, u, q, k) with k = w p: the monomial rule is

    u^a q^b p^c  ->  w^(1-|c|) u^a q^b k^c,

a Laurent polynomial homogeneous of degree one under (w, k) -> (lam w,
lam k).  On the lifted algebra the constant Poisson tensor pairs (u, w)
and (q_i, k_i), oriented so that the first-order part of the Moyal product
reproduces the Lagrange bracket:

    A * B = A B - (i hbar / 2) {A, B} + ...,
    {A, B} = A_u B_w - A_w B_u + sum_i (A_{k_i} B_{q_i} - A_{q_i} B_{k_i}).

The Moyal product terminates exactly on Laurent polynomials and is
associative at all hbar orders.  ``restrict_w1`` (w = 1, k -> p) is a
display map only: it is *not* an algebra homomorphism order by order in
hbar, and ``restricted_associator_defect`` exhibits the closed-form
obstruction.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import (
    DependsOnU,
    ForeignVariable,
    LaurentObstruction,
    NonHermitianDiscretization,
    NotOnShell,
)
from .symbols import (
    GR_ONE,
    HBAR,
    LAURENT_VAR,
    GaussianRational,
    Symbol,
    k_names,
    lifted_vars,
    p_names,
    q_names,
    restricted_vars,
)

_MINUS_I_HALF = GaussianRational(0, Fraction(-1, 2))
_MINUS_I = GaussianRational(0, -1)


def _mode_count(vars):
    return sum(1 for name in vars if name == "q" or name.startswith("q"))


def lift(F, extra=()):
    """Lift a contact symbol to the symplectification registry.

    ``F`` must live over (u, q_i, p_i[, hbar][, extras]); hbar and extra
    constants ride along unchanged.
    """
    n = _mode_count(F.vars)
    expected = ("u",) + q_names(n) + p_names(n)
    base = F.vars[: len(expected)]
    if base != expected:
        raise ForeignVariable(
            f"cannot lift registry {F.vars}; expected leading variables {expected}"
        )
    passengers = F.vars[len(expected):]
    for name in passengers:
        if name == LAURENT_VAR:
            raise ForeignVariable("symbol already contains w")
    target = lifted_vars(n, tuple(name for name in passengers if name != HBAR))
    p_slots = [F.vars.index(name) for name in p_names(n)]
    out = {}
    for exps, coeff in F.terms.items():
        powers = dict(zip(F.vars, exps))
        total_p = sum(exps[i] for i in p_slots)
        key = [0] * len(target)
        key[target.index(LAURENT_VAR)] = 1 - total_p
        for name, e in powers.items():
            if e == 0 or name in p_names(n):
                continue
            key[target.index(name)] = e
        for pn, kn in zip(p_names(n), k_names(n)):
            e = powers.get(pn, 0)
            if e:
                key[target.index(kn)] = e
        out[tuple(key)] = coeff
    return Symbol(target, out)


def _moyal_directions(vars):
    """(var on A, var on B, sign) triples of the lifted Poisson tensor."""
    n = _mode_count(vars)
    dirs = [("u", LAURENT_VAR, 1), (LAURENT_VAR, "u", -1)]
    for qn, kn in zip(q_names(n), k_names(n)):
        dirs.append((kn, qn, 1))
        dirs.append((qn, kn, -1))
    return dirs


def moyal(A, B):
    """Exact Moyal star product on the lifted algebra (all hbar orders)."""
    if A.vars != B.vars:
        raise ForeignVariable(f"registries differ: {A.vars} vs {B.vars}")
    vars = A.vars
    if HBAR not in vars:
        raise ForeignVariable("lifted registry must include hbar")
    dirs = _moyal_directions(vars)
    hbar_slot = vars.index(HBAR)
    out = Symbol.zero(vars)

    def descend(i, da, db, coeff, order):
        nonlocal out
        if da.is_zero or db.is_zero:
            return
        if i == len(dirs):
            term = da * db * coeff
            if order and not term.is_zero:
                shift = {
                    exps[:hbar_slot] + (exps[hbar_slot] + order,) + exps[hbar_slot + 1:]: c
                    for exps, c in term.terms.items()
                }
                term = Symbol(vars, shift)
            out = out + term
            return
        va, vb, sign = dirs[i]
        count = 0
        cur_a, cur_b, cur_coeff = da, db, coeff
        while True:
            descend(i + 1, cur_a, cur_b, cur_coeff, order + count)
            cur_a = cur_a.differentiate(va)
            cur_b = cur_b.differentiate(vb)
            if cur_a.is_zero or cur_b.is_zero:
                break
            count += 1
            cur_coeff = cur_coeff * _MINUS_I_HALF * Fraction(sign, count)

    descend(0, A, B, GR_ONE, 0)
    return out


def star_commutator(A, B):
    return moyal(A, B) - moyal(B, A)


def hbar_component(sym, order):
    """The coefficient symbol of hbar**order (hbar exponent zeroed)."""
    return sym.coefficient_of(HBAR, order)


def lifted_poisson(A, B):
    """Classical bracket of the lifted algebra (the hbar -> 0 shadow)."""
    if A.vars != B.vars:
        raise ForeignVariable(f"registries differ: {A.vars} vs {B.vars}")
    out = Symbol.zero(A.vars)
    for va, vb, sign in _moyal_directions(A.vars):
        term = A.differentiate(va) * B.differentiate(vb)
        out = out + (term if sign > 0 else -term)
    return out


def restrict_w1(A):
    """Display map w = 1, k_i -> p_i onto the registry (u, q, p, hbar).

    Not a star-algebra homomorphism order by order in hbar; see
    ``restricted_associator_defect``.
    """
    n = _mode_count(A.vars)
    passengers = tuple(
        name
        for name in A.vars
        if name not in (LAURENT_VAR, "u", HBAR) + q_names(n) + k_names(n)
    )
    target = restricted_vars(n, passengers)
    at_w1 = A.substitute(LAURENT_VAR, 1)
    rename = dict(zip(k_names(n), p_names(n)))
    return at_w1.transfer(target, rename)


def restricted_star(F, G):
    """Star product seen through the restriction: lift, multiply, restrict."""
    return restrict_w1(moyal(lift(F), lift(G)))


def restricted_associator_defect(F, G, H):
    """Order-hbar associator of the restricted product, computed two ways.

    Returns (associator_h1, closed_form) where the closed form is
    (i/2) [ (1,H) F G + (1,F) G H ] with (1,X) = -X_u; both live over the
    restricted registry with the hbar exponent stripped.
    """
    left = restricted_star(restricted_star(F, G), H)
    right = restricted_star(F, restricted_star(G, H))
    assoc = hbar_component(left - right, 1)
    i_half = GaussianRational(0, Fraction(1, 2))

    def bracket_with_one(X):
        return -X.differentiate("u")

    closed = (bracket_with_one(H) * F * G + bracket_with_one(F) * G * H) * i_half
    closed = closed.transfer(assoc.vars)
    return assoc, closed


# --- wave operators -----------------------------------------------------------


def _distinct_arrangements(letters):
    """Distinct orderings of a multiset of letters, deterministic order."""
    return sorted(set(itertools.permutations(letters)))


class WaveOperator:
    """Differential operator sum c(u, q, hbar) d_u^a d_q^beta.

    Terms are normal ordered: multiplication coefficients stand to the left
    of all derivatives.  Keys are (a, beta) with beta a tuple over the q
    variables.
    """

    def __init__(self, vars, n, terms):
        self.vars = tuple(vars)  # coefficient registry: (u, q_i, hbar, extras)
        self.n = n
        clean = {}
        for key, coeff in terms.items():
            if coeff.is_zero:
                continue
            a, beta = key
            clean[(a, tuple(beta))] = coeff
        self.terms = clean

    @classmethod
    def zero(cls, vars, n):
        return cls(vars, n, {})

    def __add__(self, other):
        if self.vars != other.vars:
            raise ForeignVariable("wave operators over different registries")
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            merged = terms.get(key, Symbol.zero(self.vars)) + coeff
            if merged.is_zero:
                terms.pop(key, None)
            else:
                terms[key] = merged
        return WaveOperator(self.vars, self.n, terms)

    def __eq__(self, other):
        if not isinstance(other, WaveOperator):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def scale_by(self, sym):
        """Multiply every coefficient by a Symbol (e.g. an hbar power)."""
        return WaveOperator(
            self.vars, self.n, {key: coeff * sym for key, coeff in self.terms.items()}
        )

    def adjoint(self):
        """Formal L2 adjoint, expanded back to normal order."""
        qn = q_names(self.n)
        out = {}
        zero = Symbol.zero(self.vars)
        for (a, beta), coeff in self.terms.items():
            cbar = coeff.conjugate()
            total = a + sum(beta)
            sign = -1 if total % 2 else 1
            ranges = [range(a + 1)] + [range(b + 1) for b in beta]
            for picks in itertools.product(*ranges):
                r, rho = picks[0], picks[1:]
                # Leibniz: derivatives not passed through land on the coefficient.
                c = cbar
                factor = _binom(a, r)
                for b_i, rho_i in zip(beta, rho):
                    factor *= _binom(b_i, rho_i)
                for _ in range(a - r):
                    c = c.differentiate("u")
                for name, b_i, rho_i in zip(qn, beta, rho):
                    for _ in range(b_i - rho_i):
                        c = c.differentiate(name)
                if c.is_zero:
                    continue
                key = (r, rho)
                term = c * (sign * factor)
                merged = out.get(key, zero) + term
                if merged.is_zero:
                    out.pop(key, None)
                else:
                    out[key] = merged
        return WaveOperator(self.vars, self.n, out)

    def is_formally_symmetric(self):
        return self.adjoint() == self

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, beta) in sorted(self.terms, reverse=True):
            coeff = self.terms[(a, beta)]
            ops = []
            if a:
                ops.append("d/du" if a == 1 else f"d^{a}/du^{a}")
            for name, b in zip(q_names(self.n), beta):
                if b:
                    ops.append(f"d/d{name}" if b == 1 else f"d^{b}/d{name}^{b}")
            body = "*".join(ops) if ops else "1"
            parts.append(f"({coeff})*{body}")
        return " + ".join(parts)

    def __repr__(self):
        return f"WaveOperator({self})"


def _binom(n, k):
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


def _weyl_word(vars, n, mult_powers, w_power, k_power_name, coeff):
    """Weyl-symmetrized operator of one lifted monomial.

    ``mult_powers`` maps multiplication variables (u, q_i) to powers;
    ``w_power`` counts hat-w = -i hbar d/du letters; ``k_power_name``
    is the q-name whose conjugate derivative appears once (or None).
    Returns a WaveOperator.
    """
    letters = []
    for name, e in mult_powers.items():
        letters.extend([("m", name)] * e)
    letters.extend([("w", "u")] * w_power)
    if k_power_name is not None:
        letters.append(("k", k_power_name))
    arrangements = _distinct_arrangements(letters)
    weight = Fraction(1, len(arrangements)) if arrangements else Fraction(1)
    total = WaveOperator.zero(vars, n)
    for arrangement in arrangements:
        total = total + _normal_order(vars, n, arrangement, coeff * weight)
    return total


def _normal_order(vars, n, word, coeff):
    """Normal order a word of multiplication/derivative letters.

    Derivative letters are ("w", "u") for -i hbar d/du and ("k", q_name)
    for -i hbar d/dq; multiplication letters are ("m", name).  Commutation
    [-i hbar d/dx, x] = -i hbar produces the lower-order terms.
    """
    word = list(word)
    # Find a derivative letter immediately left of a multiplication letter.
    for i in range(len(word) - 1):
        kind_l, name_l = word[i]
        kind_r, name_r = word[i + 1]
        if kind_l in ("w", "k") and kind_r == "m":
            swapped = word[:i] + [word[i + 1], word[i]] + word[i + 2:]
            conjugate = (kind_l == "w" and name_r == "u") or (
                kind_l == "k" and name_r == name_l
            )
            result = _normal_order(vars, n, swapped, coeff)
            if conjugate:
                reduced = word[:i] + word[i + 2:]
                bump = Symbol.monomial(vars, {HBAR: 1}, _MINUS_I)
                result = result + _normal_order(vars, n, reduced, coeff).scale_by(bump)
            return result
    # Already normal ordered: multiplications left, derivatives right.
    mult = {}
    w_count = 0
    k_counts = [0] * n
    qn = q_names(n)
    for kind, name in word:
        if kind == "m":
            mult[name] = mult.get(name, 0) + 1
        elif kind == "w":
            w_count += 1
        else:
            k_counts[qn.index(name)] += 1
    deriv_total = w_count + sum(k_counts)
    sym = Symbol.monomial(
        vars, {**mult, HBAR: deriv_total}, coeff * (_MINUS_I ** deriv_total)
    )
    return WaveOperator(vars, n, {(w_count, tuple(k_counts)): sym})


def _operator_registry(n, passengers=()):
    return ("u",) + q_names(n) + (HBAR,) + tuple(passengers)


def weyl_operator(F, form="weyl"):
    """Differential-operator realization of a contact symbol.

    ``form="weyl"`` Weyl-orders the lift with hat-w = -i hbar d/du and
    hat-k_i = -i hbar d/dq_i; it exists only when every monomial has total
    p-degree <= 1 (otherwise the Laurent factor w^(1-|c|) obstructs it and
    LaurentObstruction is raised).  ``form="product"`` uses the product
    factorization F(u, q, (-i hbar)^2 d^2/dq du) . (-i hbar d/du) with
    multiplications ordered to the left, which realizes any polynomial.
    Either way weyl_operator(1) = -i hbar d/du exactly.
    """
    n = _mode_count(F.vars)
    expected = ("u",) + q_names(n) + p_names(n)
    if F.vars[: len(expected)] != expected:
        raise ForeignVariable(f"expected contact registry, got {F.vars}")
    passengers = tuple(
        name for name in F.vars[len(expected):] if name != HBAR
    )
    vars = _operator_registry(n, passengers)
    qn, pn = q_names(n), p_names(n)
    out = WaveOperator.zero(vars, n)
    if form == "product":
        return _product_form(F, vars, n, passengers)
    if form != "weyl":
        raise ValueError(f"unknown form {form!r}")
    lifted = lift(F)
    for exps, coeff in lifted.terms.items():
        powers = dict(zip(lifted.vars, exps))
        w_power = powers.pop(LAURENT_VAR, 0)
        if w_power < 0:
            raise LaurentObstruction(
                "monomials with p-degree >= 2 have no Weyl-ordered operator; "
                "use form='product'"
            )
        k_name = None
        for kn, q_name in zip(k_names(n), qn):
            e = powers.pop(kn, 0)
            if e:
                k_name = q_name  # |c| <= 1 here, so at most one unit power
        hbar_extra = powers.pop(HBAR, 0)
        mult = {name: e for name, e in powers.items() if e}
        piece = _weyl_word(vars, n, mult, w_power, k_name, coeff)
        if hbar_extra:
            piece = piece.scale_by(Symbol.monomial(vars, {HBAR: hbar_extra}, 1))
        out = out + piece
    return out


def _product_form(F, vars, n, passengers):
    """F(u, q, M) . (-i hbar d/du) with M = (-i hbar)^2 d^2/dq du."""
    qn, pn = q_names(n), p_names(n)
    terms = {}
    zero = Symbol.zero(vars)
    for exps, coeff in F.terms.items():
        powers = dict(zip(F.vars, exps))
        c = [powers.get(name, 0) for name in pn]
        total_c = sum(c)
        order = 2 * total_c + 1
        hbar_power = powers.get(HBAR, 0) + order
        mult = {
            name: e
            for name, e in powers.items()
            if e and name not in pn and name != HBAR
        }
        sym = Symbol.monomial(
            vars, {**mult, HBAR: hbar_power}, coeff * (_MINUS_I ** order)
        )
        key = (total_c + 1, tuple(c))
        merged = terms.get(key, zero) + sym
        if merged.is_zero:
            terms.pop(key, None)
        else:
            terms[key] = merged
    return WaveOperator(vars, n, terms)


# --- Schrodinger reduction ------------------------------------------------------


class ReducedOperator:
    """Operator on phi(q): sum over derivative orders of Symbol coefficients.

    Keys are tuples of q-derivative orders; coefficients live over
    (q_i, hbar, extras) and carry the (-i hbar)^|order| factors explicitly.
    """

    def __init__(self, vars, n, terms):
        self.vars = tuple(vars)
        self.n = n
        self.terms = {
            tuple(key): coeff for key, coeff in terms.items() if not coeff.is_zero
        }

    def __eq__(self, other):
        if not isinstance(other, ReducedOperator):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms, reverse=True):
            ops = [
                (f"d/d{name}" if b == 1 else f"d^{b}/d{name}^{b}")
                for name, b in zip(q_names(self.n), key)
                if b
            ]
            body = "*".join(ops) if ops else "1"
            parts.append(f"({self.terms[key]})*{body}")
        return " + ".join(parts)

    def apply_to_grid(self, phi, grid, hbar, params=None):
        """Apply on a uniform 1-D grid with central differences.

        Returns the residual array on the largest interior window where all
        stencils are defined.
        """
        if self.n != 1:
            raise NotImplementedError("grid application is 1-D")
        phi = np.asarray(phi, dtype=complex)
        grid = np.asarray(grid, dtype=float)
        h = grid[1] - grid[0]
        max_order = max((key[0] for key in self.terms), default=0)
        margin = max_order  # one point per derivative order is enough for <=2
        values = {q_names(1)[0]: grid, HBAR: hbar}
        values.update(params or {})
        out = np.zeros_like(phi)
        for (order,), coeff in self.terms.items():
            c = coeff.evaluate(values)
            out = out + np.asarray(c) * _central_derivative(phi, h, order)
        if margin:
            return out[margin:-margin]
        return out


def _central_derivative(phi, h, order):
    if order == 0:
        return phi
    if order == 1:
        out = np.zeros_like(phi)
        out[1:-1] = (phi[2:] - phi[:-2]) / (2 * h)
        return out
    if order == 2:
        out = np.zeros_like(phi)
        out[1:-1] = (phi[2:] - 2 * phi[1:-1] + phi[:-2]) / (h * h)
        return out
    return _central_derivative(_central_derivative(phi, h, 2), h, order - 2)


def schrodinger_reduce(F, v_name=None):
    """Reduce a u-independent symbol to the standard operator F(q, -i hbar d/dq).

    Implements the action of the product-form wave operator on the ansatz
    e^(i u / hbar) phi(q): every -i hbar d/du factor becomes multiplication
    by one and every (-i hbar)^2 d^2/dq du becomes -i hbar d/dq.  ``v_name``
    may label an abstract potential variable that survives as a coefficient.
    """
    n = _mode_count(F.vars)
    if not F.differentiate("u").is_zero:
        raise DependsOnU(f"symbol depends on u: {F}")
    pn = p_names(n)
    passengers = tuple(
        name
        for name in F.vars
        if name not in ("u",) + q_names(n) + pn + (HBAR,)
    )
    vars = q_names(n) + (HBAR,) + passengers
    terms = {}
    zero = Symbol.zero(vars)
    for exps, coeff in F.terms.items():
        powers = dict(zip(F.vars, exps))
        powers.pop("u", None)
        c = tuple(powers.pop(name, 0) for name in pn)
        total_c = sum(c)
        hbar_power = powers.pop(HBAR, 0) + total_c
        sym = Symbol.monomial(
            vars,
            {**{name: e for name, e in powers.items() if e}, HBAR: hbar_power},
            coeff * (_MINUS_I ** total_c),
        )
        merged = terms.get(c, zero) + sym
        if merged.is_zero:
            terms.pop(c, None)
        else:
            terms[c] = merged
    return ReducedOperator(vars, n, terms)


def eikonal_residual(F, chi, hbar, grid, shell_tol=1e-10):
    """Semiclassical residual of the ansatz e^(i/hbar)(u + chi(q)).

    ``chi`` is sampled on ``grid``; the phase must satisfy the dispersion
    relation F(chi, q, chi') = 0 pointwise (checked with the central
    difference of the samples).  Returns ||op phi|| / ||phi|| on the grid
    interior, which vanishes to first order in hbar.
    """
    n = _mode_count(F.vars)
    if n != 1:
        raise NotImplementedError("eikonal residual is 1-D")
    chi = np.asarray(chi, dtype=float)
    grid = np.asarray(grid, dtype=float)
    h = grid[1] - grid[0]
    dchi = (chi[2:] - chi[:-2]) / (2 * h)
    qv = q_names(1)[0]
    pv = p_names(1)[0]
    shell = F.evaluate({"u": chi[1:-1], qv: grid[1:-1], pv: dchi, HBAR: hbar})
    worst = float(np.max(np.abs(shell)))
    if worst > shell_tol:
        raise NotOnShell(
            f"phase violates F = 0 (max |F| = {worst:.3g} > {shell_tol:.3g})"
        )
    reduced = schrodinger_reduce(F)
    phi = np.exp(1j * chi / hbar)
    residual = reduced.apply_to_grid(phi, grid, hbar)
    margin = (len(phi) - len(residual)) // 2
    window = phi[margin : len(phi) - margin] if margin else phi
    return float(np.linalg.norm(residual) / np.linalg.norm(window))


def grid_eigensolve(reduced, interval, num_points, hbar, params=None, count=2):
    """Lowest eigenvalues of -hbar^2 c d^2 + V(q) by central differences.

    The operator must contain only an even constant-coefficient second
    derivative and multiplication terms (Dirichlet boundary conditions);
    anything else makes the discretization non-Hermitian and is rejected.
    """
    if reduced.n != 1:
        raise NotImplementedError("eigensolve is 1-D")
    params = dict(params or {})
    allowed = {(0,), (2,)}
    if any(key not in allowed for key in reduced.terms):
        raise NonHermitianDiscretization(
            "operator contains odd or higher-order derivatives"
        )
    kinetic_sym = reduced.terms.get((2,))
    if kinetic_sym is None:
        kinetic = 0.0
    else:
        qv = q_names(1)[0]
        if kinetic_sym.degree_in(qv) != 0:
            raise NonHermitianDiscretization("second-derivative coefficient varies")
        kinetic = kinetic_sym.evaluate({HBAR: hbar, **params})
        if abs(np.imag(kinetic)) > 0:
            raise NonHermitianDiscretization("complex kinetic coefficient")
        kinetic = float(np.real(kinetic))
    if kinetic >= 0:
        raise NonHermitianDiscretization(
            "kinetic term must be -hbar^2 c d^2 with c > 0"
        )
    a, b = interval
    grid = np.linspace(a, b, num_points + 2)[1:-1]
    h = grid[1] - grid[0]
    potential_sym = reduced.terms.get((0,))
    if potential_sym is None:
        potential = np.zeros_like(grid)
    else:
        qv = q_names(1)[0]
        values = potential_sym.evaluate({qv: grid, HBAR: hbar, **params})
        if np.max(np.abs(np.imag(values))) > 0:
            raise NonHermitianDiscretization("complex potential")
        potential = np.real(values) * np.ones_like(grid)
    diag = -2.0 * kinetic / (h * h) + potential
    off = np.full(num_points - 1, kinetic / (h * h))
    eigenvalues = eigh_tridiagonal(
        diag, off, select="i", select_range=(0, count - 1), eigvals_only=True
    )
    return eigenvalues
