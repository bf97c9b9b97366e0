"""Quantum odd-dimensional spheres: harmonic lifts, restricted brackets,
and truncated Fock-space operators.

A function on the sphere x.x = 1 in R^(2n) is presented by its harmonic
expansion (symmetric traceless tensors).  It lifts to the ambient space
with an x^2 prefactor, ambient Poisson brackets are taken with a constant
antisymmetric tensor, and results are reduced back to the sphere by the
harmonic decomposition (x^2 -> 1 on every radial factor).

The Fock representation uses per-mode ladder operators with Bargmann
normalization, A_dag |N> = sqrt(N+1) |N+1>, so that [A, A_dag] = 1 away
from the cutoff; declaring monomials orthonormal instead would make
[A, A_dag] a rank-one projector and destroy the oscillator spectrum.
Matrices are stored in the monomial basis where all entries are exact
Gaussian rationals; conversion to the orthonormal basis introduces the
sqrt(N!) factors only on export.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from .errors import (
    CutoffTooSmall,
    NonCanonicalStructure,
    StructureMismatch,
)
from .symbols import GR_ONE, GaussianRational, Symbol

# --- ambient structure -----------------------------------------------------


def x_names(m):
    return tuple(f"x{i}" for i in range(1, m + 1))


def z_names(n):
    if n == 1:
        return ("z",), ("zb",)
    return (
        tuple(f"z{a}" for a in range(1, n + 1)),
        tuple(f"zb{a}" for a in range(1, n + 1)),
    )


class AmbientStructure:
    """Euclidean metric plus a constant antisymmetric Poisson tensor.

    The tensor must be exact (Fraction entries) and invertible.  For Fock
    constructions it must additionally be in 2x2 block normal form
    [[0, mu_a], [-mu_a, 0]]; the mode frequencies are then read off as
    half the reciprocal of the block values, omega_a = 1 / (2 mu_a).
    """

    def __init__(self, omega):
        self.omega = [[Fraction(x) for x in row] for row in omega]
        m = len(self.omega)
        if m % 2 or any(len(row) != m for row in self.omega):
            raise NonCanonicalStructure("tensor must be square of even dimension")
        for i in range(m):
            for j in range(m):
                if self.omega[i][j] != -self.omega[j][i]:
                    raise NonCanonicalStructure("tensor must be antisymmetric")
        if _exact_det(self.omega) == 0:
            raise NonCanonicalStructure("tensor must be invertible")
        self.dim = m
        self.n = m // 2
        self.vars = x_names(m)
        self._blocks = self._block_values()

    @classmethod
    def standard(cls, frequencies):
        """Block-diagonal structure realizing the given mode frequencies."""
        n = len(frequencies)
        omega = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
        for a, freq in enumerate(frequencies):
            mu = Fraction(1, 2) / Fraction(freq)
            omega[2 * a][2 * a + 1] = mu
            omega[2 * a + 1][2 * a] = -mu
        return cls(omega)

    def _block_values(self):
        """Per-mode block entries mu_a, or None when not block-diagonal."""
        blocks = []
        for a in range(self.n):
            i = 2 * a
            mu = self.omega[i][i + 1]
            blocks.append(mu)
        for i in range(self.dim):
            for j in range(self.dim):
                same_block = j == i + 1 and i % 2 == 0 or j == i - 1 and i % 2 == 1
                if not same_block and self.omega[i][j] != 0:
                    return None
        if any(mu <= 0 for mu in blocks):
            return None
        return blocks

    @property
    def is_block_diagonal(self):
        return self._blocks is not None

    def require_blocks(self):
        if self._blocks is None:
            raise NonCanonicalStructure(
                "Fock constructions need a block-diagonal tensor; "
                "use AmbientStructure.standard(frequencies)"
            )
        return self._blocks

    @property
    def frequencies(self):
        """omega_a = 1 / (2 mu_a), exact Fractions."""
        blocks = self.require_blocks()
        return [Fraction(1, 2) / mu for mu in blocks]

    def characteristic_values_check(self, tol=1e-10):
        """Cross-check block values against the eigen-decomposition."""
        blocks = self.require_blocks()
        matrix = np.array([[float(x) for x in row] for row in self.omega])
        eigs = np.linalg.eigvals(matrix)
        positive = np.sort(np.abs(np.imag(eigs[np.imag(eigs) > 0])))
        expected = np.sort(np.array([float(mu) for mu in blocks]))
        return bool(np.max(np.abs(positive - expected)) <= tol)

    def poisson(self, A, B):
        """Ambient bracket omega^{ij} dA/dx_i dB/dx_j on x-symbols."""
        if A.vars != self.vars or B.vars != self.vars:
            raise StructureMismatch("symbols do not live on this structure's registry")
        out = Symbol.zero(self.vars)
        grads_a = [A.differentiate(name) for name in self.vars]
        grads_b = [B.differentiate(name) for name in self.vars]
        for i in range(self.dim):
            if grads_a[i].is_zero:
                continue
            for j in range(self.dim):
                entry = self.omega[i][j]
                if not entry or grads_b[j].is_zero:
                    continue
                out = out + grads_a[i] * grads_b[j] * entry
        return out

    def x_squared(self):
        out = Symbol.zero(self.vars)
        for name in self.vars:
            out = out + Symbol.variable(self.vars, name) ** 2
        return out

    def __eq__(self, other):
        if not isinstance(other, AmbientStructure):
            return NotImplemented
        return self.omega == other.omega


def _exact_det(rows):
    """Fraction-exact determinant by Gaussian elimination."""
    a = [row[:] for row in rows]
    m = len(a)
    det = Fraction(1)
    for col in range(m):
        pivot = next((r for r in range(col, m) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, m):
            factor = a[r][col] / a[col][col]
            if factor:
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return det


# --- harmonic expansions ------------------------------------------------------


def _multiplicity(idx):
    """Number of distinct orderings of a sorted index tuple."""
    count = math.factorial(len(idx))
    for _, group in itertools.groupby(idx):
        count //= math.factorial(len(tuple(group)))
    return count


class HarmonicExpansion:
    """Spherical-harmonic coefficients: degree d -> symmetric traceless tensor.

    Tensors are stored sparsely as {sorted index tuple: Fraction}; the
    associated polynomial of degree d is sum F_t mult(t) x^t / d!, and
    tracelessness is equivalent to that polynomial being harmonic, which is
    how it is validated.
    """

    def __init__(self, dim, tensors):
        self.dim = dim
        self.tensors = {}
        for degree, entries in tensors.items():
            clean = {}
            for idx, value in entries.items():
                idx = tuple(sorted(idx))
                if len(idx) != degree:
                    raise ValueError(f"index tuple {idx} has wrong length for degree {degree}")
                if any(i < 0 or i >= dim for i in idx):
                    raise ValueError(f"index out of range in {idx}")
                value = Fraction(value)
                if value:
                    clean[idx] = clean.get(idx, Fraction(0)) + value
            clean = {k: v for k, v in clean.items() if v}
            if clean:
                self.tensors[degree] = clean
        for degree in self.tensors:
            if degree >= 2 and not _laplacian(self.degree_polynomial(degree)).is_zero:
                raise ValueError(f"degree-{degree} tensor is not traceless")

    @classmethod
    def constant(cls, dim, value=1):
        return cls(dim, {0: {(): Fraction(value)}})

    @classmethod
    def linear(cls, dim, coefficients):
        """Degree-1 harmonic from a coefficient vector."""
        entries = {(i,): Fraction(c) for i, c in enumerate(coefficients) if Fraction(c)}
        return cls(dim, {1: entries})

    @classmethod
    def from_polynomial(cls, sym):
        """Inverse of degree_polynomial; sym must be a sum of harmonics."""
        dim = len(sym.vars)
        tensors = {}
        for degree, part in _homogeneous_parts(sym).items():
            entries = {}
            for exps, coeff in part.terms.items():
                if not coeff.im == 0:
                    raise ValueError("harmonic expansions are real")
                idx = []
                for slot, e in enumerate(exps):
                    idx.extend([slot] * e)
                idx = tuple(idx)
                scale = 1
                for e in exps:
                    scale *= math.factorial(e)
                entries[idx] = coeff.re * scale
            tensors[degree] = entries
        return cls(dim, tensors)

    @property
    def degrees(self):
        return sorted(self.tensors)

    def degree_polynomial(self, degree):
        """The harmonic polynomial sum F_t mult(t) x^t / d! of one degree."""
        vars = x_names(self.dim)
        out = Symbol.zero(vars)
        dfact = math.factorial(degree)
        for idx, value in self.tensors.get(degree, {}).items():
            powers = {}
            for i in idx:
                name = vars[i]
                powers[name] = powers.get(name, 0) + 1
            out = out + Symbol.monomial(
                vars, powers, Fraction(_multiplicity(idx), dfact) * value
            )
        return out

    def polynomial(self):
        vars = x_names(self.dim)
        out = Symbol.zero(vars)
        for degree in self.degrees:
            out = out + self.degree_polynomial(degree)
        return out

    def __eq__(self, other):
        if not isinstance(other, HarmonicExpansion):
            return NotImplemented
        return self.dim == other.dim and self.tensors == other.tensors

    def __repr__(self):
        return f"HarmonicExpansion(dim={self.dim}, {self.polynomial()})"


def _laplacian(sym):
    out = Symbol.zero(sym.vars)
    for name in sym.vars:
        out = out + sym.differentiate(name).differentiate(name)
    return out


def _homogeneous_parts(sym):
    parts = {}
    for exps, coeff in sym.terms.items():
        degree = sum(exps)
        parts.setdefault(degree, {})[exps] = coeff
    return {d: Symbol(sym.vars, terms) for d, terms in sorted(parts.items())}


def _r_squared(vars):
    out = Symbol.zero(vars)
    for name in vars:
        out = out + Symbol.variable(vars, name) ** 2
    return out


def _harmonic_components(part, dim, degree):
    """Exact decomposition of homogeneous P = sum_j r^(2j) h_(d-2j).

    Recurses through the Laplacian: Delta(r^(2j) h_e) = lam(j, e) r^(2j-2) h_e
    with lam(j, e) = 2j (2e + dim + 2j - 2) > 0, so decomposing Delta(P)
    (strictly lower degree) determines every j >= 1 component and the
    harmonic head is the remainder.  Returns {j: h_(d-2j)}.
    """
    if degree <= 1:
        return {0: part}
    lap = _laplacian(part)
    if lap.is_zero:
        return {0: part}
    sub = _harmonic_components(lap, dim, degree - 2)
    r2 = _r_squared(part.vars)
    comps = {}
    rest = Symbol.zero(part.vars)
    for i, g in sub.items():
        j = i + 1
        e = degree - 2 * j
        lam = Fraction(1, 2 * j * (2 * e + dim + 2 * j - 2))
        h = g * lam
        comps[j] = h
        rest = rest + (r2 ** j) * h
    comps[0] = part - rest
    return comps


def reduce_mod_sphere(sym):
    """Canonical representative of a polynomial modulo (x^2 - 1).

    Every homogeneous component is decomposed into sum_j r^(2j) h_(d-2j)
    and the radial factors are set to one; the result is the unique finite
    sum of harmonic polynomials equal to sym on the sphere.
    """
    dim = len(sym.vars)
    total = Symbol.zero(sym.vars)
    for degree, part in _homogeneous_parts(sym).items():
        for h in _harmonic_components(part, dim, degree).values():
            total = total + h
    return total


def sphere_lift(expansion):
    """Ambient polynomial x^2 [F_0 + F_i x^i + F_ij x^i x^j / 2! + ...]."""
    poly = expansion.polynomial()
    return _r_squared(poly.vars) * poly


def sphere_bracket(F, G, structure):
    """Lagrange bracket on the sphere: ambient bracket of lifts, reduced.

    Returns the canonical harmonic representative as a Symbol; convert with
    HarmonicExpansion.from_polynomial to iterate the bracket.
    """
    if F.dim != structure.dim or G.dim != structure.dim:
        raise StructureMismatch("expansion dimension does not match structure")
    bracket = structure.poisson(sphere_lift(F), sphere_lift(G))
    return reduce_mod_sphere(bracket)


# --- truncated Fock operators ---------------------------------------------------


class FockOp:
    """Sparse operator on the truncated occupation basis {|N_1..N_n>, N_a <= N}.

    Entries are kept in the monomial (Bargmann) basis z^N / no normalization,
    where ladder algebra is exact over the Gaussian rationals: A_dag is a
    unit subdiagonal shift and A has integer entries N.  The orthonormal
    basis matrix (entries with sqrt factors) is produced on export.
    """

    def __init__(self, n_modes, cutoff, entries=None):
        self.n_modes = n_modes
        self.cutoff = cutoff
        self.dim = (cutoff + 1) ** n_modes
        self.entries = {}
        for key, value in (entries or {}).items():
            value = GaussianRational.coerce(value)
            if not value.is_zero:
                self.entries[key] = value

    # mode occupation <-> basis index (row-major, first mode slowest)
    def index_of(self, occupation):
        idx = 0
        for N in occupation:
            if N < 0 or N > self.cutoff:
                raise IndexError(f"occupation {occupation} outside cutoff")
            idx = idx * (self.cutoff + 1) + N
        return idx

    def occupation_of(self, index):
        occ = []
        for _ in range(self.n_modes):
            occ.append(index % (self.cutoff + 1))
            index //= self.cutoff + 1
        return tuple(reversed(occ))

    @classmethod
    def identity(cls, n_modes, cutoff):
        dim = (cutoff + 1) ** n_modes
        return cls(n_modes, cutoff, {(i, i): GR_ONE for i in range(dim)})

    @classmethod
    def zero(cls, n_modes, cutoff):
        return cls(n_modes, cutoff, {})

    @classmethod
    def creation(cls, n_modes, cutoff, mode):
        op = cls.zero(n_modes, cutoff)
        for idx in range(op.dim):
            occ = op.occupation_of(idx)
            if occ[mode] < cutoff:
                up = list(occ)
                up[mode] += 1
                op.entries[(op.index_of(up), idx)] = GR_ONE
        return op

    @classmethod
    def annihilation(cls, n_modes, cutoff, mode):
        op = cls.zero(n_modes, cutoff)
        for idx in range(op.dim):
            occ = op.occupation_of(idx)
            if occ[mode] > 0:
                down = list(occ)
                down[mode] -= 1
                op.entries[(op.index_of(down), idx)] = GaussianRational(occ[mode])
        return op

    @classmethod
    def diagonal(cls, n_modes, cutoff, values):
        """Diagonal operator from a function occupation -> exact value."""
        op = cls.zero(n_modes, cutoff)
        for idx in range(op.dim):
            value = GaussianRational.coerce(values(op.occupation_of(idx)))
            if not value.is_zero:
                op.entries[(idx, idx)] = value
        return op

    def _check(self, other):
        if self.n_modes != other.n_modes or self.cutoff != other.cutoff:
            raise StructureMismatch("operators on different truncated spaces")

    def __add__(self, other):
        self._check(other)
        entries = dict(self.entries)
        for key, value in other.entries.items():
            merged = entries.get(key, GaussianRational(0)) + value
            if merged.is_zero:
                entries.pop(key, None)
            else:
                entries[key] = merged
        return FockOp(self.n_modes, self.cutoff, entries)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, value):
        value = GaussianRational.coerce(value)
        return FockOp(
            self.n_modes,
            self.cutoff,
            {key: v * value for key, v in self.entries.items()},
        )

    def __matmul__(self, other):
        self._check(other)
        by_col = {}
        for (r, c), value in self.entries.items():
            by_col.setdefault(c, []).append((r, value))
        out = {}
        for (r2, c2), value2 in other.entries.items():
            for r, value in by_col.get(r2, ()):
                key = (r, c2)
                merged = out.get(key, GaussianRational(0)) + value * value2
                if merged.is_zero:
                    out.pop(key, None)
                else:
                    out[key] = merged
        return FockOp(self.n_modes, self.cutoff, out)

    def commutator(self, other):
        return self @ other - other @ self

    def anticommutator(self, other):
        return self @ other + other @ self

    def _weight(self, index):
        occ = self.occupation_of(index)
        out = 1
        for N in occ:
            out *= math.factorial(N)
        return out

    def dagger(self):
        """Adjoint w.r.t. the Bargmann inner product, exact."""
        out = {}
        for (r, c), value in self.entries.items():
            out[(c, r)] = value.conjugate() * Fraction(self._weight(c), self._weight(r))
        return FockOp(self.n_modes, self.cutoff, out)

    def is_hermitian(self):
        """Exact check of M_jk w_j == conj(M_kj) w_k."""
        keys = set(self.entries) | {(c, r) for (r, c) in self.entries}
        for r, c in keys:
            lhs = self.entries.get((r, c), GaussianRational(0)) * self._weight(r)
            rhs = self.entries.get((c, r), GaussianRational(0)).conjugate() * self._weight(c)
            if lhs != rhs:
                return False
        return True

    def restrict_interior(self, level):
        """Zero all rows/columns with any mode occupation above level."""
        keep = {
            idx
            for idx in range(self.dim)
            if all(N <= level for N in self.occupation_of(idx))
        }
        entries = {
            key: value
            for key, value in self.entries.items()
            if key[0] in keep and key[1] in keep
        }
        return FockOp(self.n_modes, self.cutoff, entries)

    def to_matrix(self):
        """Dense complex matrix in the orthonormal occupation basis."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for (r, c), value in self.entries.items():
            scale = math.sqrt(self._weight(r) / self._weight(c))
            out[r, c] = complex(value) * scale
        return out

    def spectral_norm(self):
        if not self.entries:
            return 0.0
        return float(np.linalg.norm(self.to_matrix(), 2))

    def diagonal_values(self):
        return [complex(self.entries.get((i, i), GaussianRational(0))) for i in range(self.dim)]

    def to_coo_json(self):
        matrix = self.to_matrix()
        entries = [
            [r, c, matrix[r, c].real, matrix[r, c].imag]
            for r in range(self.dim)
            for c in range(self.dim)
            if matrix[r, c] != 0
        ]
        return {"dim": self.dim, "entries": entries}

    def __eq__(self, other):
        if not isinstance(other, FockOp):
            return NotImplemented
        return (
            self.n_modes == other.n_modes
            and self.cutoff == other.cutoff
            and self.entries == other.entries
        )


# --- quantization maps ------------------------------------------------------------


def _symmetrized_mode_word(n_modes, cutoff, mode, creators, annihilators):
    """Average of all orderings of creators/annihilators on one mode."""
    letters = [1] * creators + [0] * annihilators
    arrangements = sorted(set(itertools.permutations(letters)), reverse=True)
    a_dag = FockOp.creation(n_modes, cutoff, mode)
    a = FockOp.annihilation(n_modes, cutoff, mode)
    total = FockOp.zero(n_modes, cutoff)
    for arrangement in arrangements:
        term = FockOp.identity(n_modes, cutoff)
        for letter in arrangement:
            term = term @ (a_dag if letter else a)
        total = total + term
    return total.scale(Fraction(1, len(arrangements)))


def _quantize_terms(terms, n, cutoff, scale_fn=None):
    """Shared symmetric-ordering core over {(m..., k...): coefficient} terms.

    Conjugate monomial pairs are realized as (op, op.dagger()) so real
    polynomials quantize to exactly Hermitian operators.  ``scale_fn`` maps
    an exponent tuple to an extra exact scalar (frequency weights).
    """
    out = FockOp.zero(n, cutoff)
    done = set()
    for exps, coeff in terms.items():
        if exps in done:
            continue
        m, k = exps[:n], exps[n:]
        if any(e > cutoff for e in m) or any(e > cutoff for e in k):
            raise CutoffTooSmall(
                f"monomial of degrees {m}/{k} exceeds the cutoff band N = {cutoff}"
            )
        partner = k + m
        canonical = max(exps, partner)
        rep = _monomial_operator(n, cutoff, canonical[:n], canonical[n:])
        ops = {canonical: rep}
        if partner != exps:
            ops[min(exps, partner)] = rep.dagger()
        scale = scale_fn(exps) if scale_fn else GR_ONE
        out = out + ops[exps].scale(coeff * scale)
        done.add(exps)
        if partner != exps and partner in terms:
            out = out + ops[partner].scale(terms[partner] * scale)
            done.add(partner)
    return out


def fock_quantize(poly, structure, cutoff):
    """Symmetric-ordering quantization of a polynomial in z, zbar.

    z^a -> A_dag^a, zbar^a -> A^a with full symmetrization over orderings;
    modes commute, so the average factorizes per mode.
    """
    n = structure.n
    structure.require_blocks()
    zn, zbn = z_names(n)
    expected = zn + zbn
    if poly.vars != expected:
        raise StructureMismatch(f"expected registry {expected}, got {poly.vars}")
    return _quantize_terms(poly.terms, n, cutoff)


def _monomial_operator(n, cutoff, m, k):
    total = FockOp.identity(n, cutoff)
    for mode in range(n):
        if m[mode] == 0 and k[mode] == 0:
            continue
        total = total @ _symmetrized_mode_word(n, cutoff, mode, m[mode], k[mode])
    return total


def hamiltonian_operator(structure, cutoff):
    """H_hat = sum_a omega_a (A_dag_a A_a + 1/2), exact diagonal."""
    freqs = structure.frequencies
    return FockOp.diagonal(
        structure.n,
        cutoff,
        lambda occ: sum(freq * (N + Fraction(1, 2)) for freq, N in zip(freqs, occ)),
    )


def _x_to_z(sym, structure):
    """Rewrite an x-polynomial in scaled complex coordinates.

    Uses zeta^a = x_{2a-1} + i x_{2a} (exact), then z^a = zeta^a / sqrt(omega_a);
    the sqrt factors are returned separately per monomial so the z-registry
    Symbol stays exact: returns a dict {(m, k): (coeff, scale_power)} where
    scale_power counts the per-mode zeta content for the sqrt(omega) weights.
    """
    n = structure.n
    zn, zbn = z_names(n)
    target = zn + zbn
    out = Symbol.zero(target)
    half = Fraction(1, 2)
    for exps, coeff in sym.terms.items():
        term = Symbol.constant(target, coeff)
        for slot, e in enumerate(exps):
            if e == 0:
                continue
            mode = slot // 2
            z = Symbol.variable(target, zn[mode])
            zb = Symbol.variable(target, zbn[mode])
            if slot % 2 == 0:  # x_{2a-1} = (zeta + zetabar)/2
                base = (z + zb) * half
            else:  # x_{2a} = (zeta - zetabar)/(2i)
                base = (z - zb) * GaussianRational(0, -half)
            term = term * base ** e
        out = out + term
    return out


def quantize_ambient(sym, structure, cutoff):
    """Quantize an x-polynomial: x -> zeta -> scaled ladder operators.

    hat(zeta^a) = sqrt(omega_a) A_dag_a; the sqrt(omega) weights are folded
    into the (dyadic-exact) entry values, so frequency-1 structures stay
    fully rational.
    """
    n = structure.n
    freqs = structure.frequencies
    zeta_poly = _x_to_z(sym, structure)

    def weight(exps):
        scale = GR_ONE
        for mode in range(n):
            power = freqs[mode] ** (exps[mode] + exps[n + mode])
            root = _exact_sqrt(power)
            scale = scale * (root if root is not None else Fraction(math.sqrt(power)))
        return scale

    return _quantize_terms(zeta_poly.terms, n, cutoff, scale_fn=weight)


def _exact_sqrt(value):
    value = Fraction(value)
    num = math.isqrt(value.numerator)
    den = math.isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Fraction(num, den)
    return None


def sphere_operator(F, structure, cutoff):
    """Quantize the x^2-lift of a harmonic expansion.

    The constant goes to the oscillator hamiltonian H_hat; every harmonic of
    degree d >= 1 is quantized as the symmetrized product
    (1/2)[H_hat, X_hat_d]_+ with X_hat_d the symmetric-ordered Fock operator
    of the harmonic polynomial.
    """
    if F.dim != structure.dim:
        raise StructureMismatch("expansion dimension does not match structure")
    H = hamiltonian_operator(structure, cutoff)
    out = FockOp.zero(structure.n, cutoff)
    for degree in F.degrees:
        part = F.degree_polynomial(degree)
        if degree == 0:
            out = out + H.scale(part.constant_value())
            continue
        X = quantize_ambient(part, structure, cutoff)
        out = out + H.anticommutator(X).scale(Fraction(1, 2))
    return out


def commutator_report(F, G, structure, cutoff):
    """Compare [F_hat, G_hat] with the quantized classical bracket.

    The correspondence convention is [A_hat, B_hat] ~ -i (A, B)-hat, so the
    defect operator is [F_hat, G_hat] + i B_hat with B_hat the
    sphere_operator of the reduced bracket.  The spectral norm is reported
    on the interior subspace (per-mode occupation <= N // 2) where cutoff
    artifacts cannot reach.
    """
    F_hat = sphere_operator(F, structure, cutoff)
    G_hat = sphere_operator(G, structure, cutoff)
    bracket = sphere_bracket(F, G, structure)
    B = HarmonicExpansion.from_polynomial(bracket)
    B_hat = sphere_operator(B, structure, cutoff)
    defect = F_hat.commutator(G_hat) + B_hat.scale(GaussianRational(0, 1))
    level = cutoff // 2
    interior = defect.restrict_interior(level)
    H = hamiltonian_operator(structure, cutoff)
    ladder_defects = []
    for mode in range(structure.n):
        a_dag = FockOp.creation(structure.n, cutoff, mode)
        resid = H.commutator(a_dag) - a_dag.scale(structure.frequencies[mode])
        ladder_defects.append(resid.restrict_interior(cutoff - 1).spectral_norm())
    return {
        "interior_level": level,
        "interior_defect": interior.spectral_norm(),
        "full_defect": defect.spectral_norm(),
        "ladder_defects": ladder_defects,
        "bracket": bracket.to_json(),
        "convention": "[F,G]_hat ~ -i (F,G)-hat",
    }
