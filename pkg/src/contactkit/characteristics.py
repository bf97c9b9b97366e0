"""Numerical characteristic curves, PDE fans, Reeb dynamics, Legendrian lifts.

Trajectories integrate the contact ODE system

    qdot = F_p,   pdot = -F_q - p F_u,   udot = p . F_p - F

with fixed-step classical RK4 so runs are bit-reproducible.  Since the flow
satisfies dF/dt = -F F_u, a trajectory started on the hypersurface F = 0
stays there; the |F| residual is recorded at every step as a diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    EvaluatorFailure,
    NoRoot,
    NonFiniteState,
    NonZeroArea,
    SingularForm,
    TangentialCharacteristic,
)
from .symbols import Symbol, contact_vars, p_names, q_names

_BLOWUP = 1e12


@dataclass(frozen=True)
class ContactPoint:
    """State (u, q, p) with q, p of equal length n."""

    u: float
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", np.atleast_1d(np.asarray(self.q, dtype=float)))
        object.__setattr__(self, "p", np.atleast_1d(np.asarray(self.p, dtype=float)))
        if self.q.shape != self.p.shape:
            raise ValueError("q and p must have the same length")
        if not (np.isfinite(self.u) and np.isfinite(self.q).all() and np.isfinite(self.p).all()):
            raise NonFiniteState("contact point has non-finite entries")

    @property
    def n(self):
        return self.q.size

    def packed(self):
        return np.concatenate(([self.u], self.q, self.p))

    @classmethod
    def unpack(cls, y, n):
        return cls(y[0], y[1 : 1 + n], y[1 + n :])


class Trajectory:
    """Time-sampled characteristic curve with |F| residual diagnostics."""

    def __init__(self, times, states, residuals):
        self.times = np.asarray(times, dtype=float)
        self.states = np.asarray(states, dtype=float)  # rows: (u, q_i..., p_i...)
        self.residuals = np.asarray(residuals, dtype=float)
        if not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        if len(self.times) != len(self.states) or len(self.times) != len(self.residuals):
            raise ValueError("times, states, residuals must have equal length")
        self.n = (self.states.shape[1] - 1) // 2

    def __len__(self):
        return len(self.times)

    def point(self, i):
        return ContactPoint.unpack(self.states[i], self.n)

    @property
    def final(self):
        return self.point(len(self) - 1)

    @property
    def u(self):
        return self.states[:, 0]

    @property
    def q(self):
        return self.states[:, 1 : 1 + self.n]

    @property
    def p(self):
        return self.states[:, 1 + self.n :]

    def max_residual(self):
        return float(np.max(self.residuals))

    def write_csv(self, stream):
        n = self.n
        qcols = ",".join(q_names(n))
        pcols = ",".join(p_names(n))
        stream.write(f"t,u,{qcols},{pcols},residual\n")
        for t, row, r in zip(self.times, self.states, self.residuals):
            fields = [format(t, ".17g")]
            fields += [format(x, ".17g") for x in row]
            fields.append(format(r, ".17g"))
            stream.write(",".join(fields) + "\n")


class NumericHamiltonian:
    """Evaluator mapping a contact point to (F, F_u, F_q, F_p).

    Wraps either a Symbol (exact derivatives) or native callables (e.g. an
    eikonal hamiltonian with a tabulated metric).
    """

    def __init__(self, n, value, grad, source=None):
        self.n = n
        self._value = value
        self._grad = grad
        self.source = source

    def value(self, point):
        try:
            return float(self._value(point))
        except NonFiniteState:
            raise
        except Exception as exc:  # noqa: BLE001 - wrapped as a domain error
            raise EvaluatorFailure(f"hamiltonian evaluation failed: {exc}") from exc

    def grad(self, point):
        try:
            f_u, f_q, f_p = self._grad(point)
        except Exception as exc:  # noqa: BLE001
            raise EvaluatorFailure(f"hamiltonian gradient failed: {exc}") from exc
        return float(f_u), np.asarray(f_q, dtype=float), np.asarray(f_p, dtype=float)

    @classmethod
    def from_symbol(cls, sym, n, const_values=None):
        """Exact-derivative evaluator for a polynomial hamiltonian.

        ``sym`` must live over contact_vars(n) possibly extended by constant
        parameters supplied through ``const_values``.
        """
        consts = dict(const_values or {})
        qn, pn = q_names(n), p_names(n)
        d_u = sym.differentiate("u")
        d_q = [sym.differentiate(name) for name in qn]
        d_p = [sym.differentiate(name) for name in pn]

        def env(point):
            values = {"u": point.u, **consts}
            for i, name in enumerate(qn):
                values[name] = point.q[i]
            for i, name in enumerate(pn):
                values[name] = point.p[i]
            return values

        def value(point):
            return np.real(sym.evaluate(env(point)))

        def grad(point):
            values = env(point)
            f_u = np.real(d_u.evaluate(values))
            f_q = np.array([np.real(d.evaluate(values)) for d in d_q])
            f_p = np.array([np.real(d.evaluate(values)) for d in d_p])
            return f_u, f_q, f_p

        return cls(n, value, grad, source=sym)

    @classmethod
    def eikonal(cls, n, k=1.0, metric=None, metric_grad=None):
        """F = g^{ij}(q) p_i p_j - k^2.

        ``metric`` maps q to the (n, n) inverse-metric matrix (identity when
        omitted); ``metric_grad`` maps q to the (n, n, n) array of partial
        derivatives d g^{ij} / d q_m, computed by central differences when
        not supplied.
        """
        ksq = float(k) ** 2

        def gmat(q):
            if metric is None:
                return np.eye(n)
            return np.asarray(metric(q), dtype=float)

        def gderiv(q):
            if metric is None:
                return np.zeros((n, n, n))
            if metric_grad is not None:
                return np.asarray(metric_grad(q), dtype=float)
            out = np.zeros((n, n, n))
            h = 1e-6
            for m in range(n):
                dq = np.zeros(n)
                dq[m] = h
                out[:, :, m] = (gmat(q + dq) - gmat(q - dq)) / (2 * h)
            return out

        def value(point):
            return float(point.p @ gmat(point.q) @ point.p - ksq)

        def grad(point):
            g = gmat(point.q)
            dg = gderiv(point.q)
            f_q = np.einsum("i,ijm,j->m", point.p, dg, point.p)
            f_p = 2.0 * g @ point.p
            return 0.0, f_q, f_p

        return cls(n, value, grad, source="eikonal")

    def check_gradient(self, points, tol=1e-6, h=1e-7):
        """Finite-difference consistency of grad against value."""
        worst = 0.0
        for point in points:
            f_u, f_q, f_p = self.grad(point)
            packed = point.packed()
            n = self.n
            numeric = np.zeros_like(packed)
            for j in range(packed.size):
                plus = packed.copy()
                minus = packed.copy()
                plus[j] += h
                minus[j] -= h
                numeric[j] = (
                    self.value(ContactPoint.unpack(plus, n))
                    - self.value(ContactPoint.unpack(minus, n))
                ) / (2 * h)
            exact = np.concatenate(([f_u], f_q, f_p))
            scale = max(1.0, float(np.max(np.abs(exact))))
            worst = max(worst, float(np.max(np.abs(exact - numeric))) / scale)
        return worst <= tol, worst


def _contact_rhs(ham, y, n):
    point = ContactPoint.unpack(y, n)
    f = ham.value(point)
    f_u, f_q, f_p = ham.grad(point)
    du = float(point.p @ f_p) - f
    dq = f_p
    dp = -f_q - point.p * f_u
    return np.concatenate(([du], dq, dp))


def _rk4_step(rhs, y, h):
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _step_schedule(t_end, step):
    if step <= 0:
        raise ValueError("step must be positive")
    n_full = int(np.floor(t_end / step + 1e-12))
    remainder = t_end - n_full * step
    if remainder <= 1e-12 * max(1.0, abs(t_end)):
        remainder = 0.0
    return n_full, remainder


def flow(ham, x0, t_end, step):
    """Classical RK4 integration of the contact characteristic ODEs."""
    n = ham.n
    y = x0.packed()
    rhs = lambda state: _contact_rhs(ham, state, n)
    n_full, remainder = _step_schedule(t_end, step)
    times = [0.0]
    states = [y.copy()]
    residuals = [abs(ham.value(x0))]
    t = 0.0
    for i in range(n_full + (1 if remainder else 0)):
        h = step if i < n_full else remainder
        y = _rk4_step(rhs, y, h)
        t = t + h
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > _BLOWUP:
            raise NonFiniteState(f"trajectory blew up near t = {t}")
        times.append(t)
        states.append(y.copy())
        residuals.append(abs(ham.value(ContactPoint.unpack(y, n))))
    return Trajectory(times, states, residuals)


# --- method of characteristics ------------------------------------------------


@dataclass
class BoundarySample:
    """One boundary point: position, value, and tangential derivative data.

    ``tangents`` has shape (n-1, n) and ``du_ds`` length n-1; both are empty
    for a point boundary (n = 1).
    """

    q: np.ndarray
    u: float
    tangents: np.ndarray
    du_ds: np.ndarray


def boundary_from_curve(q_samples, u_samples):
    """Boundary data for a sampled curve, tangents by central differences."""
    q_samples = np.asarray(q_samples, dtype=float)
    u_samples = np.asarray(u_samples, dtype=float)
    m = len(q_samples)
    samples = []
    for j in range(m):
        lo = max(j - 1, 0)
        hi = min(j + 1, m - 1)
        span = hi - lo
        tq = (q_samples[hi] - q_samples[lo]) / span
        tu = (u_samples[hi] - u_samples[lo]) / span
        samples.append(
            BoundarySample(
                q=q_samples[j],
                u=float(u_samples[j]),
                tangents=tq.reshape(1, -1),
                du_ds=np.array([tu]),
            )
        )
    return samples


def boundary_point(q0, u0):
    """Point boundary for n = 1 problems."""
    q0 = np.atleast_1d(np.asarray(q0, dtype=float))
    return [BoundarySample(q=q0, u=float(u0), tangents=np.zeros((0, q0.size)), du_ds=np.zeros(0))]


@dataclass
class Ray:
    sample: BoundarySample
    p0: np.ndarray
    trajectory: Trajectory


class CharacteristicFan:
    """One characteristic trajectory per boundary sample."""

    def __init__(self, rays):
        self.rays = rays

    def __len__(self):
        return len(self.rays)

    def __iter__(self):
        return iter(self.rays)

    def max_residual(self):
        return max(ray.trajectory.max_residual() for ray in self.rays)

    def slice_at(self, index):
        """States of all rays at one time index: arrays (u, q, p)."""
        us = np.array([ray.trajectory.u[index] for ray in self.rays])
        qs = np.array([ray.trajectory.q[index] for ray in self.rays])
        ps = np.array([ray.trajectory.p[index] for ray in self.rays])
        return us, qs, ps


def _solve_boundary_momentum(ham, sample, seed, max_iter=50, tol=1e-12):
    """Newton solve for p: tangency conditions plus F(u, q, p) = 0."""
    n = ham.n
    p = np.asarray(seed, dtype=float).copy()
    for _ in range(max_iter):
        point = ContactPoint(sample.u, sample.q, p)
        f = ham.value(point)
        _, _, f_p = ham.grad(point)
        g = np.concatenate((sample.tangents @ p - sample.du_ds, [f]))
        if np.max(np.abs(g)) <= tol:
            return p
        jac = np.vstack((sample.tangents, f_p))
        try:
            delta = np.linalg.solve(jac, g)
        except np.linalg.LinAlgError as exc:
            # The Newton system degenerates exactly when F_p loses its
            # transverse component; report that case distinctly.
            nu = _transverse_direction(sample.tangents, n)
            if abs(float(f_p @ nu)) <= 1e-10 * (1.0 + float(np.linalg.norm(f_p))):
                raise TangentialCharacteristic(
                    f"F_p has no transverse component at q = {sample.q}"
                ) from exc
            raise NoRoot(f"singular Newton system at q = {sample.q}") from exc
        p = p - delta
        if not np.all(np.isfinite(p)):
            raise NoRoot(f"Newton iteration diverged at q = {sample.q}")
    raise NoRoot(f"no boundary momentum within {max_iter} Newton steps at q = {sample.q}")


def _transverse_direction(tangents, n):
    if n == 1:
        return np.array([1.0])
    # Unit vector spanning the orthogonal complement of the tangent rows.
    _, _, vt = np.linalg.svd(np.vstack((tangents, np.zeros((1, n)))))
    return vt[-1]


def solve_characteristic_pde(ham, boundary, p_seed, t_end, step, transverse_tol=1e-10):
    """Characteristic fan for F(u, grad u, q) = 0 from sampled boundary data.

    The sign branch of the transverse momentum is selected by ``p_seed``
    (applied to the first sample; later samples continue from the previous
    root).
    """
    rays = []
    seed = np.asarray(p_seed, dtype=float)
    for sample in boundary:
        p0 = _solve_boundary_momentum(ham, sample, seed)
        point = ContactPoint(sample.u, sample.q, p0)
        _, _, f_p = ham.grad(point)
        nu = _transverse_direction(sample.tangents, ham.n)
        if abs(float(f_p @ nu)) <= transverse_tol * (1.0 + float(np.linalg.norm(f_p))):
            raise TangentialCharacteristic(
                f"characteristic direction tangent to the boundary at q = {sample.q}"
            )
        rays.append(Ray(sample=sample, p0=p0, trajectory=flow(ham, point, t_end, step)))
        seed = p0
    return CharacteristicFan(rays)


# --- Reeb dynamics --------------------------------------------------------------


class ReebField:
    """Numeric Reeb field of a contact form: i_V d(alpha) = 0, i_V alpha = 1.

    Components are rational functions of the coordinates in general, so the
    field is exposed as a pointwise linear solve rather than polynomial
    components.
    """

    def __init__(self, alpha, vars=None):
        self.alpha = alpha
        self.vars = tuple(vars) if vars is not None else alpha.vars
        self.dim = len(self.vars)
        self._dalpha = alpha.d()

    def _matrices(self, values):
        dim = self.dim
        M = np.zeros((dim, dim))
        for (j, k), coeff in self._dalpha.terms.items():
            val = np.real(coeff.evaluate(values))
            M[j, k] = val
            M[k, j] = -val
        a_row = np.zeros(dim)
        for (j,), coeff in self.alpha.terms.items():
            a_row[j] = np.real(coeff.evaluate(values))
        return M, a_row

    def at(self, point):
        """Reeb vector at a point given as {name: value} or a packed array."""
        if not isinstance(point, dict):
            point = dict(zip(self.vars, np.asarray(point, dtype=float)))
        M, a_row = self._matrices(point)
        if np.linalg.matrix_rank(M, tol=1e-10) < self.dim - 1:
            raise SingularForm("d(alpha) is degenerate; form is not contact here")
        system = np.vstack((M, a_row))
        target = np.zeros(self.dim + 1)
        target[-1] = 1.0
        v, residual, rank, _ = np.linalg.lstsq(system, target, rcond=None)
        if rank < self.dim:
            raise SingularForm("Reeb system is rank-deficient")
        if np.max(np.abs(system @ v - target)) > 1e-8:
            raise SingularForm("no vector satisfies i_V d(alpha) = 0, i_V alpha = 1")
        return v

    def trajectory(self, x0, t_end, step):
        """RK4 integral curve of the Reeb field; rows ordered like vars."""
        y = np.asarray(x0, dtype=float).copy()
        rhs = lambda state: self.at(state)
        n_full, remainder = _step_schedule(t_end, step)
        times = [0.0]
        states = [y.copy()]
        t = 0.0
        for i in range(n_full + (1 if remainder else 0)):
            h = step if i < n_full else remainder
            y = _rk4_step(rhs, y, h)
            t += h
            if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > _BLOWUP:
                raise NonFiniteState(f"Reeb trajectory blew up near t = {t}")
            times.append(t)
            states.append(y.copy())
        return np.asarray(times), np.asarray(states)


def reeb_field(alpha, chart=None):
    """Reeb field of a contact form (normalization i_V alpha = 1)."""
    vars = chart.vars if chart is not None else alpha.vars
    field = ReebField(alpha, vars)
    # Reject forms whose d(alpha) is degenerate everywhere (e.g. alpha = du):
    # probe at a generic point.
    probe = {name: 0.1 + 0.05 * i for i, name in enumerate(field.vars)}
    field.at(probe)
    return field


# --- reparametrization invariance ------------------------------------------------


def _arclength(states):
    seg = np.linalg.norm(np.diff(states, axis=0), axis=1)
    return np.concatenate(([0.0], np.cumsum(seg)))


def _deviation_from(states_a, states_b):
    """Max distance from points of A to the arclength-matched interpolant of B."""
    s_a = _arclength(states_a)
    s_b = _arclength(states_b)
    keep = s_a <= s_b[-1] + 1e-12
    interp = np.column_stack(
        [np.interp(s_a[keep], s_b, states_b[:, j]) for j in range(states_b.shape[1])]
    )
    return float(np.max(np.linalg.norm(states_a[keep] - interp, axis=1)))


def reparametrization_check(ham, phi, dphi, x0, t_end, step):
    """Geometric deviation between the flows of F and phi(F).

    phi must be monotone with phi(0) = 0 and F(x0) = 0, in which case the
    two integral curves coincide as point sets; the return value is the
    maximum distance from samples of the shorter curve to the interpolated
    longer one.
    """
    rescaled = NumericHamiltonian(
        ham.n,
        lambda point: phi(ham.value(point)),
        lambda point: _scaled_grad(ham, dphi, point),
        source=("reparametrized", ham.source),
    )
    traj_f = flow(ham, x0, t_end, step)
    traj_g = flow(rescaled, x0, t_end, step)
    a, b = traj_f.states, traj_g.states
    if _arclength(a)[-1] <= _arclength(b)[-1]:
        return _deviation_from(a, b)
    return _deviation_from(b, a)


def _scaled_grad(ham, dphi, point):
    scale = dphi(ham.value(point))
    f_u, f_q, f_p = ham.grad(point)
    return scale * f_u, scale * f_q, scale * f_p


# --- Legendrian lifts ---------------------------------------------------------------


def legendrian_lift(q_samples, p_samples, u0=0.0, tol=1e-8):
    """Lift a closed plane curve to a Legendrian curve in (u, q, p).

    Input arrays must repeat the starting point at the end.  u is the
    cumulative trapezoid integral of p dq, so every discrete segment
    satisfies delta_u = pbar * delta_q exactly and the lift closes iff the
    signed area integral \\oint p dq vanishes (within tol * curve scale).
    """
    q_samples = np.asarray(q_samples, dtype=float)
    p_samples = np.asarray(p_samples, dtype=float)
    if q_samples.shape != p_samples.shape or q_samples.ndim != 1:
        raise ValueError("q and p must be equal-length 1-D arrays")
    if abs(q_samples[0] - q_samples[-1]) > 1e-12 or abs(p_samples[0] - p_samples[-1]) > 1e-12:
        raise ValueError("curve must be explicitly closed (first sample repeated at end)")
    dq = np.diff(q_samples)
    pbar = 0.5 * (p_samples[:-1] + p_samples[1:])
    increments = pbar * dq
    area = float(np.sum(increments))
    arclength = float(np.sum(np.hypot(np.diff(q_samples), np.diff(p_samples))))
    scale = max(1.0, arclength)
    if abs(area) > tol * scale:
        raise NonZeroArea(
            f"closed curve has oint p dq = {area:.6g}; no closed Legendrian lift"
        )
    u = u0 + np.concatenate(([0.0], np.cumsum(increments)))
    return u, q_samples, p_samples
