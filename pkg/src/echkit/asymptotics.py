"""Linearized flow at the special orbit h and spectra of asymptotic operators.

The Weinstein 1-handle is the hypersurface ``{x^2/4 + y^2/4 + z^2 - w^2/2 = 1}``
in ``(R^4, dx^dy + dz^dw)``.  Its Reeb flow along the equator ``h`` is
linearized by ``Phi(t) = exp(A t)`` with

    A = [[0, 1/2, 0, 0], [-1/2, 0, 0, 0], [0, 0, 0, 1], [0, 0, 2, 0]].

The upper block rotates the ``(x, y)`` plane (period ``4 pi``) and the lower
block, acting on the contact plane ``<d_z, d_w>``, is hyperbolic with
eigenvalues ``exp(+-sqrt(2) t)`` and eigenvectors that never rotate, so the
Conley-Zehnder index of ``h`` in the handle trivialization is 0.

Large entries (``cosh(10 sqrt 2) ~ 7e5``) make double precision too coarse
for 1e-9 absolute comparisons, so the checks run in mpmath at 40 digits.

The asymptotic operator is ``L = J0 d/dt + S`` on loops of period 1, with
``J0 = [[0, -1], [1, 0]]``.  It is discretized in the real Fourier basis up
to frequency ``n_modes``.  For constant ``S`` the frequencies decouple, so
the Galerkin matrix is exact on the retained modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

__all__ = [
    "A_MATRIX",
    "J4",
    "J0",
    "S_H",
    "PERIOD_H",
    "FlowSample",
    "FlowReport",
    "weinstein_flow",
    "flow_report",
    "flow_cz",
    "ResolutionError",
    "SpectrumReport",
    "asymptotic_spectrum",
    "spectrum_report",
    "continuation_sweep",
]

DPS = 40

A_MATRIX = np.array(
    [[0.0, 0.5, 0.0, 0.0], [-0.5, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 2.0, 0.0]]
)
J4 = np.array([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]], dtype=float)
J0 = np.array([[0.0, -1.0], [1.0, 0.0]])
# S = -J0 B for the lower block B = [[0, 1], [2, 0]] of A
S_H = np.array([[2.0, 0.0], [0.0, -1.0]])
PERIOD_H = 4 * math.pi


def _mp_A():
    return mpmath.matrix([[0, mpmath.mpf(1) / 2, 0, 0], [-mpmath.mpf(1) / 2, 0, 0, 0], [0, 0, 0, 1], [0, 0, 2, 0]])


def _mp_J4():
    return mpmath.matrix([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]])


def _closed_form_mp(t) -> mpmath.matrix:
    t = mpmath.mpf(t)
    r2 = mpmath.sqrt(2)
    c, s = mpmath.cos(t / 2), mpmath.sin(t / 2)
    ch, sh = mpmath.cosh(r2 * t), mpmath.sinh(r2 * t)
    return mpmath.matrix([
        [c, s, 0, 0],
        [-s, c, 0, 0],
        [0, 0, ch, sh / r2],
        [0, 0, r2 * sh, ch],
    ])


def _spectral_expm_factory():
    """``t -> V exp(D t) V^-1`` from a numerical eigendecomposition of ``A``.

    The eigendecomposition is computed once by mpmath's eigensolver, which
    knows nothing about the closed form; evaluating at many times is then
    cheap.
    """
    E, V = mpmath.eig(_mp_A())
    Vinv = mpmath.inverse(V)

    def expm_t(t):
        D = mpmath.diag([mpmath.exp(e * t) for e in E])
        M = V * D * Vinv
        return mpmath.matrix([[mpmath.re(M[i, j]) for j in range(4)] for i in range(4)])

    return expm_t


def _mp_norm_inf(m) -> mpmath.mpf:
    return max(abs(m[i, j]) for i in range(m.rows) for j in range(m.cols))


@dataclass(frozen=True, eq=False)
class FlowSample:
    """``Phi(t)`` as a float array, with a 40-digit copy for the checks."""

    t: float
    matrix: np.ndarray
    exact: mpmath.matrix = field(repr=False)

    @property
    def symplectic_error(self) -> float:
        """``||Phi^T J Phi - J||_inf`` evaluated at 40 digits."""
        with mpmath.workdps(DPS):
            J = _mp_J4()
            return float(_mp_norm_inf(self.exact.T * J * self.exact - J))

    @property
    def det(self) -> float:
        with mpmath.workdps(DPS):
            return float(mpmath.det(self.exact))

    def upper(self) -> np.ndarray:
        return self.matrix[:2, :2]

    def lower(self) -> np.ndarray:
        return self.matrix[2:, 2:]


def weinstein_flow(t: float) -> FlowSample:
    """Closed form of ``exp(A t)``."""
    with mpmath.workdps(DPS):
        m = _closed_form_mp(t)
        arr = np.array([[float(m[i, j]) for j in range(4)] for i in range(4)])
    return FlowSample(float(t), arr, m)


def flow_cz(n_steps: int = 400) -> int:
    """CZ of ``h`` in the handle trivialization from the lower block.

    An eigenvector ``v`` of the lower block is followed along
    ``Phi_low(t) v`` for one period of ``h``; its total rotation is
    ``k pi`` and the index is ``k``.
    """
    r2 = math.sqrt(2)
    v = np.array([1.0, r2])  # eigenvector of [[0, 1], [2, 0]] for sqrt(2)
    angles = []
    for t in np.linspace(0.0, PERIOD_H, n_steps + 1):
        # rescale to avoid overflow; the direction is what matters
        w = weinstein_flow(float(t)).lower() @ v
        w = w / np.linalg.norm(w)
        angles.append(math.atan2(w[1], w[0]))
    total = float(np.sum(np.diff(np.unwrap(angles))))
    k = round(total / math.pi)
    if abs(total - k * math.pi) > 1e-6:
        raise ValueError(f"eigenvector rotation {total} is not a multiple of pi")
    return k


@dataclass(frozen=True)
class FlowReport:
    times: tuple[float, ...]
    identity_error: float
    expm_error: float
    group_law_error: float
    symplectic_error: float
    det_error: float
    block_error: float
    derivative_rel_error: float
    lower_eigenvalues_real: bool
    lower_eigenvalues_reciprocal_error: float
    cz_h: int
    tol: float = 1e-9
    derivative_tol: float = 1e-6

    def checks(self) -> dict[str, bool]:
        return {
            "identity at t=0": self.identity_error <= self.tol,
            "matches independent expm": self.expm_error <= self.tol,
            "group law": self.group_law_error <= self.tol,
            "symplectic": self.symplectic_error <= self.tol,
            "det = 1": self.det_error <= self.tol,
            "block structure": self.block_error <= self.tol,
            "Phi' = A Phi (finite differences)": self.derivative_rel_error <= self.derivative_tol,
            "lower block hyperbolic": self.lower_eigenvalues_real and self.lower_eigenvalues_reciprocal_error <= self.tol,
            "CZ(h) = 0": self.cz_h == 0,
        }

    @property
    def ok(self) -> bool:
        return all(self.checks().values())


DEFAULT_TIMES = tuple(round(0.1 * k, 10) for k in range(1, 101))


def flow_report(times=DEFAULT_TIMES, fd_step: float = 1e-4) -> FlowReport:
    """Verify the closed form of ``Phi(t)`` against independent computations.

    * ``expm_error``: max over ``times`` of ``||Phi(t) - exp(A t)||_inf`` where
      ``exp(A t)`` comes from a numerical eigendecomposition of ``A``, and at
      a few sample times also from mpmath's Taylor-series ``expm``.
    * ``group_law_error``: ``||Phi(s + t) - Phi(s) Phi(t)||_inf`` on pairs of times.
    * ``derivative_rel_error``: central differences of step ``fd_step`` against
      ``A Phi``, divided by ``||Phi||_inf`` because the entries grow like
      ``cosh(sqrt 2 t)``.
    """
    times = tuple(float(t) for t in times)
    with mpmath.workdps(DPS):
        A = _mp_A()
        J = _mp_J4()
        eye = mpmath.eye(4)
        ident = float(_mp_norm_inf(_closed_form_mp(0) - eye))
        expm_err = sym_err = det_err = block_err = recip_err = 0.0
        deriv_err = 0.0
        real = True
        h = mpmath.mpf(fd_step)
        r2 = mpmath.sqrt(2)
        spectral = _spectral_expm_factory()
        taylor_times = {times[0], times[len(times) // 2], times[-1]} if times else set()
        for t in times:
            P = _closed_form_mp(t)
            expm_err = max(expm_err, float(_mp_norm_inf(P - spectral(mpmath.mpf(t)))))
            if t in taylor_times:
                expm_err = max(expm_err, float(_mp_norm_inf(P - mpmath.expm(A * mpmath.mpf(t)))))
            sym_err = max(sym_err, float(_mp_norm_inf(P.T * J * P - J)))
            det_err = max(det_err, float(abs(mpmath.det(P) - 1)))
            tt = mpmath.mpf(t)
            rot = mpmath.matrix([[mpmath.cos(tt / 2), mpmath.sin(tt / 2)], [-mpmath.sin(tt / 2), mpmath.cos(tt / 2)]])
            off = max(abs(P[i, j]) for i in range(4) for j in range(4) if (i < 2) != (j < 2))
            up = max(abs(P[i, j] - rot[i, j]) for i in range(2) for j in range(2))
            block_err = max(block_err, float(max(off, up)))
            fd = (_closed_form_mp(tt + h) - _closed_form_mp(tt - h)) / (2 * h)
            deriv_err = max(deriv_err, float(_mp_norm_inf(fd - A * P) / _mp_norm_inf(P)))
            low = mpmath.matrix([[P[2, 2], P[2, 3]], [P[3, 2], P[3, 3]]])
            ev = mpmath.eig(low, left=False, right=False)
            if any(abs(mpmath.im(e)) > mpmath.mpf(10) ** -30 for e in ev):
                real = False
            ev = sorted(mpmath.re(e) for e in ev)
            expected = sorted([mpmath.exp(r2 * tt), mpmath.exp(-r2 * tt)])
            recip_err = max(
                recip_err,
                float(abs(ev[0] * ev[1] - 1)),
                float(max(abs(a - b) / b for a, b in zip(ev, expected))),
            )
        group = 0.0
        grid = times[:: max(1, len(times) // 10)]
        for s in grid:
            for t in grid:
                d = _closed_form_mp(mpmath.mpf(s) + mpmath.mpf(t)) - _closed_form_mp(s) * _closed_form_mp(t)
                group = max(group, float(_mp_norm_inf(d)))
    return FlowReport(
        times=times,
        identity_error=ident,
        expm_error=expm_err,
        group_law_error=group,
        symplectic_error=sym_err,
        det_error=det_err,
        block_error=block_err,
        derivative_rel_error=deriv_err,
        lower_eigenvalues_real=real,
        lower_eigenvalues_reciprocal_error=recip_err,
        cz_h=flow_cz(),
    )


class ResolutionError(RuntimeError):
    """The discretization is too coarse to read off a winding number."""


def _operator_matrix(S: np.ndarray, K: int) -> np.ndarray:
    """Galerkin matrix of ``J0 d/dt + S`` in the orthonormal real Fourier basis.

    Scalar basis order: ``1, sqrt2 cos(2 pi t), sqrt2 sin(2 pi t), ...,
    sqrt2 cos(2 pi K t), sqrt2 sin(2 pi K t)``; vector basis is
    component-major.
    """
    m = 2 * K + 1
    D = np.zeros((m, m))
    for j in range(1, K + 1):
        c, s = 2 * j - 1, 2 * j
        w = 2 * math.pi * j
        D[s, c] = -w  # d/dt cos = -w sin
        D[c, s] = w  # d/dt sin = w cos
    return np.kron(J0, D) + np.kron(S, np.eye(m))


def _basis_values(K: int, ts: np.ndarray) -> np.ndarray:
    cols = [np.ones_like(ts)]
    for j in range(1, K + 1):
        cols.append(math.sqrt(2) * np.cos(2 * math.pi * j * ts))
        cols.append(math.sqrt(2) * np.sin(2 * math.pi * j * ts))
    return np.stack(cols, axis=1)


def _winding(eta: np.ndarray) -> int:
    """Winding number of a closed planar curve sampled at ``len(eta)`` points (last != first)."""
    r = np.hypot(eta[:, 0], eta[:, 1])
    if r.min() <= 1e-10:
        raise ResolutionError(f"eigenfunction nearly vanishes (min |eta| = {r.min():.3g}); winding is undefined")
    ang = np.arctan2(eta[:, 1], eta[:, 0])
    steps = np.diff(np.concatenate([ang, ang[:1]]))
    steps = (steps + math.pi) % (2 * math.pi) - math.pi
    if np.abs(steps).max() >= math.pi / 2:
        raise ResolutionError("phase jumps too large between mesh points; increase the mesh or n_modes")
    total = steps.sum() / (2 * math.pi)
    w = round(total)
    if abs(total - w) > 1e-6:
        raise ResolutionError(f"accumulated phase {total} is not an integer number of turns")
    return int(w)


def asymptotic_spectrum(S, n_modes: int = 64, mesh: int | None = None) -> list[tuple[float, int]]:
    """Eigenvalues and winding numbers of ``J0 d/dt + S`` on period-1 loops, sorted by eigenvalue."""
    S = np.asarray(S, dtype=float)
    if S.shape != (2, 2) or not np.allclose(S, S.T, atol=0, rtol=0):
        raise ValueError("S must be a symmetric 2x2 matrix")
    if n_modes < 8:
        raise ValueError("n_modes must be at least 8")
    K = int(n_modes)
    vals, vecs = np.linalg.eigh(_operator_matrix(S, K))
    npts = mesh if mesh is not None else 16 * (K + 1)
    ts = np.arange(npts) / npts
    B = _basis_values(K, ts)
    m = 2 * K + 1
    out = []
    for k in range(len(vals)):
        v = vecs[:, k]
        eta = np.stack([B @ v[:m], B @ v[m:]], axis=1)
        out.append((float(vals[k]), _winding(eta)))
    return out


def _group(spec: list[tuple[float, int]], tol: float) -> list[list[tuple[float, int]]]:
    groups: list[list[tuple[float, int]]] = []
    for lam, w in spec:
        if groups and abs(lam - groups[-1][-1][0]) <= tol:
            groups[-1].append((lam, w))
        else:
            groups.append([(lam, w)])
    return groups


@dataclass(frozen=True)
class SpectrumReport:
    spectrum: tuple[tuple[float, int], ...]
    monotone: bool
    class_sizes: dict[int, int]
    two_dimensional: bool
    w_plus: int  # largest winding among positive eigenvalues
    w_minus: int  # smallest winding among negative eigenvalues
    cz: int

    @property
    def ok(self) -> bool:
        return self.monotone and self.two_dimensional


def spectrum_report(S, n_modes: int = 64, degeneracy_tol: float = 1e-8) -> SpectrumReport:
    """Check the winding lemmas on a computed spectrum.

    * monotonicity: windings do not increase with the eigenvalue, and a
      degenerate eigenvalue group carries a single winding;
    * every winding class strictly inside the resolved band ``|w| < n_modes``
      holds exactly two eigenvalues counted with multiplicity;
    * the extremal windings around 0 give ``CZ = w_plus + w_minus``.
    """
    spec = asymptotic_spectrum(S, n_modes)
    groups = _group(spec, degeneracy_tol)
    monotone = all(len({w for _, w in g}) == 1 for g in groups)
    gw = [g[0][1] for g in groups]
    monotone = monotone and all(a >= b for a, b in zip(gw, gw[1:]))
    sizes: dict[int, int] = {}
    for _, w in spec:
        sizes[w] = sizes.get(w, 0) + 1
    inner = {w: c for w, c in sizes.items() if abs(w) < n_modes}
    two = all(c == 2 for c in inner.values())
    pos = [w for lam, w in spec if lam > 0]
    neg = [w for lam, w in spec if lam < 0]
    if not pos or not neg:
        raise ResolutionError("spectrum has no positive or no negative eigenvalue at this resolution")
    wp, wm = max(pos), min(neg)
    return SpectrumReport(tuple(spec), monotone, dict(sorted(sizes.items())), two, wp, wm, wp + wm)


def continuation_sweep(S, scales, n_modes: int = 16) -> list[list[int]]:
    """Windings (in eigenvalue order) of ``lambda S`` for each ``lambda`` in ``scales``."""
    S = np.asarray(S, dtype=float)
    return [[w for _, w in asymptotic_spectrum(lam * S, n_modes)] for lam in scales]
