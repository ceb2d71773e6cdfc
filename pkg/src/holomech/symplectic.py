"""Compatible symplectic structures on R^4 and their Darboux normal form.

The bracket {{A, B}} = sum_ij J_ij dA/dw_i dB/dw_j reproduces the complex
Hamilton equations dz/dt = {{z, H}}, dp/dt = {{p, H}} exactly when J belongs
to a four-parameter family indexed by two reals (a, b) and one complex
number alpha, subject to |alpha|^2 - a b != 1 (the structure degenerates on
that surface).  The standard symplectic matrix is *not* in the family: the
conventional Poisson bracket of any coordinate with an analytic H vanishes
identically.

Every member of the family is isomorphic to the standard structure.  This
module constructs the isomorphism explicitly: an orthogonal matrix S with
S^T J S in block form with eigen-magnitudes r+ >= r- > 0 on the blocks, and
the rescaled coordinates xi = D^{-1/2} S^T w (D = diag(r+, r+, r-, r-)) in
which the bracket becomes the standard one.

All operations are pure and matrices are freshly allocated, so parameter
sweeps can run concurrently without shared state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .hamiltonian import SystemSpec

__all__ = [
    "DEGENERACY_TOL",
    "CONDITIONING_WARN_R_MINUS",
    "DegenerateStructureError",
    "SymplecticParams",
    "J_STANDARD",
    "build_complex_J",
    "build_real_J",
    "eigenvalue_magnitudes",
    "j_prime",
    "DarbouxFrame",
    "darboux_frame",
    "darboux_map",
    "inverse_darboux_map",
    "frame_residuals",
    "ScalarField",
    "coordinate_field",
    "position_field",
    "momentum_field",
    "hamiltonian_field",
    "hamiltonian_real_field",
    "hamiltonian_imag_field",
    "bracket",
    "standard_bracket",
    "verify_compatibility",
    "format_matrix",
]

# Absolute tolerance on |alpha|^2 - a b - 1 below which the structure is
# treated as non-invertible.
DEGENERACY_TOL = 1e-12

# Below this r- the Darboux rescaling amplifies rounding; reports carry a
# conditioning warning.
CONDITIONING_WARN_R_MINUS = 1e-6


class DegenerateStructureError(ValueError):
    """The parameters sit on (or within tolerance of) |alpha|^2 - ab = 1."""


@dataclass(frozen=True)
class SymplecticParams:
    """Free parameters (a, b, alpha) of the compatible family."""

    a: float
    b: float
    alpha: complex

    @property
    def degeneracy_defect(self) -> float:
        """|alpha|^2 - a b - 1; the structure is invertible iff this is nonzero."""
        al = complex(self.alpha)
        return al.real * al.real + al.imag * al.imag - self.a * self.b - 1.0

    @property
    def is_degenerate(self) -> bool:
        return abs(self.degeneracy_defect) <= DEGENERACY_TOL


def _as_params(params) -> SymplecticParams:
    if isinstance(params, SymplecticParams):
        return params
    a, b, alpha = params
    return SymplecticParams(float(a), float(b), complex(alpha))


J_STANDARD = np.array([
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0, 0.0],
])
J_STANDARD.setflags(write=False)


def build_complex_J(params) -> np.ndarray:
    """Bracket matrix over the coordinates (z, p, z*, p*).

    Antisymmetric by construction; degeneracy is flagged on the parameters,
    never raised here.
    """
    p = _as_params(params)
    a, b, al = p.a, p.b, complex(p.alpha)
    upper = np.zeros((4, 4), dtype=complex)
    upper[0, 1] = 1.0
    upper[0, 2] = 1j * a
    upper[0, 3] = al
    upper[1, 2] = -al.conjugate()
    upper[1, 3] = 1j * b
    upper[2, 3] = 1.0
    return upper - upper.T


def build_real_J(params) -> np.ndarray:
    """Bracket matrix over the real coordinates w = (x, p, y, q).

    Raises DegenerateStructureError when |alpha|^2 - ab = 1 (within
    tolerance), where the matrix is not invertible.
    """
    p = _as_params(params)
    if p.is_degenerate:
        raise DegenerateStructureError(
            f"|alpha|^2 - a*b = 1 within {DEGENERACY_TOL:g} "
            f"(defect {p.degeneracy_defect:.3e}); structure not invertible")
    a, b = p.a, p.b
    ar, ai = complex(p.alpha).real, complex(p.alpha).imag
    upper = np.zeros((4, 4))
    upper[0, 1] = 0.5 * (1.0 + ar)
    upper[0, 2] = 0.5 * (-a)
    upper[0, 3] = 0.5 * (-ai)
    upper[1, 2] = 0.5 * (-ai)
    upper[1, 3] = 0.5 * (-b)
    upper[2, 3] = 0.5 * (-1.0 + ar)
    return upper - upper.T


def eigenvalue_magnitudes(params) -> tuple[float, float]:
    """(r+, r-): the eigenvalues of the real bracket matrix are +-i r+-.

    Uses a cancellation-free rearrangement: with
    A = a^2 + b^2 + 2(|alpha|^2 + 1) and
    B = sqrt(((a+b)^2 + 4)((a-b)^2 + 4 |alpha|^2)) the textbook forms are
    r+- = sqrt((A +- B)/8), and A^2 - B^2 factors exactly as
    4 (|alpha|^2 - ab - 1)^2, giving

        r+ = sqrt((A + B)/8),     r- = ||alpha|^2 - ab - 1| / sqrt(2 (A + B)).

    The second form avoids the catastrophic cancellation of A - B near the
    degenerate surface, so r- vanishes to machine precision exactly when the
    degeneracy defect does.
    """
    p = _as_params(params)
    a, b = p.a, p.b
    al = complex(p.alpha)
    s = al.real * al.real + al.imag * al.imag
    A = a * a + b * b + 2.0 * (s + 1.0)
    B = math.sqrt(((a + b) ** 2 + 4.0) * ((a - b) ** 2 + 4.0 * s))
    r_plus = math.sqrt((A + B) / 8.0)
    r_minus = abs(p.degeneracy_defect) / math.sqrt(2.0 * (A + B))
    return r_plus, r_minus


def j_prime(r_plus: float, r_minus: float) -> np.ndarray:
    """Block normal form with +r+ and +r- in the (1,2) and (3,4) entries."""
    return np.array([
        [0.0, r_plus, 0.0, 0.0],
        [-r_plus, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, r_minus],
        [0.0, 0.0, -r_minus, 0.0],
    ])


@dataclass(frozen=True, eq=False)
class DarbouxFrame:
    """Orthogonal change of basis S plus the eigen-magnitudes (r+, r-).

    S^T J S is the block form ``j_prime(r_plus, r_minus)``; the Darboux
    coordinates are xi = D^{-1/2} S^T w with D = diag(r+, r+, r-, r-).
    """

    S: np.ndarray
    r_plus: float
    r_minus: float

    def scaling(self) -> np.ndarray:
        return np.diag([self.r_plus, self.r_plus, self.r_minus, self.r_minus])

    def to_darboux(self, w) -> np.ndarray:
        return darboux_map(self, w)

    def from_darboux(self, xi) -> np.ndarray:
        return inverse_darboux_map(self, xi)


# Column seeds for the deterministic kernel-basis orthogonalization, in the
# order x, p, q, y: with this order the zero-parameter frame reduces to the
# signed permutation selecting (x, p, q, y), i.e. the familiar coordinates
# x1 = sqrt(2) x, p1 = sqrt(2) p, x2 = sqrt(2) q, p2 = sqrt(2) y.
_SEED_ORDER = (0, 1, 3, 2)


def darboux_frame(params) -> DarbouxFrame:
    """Construct the orthogonal frame mapping J to its block normal form.

    The two invariant planes of J are the kernels of J^2 + r^2 I for
    r = r+, r-.  Each plane's first basis vector u1 is chosen
    deterministically (orthogonalization of the kernel projector's columns
    in a fixed seed order, orientation fixed so u1's first nonzero component
    is positive) and its partner is u2 = -(1/r) J u1, which makes the
    corresponding block entry exactly +r.  Reproducible across runs and
    platforms up to floating-point noise.
    """
    p = _as_params(params)
    J = build_real_J(p)  # raises on degenerate params
    r_plus, r_minus = eigenvalue_magnitudes(p)
    if r_minus <= DEGENERACY_TOL:
        raise DegenerateStructureError(
            f"r_minus = {r_minus:.3e} <= {DEGENERACY_TOL:g}; no Darboux frame")

    if r_plus - r_minus <= 1e-9 * max(1.0, r_plus):
        # Equal eigen-magnitudes (a = b, alpha = 0): J^2 = -r^2 I and the
        # kernel is all of R^4; Gram-Schmidt against already-accepted
        # columns picks the remaining plane.
        projectors = (np.eye(4), np.eye(4))
    else:
        evals, evecs = np.linalg.eigh(J @ J)  # ascending: -r+^2 pair first
        plus = evecs[:, :2]
        minus = evecs[:, 2:]
        projectors = (plus @ plus.T, minus @ minus.T)

    columns: list[np.ndarray] = []
    for r, proj in zip((r_plus, r_minus), projectors):
        u1 = None
        for k in _SEED_ORDER:
            c = proj[:, k].copy()
            for u in columns:
                c -= (u @ c) * u
            norm = np.linalg.norm(c)
            if norm > 1e-8:
                u1 = c / norm
                break
        if u1 is None:  # projector rank defect; cannot happen for valid params
            raise DegenerateStructureError("kernel basis extraction failed")
        first_nonzero = int(np.argmax(np.abs(u1) > 1e-9))
        if u1[first_nonzero] < 0.0:
            u1 = -u1
        u2 = -(J @ u1) / r
        columns.extend((u1, u2))

    return DarbouxFrame(np.column_stack(columns), r_plus, r_minus)


def darboux_map(frame: DarbouxFrame, w) -> np.ndarray:
    """Symplectic coordinates xi_a = r^{-1/2} sum_k S_{k a} w_k."""
    w = np.asarray(w, dtype=float)
    scale = np.array([frame.r_plus, frame.r_plus, frame.r_minus, frame.r_minus])
    return (frame.S.T @ w) / np.sqrt(scale)


def inverse_darboux_map(frame: DarbouxFrame, xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    scale = np.array([frame.r_plus, frame.r_plus, frame.r_minus, frame.r_minus])
    return frame.S @ (xi * np.sqrt(scale))


def frame_residuals(frame: DarbouxFrame, J: np.ndarray) -> dict:
    """Max-norm residuals of the three defining frame properties."""
    S = frame.S
    block = S.T @ J @ S - j_prime(frame.r_plus, frame.r_minus)
    orth = S.T @ S - np.eye(4)
    d_inv_half = np.diag(1.0 / np.sqrt(np.array(
        [frame.r_plus, frame.r_plus, frame.r_minus, frame.r_minus])))
    lin = d_inv_half @ S.T
    canon = lin @ J @ lin.T - J_STANDARD
    return {
        "block_form": float(np.max(np.abs(block))),
        "orthogonality": float(np.max(np.abs(orth))),
        "canonicity": float(np.max(np.abs(canon))),
    }


# --------------------------------------------------------------------------
# Brackets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarField:
    """Scalar function of w = (x, p, y, q) with an optional exact gradient.

    Fields without a gradient fall back to central differences with step
    1e-6 * max(1, |w|).
    """

    func: Callable[[np.ndarray], complex]
    grad: Callable[[np.ndarray], np.ndarray] | None = None


def _as_field(f) -> ScalarField:
    return f if isinstance(f, ScalarField) else ScalarField(func=f)


def _gradient(field: ScalarField, w: np.ndarray) -> np.ndarray:
    if field.grad is not None:
        return np.asarray(field.grad(w))
    step = 1e-6 * max(1.0, float(np.linalg.norm(w)))
    g = np.zeros(4, dtype=complex)
    for k in range(4):
        wp = w.copy()
        wm = w.copy()
        wp[k] += step
        wm[k] -= step
        g[k] = (field.func(wp) - field.func(wm)) / (2.0 * step)
    return g


def coordinate_field(k: int) -> ScalarField:
    e = np.zeros(4)
    e[k] = 1.0
    return ScalarField(func=lambda w: w[k], grad=lambda w: e)


def position_field() -> ScalarField:
    """The complex position z = x + i y as a scalar field on R^4."""
    g = np.array([1.0, 0.0, 1j, 0.0])
    return ScalarField(func=lambda w: complex(w[0], w[2]), grad=lambda w: g)


def momentum_field() -> ScalarField:
    """The complex momentum p = p + i q as a scalar field on R^4."""
    g = np.array([0.0, 1.0, 0.0, 1j])
    return ScalarField(func=lambda w: complex(w[1], w[3]), grad=lambda w: g)


def hamiltonian_field(spec: SystemSpec) -> ScalarField:
    """Complex H as a field on R^4, with its exact gradient.

    dH/dx = v', dH/dp = p/m, dH/dy = i v', dH/dq = i p/m, using analyticity
    of the potential.
    """
    def func(w):
        z = complex(w[0], w[2])
        p = complex(w[1], w[3])
        return p * p / (2.0 * spec.mass) + spec.v(z)

    def grad(w):
        z = complex(w[0], w[2])
        p_over_m = complex(w[1], w[3]) / spec.mass
        dv = spec.dv(z)
        return np.array([dv, p_over_m, 1j * dv, 1j * p_over_m])

    return ScalarField(func=func, grad=grad)


def hamiltonian_real_field(spec: SystemSpec) -> ScalarField:
    """H_r with exact gradient (Re v', p/m, -Im v', -q/m)."""
    from .hamiltonian import hamiltonian_split

    def func(w):
        return hamiltonian_split(spec, w)[0]

    def grad(w):
        dv = spec.dv(complex(w[0], w[2]))
        m = spec.mass
        return np.array([dv.real, w[1] / m, -dv.imag, -w[3] / m])

    return ScalarField(func=func, grad=grad)


def hamiltonian_imag_field(spec: SystemSpec) -> ScalarField:
    """H_i with exact gradient (Im v', q/m, Re v', p/m)."""
    from .hamiltonian import hamiltonian_split

    def func(w):
        return hamiltonian_split(spec, w)[1]

    def grad(w):
        dv = spec.dv(complex(w[0], w[2]))
        m = spec.mass
        return np.array([dv.imag, w[3] / m, dv.real, w[1] / m])

    return ScalarField(func=func, grad=grad)


def bracket(field_a, field_b, J: np.ndarray, w) -> complex:
    """{{A, B}} = sum_ij J_ij dA/dw_i dB/dw_j at the point w.

    Bilinear and antisymmetric in (A, B); real-valued fields give a bracket
    with exactly zero imaginary part for real J.
    """
    w = np.asarray(w, dtype=float)
    ga = _gradient(_as_field(field_a), w)
    gb = _gradient(_as_field(field_b), w)
    return complex(ga @ (np.asarray(J) @ gb))


def standard_bracket(field_a, field_b, w) -> complex:
    """Conventional Poisson bracket {A, B} (standard structure)."""
    return bracket(field_a, field_b, J_STANDARD, w)


def verify_compatibility(params, spec: SystemSpec, w) -> dict:
    """Check that the bracket of (z, p) with H reproduces Hamilton's equations.

    Residuals |{{z,H}} - p/m| and |{{p,H}} + v'(z)| are independent of the
    structure parameters; both must be <= 1e-10 for the report to pass.
    Failures (and degeneracy) are reported, never raised.
    """
    p = _as_params(params)
    w = np.asarray(w, dtype=float)
    report: dict = {
        "params": {"a": p.a, "b": p.b,
                   "alpha_re": complex(p.alpha).real,
                   "alpha_im": complex(p.alpha).imag},
        "degenerate": p.is_degenerate,
        "tolerance": 1e-10,
    }
    r_plus, r_minus = eigenvalue_magnitudes(p)
    report["r_plus"] = r_plus
    report["r_minus"] = r_minus
    if p.is_degenerate:
        report["residuals"] = None
        report["passed"] = False
        return report
    if r_minus < CONDITIONING_WARN_R_MINUS:
        report["warning"] = (f"r_minus = {r_minus:.3e} < "
                             f"{CONDITIONING_WARN_R_MINUS:g}: near-degenerate "
                             "structure, results may be ill-conditioned")
    J = build_real_J(p)
    H = hamiltonian_field(spec)
    z_mom = complex(w[1], w[3])
    res_z = abs(bracket(position_field(), H, J, w) - z_mom / spec.mass)
    res_p = abs(bracket(momentum_field(), H, J, w) + spec.dv(complex(w[0], w[2])))
    report["residuals"] = {"position_equation": res_z, "momentum_equation": res_p}
    report["passed"] = bool(res_z <= 1e-10 and res_p <= 1e-10)
    return report


def format_matrix(M: np.ndarray) -> str:
    """Row-major rendering with 17 significant digits per entry."""
    rows = []
    for row in np.asarray(M):
        rows.append("  ".join(f"{v:.17g}" if not isinstance(v, complex)
                              else f"{v.real:.17g}{v.imag:+.17g}i" for v in row))
    return "\n".join(rows)
