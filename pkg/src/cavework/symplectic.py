"""Exponentials of quadratic boson forms via their characteristic matrices.

An operator exp(1/2 alpha S alpha), with alpha = (a_1..a_n, a_1^+..a_n^+)
and S complex symmetric, maps to the 2n x 2n matrix exp(sigma S); operator
products map to matrix products and

    Tr J = [(-1)^n det([J] - I)]^(-1/2).

The square root's branch is the delicate part.  Thermal-weighted traces
are fixed by a reference eigenvalue pairing; characteristic-function
evaluations are fixed by homotopy from (u, v) = (0, 0), where the
normalized value is exactly 1.

Scalar prefactors (the 1/2-shifts of normal ordering) are never folded
into the matrices.  In the characteristic-function ratio they cancel
identically: the two measurement exponentials carry opposite shifts, the
evolution appears conjugated, and the thermal shift is (u, v)-independent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import BranchTrackingError, SymplecticityError, TraceDivergenceError

__all__ = [
    "CharacteristicMatrix",
    "QuadraticForm",
    "char_matrix",
    "charfun_from_generator",
    "charfun_general",
    "compose",
    "dump_char_matrices",
    "number_operator_form",
    "sigma_matrix",
    "symplectic_inverse",
    "trace_from_char",
]


def sigma_matrix(n: int) -> np.ndarray:
    s = np.zeros((2 * n, 2 * n))
    s[:n, n:] = np.eye(n)
    s[n:, :n] = -np.eye(n)
    return s


@dataclass(frozen=True)
class QuadraticForm:
    """The operator exp(1/2 alpha S alpha) for complex symmetric S.

    modes is optional bookkeeping: which cavity mode sits at which slot.
    """

    S: np.ndarray
    modes: tuple = ()

    def __post_init__(self) -> None:
        s = np.asarray(self.S, dtype=complex)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
            raise ValueError(f"S must be square with even dimension, got {s.shape}")
        if not np.all(np.isfinite(s)):
            raise ValueError("S must have finite entries")
        object.__setattr__(self, "S", 0.5 * (s + s.T))
        if self.modes and 2 * len(self.modes) != s.shape[0]:
            raise ValueError("mode list does not match matrix dimension")

    @property
    def n(self) -> int:
        return self.S.shape[0] // 2


@dataclass(frozen=True)
class CharacteristicMatrix:
    M: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.M, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise ValueError(f"M must be square with even dimension, got {m.shape}")
        object.__setattr__(self, "M", m)

    @property
    def n(self) -> int:
        return self.M.shape[0] // 2


def _check_symplectic(m: np.ndarray) -> None:
    n = m.shape[0] // 2
    sig = sigma_matrix(n)
    # float error grows with the squared matrix scale, so the 1e-10
    # contract is applied relative to it
    scale = max(1.0, float(np.linalg.norm(m, 1)) ** 2)
    defect = float(np.abs(m.T @ sig @ m - sig).max())
    if defect > 1e-10 * scale:
        raise SymplecticityError(
            f"matrix is not symplectic: defect {defect:.3e} at scale {scale:.3e}"
        )


def char_matrix(q: QuadraticForm) -> CharacteristicMatrix:
    """[J] = exp(sigma S), scaling-and-squaring matrix exponential."""
    m = expm(sigma_matrix(q.n) @ q.S)
    if not np.all(np.isfinite(m)):
        raise SymplecticityError(
            "matrix exponential overflowed; generator norm "
            f"{float(np.linalg.norm(q.S, 1)):.3e} is too large"
        )
    _check_symplectic(m)
    return CharacteristicMatrix(m)


def number_operator_form(coeffs: "np.ndarray | list") -> tuple[QuadraticForm, complex]:
    """exp(sum_j c_j a_j^+ a_j) as (form, log_scalar).

    The operator equals exp(log_scalar) * exp(1/2 alpha S alpha) with
    log_scalar = -sum(c)/2, the normal-ordering shift.
    """
    c = np.asarray(coeffs, dtype=complex)
    n = c.size
    s = np.zeros((2 * n, 2 * n), dtype=complex)
    for j in range(n):
        s[j, n + j] = c[j]
        s[n + j, j] = c[j]
    return QuadraticForm(s), complex(-0.5 * c.sum())


def _diag_char(coeffs: np.ndarray) -> np.ndarray:
    """Characteristic matrix of exp(sum c_j a_j^+ a_j): diag(e^c, e^-c)."""
    c = np.asarray(coeffs, dtype=complex)
    return np.diag(np.concatenate([np.exp(c), np.exp(-c)]))


def compose(ms: "list[CharacteristicMatrix]") -> CharacteristicMatrix:
    """Left-to-right product, matching the operator product order."""
    if not ms:
        raise ValueError("need at least one matrix")
    n = ms[0].n
    out = np.eye(2 * n, dtype=complex)
    for cm in ms:
        if cm.n != n:
            raise ValueError("mode-count mismatch in composition")
        out = out @ cm.M
    return CharacteristicMatrix(out)


def symplectic_inverse(m: np.ndarray) -> np.ndarray:
    """M^-1 = -sigma M^T sigma for symplectic M; exact group inverse."""
    n = m.shape[0] // 2
    sig = sigma_matrix(n)
    return -sig @ m.T @ sig


def _branch_determinant(m: np.ndarray) -> complex:
    n = m.shape[0] // 2
    sign = -1.0 if n % 2 else 1.0
    return sign * complex(np.linalg.det(m - np.eye(2 * n)))


def trace_from_char(cm: CharacteristicMatrix) -> complex:
    """Tr J from [J], square-root branch picked against an eigenvalue
    reference.

    Eigenvalues of a symplectic matrix pair up as (z, 1/z); the half with
    |z| > 1 gives the reference product of 1/(sqrt(z) - 1/sqrt(z))
    factors, which is exact for thermal-like weights where principal
    roots are correct.  The returned value is the root of the
    determinant formula closer to that reference; if neither is clearly
    closer the branch is genuinely ambiguous and an error is raised.
    """
    m = cm.M
    d = _branch_determinant(m)
    if abs(d) < 1e-12:
        raise TraceDivergenceError(
            f"det([J]-I) = {d:.3e}; the trace diverges (unitary-like weight)"
        )
    t_plus = 1.0 / np.sqrt(d)
    lams = np.linalg.eigvals(m)
    order = np.argsort(-np.abs(lams))
    ref = 1.0 + 0.0j
    for lam in lams[order][: cm.n]:
        rt = np.sqrt(lam)
        ref /= rt - 1.0 / rt
    r = ref / t_plus
    if r.real > 0.2:
        return complex(t_plus)
    if r.real < -0.2:
        return complex(-t_plus)
    raise BranchTrackingError(
        "square-root branch is ambiguous for this weight; "
        "evaluate along a homotopy instead"
    )


def charfun_from_generator(
    generator: QuadraticForm,
    omegas: "np.ndarray | list",
    tau: float,
    beta: float,
    u: complex,
    v: complex,
    hbar: float = 1.0,
    steps: int = 64,
) -> complex:
    """Two-point characteristic function of work and photon number.

    The weight is U^+ e^{iuH+ivN} U e^{-iuH-ivN} e^{-beta H} with
    U = e^{-i H0 tau} e^{-i V tau}, V = 1/2 alpha S alpha the interaction
    generator, and H counted without zero-point shift (the shifts cancel
    in this equal-endpoint ratio).  Branch of the trace square root is
    carried by homotopy s*(u, v), s in [0, 1], anchored at the real
    positive thermal determinant.
    """
    w = np.asarray(omegas, dtype=float)
    n = generator.n
    if w.size != n:
        raise ValueError("one frequency per generator mode is required")
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    if tau < 0.0:
        raise ValueError("tau must be nonnegative")

    m_free = _diag_char(-1j * w * tau)
    m_int = char_matrix(QuadraticForm(-1j * tau * generator.S, generator.modes)).M
    m_u = m_free @ m_int
    m_u_inv = symplectic_inverse(m_u)
    m_thermal = _diag_char(-beta * hbar * w)

    def total(su: complex, sv: complex) -> np.ndarray:
        c1 = 1j * su * hbar * w + 1j * sv
        e1 = _diag_char(c1)
        e2 = _diag_char(-c1)
        return m_u_inv @ e1 @ m_u @ e2 @ m_thermal

    d0 = _branch_determinant(total(0.0, 0.0))
    if not (abs(d0.imag) <= 1e-9 * abs(d0) and d0.real > 0.0):
        raise BranchTrackingError(
            f"thermal anchor determinant {d0:.3e} is not positive real"
        )
    floor = 1e-14 * abs(d0)

    while True:
        root = complex(np.sqrt(d0))
        prev = d0
        ok = True
        for j in range(1, steps + 1):
            s = j / steps
            d = _branch_determinant(total(s * u, s * v))
            if abs(d) < floor:
                raise BranchTrackingError(
                    "homotopy path hits a trace singularity; "
                    "perturb u or v slightly and retry"
                )
            ratio = d / prev
            if ratio.real <= 0.0:
                ok = False
                break
            # continuous square root: relative argument is within
            # (-pi/2, pi/2), so the principal root of the ratio is safe
            root *= complex(np.sqrt(ratio))
            prev = d
        if ok:
            return complex(np.sqrt(d0)) / root
        if steps >= 4096:
            raise BranchTrackingError(
                "determinant winds too fast even at 4096 homotopy steps; "
                "perturb the evaluation point"
            )
        steps *= 2


def charfun_general(group, protocol, beta: float, u: complex, v: complex) -> complex:
    """G(u, v) for one coupled resonance group of a closed protocol.

    Closed means the boundary returns to its starting position; the
    general-endpoint case is handled by the closed-form route or the
    truncated-Fock oracle instead.
    """
    from . import driving  # deferred: driving builds on this module's types

    lam_tau = protocol.lambda_at(protocol.tau)
    if abs(lam_tau - protocol.lambda0) > 1e-9 * protocol.lambda0:
        raise ValueError(
            "protocol does not return the boundary to its start; "
            "use the general-endpoint closed forms or the Fock oracle"
        )
    gen = driving.interaction_generator(group, phi=protocol.phi)
    freq = driving.group_frequencies(group)
    omegas = [freq[mode] for mode in gen.modes]
    return charfun_from_generator(
        gen, omegas, protocol.tau, beta, u, v, hbar=protocol.hbar
    )


def dump_char_matrices(entries: "list[tuple[str, CharacteristicMatrix]]") -> str:
    """JSON dump of labelled characteristic matrices for test forensics."""
    payload = {}
    for label, cm in entries:
        payload[label] = [
            [[float(z.real), float(z.imag)] for z in row] for row in cm.M
        ]
    return json.dumps(payload, indent=2, sort_keys=True)
