"""Brute-force two-point-measurement simulation in a truncated Fock space.

This is the ground truth the closed forms are tested against: thermal
sampling, exact RWA unitary, projective energy and photon-number
readouts at both ends, all by dense linear algebra over a product
occupation basis.

Thermal weights are taken against the analytic, untruncated partition
function, so the reported peak probabilities undershoot unity by
exactly the thermal mass living outside the truncation.  That deficit
is returned as residual_mass; Sum(prob) + residual_mass = 1 to float
precision, and the characteristic function at (0, 0) equals
1 - residual_mass.  Energies count hbar * omega per photon with no
zero-point contribution, matching the thermal weight convention and the
grand-potential bookkeeping of the closed forms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .cavity import ModeIndex
from .errors import TruncationLeakError
from .symplectic import QuadraticForm

__all__ = [
    "JointDistribution",
    "TruncatedFockSpace",
    "build_evolution",
    "charfun_numeric",
    "quadratic_operator",
    "two_point_measurement",
]

_DIM_BUDGET = 4096


@dataclass(frozen=True)
class TruncatedFockSpace:
    """Product occupation basis for a handful of interacting modes.

    modes: ordered (index, omega at start, omega at end) triples; the
    two frequencies differ only for protocols that do not return the
    boundary to its starting position.  Basis states enumerate
    occupations lexicographically with the last mode varying fastest.
    """

    modes: tuple[tuple[ModeIndex, float, float], ...]
    n_max: tuple[int, ...]

    def __init__(
        self,
        modes,
        n_max,
        budget: int = _DIM_BUDGET,
    ) -> None:
        modes = tuple((m, float(w0), float(w1)) for m, w0, w1 in modes)
        if not modes:
            raise ValueError("at least one mode is required")
        if any(w0 <= 0 or w1 <= 0 for _, w0, w1 in modes):
            raise ValueError("mode frequencies must be positive")
        if isinstance(n_max, int):
            n_max = (n_max,) * len(modes)
        n_max = tuple(int(v) for v in n_max)
        if len(n_max) != len(modes):
            raise ValueError("need one occupation cutoff per mode")
        if any(v < 1 for v in n_max):
            raise ValueError("occupation cutoffs must be >= 1")
        dim = 1
        for v in n_max:
            dim *= v + 1
        if dim > budget:
            raise ValueError(
                f"basis dimension {dim} exceeds the budget {budget}; "
                "lower n_max or raise the budget explicitly"
            )
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "n_max", n_max)

    @property
    def mode_count(self) -> int:
        return len(self.modes)

    @property
    def dimension(self) -> int:
        return int(np.prod([v + 1 for v in self.n_max]))

    def occupations(self) -> np.ndarray:
        """(dimension, mode_count) int array, one basis state per row."""
        return np.array(
            list(itertools.product(*(range(v + 1) for v in self.n_max))), dtype=int
        )

    def lowering_operator(self, j: int) -> np.ndarray:
        """Dense a_j on the product basis."""
        mats = []
        for i, v in enumerate(self.n_max):
            d = v + 1
            if i == j:
                m = np.zeros((d, d))
                for n in range(1, d):
                    m[n - 1, n] = math.sqrt(n)
            else:
                m = np.eye(d)
            mats.append(m)
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    def omega0(self) -> np.ndarray:
        return np.array([w0 for _, w0, _ in self.modes])

    def omega_tau(self) -> np.ndarray:
        return np.array([w1 for _, _, w1 in self.modes])

    def top_shell_mask(self) -> np.ndarray:
        occ = self.occupations()
        return (occ == np.array(self.n_max)).any(axis=1)

    def thermal_weights(self, beta: float, hbar: float = 1.0) -> np.ndarray:
        """e^{-beta E0(n)} / Z with Z the analytic untruncated sum."""
        if beta <= 0.0:
            raise ValueError("beta must be positive")
        e0 = self.occupations() @ self.omega0()
        z_full = 1.0
        for w in self.omega0():
            z_full /= 1.0 - math.exp(-beta * hbar * w)
        return np.exp(-beta * hbar * e0) / z_full


def quadratic_operator(space: TruncatedFockSpace, form: QuadraticForm) -> np.ndarray:
    """Dense matrix of 1/2 alpha S alpha over the truncated basis.

    The form's mode labels are matched against the space; modes of the
    space that the form does not touch are acted on trivially.  The
    result must be Hermitian (the truncated squeeze / pair / exchange
    blocks close under dagger), which is verified, not assumed.
    """
    space_pos = {m: i for i, (m, _, _) in enumerate(space.modes)}
    if form.modes:
        try:
            slots = [space_pos[m] for m in form.modes]
        except KeyError as err:
            raise ValueError(f"generator mode {err.args[0]} is not in the space")
    else:
        if form.n != space.mode_count:
            raise ValueError("anonymous form must cover every space mode")
        slots = list(range(space.mode_count))

    lowers = [space.lowering_operator(j) for j in slots]
    alpha = lowers + [m.conj().T for m in lowers]
    dim = space.dimension
    v = np.zeros((dim, dim), dtype=complex)
    n = form.n
    for i in range(2 * n):
        for j in range(2 * n):
            s = form.S[i, j]
            if s != 0.0:
                v += 0.5 * s * (alpha[i] @ alpha[j])
    herm_defect = float(np.abs(v - v.conj().T).max())
    if herm_defect > 1e-10 * max(1.0, float(np.abs(v).max())):
        raise ValueError(
            f"quadratic form is not Hermitian on the truncated basis "
            f"(defect {herm_defect:.3e})"
        )
    return 0.5 * (v + v.conj().T)


def build_evolution(
    space: TruncatedFockSpace,
    generator: QuadraticForm,
    protocol,
    beta: float | None = None,
) -> np.ndarray:
    """U = e^{-i H0 tau} e^{-i V tau} on the truncated basis.

    Both factors are exactly unitary: the free phases are diagonal and
    the interaction exponential comes from the eigendecomposition of the
    Hermitian V.  When beta is given, the evolved thermal state's
    population in the top occupation shell is checked; truncation is
    only trustworthy when that leakage is tiny.
    """
    tau = protocol.tau
    v = quadratic_operator(space, generator)
    evals, vecs = np.linalg.eigh(v)
    exp_v = (vecs * np.exp(-1j * evals * tau)) @ vecs.conj().T
    e0 = space.occupations() @ space.omega0()
    u = np.exp(-1j * e0 * tau)[:, None] * exp_v
    if beta is not None:
        p = space.thermal_weights(beta, protocol.hbar)
        pops = (np.abs(u) ** 2) @ p
        leak = float(pops[space.top_shell_mask()].sum())
        if leak > 1e-8:
            raise TruncationLeakError(
                f"evolved thermal state has {leak:.3e} population in the top "
                "occupation shell; increase n_max"
            )
    return u


@dataclass(frozen=True)
class JointDistribution:
    """Discrete joint statistics of work and photon-number change.

    peaks: (w, delta_n, prob) with w on the exact transition lattice
    after merging float duplicates; residual_mass is the thermal weight
    outside the truncated basis.
    """

    peaks: tuple[tuple[float, int, float], ...]
    residual_mass: float

    def total_probability(self) -> float:
        return float(sum(p for _, _, p in self.peaks))

    def to_csv(self) -> str:
        lines = ["w,delta_n,prob"]
        for w, dn, p in self.peaks:
            lines.append(f"{w:.12g},{dn},{p:.12g}")
        lines.append(f"# residual_mass={self.residual_mass:.12g}")
        return "\n".join(lines) + "\n"


def _merge_peaks(
    acc: dict[complex, float], tol: float
) -> tuple[tuple[float, int, float], ...]:
    by_dn: dict[int, list[tuple[float, float]]] = {}
    for key, prob in acc.items():
        by_dn.setdefault(int(round(key.imag)), []).append((key.real, prob))
    peaks: list[tuple[float, int, float]] = []
    for dn, pairs in by_dn.items():
        pairs.sort()
        cluster_w = [pairs[0][0]]
        cluster_p = [pairs[0][1]]
        for w, p in pairs[1:]:
            if w - cluster_w[-1] <= tol:
                cluster_w.append(w)
                cluster_p.append(p)
            else:
                tot = sum(cluster_p)
                peaks.append(
                    (sum(wi * pi for wi, pi in zip(cluster_w, cluster_p)) / tot, dn, tot)
                )
                cluster_w = [w]
                cluster_p = [p]
        tot = sum(cluster_p)
        peaks.append(
            (sum(wi * pi for wi, pi in zip(cluster_w, cluster_p)) / tot, dn, tot)
        )
    peaks.sort(key=lambda t: (t[0], t[1]))
    return tuple(peaks)


def two_point_measurement(
    space: TruncatedFockSpace,
    u_matrix: np.ndarray,
    beta: float,
    hbar: float = 1.0,
) -> JointDistribution:
    """Exact joint distribution of (work, photon-number change).

    First measurement projects the thermal state onto occupations at the
    starting frequencies, the second reads the evolved state at the
    final frequencies; w = hbar * (E_end(n') - E_start(n)).  Peaks are
    merged within 1e-9 of the smallest active frequency.
    """
    occ = space.occupations()
    e0 = occ @ space.omega0()
    e1 = occ @ space.omega_tau()
    ntot = occ.sum(axis=1)
    p_init = space.thermal_weights(beta, hbar)
    prob_mat = np.abs(u_matrix) ** 2  # [n', n]

    tol = 1e-9 * hbar * float(min(space.omega0().min(), space.omega_tau().min()))
    acc: dict[complex, float] = {}
    dim = space.dimension
    block = max(1, 4_000_000 // dim)
    for start in range(0, dim, block):
        stop = min(dim, start + block)
        pb = prob_mat[:, start:stop] * p_init[start:stop][None, :]
        wb = hbar * (e1[:, None] - e0[None, start:stop])
        dnb = ntot[:, None] - ntot[None, start:stop]
        z = wb.ravel() + 1j * dnb.ravel()
        uz, inv = np.unique(z, return_inverse=True)
        sums = np.bincount(inv, weights=pb.ravel())
        for key, s in zip(uz, sums):
            if s > 0.0:
                acc[complex(key)] = acc.get(complex(key), 0.0) + float(s)
    peaks = _merge_peaks(acc, tol)
    residual = 1.0 - sum(p for _, _, p in peaks)
    return JointDistribution(peaks, residual)


def charfun_numeric(dist: JointDistribution, u: complex, v: complex) -> complex:
    """Sum of prob * exp(i u w + i v dn) over the measured peaks."""
    out = 0.0 + 0.0j
    for w, dn, p in dist.peaks:
        out += p * np.exp(1j * u * w + 1j * v * dn)
    return complex(out)
