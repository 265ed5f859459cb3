"""Command-line front end: spectra, distributions, verification, moments.

Runs are driven by a plain-text INI config.  All keys are listed here
(and in ``cavework <command> --help``); only the geometry block and the
inverse temperature are required, everything else has defaults.

::

    [geometry]
    kind = rectangular        # rectangular | cylindrical | spherical
    lx = 1.0                  # rectangular: fixed transverse sides; the
    ly = 1.0                  # driven length along z is protocol lambda0
    moving_wall = longitudinal  # cylindrical: longitudinal | radial
    radius = 1.0              # cylindrical, longitudinal drive
    axis_length = 1.0         # cylindrical, radial drive
    polarization = TE         # TE | TM
    cutoff = 8.0              # spectrum cutoff; default 8 / lambda0

    [protocol]
    lambda0 = 1.0
    epsilon = 0.01
    omega_drive = 2*w(1:1:1)  # number, or a symbolic selector resolved
                              # exactly against the spectrum:
                              # 2*w(i:j:k), w(a)+w(b), w(a)-w(b), w(lowest)
    tau = 0.0
    phi = 0.0
    hbar = 1.0

    [thermal]
    beta = 1.0

    [numerics]
    n_max = 40                # Fock cutoff per mode (--oracle / --freeze)
    lattice_count = 256       # starting Fourier sample count
    freeze_tol = 5e-3         # closed-form vs oracle gate for --freeze
    grid_u = 32               # reserved for grid-evaluation commands
    grid_v = 8

    [sweep]                   # cmd_moments only
    variable = beta           # beta | hbar
    values = 0.1 0.2 0.5 1.0

    [output]
    directory = out
    prefix = run

Environment variables override the numerics block only, uniformly
prefixed: CAVEWORK_N_MAX, CAVEWORK_LATTICE_COUNT, CAVEWORK_FREEZE_TOL,
CAVEWORK_GRID_U, CAVEWORK_GRID_V.

Exit codes: 0 success, 1 verification / numerical-gate failure, 2
usage or config error.  CSV output is deterministic: 12 significant
digits, '.' decimal separator, '\\n' line endings, fixed ordering.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import fock
from .cavity import (
    CylindricalGeometry,
    Geometry,
    MovingWall,
    Polarization,
    RectangularGeometry,
    SphericalGeometry,
    mode_frequency,
    mode_index_str,
    mode_spectrum,
    spectrum_to_csv,
)
from .charfun import (
    CharfunParams,
    classical_work_cdf,
    closed_form,
    moments,
)
from .distributions import (
    WorkLattice,
    cumulative_and_fit,
    cumulative_to_csv,
    extract_marginal_photons,
    extract_marginal_work,
    marginal_to_csv,
    verify_fluctuation_theorems,
)
from .driving import (
    DrivingProtocol,
    ResonanceKind,
    ResonancePlan,
    classify_resonances,
    interaction_generator,
)
from .errors import CaveworkError, ConfigError
from .symplectic import QuadraticForm, charfun_general

_KNOWN_KEYS = {
    "geometry": {
        "kind", "lx", "ly", "radius", "axis_length", "moving_wall",
        "polarization", "cutoff",
    },
    "protocol": {"lambda0", "epsilon", "omega_drive", "tau", "phi", "hbar"},
    "thermal": {"beta"},
    "numerics": {"n_max", "lattice_count", "freeze_tol", "grid_u", "grid_v"},
    "sweep": {"variable", "values"},
    "output": {"directory", "prefix"},
}

_NUMERIC_DEFAULTS = {
    "n_max": "40",
    "lattice_count": "256",
    "freeze_tol": "5e-3",
    "grid_u": "32",
    "grid_v": "8",
}

_ENV_PREFIX = "CAVEWORK_"

# cmd_verify gates; identities hold to roundoff, so these are generous
_VERIFY_JARZYNSKI_TOL = 1e-10
_VERIFY_CROOKS_TOL = 1e-9
_VERIFY_PERIODICITY_TOL = 1e-8
_VERIFY_NORMALIZATION_TOL = 1e-10


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs, parsed and validated."""

    geometry: Geometry
    polarization: Polarization
    cutoff: float
    lambda0: float
    epsilon: float
    omega_drive_expr: str
    tau: float
    phi: float
    hbar: float
    beta: float
    n_max: int
    lattice_count: int
    freeze_tol: float
    grid_u: int
    grid_v: int
    sweep_variable: str | None
    sweep_values: tuple[float, ...]
    directory: str
    prefix: str


def _get_float(section, key: str, default: float | None = None) -> float:
    raw = section.get(key)
    if raw is None:
        if default is None:
            raise ConfigError(f"missing required key '{key}'")
        return default
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"key '{key}': not a number: {raw!r}") from None


def _build_geometry(sec) -> tuple[Geometry, Polarization]:
    kind = sec.get("kind")
    if kind is None:
        raise ConfigError("missing required key 'kind' in [geometry]")
    pol_name = sec.get("polarization", "TE").upper()
    try:
        pol = Polarization[pol_name]
    except KeyError:
        raise ConfigError(f"unknown polarization {pol_name!r}") from None
    kind = kind.strip().lower()
    try:
        if kind == "rectangular":
            geom: Geometry = RectangularGeometry(
                lx=_get_float(sec, "lx"), ly=_get_float(sec, "ly")
            )
        elif kind == "cylindrical":
            wall = MovingWall(sec.get("moving_wall", "longitudinal"))
            if wall is MovingWall.LONGITUDINAL:
                geom = CylindricalGeometry(
                    moving_wall=wall, radius=_get_float(sec, "radius")
                )
            else:
                geom = CylindricalGeometry(
                    moving_wall=wall, axis_length=_get_float(sec, "axis_length")
                )
        elif kind == "spherical":
            geom = SphericalGeometry()
        else:
            raise ConfigError(f"unknown geometry kind {kind!r}")
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return geom, pol


def load_config(path: str) -> RunConfig:
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";")
    )
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None

    for section in cp.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        for key in cp[section]:
            if key not in _KNOWN_KEYS[section]:
                raise ConfigError(f"unknown key '{key}' in [{section}]")

    if "geometry" not in cp:
        raise ConfigError("missing required section [geometry]")
    if "thermal" not in cp or "beta" not in cp["thermal"]:
        raise ConfigError("missing required key 'beta' in [thermal]")

    geom, pol = _build_geometry(cp["geometry"])
    proto = cp["protocol"] if "protocol" in cp else {}
    lambda0 = _get_float(proto, "lambda0", 1.0)
    cutoff = _get_float(cp["geometry"], "cutoff", 8.0 / lambda0)

    numerics = dict(_NUMERIC_DEFAULTS)
    if "numerics" in cp:
        numerics.update(cp["numerics"])
    for key in numerics:
        env = os.environ.get(_ENV_PREFIX + key.upper())
        if env is not None:
            numerics[key] = env

    sweep_var = None
    sweep_vals: tuple[float, ...] = ()
    if "sweep" in cp:
        sweep_var = cp["sweep"].get("variable", "beta").strip().lower()
        if sweep_var not in ("beta", "hbar"):
            raise ConfigError(f"sweep variable must be beta or hbar, got {sweep_var!r}")
        raw = cp["sweep"].get("values", "")
        try:
            sweep_vals = tuple(float(tok) for tok in raw.split())
        except ValueError:
            raise ConfigError(f"sweep values: not numbers: {raw!r}") from None

    out = cp["output"] if "output" in cp else {}

    def _int(key: str) -> int:
        try:
            return int(numerics[key])
        except ValueError:
            raise ConfigError(
                f"numerics key '{key}': not an integer: {numerics[key]!r}"
            ) from None

    beta = _get_float(cp["thermal"], "beta")
    if beta <= 0.0:
        raise ConfigError("beta must be positive")

    return RunConfig(
        geometry=geom,
        polarization=pol,
        cutoff=cutoff,
        lambda0=lambda0,
        epsilon=_get_float(proto, "epsilon", 0.01),
        omega_drive_expr=proto.get("omega_drive", "2*w(lowest)"),
        tau=_get_float(proto, "tau", 0.0),
        phi=_get_float(proto, "phi", 0.0),
        hbar=_get_float(proto, "hbar", 1.0),
        beta=beta,
        n_max=_int("n_max"),
        lattice_count=_int("lattice_count"),
        freeze_tol=float(numerics["freeze_tol"]),
        grid_u=_int("grid_u"),
        grid_v=_int("grid_v"),
        sweep_variable=sweep_var,
        sweep_values=sweep_vals,
        directory=out.get("directory", "out"),
        prefix=out.get("prefix", "run"),
    )


def _resolve_mode_frequency(
    token: str, cfg: RunConfig, spectrum: list
) -> float:
    token = token.strip()
    if token == "lowest":
        return spectrum[0][1]
    try:
        mode = tuple(int(part) for part in token.split(":"))
    except ValueError:
        raise ConfigError(f"bad mode index {token!r} (want i:j:k or lowest)") from None
    for m, w in spectrum:
        if m == mode:
            return w
    raise ConfigError(
        f"mode {token} is not in the spectrum below cutoff {cfg.cutoff:g}; "
        "raise [geometry] cutoff"
    )


def resolve_omega_drive(cfg: RunConfig, spectrum: list) -> float:
    """Resolve a numeric or symbolic drive frequency exactly.

    Symbolic selectors pick exact spectrum values so the resonance
    classifier sees zero detuning by construction.
    """
    import re

    expr = "".join(cfg.omega_drive_expr.split())
    try:
        return float(expr)
    except ValueError:
        pass
    w = r"w\(([^)]*)\)"
    m = re.fullmatch(rf"2\*{w}", expr)
    if m:
        return 2.0 * _resolve_mode_frequency(m.group(1), cfg, spectrum)
    m = re.fullmatch(rf"{w}\+{w}", expr)
    if m:
        return _resolve_mode_frequency(m.group(1), cfg, spectrum) + (
            _resolve_mode_frequency(m.group(2), cfg, spectrum)
        )
    m = re.fullmatch(rf"{w}-{w}", expr)
    if m:
        diff = _resolve_mode_frequency(m.group(1), cfg, spectrum) - (
            _resolve_mode_frequency(m.group(2), cfg, spectrum)
        )
        if diff == 0.0:
            raise ConfigError("difference selector resolves to zero frequency")
        return abs(diff)
    m = re.fullmatch(w, expr)
    if m:
        return _resolve_mode_frequency(m.group(1), cfg, spectrum)
    raise ConfigError(
        f"cannot parse omega_drive {cfg.omega_drive_expr!r}; "
        "use a number, 2*w(i:j:k), w(a)+w(b), w(a)-w(b) or w(lowest)"
    )


def _spectrum(cfg: RunConfig) -> list:
    spec = mode_spectrum(cfg.geometry, cfg.polarization, cfg.lambda0, cfg.cutoff)
    if not spec:
        raise ConfigError(
            f"no modes below cutoff {cfg.cutoff:g}; raise [geometry] cutoff"
        )
    return spec


def _protocol_and_plan(cfg: RunConfig, spectrum: list):
    omega = resolve_omega_drive(cfg, spectrum)
    try:
        protocol = DrivingProtocol(
            lambda0=cfg.lambda0,
            epsilon=cfg.epsilon,
            omega_drive=omega,
            tau=cfg.tau,
            phi=cfg.phi,
            hbar=cfg.hbar,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    plan = classify_resonances(
        spectrum, protocol, cfg.geometry, cfg.polarization
    )
    return protocol, plan


def _final_frequencies(cfg: RunConfig, protocol: DrivingProtocol, plan) -> dict:
    lam_tau = protocol.lambda_tau
    return {
        case_mode: mode_frequency(
            cfg.geometry, cfg.polarization, case_mode, lam_tau
        )
        for case in plan.cases
        for case_mode in case.modes
    }


def _write(path: str, text: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _out_path(cfg: RunConfig, suffix: str) -> str:
    os.makedirs(cfg.directory, exist_ok=True)
    return os.path.join(cfg.directory, f"{cfg.prefix}_{suffix}")


def _common_spacing(quanta: list[float]) -> float:
    """Greatest common work quantum, or raise for incommensurate combs."""
    top = max(quanta)
    a = quanta[0]
    for b in quanta[1:]:
        x, y = max(a, b), min(a, b)
        while y > 1e-9 * top:
            x, y = y, math.fmod(x, y)
            if 0.0 < y < 1e-9 * top or abs(y - x) < 1e-9 * top:
                break
        a = x if y <= 1e-9 * top else y
    if a < 1e-6 * top:
        raise ConfigError(
            "work quanta of the active resonances are incommensurate; "
            "use --oracle for the joint distribution"
        )
    return a


def cmd_spectrum(args) -> int:
    cfg = load_config(args.config)
    spec = _spectrum(cfg)
    path = _out_path(cfg, "spectrum.csv")
    _write(path, spectrum_to_csv(spec, cfg.polarization))
    print(f"wrote {path} ({len(spec)} modes)")
    return 0


def _closed_evaluator(cfg: RunConfig, protocol, plan):
    """(G(u,v) callable, work spacing) for a closed boundary protocol."""
    singleton_params = []
    coupled_groups = []
    quanta = []
    for group in plan.case_groups():
        if len(group) == 1:
            case = group[0]
            singleton_params.append(
                CharfunParams.from_case(case, cfg.beta, protocol.tau, hbar=cfg.hbar)
            )
            quanta.append(cfg.hbar * protocol.omega_drive)
        else:
            coupled_groups.append(group)
            for case in group:
                quanta.append(cfg.hbar * protocol.omega_drive)

    def evaluate(u: complex, v: complex) -> complex:
        g = 1.0 + 0.0j
        for params in singleton_params:
            g *= closed_form(params, u, v)
        for group in coupled_groups:
            g *= charfun_general(group, protocol, cfg.beta, u, v)
        return g

    return evaluate, _common_spacing(quanta)


def _oracle_joint(cfg: RunConfig, protocol, plan) -> fock.JointDistribution:
    """Truncated-Fock simulation of all resonant modes."""
    lam_tau = protocol.lambda_tau
    modes = []
    seen = set()
    for case in plan.cases:
        for m in case.modes:
            if m not in seen:
                seen.add(m)
                w0 = mode_frequency(cfg.geometry, cfg.polarization, m, cfg.lambda0)
                w1 = mode_frequency(cfg.geometry, cfg.polarization, m, lam_tau)
                modes.append((m, w0, w1))
    modes.sort(key=lambda entry: (entry[1], entry[0]))
    dim = (cfg.n_max + 1) ** len(modes)
    if dim > 20000:
        raise ConfigError(
            f"truncated basis would have dimension {dim} over {len(modes)} "
            "resonant modes; reduce n_max or narrow the resonance"
        )
    space = fock.TruncatedFockSpace(tuple(modes), cfg.n_max, budget=dim)
    slot = {m: i for i, (m, _, _) in enumerate(space.modes)}
    n = space.mode_count
    s_total = np.zeros((2 * n, 2 * n), dtype=complex)
    for group in plan.case_groups():
        gen = interaction_generator(group, phi=protocol.phi)
        for a, ma in enumerate(gen.modes):
            for b, mb in enumerate(gen.modes):
                ia, ib = slot[ma], slot[mb]
                s_total[ia, ib] += gen.S[a, b]
                s_total[n + ia, ib] += gen.S[len(gen.modes) + a, b]
                s_total[ia, n + ib] += gen.S[a, len(gen.modes) + b]
                s_total[n + ia, n + ib] += gen.S[
                    len(gen.modes) + a, len(gen.modes) + b
                ]
    combined = QuadraticForm(S=s_total, modes=tuple(m for m, _, _ in space.modes))
    u_matrix = fock.build_evolution(space, combined, protocol)
    return fock.two_point_measurement(space, u_matrix, cfg.beta, hbar=cfg.hbar)


def _oracle_marginals(dist: fock.JointDistribution, w_floor: float):
    by_dn: dict[int, float] = {}
    for _, dn, p in dist.peaks:
        by_dn[dn] = by_dn.get(dn, 0.0) + p
    photons = sorted((dn, p) for dn, p in by_dn.items() if p > 1e-12)

    ordered = sorted((w, p) for w, _, p in dist.peaks)
    work: list[tuple[float, float]] = []
    for w, p in ordered:
        if work and abs(w - work[-1][0]) <= w_floor:
            w_prev, p_prev = work[-1]
            tot = p_prev + p
            work[-1] = ((w_prev * p_prev + w * p) / tot, tot)
        else:
            work.append((w, p))
    work = [(w, p) for w, p in work if p > 1e-12]
    return work, photons


def cmd_distribution(args) -> int:
    cfg = load_config(args.config)
    spectrum = _spectrum(cfg)
    protocol, plan = _protocol_and_plan(cfg, spectrum)

    if not plan.cases:
        if not args.adiabatic_ok:
            raise ConfigError(
                "the drive is resonant with no mode below the cutoff; all "
                "dynamics is adiabatic (pass --adiabatic-ok for the trivial "
                "point distribution, or adjust omega_drive)"
            )
        if not protocol.is_closed:
            raise ConfigError(
                "open-endpoint adiabatic statistics need the Fock route; "
                "no resonant modes were found to simulate"
            )
        work = [(0.0, 1.0)]
        photons = [(0, 1.0)]
        _write(_out_path(cfg, "work.csv"), marginal_to_csv(work, "work"))
        _write(_out_path(cfg, "photons.csv"), marginal_to_csv(photons, "photons"))
        _write(
            _out_path(cfg, "cumulative.csv"),
            cumulative_to_csv(cumulative_and_fit(work)),
        )
        print("adiabatic protocol: point distribution written")
        return 0

    coupled = [g for g in plan.case_groups() if len(g) > 1]
    if coupled and not args.symplectic:
        raise ConfigError(
            "resonance channels share modes (coupled group); the factorized "
            "closed forms do not apply.  Re-run with --symplectic to use the "
            "homotopy engine, or --oracle for the truncated-Fock simulation"
        )

    use_oracle = args.oracle or args.freeze
    oracle_dist = None
    if use_oracle:
        oracle_dist = _oracle_joint(cfg, protocol, plan)
        w_floor = 1e-9 * cfg.hbar * min(w for _, w in spectrum)
        oracle_work, oracle_photons = _oracle_marginals(oracle_dist, w_floor)

    if args.oracle and not args.freeze:
        tail = f"# residual_mass={oracle_dist.residual_mass:.12g}\n"
        _write(
            _out_path(cfg, "work.csv"),
            marginal_to_csv(oracle_work, "work") + tail,
        )
        _write(
            _out_path(cfg, "photons.csv"),
            marginal_to_csv(oracle_photons, "photons") + tail,
        )
        fit = cumulative_and_fit(
            [(w, p / sum(q for _, q in oracle_work)) for w, p in oracle_work]
        )
        _write(_out_path(cfg, "cumulative.csv"), cumulative_to_csv(fit) + tail)
        print(
            f"oracle distributions written "
            f"(residual mass {oracle_dist.residual_mass:.3e})"
        )
        return 0

    if not protocol.is_closed:
        raise ConfigError(
            "the boundary does not return to its start (lambda(tau) != "
            "lambda0): the work support is incommensurate and the closed-"
            "form inversion does not apply.  Re-run with --oracle"
        )

    evaluate, spacing = _closed_evaluator(cfg, protocol, plan)
    lattice = WorkLattice(spacing=spacing, count=cfg.lattice_count)
    work = extract_marginal_work(lambda u: evaluate(u, 0.0), lattice)
    photons = extract_marginal_photons(lambda v: evaluate(0.0, v))

    if args.freeze:
        worst = 0.0
        ow = dict(oracle_work)
        for w, p in work:
            near = [q for wq, q in ow.items() if abs(wq - w) < 1e-6 * spacing]
            worst = max(worst, abs(p - (near[0] if near else 0.0)))
        op = dict(oracle_photons)
        for dn, p in photons:
            worst = max(worst, abs(p - op.get(dn, 0.0)))
        if worst > cfg.freeze_tol:
            print(
                f"freeze refused: closed-form vs oracle deviation {worst:.3e} "
                f"exceeds freeze_tol {cfg.freeze_tol:g} "
                f"(residual mass {oracle_dist.residual_mass:.3e}); "
                "raise n_max or freeze_tol",
                file=sys.stderr,
            )
            return 1
        freeze_note = {
            "max_marginal_deviation": worst,
            "oracle_residual_mass": oracle_dist.residual_mass,
            "n_max": cfg.n_max,
            "freeze_tol": cfg.freeze_tol,
        }
        _write(
            _out_path(cfg, "freeze_report.json"),
            json.dumps(freeze_note, indent=2, sort_keys=True) + "\n",
        )
        print(f"oracle agreement {worst:.3e} within freeze_tol; goldens written")

    fit = cumulative_and_fit(work)
    classical_cdf = None
    if len(plan.cases) == 1 and plan.cases[0].kind is not ResonanceKind.DOUBLE:
        case = plan.cases[0]
        r = case.omega_p / case.omega_k
        g_tau = abs(case.strength) * protocol.tau
        classical_cdf = lambda w: classical_work_cdf(
            case.kind, r, g_tau, cfg.beta, w
        )

    _write(_out_path(cfg, "work.csv"), marginal_to_csv(work, "work"))
    _write(_out_path(cfg, "photons.csv"), marginal_to_csv(photons, "photons"))
    _write(_out_path(cfg, "cumulative.csv"), cumulative_to_csv(fit, classical_cdf))
    print(
        f"wrote {len(work)} work peaks / {len(photons)} photon peaks "
        f"under {cfg.directory}/{cfg.prefix}_*.csv"
    )
    return 0


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    spectrum = _spectrum(cfg)
    protocol, plan = _protocol_and_plan(cfg, spectrum)
    if len(plan.cases) != 1:
        raise ConfigError(
            f"cmd_verify handles exactly one resonance channel, found "
            f"{len(plan.cases)}; the multi-resonance identities are covered "
            "by the library test suite"
        )
    fin = None
    if not protocol.is_closed:
        fin = _final_frequencies(cfg, protocol, plan)
    params = CharfunParams.from_case(
        plan.cases[0], cfg.beta, protocol.tau, hbar=cfg.hbar, final_frequencies=fin
    )
    report = verify_fluctuation_theorems(params, perturbation=args.perturb)
    path = _out_path(cfg, "report.json")
    _write(path, report.to_json())
    checks = [
        ("jarzynski", report.jarzynski_abs_error, _VERIFY_JARZYNSKI_TOL),
        ("crooks", report.crooks_max_error, _VERIFY_CROOKS_TOL),
        ("periodicity", report.periodicity_max_error, _VERIFY_PERIODICITY_TOL),
        ("normalization", report.normalization_error, _VERIFY_NORMALIZATION_TOL),
    ]
    ok = True
    for name, err, tol in checks:
        state = "pass" if err <= tol else "FAIL"
        ok = ok and err <= tol
        print(f"{name:14s} {err:.3e} (tol {tol:g}) {state}")
    print(f"report: {path}")
    return 0 if ok else 1


def cmd_moments(args) -> int:
    cfg = load_config(args.config)
    if cfg.sweep_variable is None or not cfg.sweep_values:
        raise ConfigError("cmd_moments needs a [sweep] section with values")
    spectrum = _spectrum(cfg)
    protocol, plan = _protocol_and_plan(cfg, spectrum)
    if len(plan.cases) != 1:
        raise ConfigError(
            f"cmd_moments sweeps a single resonance channel, found "
            f"{len(plan.cases)}"
        )
    if not protocol.is_closed:
        raise ConfigError("moment sweeps assume a closed protocol")
    base = CharfunParams.from_case(
        plan.cases[0], cfg.beta, protocol.tau, hbar=cfg.hbar
    )
    lines = [f"{cfg.sweep_variable},mean_w,std_w"]
    for val in cfg.sweep_values:
        params = dataclasses.replace(base, **{cfg.sweep_variable: val})
        mean, var = moments(params, order=2)
        lines.append(f"{val:.12g},{mean:.12g},{math.sqrt(max(var, 0.0)):.12g}")
    path = _out_path(cfg, "moments.csv")
    _write(path, "\n".join(lines) + "\n")
    print(f"wrote {path} ({len(cfg.sweep_values)} sweep points)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavework",
        description=(
            "Exact work and photon statistics for a cavity field driven by "
            "an oscillating boundary."
        ),
        epilog="Config format and all keys: see the cavework.cli module help.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="write the mode spectrum CSV")
    p.add_argument("config")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser(
        "distribution", help="extract P(w), P(delta_n) and the cumulative triple"
    )
    p.add_argument("config")
    p.add_argument(
        "--oracle", action="store_true",
        help="use the truncated-Fock simulation instead of closed forms",
    )
    p.add_argument(
        "--symplectic", action="store_true",
        help="allow coupled resonance groups via the homotopy engine",
    )
    p.add_argument(
        "--adiabatic-ok", action="store_true",
        help="accept a drive resonant with no mode (trivial distribution)",
    )
    p.add_argument(
        "--freeze", action="store_true",
        help="golden-file mode: verify closed forms against the oracle "
             "within freeze_tol before writing",
    )
    p.set_defaults(func=cmd_distribution)

    p = sub.add_parser("verify", help="run the fluctuation-theorem checks")
    p.add_argument("config")
    p.add_argument(
        "--perturb", type=float, default=0.0,
        help="negative-control hook: add this constant to every G evaluation",
    )
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("moments", help="sweep <w>, sigma_w over beta or hbar")
    p.add_argument("config")
    p.set_defaults(func=cmd_moments)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CaveworkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
