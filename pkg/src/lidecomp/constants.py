"""Executable constraint system for the constant profile governing the pipeline.

A profile fixes four fractions (k, s, r, u) of the common degree d plus the
split points (s1, r1, u1) used by the tail bounds. Every closed-form
inequality the construction needs is encoded as a named, checkable record:
mean bounds, Chernoff/McDiarmid tail bounds with their monotonicity
thresholds, the selection-size window, the core minimum-degree requirement
and the separation margin. On top of the checks sit a minimal-feasible-degree
scan and a small derivative-free optimizer over profiles.

Polynomial/linear constraints are compared in exact rational arithmetic
(profile constants are decimal by intent, so they are lifted via their
decimal string); only the log/exp-based tail values use floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from lidecomp.errors import BudgetError, InputError

#: Default hunting range for feasible degrees.
SCAN_LO = 13
SCAN_HI = 10_000_000

_PROFILE_FIELDS = ("k", "s", "r", "u", "s1", "r1", "u1")


def _dec(x: float) -> Fraction:
    """Exact rational value of a constant, honouring its decimal intent."""
    return Fraction(str(x))


@dataclass(frozen=True)
class ConstantProfile:
    """Dimensionless constants (fractions of d) plus tail split points."""

    k: float
    s: float
    r: float
    u: float
    s1: float
    r1: float
    u1: float

    @property
    def s2(self) -> float:
        return self.s - self.s1

    @property
    def r2(self) -> float:
        return self.r - self.r1

    @property
    def u2(self) -> float:
        return self.u - self.u1

    def log_tail_bases(self) -> tuple[float, float, float]:
        """Natural logs of the three per-degree tail decay bases.

        The special/risky bases are the closed forms of the Chernoff bound,
        ``e^{s2} / (s/s1)^s`` and its risky analogue; the uncoloured base is
        the McDiarmid form ``e^{-u2^2/8}``.
        """
        ln_s3 = self.s2 - self.s * math.log(self.s / self.s1)
        ln_r3 = self.r2 - self.r * math.log(self.r / self.r1)
        ln_u3 = -(self.u2**2) / 8.0
        return ln_s3, ln_r3, ln_u3

    def tail_bases(self) -> tuple[float, float, float]:
        return tuple(math.exp(x) for x in self.log_tail_bases())  # type: ignore[return-value]

    def validate(self) -> None:
        for name in ("k", "s", "r", "u"):
            val = getattr(self, name)
            if not 0.0 < val < 1.0:
                raise InputError(f"profile field {name}={val} outside (0, 1)")
        for name, val in (
            ("s1", self.s1),
            ("s2", self.s2),
            ("r1", self.r1),
            ("r2", self.r2),
            ("u1", self.u1),
            ("u2", self.u2),
        ):
            if val <= 0.0:
                raise InputError(f"profile split {name}={val} must be positive")
        for name, ln_base in zip(("s3", "r3", "u3"), self.log_tail_bases()):
            if not ln_base < 0.0:
                raise InputError(f"tail base {name} not in (0, 1): exp({ln_base})")

    def to_json(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in _PROFILE_FIELDS}

    @classmethod
    def from_json(cls, data: dict) -> "ConstantProfile":
        missing = [name for name in _PROFILE_FIELDS if name not in data]
        if missing:
            raise InputError(f"profile JSON missing fields {missing}")
        return cls(**{name: float(data[name]) for name in _PROFILE_FIELDS})


#: The optimized constants the 4-subgraph decomposition is proved with.
REFERENCE_PROFILE = ConstantProfile(
    k=0.025, s=0.0031, r=0.26, u=0.131, s1=0.0015, r1=0.242, u1=0.059
)


@dataclass(frozen=True)
class DerivedQuantities:
    """Degree-dependent quantities shared by the colouring and pipeline stages."""

    degree: int
    palette: int  # colour palette size, ceil(k*d), at least 1
    modulus: int  # residue modulus for the degree-constrained core, 2*palette
    separation: Fraction  # strict cap for selection sizes: d/6 - s*d/3 - u*d/6 - 13/3
    size_count: int  # number of admissible selection sizes {0, ..., size_count-1}

    @classmethod
    def derive(cls, profile: ConstantProfile, d: int) -> "DerivedQuantities":
        if d < 0:
            raise InputError(f"degree must be nonnegative, got {d}")
        palette = max(1, math.ceil(_dec(profile.k) * d))
        sep = (
            Fraction(d, 6)
            - _dec(profile.s) * d / 3
            - _dec(profile.u) * d / 6
            - Fraction(13, 3)
        )
        size_count = max(0, math.ceil(sep))
        return cls(
            degree=d,
            palette=palette,
            modulus=2 * palette,
            separation=sep,
            size_count=size_count,
        )


@dataclass(frozen=True)
class ConstraintRecord:
    name: str
    lhs: float
    rhs: float
    passed: bool

    def to_json(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "pass": self.passed}


@dataclass(frozen=True)
class FeasibilityReport:
    d: int
    records: tuple[ConstraintRecord, ...]
    passed: bool

    def failing(self) -> list[str]:
        return [rec.name for rec in self.records if not rec.passed]

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "passed": self.passed,
            "constraints": [rec.to_json() for rec in self.records],
        }


def bound_functions(profile: ConstantProfile, d: int) -> tuple[float, float, float]:
    """Tail bound values ``d^3 * base^d`` for the special/risky/uncoloured events.

    Evaluated in log space so huge d underflows gracefully. The special and
    risky values are cross-checked against the raw Chernoff form
    ``(e^delta / (1+delta)^(1+delta))^mu`` to 1e-9 relative, which the closed
    forms are algebraically equal to.
    """
    profile.validate()
    if d < 1:
        raise InputError(f"degree must be >= 1, got {d}")
    ln_s3, ln_r3, ln_u3 = profile.log_tail_bases()
    out = []
    for ln_base in (ln_s3, ln_r3, ln_u3):
        out.append(math.exp(min(3.0 * math.log(d) + d * ln_base, 700.0)))
    for ln_base, mu, delta in (
        (ln_s3, profile.s1 * d, profile.s2 / profile.s1),
        (ln_r3, profile.r1 * d, profile.r2 / profile.r1),
    ):
        raw = mu * (delta - (1.0 + delta) * math.log1p(delta))
        closed = d * ln_base
        if abs(raw - closed) > 1e-9 * max(1.0, abs(closed), abs(raw)):
            raise AssertionError(
                f"tail closed form disagrees with raw form: {closed} vs {raw}"
            )
    return out[0], out[1], out[2]


def monotonicity_thresholds(profile: ConstantProfile) -> tuple[float, float, float]:
    """Degrees beyond which the three tail bound functions strictly decrease."""
    profile.validate()
    ln_s3, ln_r3, _ = profile.log_tail_bases()
    return (-3.0 / ln_s3, -3.0 / ln_r3, 24.0 / profile.u2**2)


def check_profile(profile: ConstantProfile, d: int) -> FeasibilityReport:
    """Evaluate every named constraint of the construction at degree ``d``."""
    profile.validate()
    if d < SCAN_LO:
        raise InputError(f"degree must be >= {SCAN_LO}, got {d}")

    k, s, r, u = _dec(profile.k), _dec(profile.s), _dec(profile.r), _dec(profile.u)
    s1, r1, u1 = _dec(profile.s1), _dec(profile.r1), _dec(profile.u1)
    fs, fr, fu = bound_functions(profile, d)
    thr_s, thr_r, thr_u = monotonicity_thresholds(profile)
    tail_cap = 1.0 / (3.0 * math.e)
    d1 = DerivedQuantities.derive(profile, d).separation

    records: list[ConstraintRecord] = []

    def add(name: str, lhs, rhs, passed: bool) -> None:
        records.append(ConstraintRecord(name, float(lhs), float(rhs), passed))

    # Dependency count of the local lemma: 3(d^3-d^2+d)+2 < 3d^3-1.
    dep_lhs = 3 * (d**3 - d**2 + d) + 2
    dep_rhs = 3 * d**3 - 1
    add("dependency_count", dep_lhs, dep_rhs, dep_lhs < dep_rhs)

    # Special edges: mean 2/k below s1*d, tail below 1/(3e) in the monotone range.
    add("special_mean", 2 / k, s1 * d, 2 / k < s1 * d)
    add("special_tail", fs, tail_cap, fs < tail_cap)
    add("special_tail_monotone", thr_s, d, thr_s <= d)

    # Risky edges: per-edge probability argument q must stay below 1 and give
    # mean bound 2q - q^2 below r1; tail analogous to the special case.
    q = s / k + Fraction(7) / (k * d)
    add("risky_mean_arg", q, 1, q < 1)
    add("risky_mean", 2 * q - q * q, r1, 2 * q - q * q < r1)
    add("risky_tail", fr, tail_cap, fr < tail_cap)
    add("risky_tail_monotone", thr_r, d, thr_r <= d)

    # Uncoloured vertices: mean 2/k^2 - 1/(k^4 d) below u1*d, McDiarmid tail.
    un_mean = 2 / k**2 - 1 / (k**4 * d)
    add("uncolored_mean", un_mean, u1 * d, un_mean < u1 * d)
    add("uncolored_tail", fu, tail_cap, fu < tail_cap)
    add("uncolored_tail_monotone", thr_u, d, thr_u <= d)

    # Selection-size window: u*d/2 + 1 <= d1 <= (d - u*d)/2 - 1 (non-strict).
    win_lo = u * d / 2 + 1
    win_hi = (d - u * d) / 2 - 1
    add("selection_window_low", win_lo, d1, win_lo <= d1)
    add("selection_window_high", d1, win_hi, d1 <= win_hi)

    # Core host degrees must clear 12*k*d + 12 (hence six times the modulus).
    core_lhs = 12 * k * d + 12
    core_rhs = (d - s * d - u * d - r * d) / 2 - 1
    add("core_min_degree", core_lhs, core_rhs, core_rhs >= core_lhs)

    # First-part degrees of coloured vertices must clear the selection cap.
    sep_rhs = d / 6 - s * d / 6 - u * d / 6 - Fraction(2, 3)
    add("separation_margin", d1, sep_rhs, sep_rhs > d1)

    return FeasibilityReport(
        d=d, records=tuple(records), passed=all(rec.passed for rec in records)
    )


def _vector_feasible(profile: ConstantProfile, ds: np.ndarray) -> np.ndarray:
    """Float evaluation of the full constraint set over an array of degrees.

    Used only to locate the feasible boundary quickly; the exact scalar check
    confirms any candidate before it is reported.
    """
    k, s, r, u = profile.k, profile.s, profile.r, profile.u
    s1, r1, u1 = profile.s1, profile.r1, profile.u1
    ln_s3, ln_r3, ln_u3 = profile.log_tail_bases()
    thr_s, thr_r, thr_u = monotonicity_thresholds(profile)
    ln_cap = -(1.0 + math.log(3.0))
    d = ds.astype(np.float64)
    logd3 = 3.0 * np.log(d)
    d1 = d / 6 - s * d / 3 - u * d / 6 - 13.0 / 3.0
    q = s / k + 7.0 / (k * d)
    ok = 3 * (d**3 - d**2 + d) + 2 < 3 * d**3 - 1
    ok &= 2.0 / k < s1 * d
    ok &= (logd3 + d * ln_s3 < ln_cap) & (d >= thr_s)
    ok &= (q < 1.0) & (2 * q - q * q < r1)
    ok &= (logd3 + d * ln_r3 < ln_cap) & (d >= thr_r)
    ok &= 2.0 / k**2 - 1.0 / (k**4 * d) < u1 * d
    ok &= (logd3 + d * ln_u3 < ln_cap) & (d >= thr_u)
    ok &= (u * d / 2 + 1 <= d1) & (d1 <= (d - u * d) / 2 - 1)
    ok &= (d - s * d - u * d - r * d) / 2 - 1 >= 12 * k * d + 12
    ok &= d / 6 - s * d / 6 - u * d / 6 - 2.0 / 3.0 > d1
    return ok


def min_feasible_d(profile: ConstantProfile, lo: int = SCAN_LO, hi: int = SCAN_HI) -> int:
    """Smallest degree in [lo, hi] passing every constraint.

    The range below the monotonicity thresholds gets checked exhaustively and
    the region above is a linear scan; both run through a vectorized float
    pass that narrows the boundary, after which the exact scalar check fixes
    the answer.
    """
    profile.validate()
    if lo < SCAN_LO:
        raise InputError(f"scan must start at or above {SCAN_LO}, got {lo}")
    chunk = 1 << 16
    start = lo
    while start <= hi:
        stop = min(hi, start + chunk - 1)
        ds = np.arange(start, stop + 1, dtype=np.int64)
        idx = np.flatnonzero(_vector_feasible(profile, ds))
        if idx.size:
            cand = int(ds[idx[0]])
            for d in range(max(lo, cand - 4), hi + 1):
                if check_profile(profile, d).passed:
                    return d
            break
        start = stop + 1
    raise BudgetError(f"no feasible degree in [{lo}, {hi}]")


def optimize_profile(
    seed: int,
    budget: int,
    start: ConstantProfile = REFERENCE_PROFILE,
    hi: int = SCAN_HI,
) -> tuple[ConstantProfile, int]:
    """Coordinate descent over (k, s, r, u, s1, r1, u1) minimizing the feasible degree.

    ``budget`` counts feasibility-scan evaluations. The start profile is the
    first evaluation, so the result is never worse than its minimal degree.
    Steps shrink after stale sweeps; once they bottom out, seeded jitter
    around the incumbent restarts the descent. Deterministic per seed.
    """
    if budget < 1:
        raise InputError(f"budget must be >= 1, got {budget}")
    start.validate()
    rng = np.random.default_rng(seed)
    evals = 0

    def evaluate(params: dict[str, float], cap: int) -> int | None:
        nonlocal evals
        evals += 1
        try:
            prof = ConstantProfile(**params)
            prof.validate()
            return min_feasible_d(prof, hi=cap)
        except (InputError, BudgetError):
            return None

    best_params = {name: getattr(start, name) for name in _PROFILE_FIELDS}
    best_d = evaluate(best_params, hi)
    if best_d is None:
        raise BudgetError("start profile admits no feasible degree")
    base_steps = {name: max(1e-5, 0.08 * best_params[name]) for name in _PROFILE_FIELDS}
    steps = dict(base_steps)

    while evals < budget:
        improved = False
        for name in _PROFILE_FIELDS:
            for sign in (1.0, -1.0):
                if evals >= budget:
                    break
                cand = dict(best_params)
                cand[name] = cand[name] + sign * steps[name]
                d = evaluate(cand, min(hi, best_d - 1) if best_d > SCAN_LO else hi)
                if d is not None and d < best_d:
                    best_params, best_d = cand, d
                    improved = True
                    break
        if evals >= budget:
            break
        if not improved:
            if max(steps.values()) < 1e-7:
                # Descent converged; jitter around the incumbent and retry.
                cand = {
                    name: float(
                        np.clip(
                            best_params[name] + rng.normal(0.0, base_steps[name]),
                            1e-6,
                            0.999,
                        )
                    )
                    for name in _PROFILE_FIELDS
                }
                d = evaluate(cand, min(hi, best_d - 1) if best_d > SCAN_LO else hi)
                if d is not None and d < best_d:
                    best_params, best_d = cand, d
                steps = dict(base_steps)
            else:
                steps = {name: val * 0.5 for name, val in steps.items()}

    return ConstantProfile(**best_params), best_d
