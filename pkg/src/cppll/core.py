"""Loop parameters, discrete state, normalized gains, and the lock-region test.

Everything here is shared by the discrete-time models and the circuit-level
simulator. All quantities are plain double-precision floats; units are
documented, not enforced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


def euclid_mod(x: float, m: float) -> float:
    """Euclidean remainder of ``x`` modulo ``m > 0``, guaranteed in [0, m).

    Python's ``%`` already takes the divisor's sign, but for tiny negative
    ``x`` the rounded result can equal ``m`` exactly (e.g. ``(-1e-20) % 1.0
    == 1.0``); that case is folded back to 0.
    """
    r = x % m
    return 0.0 if r == m else r


def positive_quadratic_root(a: float, b: float, x: float) -> float:
    """The root ``(-b + sqrt(b^2 - 4*a*x)) / (2*a)`` of ``a*r^2 + b*r + x = 0``.

    Requires ``a > 0`` and ``x <= 0``, so the discriminant is at least ``b^2``
    and the selected root is nonnegative. The branch with no subtractive
    cancellation is picked: for ``b >= 0`` the textbook numerator cancels
    when ``a*x`` is small against ``b^2``, so the algebraically equivalent
    ``-2*x / (b + sqrt(b^2 - 4*a*x))`` is used (its denominator is strictly
    positive for ``x < 0`` because ``sqrt(b^2 - 4*a*x) > |b|``); for
    ``b < 0`` the textbook form adds two nonnegative terms and is exact,
    while the alternative would cancel.
    """
    disc = b * b - 4.0 * a * x
    assert disc >= 0.0, "negative discriminant reached with x <= 0: program bug"
    if b < 0.0:
        return (-b + math.sqrt(disc)) / (2.0 * a)
    if x == 0.0:
        return 0.0
    return -2.0 * x / (b + math.sqrt(disc))


@dataclass(frozen=True)
class LoopParameters:
    """Physical constants of the loop.

    r2 (ohm) and c (farad) form the series loop filter; kv is the VCO gain
    (Hz/V); ip is the pump current (A); t_ref is the reference period (s);
    omega_free is the VCO free-running frequency (Hz), zero by default.
    """

    r2: float
    c: float
    kv: float
    ip: float
    t_ref: float
    omega_free: float = 0.0

    def __post_init__(self) -> None:
        for name in ("r2", "c", "kv", "ip", "t_ref"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not (math.isfinite(self.omega_free) and self.omega_free >= 0.0):
            raise ValueError(f"omega_free must be >= 0 and finite, got {self.omega_free!r}")

    @property
    def pump_rate(self) -> float:
        """Capacitor slew rate ip/c (V/s) while the pump is on."""
        return self.ip / self.c


@dataclass(frozen=True)
class PllState:
    """Discrete state: tau is the signed width (s) of the k-th pump pulse
    (positive when the reference led, negative when the VCO led) and v is the
    filter-capacitor voltage (V) at the instant the pump switched off."""

    tau: float
    v: float
    k: int = 0


@dataclass(frozen=True)
class NormalizedGains:
    """Dimensionless loop characterization.

    ``f_n = sqrt(k_n / tau_2n) / (2*pi)`` and ``zeta = sqrt(k_n * tau_2n) / 2``
    hold by construction when built through :func:`normalized_gains` or
    :func:`gains_from_kn_tau2n`; direct construction is the caller's business
    (used, for instance, to evaluate bounds at externally rounded values).
    """

    k_n: float
    tau_2n: float
    f_n: float
    zeta: float


@dataclass(frozen=True)
class AllowedArea:
    """Lock-region verdict plus the two right-hand-side bounds on f_n."""

    inside: bool
    curve_bound: float      # (sqrt(1 + zeta^2) - zeta) / pi
    hyperbola_bound: float  # 1 / (4 * pi * zeta)


def gains_from_kn_tau2n(k_n: float, tau_2n: float) -> NormalizedGains:
    if not (k_n > 0.0 and tau_2n > 0.0):
        raise ValueError("k_n and tau_2n must be positive")
    f_n = math.sqrt(k_n / tau_2n) / TWO_PI
    zeta = math.sqrt(k_n * tau_2n) / 2.0
    return NormalizedGains(k_n=k_n, tau_2n=tau_2n, f_n=f_n, zeta=zeta)


def kn_tau2n_from_fn_zeta(f_n: float, zeta: float) -> tuple[float, float]:
    """Invert (k_n, tau_2n) -> (f_n, zeta)."""
    if not (f_n > 0.0 and zeta > 0.0):
        raise ValueError("f_n and zeta must be positive")
    return 4.0 * math.pi * f_n * zeta, zeta / (math.pi * f_n)


def normalized_gains(p: LoopParameters) -> NormalizedGains:
    """Dimensionless gains of the loop: k_n = ip*r2*kv*t_ref, tau_2n = r2*c/t_ref."""
    return gains_from_kn_tau2n(p.ip * p.r2 * p.kv * p.t_ref, p.r2 * p.c / p.t_ref)


def allowed_area(g: NormalizedGains) -> AllowedArea:
    """Design-region test: f_n must lie strictly below both bounds.

    Equality counts as outside (the inequalities are strict).
    """
    curve = (math.sqrt(1.0 + g.zeta * g.zeta) - g.zeta) / math.pi
    hyperbola = 1.0 / (4.0 * math.pi * g.zeta)
    return AllowedArea(
        inside=g.f_n < curve and g.f_n < hyperbola,
        curve_bound=curve,
        hyperbola_bound=hyperbola,
    )
