"""Secure-key rate model for CW-pumped entangled-photon links and planners.

The chain goes: true coincidences from source brightness and arm
transmittances, accidental coincidences from singles rates inside the
coincidence window, a window efficiency for how many true pairs the window
catches, then QBER and the distilled secure rate after error correction and
privacy amplification.  Planners on top convert a secure rate or a stored
key stock into signing time or supported signing rounds.
"""

from __future__ import annotations

import configparser
import math
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from .keymat import required_n


class NoSignalError(ValueError):
    """Measured coincidence rate is zero; the error rate is undefined."""


class InfeasibleDistanceError(ValueError):
    """No secure key can be distilled at this distance."""


def binary_entropy(x: float) -> float:
    """H2(x) in bits; 0 by continuity at x = 0 and x = 1."""
    if x < 0.0 or x > 1.0:
        raise ValueError("entropy argument must be in [0, 1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def window_efficiency(t_cc: float, t_delta: float) -> float:
    """Fraction of true coincidences inside a window of width t_cc.

    Integrates the normalized Gaussian arrival-time spread (FWHM t_delta)
    over [-t_cc/2, t_cc/2], which closes to erf(sqrt(ln 2) t_cc / t_delta).
    """
    if t_cc <= 0.0 or t_delta <= 0.0:
        raise ValueError("window width and jitter must be positive")
    return math.erf(math.sqrt(math.log(2.0)) * t_cc / t_delta)


@dataclass(frozen=True)
class SourceParams:
    """Physical parameters of one CW-pumped entangled link (both sides)."""

    brightness: float = 1e8          # pairs/s at the source
    e_pol_a: float = 0.0181          # per-side polarization error probability
    e_pol_b: float = 0.0181
    dark_count: float = 300.0        # counts/s per side
    t_cc: float = 500e-12            # coincidence window, s
    receiver_loss_db: float = 3.0    # per-side receiving loss
    eta_tcc: float | None = 0.761    # direct window efficiency, or None
    t_delta: float | None = None     # timing jitter FWHM, s; alternative input
    alpha_db_per_km: float = 0.2     # fiber attenuation
    q_sift: float = 0.5              # sifting factor q
    f_ec: float = 1.1                # error-correction inefficiency f

    def __post_init__(self) -> None:
        if self.brightness < 0 or self.dark_count < 0 or self.t_cc < 0:
            raise ValueError("rates and window width must be non-negative")
        for e in (self.e_pol_a, self.e_pol_b):
            if not 0.0 <= e <= 1.0:
                raise ValueError("polarization errors are probabilities")
        if self.eta_tcc is None and self.t_delta is None:
            raise ValueError("either eta_tcc or t_delta must be given")
        if self.eta_tcc is not None and not 0.0 < self.eta_tcc <= 1.0:
            raise ValueError("eta_tcc must be in (0, 1]")
        if not 0.0 < self.q_sift <= 1.0 or self.f_ec < 1.0:
            raise ValueError("q in (0, 1] and f >= 1 required")

    @property
    def e_pol(self) -> float:
        """Pair polarization error: either side errs, not both."""
        ea, eb = self.e_pol_a, self.e_pol_b
        return ea * (1.0 - eb) + eb * (1.0 - ea)

    def resolved_eta_tcc(self) -> float:
        if self.eta_tcc is not None:
            if self.t_delta is not None:
                warnings.warn("both eta_tcc and t_delta given; using eta_tcc",
                              stacklevel=2)
            return self.eta_tcc
        return window_efficiency(self.t_cc, self.t_delta)


PRESETS = {"table1": SourceParams()}


def load_source_params(path: str | Path) -> SourceParams:
    """Read a [source] section; unset keys keep their defaults."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    if not cp.read(path):
        raise ValueError(f"cannot read parameter file {path}")
    sec = cp["source"]
    kwargs = {}
    for key in ("brightness", "e_pol_a", "e_pol_b", "dark_count", "t_cc",
                "receiver_loss_db", "eta_tcc", "t_delta", "alpha_db_per_km",
                "q_sift", "f_ec"):
        opt = key.replace("_", "-")
        if opt in sec:
            kwargs[key] = sec.getfloat(opt)
    if "t-delta" in sec and "eta-tcc" not in sec:
        kwargs["eta_tcc"] = None  # derive from the given jitter instead
    return replace(SourceParams(), **kwargs)


@dataclass(frozen=True)
class LinkBudget:
    """Loss per source arm in dB and the corresponding transmittances."""

    arm_loss_db_a: float
    arm_loss_db_b: float

    def __post_init__(self) -> None:
        if self.arm_loss_db_a < 0 or self.arm_loss_db_b < 0:
            raise ValueError("arm losses must be non-negative")

    @property
    def eta_a(self) -> float:
        return 10.0 ** (-self.arm_loss_db_a / 10.0)

    @property
    def eta_b(self) -> float:
        return 10.0 ** (-self.arm_loss_db_b / 10.0)

    @classmethod
    def midpoint_source(cls, distance_km: float, alpha_db_per_km: float,
                        receiver_loss_db: float) -> LinkBudget:
        """Source halfway between the two parties, equal fiber arms."""
        arm = distance_km / 2.0 * alpha_db_per_km + receiver_loss_db
        return cls(arm, arm)


@dataclass(frozen=True)
class RateResult:
    """All intermediate rates of the chain plus the final secure rate."""

    cc_true: float
    cc_acc: float
    cc_measured: float
    cc_err: float
    qber: float
    secure_rate: float


def rate(params: SourceParams, budget: LinkBudget) -> RateResult:
    """Evaluate the full rate chain for one link.

    The secure rate applies one measured QBER to both the bit and phase
    entropy terms and clamps at zero when the bracket goes negative.
    """
    eta_a, eta_b = budget.eta_a, budget.eta_b
    cc_true = params.brightness * eta_a * eta_b
    singles_a = params.brightness * eta_a + params.dark_count
    singles_b = params.brightness * eta_b + params.dark_count
    cc_acc = singles_a * singles_b * params.t_cc
    eta_tcc = params.resolved_eta_tcc()
    cc_measured = eta_tcc * cc_true + cc_acc
    if cc_measured <= 0.0:
        raise NoSignalError("no coincidences; QBER undefined")
    cc_err = eta_tcc * cc_true * params.e_pol + 0.5 * cc_acc
    qber = cc_err / cc_measured
    h = binary_entropy(qber)
    secure = params.q_sift * cc_measured * (1.0 - params.f_ec * h - h)
    return RateResult(cc_true, cc_acc, cc_measured, cc_err, qber, max(secure, 0.0))


def rate_at_distance(params: SourceParams, distance_km: float,
                     alpha_db_per_km: float | None = None) -> RateResult:
    """Rate with the source at the midpoint of a signer-user fiber span."""
    alpha = params.alpha_db_per_km if alpha_db_per_km is None else alpha_db_per_km
    budget = LinkBudget.midpoint_source(distance_km, alpha, params.receiver_loss_db)
    return rate(params, budget)


def time_to_sign(params: SourceParams, distance_km: float, m_bits: int,
                 eps_f: float, alpha_db_per_km: float | None = None) -> float:
    """Seconds of key generation needed per signing round at this distance.

    One round costs 3n bits on each link and all links run in parallel, so
    the wait is 3n over the per-link secure rate.
    """
    result = rate_at_distance(params, distance_km, alpha_db_per_km)
    if result.secure_rate <= 0.0:
        raise InfeasibleDistanceError(
            f"secure rate is zero at {distance_km} km")
    return 3.0 * required_n(m_bits, eps_f) / result.secure_rate


def supported_rounds(key_bits_per_link: Sequence[int], m_bits: int,
                     eps_f: float) -> int:
    """Signing rounds the bottleneck link's key stock can fund."""
    if not key_bits_per_link:
        raise ValueError("need at least one link key stock")
    per_round = 3 * required_n(m_bits, eps_f)
    return min(key_bits_per_link) // per_round
