"""Closed-form spectra, dimensions and inequality bounds for the model families.

Everything here is an exact formula. Tolerances belong to the callers that
compare these values with estimates.
"""

import math
from dataclasses import dataclass

from .geometry import HolderParams

# the near-integer Moran formulas are only trusted for fractional parts up to this
MORAN_WINDOW = 0.2


def _check_theta(theta):
    if not 0 < theta < 1:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")


@dataclass(frozen=True)
class BoundsInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    def contains(self, v, slack=0.0):
        return self.lo - slack <= v <= self.hi + slack

    def margin(self, v):
        """Signed distance inside the interval (negative when outside)."""
        return min(v - self.lo, self.hi - v)


def seq_spectrum(B, theta):
    if not 0 <= B <= 1:
        raise ValueError("B must lie in [0, 1]")
    _check_theta(theta)
    return min(B / (1 - theta), 1.0)


@dataclass(frozen=True)
class FLambdaFacts:
    lam: float
    box: float
    assouad: float

    def spectrum(self, theta):
        return seq_spectrum(self.box, theta)


def f_lambda_facts(lam):
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return FLambdaFacts(lam, 1 / (lam + 1), 1.0)


def spiral_spectrum(B, theta):
    if not 1 < B <= 2:
        raise ValueError("spiral formula needs B in (1, 2]")
    _check_theta(theta)
    return min(B / (1 - theta), 2.0)


def spiral_assouad_dichotomy(params):
    """2 for sub-exponential (power) winding, 1 for exponential winding."""
    return 2.0 if params.winding.family == "power" else 1.0


def _check_moran(alpha, beta):
    if not alpha > beta > 1:
        raise ValueError("need alpha > beta > 1")


@dataclass(frozen=True)
class MoranDims:
    lower: float
    lower_box: float
    upper_box: float
    assouad: float


def moran_dims(alpha, beta):
    _check_moran(alpha, beta)
    lb = (beta - 1) / (alpha - 1)
    return MoranDims(0.0, lb, lb * alpha / beta, 1.0)


def moran_spectrum_integer_theta(alpha, beta):
    d = moran_dims(alpha, beta)
    return d.upper_box, d.lower_box


def moran_fraction(alpha, theta):
    """Fractional part of log_alpha(1/theta), snapped to 0 within 1e-12."""
    x = math.log(1 / theta) / math.log(alpha)
    c = x - math.floor(x)
    if c > 1 - 1e-12:
        c = 0.0
    return c if c > 1e-12 else 0.0


def moran_spectrum_near(alpha, beta, theta, c=None):
    """Assouad and lower spectrum values for theta just below alpha**-m.

    ``c`` overrides the fractional part computed from theta. At c = 0 the
    exact integer-theta values are returned; the formulas reduce to them.
    """
    _check_moran(alpha, beta)
    _check_theta(theta)
    if c is None:
        c = moran_fraction(alpha, theta)
    if not 0 <= c <= MORAN_WINDOW + 1e-12:
        raise ValueError(f"fractional part {c:.4g} of log_alpha(1/theta) is outside "
                         f"[0, {MORAN_WINDOW}]; compare only at theta = alpha**-m")
    if c == 0:
        return moran_spectrum_integer_theta(alpha, beta)
    return moran_near_formula(alpha, beta, theta, c)


def moran_near_formula(alpha, beta, theta, c):
    """The two near-integer closed forms evaluated as written, without any gate."""
    q = (1 - beta) / (1 - alpha)
    ac = alpha ** c
    inv = 1 / theta
    a_val = (alpha / beta * q * (ac - inv) - ac + 1) / (1 - inv)
    l_val = (q * (ac - inv)) / (1 - inv)
    return a_val, l_val


def general_bounds(upper_box, assouad, theta):
    if not 0 <= upper_box <= assouad:
        raise ValueError("need 0 <= upper_box <= assouad")
    _check_theta(theta)
    return BoundsInterval(upper_box, min(upper_box / (1 - theta), assouad))


def lower_general_bounds(lower, lower_box):
    if not lower <= lower_box:
        raise ValueError("need lower <= lower_box")
    return BoundsInterval(lower, lower_box)


def regularity_envelope(value_at_theta2, assouad, theta1, theta2):
    """Interval that must contain the spectrum at theta1 given its value at theta2."""
    if not 0 < theta1 < theta2 < 1:
        raise ValueError("need 0 < theta1 < theta2 < 1")
    if not 0 <= value_at_theta2 <= assouad:
        raise ValueError("need 0 <= value_at_theta2 <= assouad")
    den = 1 / theta1 - 1
    w2 = (1 / theta2 - 1) / den
    wa = (1 / theta1 - 1 / theta2) / den
    lo = value_at_theta2 * w2
    return BoundsInterval(lo, assouad * wa + lo)


def lipschitz_bound(assouad, theta1, theta2):
    if not 0 < theta1 <= theta2 < 1:
        raise ValueError("need 0 < theta1 <= theta2 < 1")
    return assouad / (theta2 * (1 - theta1)) * abs(theta1 - theta2)


@dataclass(frozen=True)
class OracleCurve:
    """A closed-form spectrum: family is one of sequence, f_lambda, spiral, moran, constant."""

    family: str
    params: tuple

    def __post_init__(self):
        p = tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", p)
        f = self.family
        if f == "sequence":
            if len(p) != 1 or not 0 <= p[0] <= 1:
                raise ValueError("sequence curve takes B in [0, 1]")
        elif f == "f_lambda":
            if len(p) != 1 or not p[0] > 0:
                raise ValueError("f_lambda curve takes lambda > 0")
        elif f == "spiral":
            if len(p) != 1 or not 1 < p[0] <= 2:
                raise ValueError("spiral curve takes B in (1, 2]")
        elif f == "moran":
            if len(p) != 2:
                raise ValueError("moran curve takes (alpha, beta)")
            _check_moran(*p)
        elif f == "constant":
            if len(p) != 1 or not p[0] >= 0:
                raise ValueError("constant curve takes a value >= 0")
        else:
            raise ValueError(f"unknown oracle family {f!r}")

    @property
    def upper_box(self):
        f, p = self.family, self.params
        if f == "f_lambda":
            return 1 / (p[0] + 1)
        if f == "moran":
            return moran_dims(*p).upper_box
        return p[0]

    @property
    def lower_box(self):
        if self.family == "moran":
            return moran_dims(*self.params).lower_box
        return self.upper_box

    @property
    def assouad(self):
        f, p = self.family, self.params
        if f in ("sequence", "f_lambda"):
            return 1.0 if self.upper_box > 0 else 0.0
        if f == "spiral":
            return 2.0
        if f == "moran":
            return 1.0
        return p[0]

    def __call__(self, theta):
        _check_theta(theta)
        f, p = self.family, self.params
        if f == "sequence":
            return seq_spectrum(p[0], theta)
        if f == "f_lambda":
            return seq_spectrum(1 / (p[0] + 1), theta)
        if f == "spiral":
            return spiral_spectrum(p[0], theta)
        if f == "moran":
            return moran_spectrum_near(p[0], p[1], theta)[0]
        return p[0]

    def lower(self, theta):
        """Lower spectrum where a closed form is known."""
        _check_theta(theta)
        f, p = self.family, self.params
        if f in ("sequence", "f_lambda"):
            # isolated points pin the lower spectrum to 0
            return 0.0
        if f == "moran":
            return moran_spectrum_near(p[0], p[1], theta)[1]
        if f == "constant":
            return p[0]
        raise ValueError(f"no lower-spectrum formula for the {f} family")


def holder_spectrum_bounds(curve, hp, theta):
    """Interval containing the Assouad spectrum at theta of a bi-Holder image of the set.

    ``curve`` is the spectrum of the original set; hp carries the exponents
    alpha <= 1 <= beta of the distortion.
    """
    _check_theta(theta)
    a, b = hp.alpha, hp.beta

    def spec(t):
        return 0.0 if t >= 1 else curve(t)

    t_lo = b / a * theta
    lo = (1 - t_lo) / (b * (1 - theta)) * spec(t_lo)
    lo = max(lo, 0.0, curve.upper_box / b)
    t_hi = a / b * theta
    hi = (1 - t_hi) / (a * (1 - theta)) * spec(t_hi)
    return BoundsInterval(lo, hi)


def holder_assouad_lower(assouad, theta0, hp):
    if not 0 <= theta0 < 1:
        raise ValueError("theta0 must lie in [0, 1)")
    return assouad * (1 - theta0) / (hp.beta - theta0 * hp.alpha)


def spiral_unwind_beta_bound(B, alpha):
    if not 1 < B <= 2:
        raise ValueError("B must lie in (1, 2]")
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    return alpha + B * (1 - alpha / 2)


def power_map_params(a):
    """Distortion exponents of x -> x**a on [0, 1]."""
    if not a > 0:
        raise ValueError("exponent must be positive")
    return HolderParams(min(a, 1.0), max(a, 1.0))


__all__ = ["BoundsInterval", "OracleCurve", "MoranDims", "FLambdaFacts", "seq_spectrum",
           "f_lambda_facts", "spiral_spectrum", "spiral_assouad_dichotomy", "moran_dims",
           "moran_spectrum_integer_theta", "moran_spectrum_near", "moran_near_formula",
           "moran_fraction",
           "general_bounds", "lower_general_bounds", "regularity_envelope", "lipschitz_bound",
           "holder_spectrum_bounds", "holder_assouad_lower", "spiral_unwind_beta_bound",
           "power_map_params"]
