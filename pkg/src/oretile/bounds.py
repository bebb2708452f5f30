"""Exact rational formulas for clique-cover proportions, availability, and leftover constants.

Nothing here uses floating point. Quantities that are k-th roots of rationals
are carried as :class:`Surd` values and compared by raising both sides to the
k-th power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .chromatic import BottleSpec, gamma_param
from .errors import PreconditionError

F = Fraction


class PhiVector:
    """Proportions phi_1..phi_k of clique sizes in a cover; ``phi[i]`` is 0 outside 1..k."""

    __slots__ = ("k", "values")

    def __init__(self, k: int, values: Mapping[int, object] | Sequence):
        if isinstance(values, Mapping):
            vals = tuple(F(values.get(i, 0)) for i in range(1, k + 1))
        else:
            vals = tuple(F(x) for x in values)
            if len(vals) != k:
                raise PreconditionError("need exactly k proportions phi_1..phi_k")
        if any(x < 0 for x in vals):
            raise PreconditionError("proportions must be nonnegative")
        self.k = k
        self.values = vals

    @classmethod
    def from_counts(cls, k: int, counts: Mapping[int, int], ell: int) -> "PhiVector":
        return cls(k, {i: F(c, ell) for i, c in counts.items()})

    def __getitem__(self, i: int) -> Fraction:
        return self.values[i - 1] if 1 <= i <= self.k else F(0)

    def weighted_sum(self) -> Fraction:
        return sum((i * self[i] for i in range(1, self.k + 1)), F(0))

    def is_normalised(self) -> bool:
        return self.weighted_sum() == 1

    def signature_order(self) -> tuple[Fraction, ...]:
        return tuple(self[i] for i in range(self.k, 0, -1))

    def __eq__(self, other):
        return isinstance(other, PhiVector) and self.k == other.k and self.values == other.values

    def __repr__(self):
        return f"PhiVector(k={self.k}, {[str(x) for x in self.values]})"


def _phi(phi, k: int) -> PhiVector:
    return phi if isinstance(phi, PhiVector) else PhiVector(k, phi)


# ------------------------------------------------------------ parameter set


@dataclass(frozen=True)
class ParamSet:
    k: int
    alpha: Fraction
    gamma: Fraction
    d: Fraction
    eps: Fraction
    mu: Fraction
    s: Fraction
    phi: PhiVector

    @classmethod
    def build(cls, k, alpha, d, eps, mu, phi) -> "ParamSet":
        alpha = F(alpha)
        gamma = gamma_param(k, alpha)
        phi = _phi(phi, k)
        return cls(k, alpha, gamma, F(d), F(eps), F(mu), s_param(phi, k, gamma), phi)

    def violations(self) -> list[str]:
        out = []
        if self.gamma != gamma_param(self.k, self.alpha):
            out.append("gamma differs from alpha/((k-1)(k-1+alpha))")
        if not self.phi.is_normalised():
            out.append(f"sum i*phi_i = {self.phi.weighted_sum()} != 1")
        if self.s != s_param(self.phi, self.k, self.gamma):
            out.append("s differs from its defining identity")
        out += chain_violations(self.alpha, self.d, self.eps, self.mu)
        return out

    def validate(self) -> "ParamSet":
        bad = self.violations()
        if bad:
            raise PreconditionError("; ".join(bad))
        return self


def chain_violations(alpha, d, eps, mu) -> list[str]:
    """The concrete ordering eps <= d/10, d <= mu/100, mu <= min(alpha, 1-alpha)/10.

    For alpha = 1 (balanced patterns) the last link reads mu <= 1/10.
    """
    alpha, d, eps, mu = F(alpha), F(d), F(eps), F(mu)
    out = []
    if not 0 < eps <= d / 10:
        out.append(f"need 0 < eps <= d/10 (eps={eps}, d={d})")
    if not d <= mu / 100:
        out.append(f"need d <= mu/100 (d={d}, mu={mu})")
    cap = F(1, 10) if alpha == 1 else min(alpha, 1 - alpha) / 10
    if not 0 < mu <= cap:
        out.append(f"need 0 < mu <= {cap} (mu={mu})")
    return out


# ------------------------------------------------------------ cover formulas


def s_param(phi, k: int, gamma) -> Fraction:
    """s = phi_k - sum_{i=2}^{k-1} (i-1) phi_{k-i} - (k-1) gamma."""
    phi = _phi(phi, k)
    return phi[k] - sum((F(i - 1) * phi[k - i] for i in range(2, k)), F(0)) - (k - 1) * F(gamma)


@dataclass(frozen=True)
class Check:
    passed: bool
    slack: Fraction

    def as_dict(self) -> dict:
        return {"passed": self.passed, "slack": str(self.slack)}


def phi_k_lower_check(phi, k: int, gamma, d, eps) -> Check:
    """phi_k >= sum (i-1) phi_{k-i} + (k-1) gamma - (k-1)(d + 2 eps)."""
    phi = _phi(phi, k)
    rhs = (sum((F(i - 1) * phi[k - i] for i in range(2, k)), F(0))
           + (k - 1) * F(gamma) - (k - 1) * (F(d) + 2 * F(eps)))
    slack = phi[k] - rhs
    return Check(slack >= 0, slack)


def lambda_lower(i: int, phi, k: int, gamma, s, d, eps) -> Fraction:
    """Lower bound on the proportion of k-cliques well connected to a typical (k-i)-clique."""
    if not 1 <= i <= k - 1:
        raise PreconditionError(f"index i={i} outside [1, k-1]")
    phi = _phi(phi, k)
    total = (k - 1) * F(gamma) + F(i - 1, k - 1) * F(s)
    total += sum((F(j - 1) * phi[k - j] for j in range(2, i + 1)), F(0))
    total += (i - 1) * sum((phi[k - j] for j in range(i + 1, k)), F(0))
    return total - (k - i) * (F(d) + 2 * F(eps))


@dataclass(frozen=True)
class AlphaPrime:
    value: Fraction
    p: int
    q: int


def alpha_prime(alpha, k: int, mu) -> AlphaPrime:
    """alpha' = alpha + alpha(1 - alpha) mu / k^2, in lowest terms p/q."""
    alpha, mu = F(alpha), F(mu)
    if not 0 < alpha < 1:
        raise PreconditionError("alpha' needs 0 < alpha < 1")
    if mu <= 0 or mu.numerator != 1:
        raise PreconditionError(f"mu must be a unit fraction 1/N (got {mu})")
    value = alpha + alpha * (1 - alpha) * mu / (k * k)
    p, q = value.numerator, value.denominator
    omega = alpha.denominator
    if not (p < q <= omega * omega * k * k / mu):
        raise PreconditionError(f"denominator {q} exceeds omega^2 k^2 / mu")
    return AlphaPrime(value, p, q)


def typicality_threshold(alpha_p, k: int) -> int:
    """c_t = ceil((k - 1 + alpha') / (1 - alpha'))."""
    a = F(alpha_p.value if isinstance(alpha_p, AlphaPrime) else alpha_p)
    if a >= 1:
        raise PreconditionError("alpha' must be below 1")
    return math.ceil((k - 1 + a) / (1 - a))


def round_weight(l: int, a) -> Fraction:
    """(l - 1 + a)/(1 - a): pool k-cliques needed per unit of a (k-l)-clique."""
    a = F(a)
    return (l - 1 + a) / (1 - a)


@dataclass(frozen=True)
class Feasibility:
    i: int
    availability_slack: Fraction      # lambda_i - sum (l-1+a')/(1-a') phi_{k-l}
    I_i: Fraction                     # same with alpha in place of alpha'
    I_i_lower: Fraction               # closed-form lower bound on I_i
    correction: Fraction              # I_i minus availability slack
    mu1: Fraction | None

    @property
    def passed(self) -> bool:
        return self.availability_slack > 0

    @property
    def chain_holds(self) -> bool | None:
        if self.mu1 is None:
            return None
        return self.correction <= self.mu1 < self.I_i

    def as_dict(self) -> dict:
        return {
            "i": self.i, "passed": self.passed,
            "availability_slack": str(self.availability_slack),
            "I_i": str(self.I_i), "I_i_lower": str(self.I_i_lower),
            "correction": str(self.correction),
            "mu1": None if self.mu1 is None else str(self.mu1),
            "chain_holds": self.chain_holds,
        }


def I_lower(i: int, phi, alpha, k: int, s) -> Fraction:
    phi = _phi(phi, k)
    alpha, s = F(alpha), F(s)
    r = alpha / (1 - alpha)
    out = (F(i - 1, k - 1) + k * r / (k - 1)) * s
    out += sum(((i - 1 + r * j) * phi[k - j] for j in range(i + 1, k)), F(0))
    return out


def feasibility_Ii(i: int, lambda_i, phi, alpha, alpha_p, k: int, s, mu=None) -> Feasibility:
    """Availability inequality for eliminating (k-i)-cliques, plus the I_i chain."""
    phi = _phi(phi, k)
    a = F(alpha)
    ap = F(alpha_p.value if isinstance(alpha_p, AlphaPrime) else alpha_p)
    if ap >= 1:
        raise PreconditionError("alpha' must be below 1")
    lam = F(lambda_i)
    need_p = sum((round_weight(l, ap) * phi[k - l] for l in range(1, i + 1)), F(0))
    need = sum((round_weight(l, a) * phi[k - l] for l in range(1, i + 1)), F(0))
    mu1 = None if mu is None else k * a / ((1 - a) * (k - 1)) * F(mu)
    return Feasibility(i, lam - need_p, lam - need, I_lower(i, phi, a, k, s), need_p - need, mu1)


def correction_term(l: int, alpha, alpha_p) -> Fraction:
    """l (alpha' - alpha) / ((1 - alpha')(1 - alpha))."""
    a, ap = F(alpha), F(alpha_p)
    return l * (ap - a) / ((1 - ap) * (1 - a))


# ----------------------------------------------------------- extremal cascade


@dataclass(frozen=True)
class Surd:
    """coef * radicand**(1/index) + offset, with rational parts."""

    coef: Fraction
    radicand: Fraction
    index: int
    offset: Fraction = F(0)

    def bracket(self, digits: int = 12) -> tuple[Fraction, Fraction]:
        """Rational lower and upper bounds on the value."""
        scale = 10 ** digits
        num = self.radicand.numerator * scale ** self.index
        root = _iroot(num // self.radicand.denominator, self.index)
        lo = F(root, scale)
        hi = F(root + 1, scale)
        if self.coef >= 0:
            return self.coef * lo + self.offset, self.coef * hi + self.offset
        return self.coef * hi + self.offset, self.coef * lo + self.offset

    def __float__(self):
        lo, hi = self.bracket()
        return float((lo + hi) / 2)

    def __str__(self):
        core = f"{self.coef}*({self.radicand})^(1/{self.index})"
        return core if self.offset == 0 else f"{core} + {self.offset}"


def _iroot(x: int, k: int) -> int:
    """Largest integer r with r**k <= x."""
    if x < 0:
        raise ValueError("negative radicand")
    if x < 2:
        return x
    r = 1 << ((x.bit_length() + k - 1) // k)
    while True:
        s = ((k - 1) * r + x // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r ** k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


@dataclass(frozen=True)
class ExtremalCascade:
    k: int
    sigma_partials: tuple[Fraction, ...]     # sigma_0 .. sigma_{k-1}
    alpha0: Fraction
    eps: Fraction
    t: int
    j0: int
    mu_prime: Surd                           # C^{j0} eps
    eps_prime: Surd                          # k (C^{j0-1} eps + 2 mu)

    def as_dict(self) -> dict:
        return {
            "k": self.k, "sigma_partials": [str(x) for x in self.sigma_partials],
            "alpha0": str(self.alpha0), "t": self.t, "j0": self.j0,
            "mu_prime": str(self.mu_prime), "mu_prime_approx": float(self.mu_prime),
            "eps_prime": str(self.eps_prime), "eps_prime_approx": float(self.eps_prime),
        }


def sigma_partials(phi, k: int) -> tuple[Fraction, ...]:
    """sigma_i = sum_{j <= i} (k - j) phi_j for i = 0..k-1."""
    phi = _phi(phi, k)
    out, acc = [F(0)], F(0)
    for i in range(1, k):
        acc += (k - i) * phi[i]
        out.append(acc)
    return tuple(out)


def power_ge(x: Fraction, j: int, alpha0: Fraction, eps: Fraction, k: int) -> bool:
    """x >= C**j * eps with C = (alpha0/eps)**(1/k), decided as x**k >= alpha0**j eps**(k-j)."""
    if x < 0:
        return False
    return x ** k >= alpha0 ** j * eps ** (k - j)


def power_le(x: Fraction, j: int, alpha0: Fraction, eps: Fraction, k: int) -> bool:
    if x < 0:
        return True
    return x ** k <= alpha0 ** j * eps ** (k - j)


def extremal_cascade(phi, k: int, alpha, mu, eps) -> ExtremalCascade:
    """Least t (then largest j0 <= k) with sigma_t >= C^{j0} eps >= C^{-1} sigma_{t-1}... exactly:
    sigma_t >= C^{j0} eps and sigma_{t-1} <= C^{j0-1} eps."""
    phi = _phi(phi, k)
    alpha, mu, eps = F(alpha), F(mu), F(eps)
    if k < 3:
        raise PreconditionError("the cascade needs k >= 3")
    gamma = gamma_param(k, alpha)
    s = s_param(phi, k, gamma)
    if s >= mu:
        raise PreconditionError(f"cascade applies only when s < mu (s={s}, mu={mu})")
    alpha0 = (1 - alpha) / (k - 1 + alpha) - F(k, k - 1) * mu
    if alpha0 <= 0:
        raise PreconditionError(f"alpha0 = {alpha0} is not positive")
    if eps <= 0 or eps >= alpha0:
        raise PreconditionError("need 0 < eps < alpha0")
    sig = sigma_partials(phi, k)
    for t in range(1, k):
        for j0 in range(k, 0, -1):
            if power_ge(sig[t], j0, alpha0, eps, k) and power_le(sig[t - 1], j0 - 1, alpha0, eps, k):
                mu_p = Surd(F(1), alpha0 ** j0 * eps ** (k - j0), k)
                eps_p = Surd(F(k), alpha0 ** (j0 - 1) * eps ** (k - j0 + 1), k, 2 * k * mu)
                return ExtremalCascade(k, sig, alpha0, eps, t, j0, mu_p, eps_p)
    raise PreconditionError("no (t, j0) pair: sigma_{k-1} is below alpha0")


# ---------------------------------------------------------- leftover constants


def leftover_constant(spec: BottleSpec, case: str = "auto", s: int = 0) -> int:
    """Uncovered-vertex constants: ``general``, ``balanced``, ``padding`` (uses ``s``)."""
    k, omega = spec.k, spec.omega
    if case == "auto":
        case = "balanced" if spec.balanced else "general"
    if case == "general":
        g = spec.gamma
        if g == 0:
            raise PreconditionError("general constant needs gamma > 0")
        return math.ceil(F(5 * k * k, (k - 1) ** 2) / g * omega) + spec.h
    if case == "balanced":
        return 3 * k * k * omega + spec.h
    if case == "padding":
        return k * (k - 1) * s + (k - 1) ** 2
    raise PreconditionError(f"unknown case {case!r}")


def element_leftover_bound(spec: BottleSpec) -> int:
    """Per-element bound: (k-1)(2 omega - sigma) + omega, or k(omega - 1) when balanced."""
    if spec.balanced:
        return spec.k * (spec.omega - 1)
    return (spec.k - 1) * (2 * spec.omega - spec.sigma) + spec.omega


def parameter_table(k: int, sigma: int, omega: int, mu, d, eps) -> dict:
    """Every derived constant for one (k, sigma, omega, mu, d, eps) choice."""
    spec = BottleSpec(k, sigma, omega)
    mu, d, eps = F(mu), F(d), F(eps)
    row = {
        "spec": spec.as_dict(),
        "ore_factor": str(2 * (1 - 1 / spec.chi_cr)),
        "chain_violations": chain_violations(spec.alpha, d, eps, mu),
        "element_leftover": element_leftover_bound(spec),
        "leftover_constant": leftover_constant(spec),
    }
    if not spec.balanced:
        ap = alpha_prime(spec.alpha, k, mu)
        row["alpha_prime"] = {"value": str(ap.value), "p": ap.p, "q": ap.q}
        row["typicality_threshold"] = typicality_threshold(ap, k)
        row["mu1"] = str(k * spec.alpha / ((1 - spec.alpha) * (k - 1)) * mu)
        row["lambda_1_lower"] = str((k - 1) * spec.gamma - (k - 1) * (d + 2 * eps))
        if k >= 3:
            row["alpha0"] = str((1 - spec.alpha) / (k - 1 + spec.alpha) - F(k, k - 1) * mu)
    return row
