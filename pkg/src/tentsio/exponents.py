"""Exact exponent arithmetic for tent-space boundedness ranges.

All values are :class:`fractions.Fraction`; ``INF`` is a symbolic infinity.
Endpoints carry open/closed flags and a ``limit`` flag marking an
operator-dependent ``epsilon`` shift (``p_star - eps`` for a lower endpoint,
``p_star + eps'`` for an upper one).

Case selection at a one-sided limit ``q -> q0 +/- 0`` is exact: every case
predicate is monotone in ``q``, so the predicate at ``q0 +/- 0`` is decided by a
non-strict or strict comparison at ``q0``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import ParameterError


@functools.total_ordering
class _Infinity:
    """Symbolic ``+inf``, larger than every rational."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("tentsio.INF")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
Exponent = Union[Fraction, _Infinity]


def as_exponent(x) -> Exponent:
    """Parse ``x`` (int, Fraction, ``"6/5"``, ``"inf"``) into an exact value."""
    if x is INF:
        return INF
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "infinity", "oo", "+inf"):
            return INF
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParameterError(f"cannot parse exponent {x!r}") from exc
    if isinstance(x, float):
        if x == float("inf"):
            return INF
        raise ParameterError(f"floats are not exact; pass {x!r} as a string or Fraction")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    raise ParameterError(f"cannot interpret {x!r} as an exponent")


def fmt(x: Optional[Exponent]) -> Optional[str]:
    """Exact string form: ``"6/5"``, ``"2"``, ``"inf"``; ``None`` passes through."""
    if x is None:
        return None
    return str(x)


def conjugate(q: Exponent) -> Exponent:
    """Hoelder conjugate ``q' = q/(q-1)``, with ``1' = inf`` and ``inf' = 1``."""
    q = as_exponent(q)
    if q is INF:
        return Fraction(1)
    if q < 1:
        raise ParameterError(f"conjugate needs q >= 1, got {q}")
    if q == 1:
        return INF
    return q / (q - 1)


def _recip(q: Exponent) -> Fraction:
    return Fraction(0) if q is INF else 1 / q


def _ge(lhs: Fraction, rhs: Fraction, side: int = 0, strict: bool = False) -> bool:
    """Decide ``lhs(q) >= rhs`` (or ``>``) at ``q + side*0`` for ``lhs`` increasing in ``q``."""
    if side > 0:
        return lhs >= rhs
    if side < 0:
        return lhs > rhs
    return lhs > rhs if strict else lhs >= rhs


# ---------------------------------------------------------------- value types


@dataclass(frozen=True)
class Endpoint:
    value: Exponent
    closed: bool
    limit: bool = False

    def __str__(self):
        return str(self.value)

    def to_dict(self) -> dict:
        return {"value": fmt(self.value), "closed": self.closed, "limit": self.limit}


@dataclass(frozen=True)
class Interval:
    """A ``p``-range ``(lower, upper)`` with per-endpoint flags."""

    lower: Endpoint
    upper: Endpoint

    @property
    def is_empty(self) -> bool:
        lo, hi = self.lower.value, self.upper.value
        if lo < hi:
            return False
        return not (lo == hi and self.lower.closed and self.upper.closed)

    @property
    def infinite(self) -> bool:
        return self.upper.value is INF

    def contains(self, p) -> bool:
        p = as_exponent(p)
        lo, hi = self.lower, self.upper
        above = p > lo.value or (lo.closed and p == lo.value)
        below = p < hi.value or (hi.closed and p == hi.value)
        return above and below

    def __str__(self):
        lo = ("[" if self.lower.closed else "(") + str(self.lower.value)
        if self.lower.limit:
            lo += "-eps"
        hi = str(self.upper.value)
        if self.upper.limit:
            hi += "+eps'"
        hi += "]" if self.upper.closed else ")"
        return f"{lo}, {hi}"

    def to_dict(self) -> dict:
        return {"lower": self.lower.to_dict(), "upper": self.upper.to_dict(), "text": str(self)}


def lower_half(lo: Exponent, closed: bool = False, upper_closed: bool = True, limit: bool = False) -> Interval:
    return Interval(Endpoint(lo, closed, limit), Endpoint(Fraction(2), upper_closed))


def upper_half(hi: Exponent, closed: bool, limit: bool = False, lower_closed: bool = True) -> Interval:
    return Interval(Endpoint(Fraction(2), lower_closed), Endpoint(hi, closed, limit))


@dataclass(frozen=True)
class ExponentReport:
    """Outcome of a range computation.

    ``interval`` is ``None`` when a hypothesis fails; ``case_tag`` is always
    set and ``provenance`` names the inequality that selected the branch.
    """

    values: dict
    interval: Optional[Interval]
    case_tag: str
    provenance: str
    tags: tuple = ()
    inputs: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.interval is not None

    def to_dict(self) -> dict:
        return {
            "inputs": {k: fmt(v) if not isinstance(v, (str, bool)) else v for k, v in self.inputs.items()},
            "values": {k: fmt(v) for k, v in self.values.items()},
            "interval": None if self.interval is None else self.interval.to_dict(),
            "case": self.case_tag,
            "provenance": self.provenance,
            "tags": list(self.tags),
        }


@dataclass(frozen=True)
class ExponentInputs:
    """Parameters ``(n, m, beta, q, M, Re alpha)``; strings and ints are accepted."""

    n: int
    m: Fraction = Fraction(1)
    beta: Fraction = Fraction(0)
    q: Exponent = Fraction(2)
    M: Exponent = INF
    alpha_re: Fraction = Fraction(1)

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ParameterError(f"n must be a positive integer, got {self.n!r}")
        for name in ("m", "beta", "q", "M", "alpha_re"):
            object.__setattr__(self, name, as_exponent(getattr(self, name)))
        if self.m is INF or self.m <= 0:
            raise ParameterError(f"m must be a positive rational, got {self.m}")
        if self.beta is INF:
            raise ParameterError("beta must be finite")
        if self.q < 1:
            raise ParameterError(f"q must lie in [1, inf], got {self.q}")
        if self.M <= 0:
            raise ParameterError(f"M must be positive or inf, got {self.M}")

    @property
    def q_dual(self) -> Exponent:
        return conjugate(self.q)

    def as_dict(self) -> dict:
        return {"n": Fraction(self.n), "m": self.m, "beta": self.beta, "q": self.q, "M": self.M}


# ---------------------------------------------------------------- exponents


def p_M(n: int, m, M) -> Fraction:
    """``2n/(2mM + n)``, the solution of ``M = (n/2m)(2/p - 1)``; ``0`` for ``M = inf``."""
    m, M = as_exponent(m), as_exponent(M)
    if M is INF:
        return Fraction(0)
    if M <= 0:
        raise ParameterError(f"M must be positive, got {M}")
    return Fraction(2 * n) / (2 * m * M + n)


def _check_low(beta, q):
    if not beta < 1:
        raise ParameterError(f"need beta < 1, got {beta}")
    if not 1 <= q <= 2:
        raise ParameterError(f"need q in [1, 2], got {q}")


def p_c(n: int, m, beta, q) -> Fraction:
    """``4n/(2n + m(1-beta)q')`` for ``q`` in ``[1, 2]``; ``0`` when ``q = 1``.

    The first form ``2a/(a + (1-beta)/2)`` with ``a = n/2m - (n/m)(1/q - 1/2)``
    is evaluated as well and must agree exactly.
    """
    m, beta, q = as_exponent(m), as_exponent(beta), as_exponent(q)
    _check_low(beta, q)
    qd = conjugate(q)
    a = Fraction(n) / (2 * m) - Fraction(n) / m * (1 / q - Fraction(1, 2))
    first = 2 * a / (a + (1 - beta) / 2)
    second = Fraction(0) if qd is INF else Fraction(4 * n) / (2 * n + m * (1 - beta) * qd)
    if first != second:
        raise ArithmeticError(f"p_c forms disagree: {first} != {second}")
    return second


def tilde_p_c(n: int, m, beta, q) -> Fraction:
    """``2n/(2n/q + m(1-beta))`` for ``q`` in ``[1, 2]``."""
    m, beta, q = as_exponent(m), as_exponent(beta), as_exponent(q)
    _check_low(beta, q)
    return Fraction(2 * n) / (Fraction(2 * n) / q + m * (1 - beta))


def p_c_dual(n: int, m, beta, q) -> Fraction:
    """``4n/(2n + m(1-beta)q)`` for ``q`` in ``[2, inf]``; ``0`` when ``q = inf``."""
    m, beta, q = as_exponent(m), as_exponent(beta), as_exponent(q)
    if not q >= 2:
        raise ParameterError(f"need q in [2, inf], got {q}")
    if q is INF:
        return Fraction(0)
    return Fraction(4 * n) / (2 * n + m * (1 - beta) * q)


def M_q(alpha_re, n: int, m, q) -> Fraction:
    """Decay order ``Re alpha + (n/m)|1/q - 1/2|``."""
    alpha_re, m, q = as_exponent(alpha_re), as_exponent(m), as_exponent(q)
    return alpha_re + Fraction(n) / m * abs(_recip(q) - Fraction(1, 2))


def v(alpha_re, q, n: int, m, beta) -> Fraction:
    """``Re alpha - (beta-1)/2 + (n/m)(1/q - 1/2)``."""
    alpha_re, q, m, beta = (as_exponent(x) for x in (alpha_re, q, m, beta))
    return alpha_re - (beta - 1) / 2 + Fraction(n) / m * (_recip(q) - Fraction(1, 2))


def dual_threshold(n: int, m, beta) -> Exponent:
    """``2n/(m(1-beta))``, the case threshold for ``q'`` (or ``q`` in the dual setting)."""
    m, beta = as_exponent(m), as_exponent(beta)
    if not beta < 1:
        raise ParameterError(f"need beta < 1, got {beta}")
    return Fraction(2 * n) / (m * (1 - beta))


def equivalence_chain(n: int, m, beta, q) -> tuple:
    """The four statements ``pt = pc``, ``pt = 1``, ``pc = 1`` and the balance identity.

    Returns a tuple of booleans in that order; the chain asserts they coincide.
    """
    m, beta, q = as_exponent(m), as_exponent(beta), as_exponent(q)
    pc, pt = p_c(n, m, beta, q), tilde_p_c(n, m, beta, q)
    balance = Fraction(n) / (2 * m) == -(beta - 1) / 2 + Fraction(n) / m * (1 / q - Fraction(1, 2))
    return (pt == pc, pt == 1, pc == 1, balance)


# ---------------------------------------------------------------- ranges


def _report(values, interval, tag, why, inputs, tags=()):
    return ExponentReport(dict(values), interval, tag, why, tuple(tags), dict(inputs))


def _one_sided(fn):
    """Append the one-sided limit, if any, to the provenance of ``fn``'s report."""

    @functools.wraps(fn)
    def wrapper(*args, side: int = 0, **kw):
        rep = fn(*args, side=side, **kw)
        if side == 0 or rep.interval is None:
            return rep
        note = f"case decided at q{'+' if side > 0 else '-'}0"
        return ExponentReport(rep.values, rep.interval, rep.case_tag, f"{rep.provenance}; {note}",
                              rep.tags, rep.inputs)

    return wrapper


def _violation(tag, why, inputs, values=None):
    return _report(values or {}, None, tag + "-hypothesis", why, inputs, ("hypothesis-violation",))


@_one_sided
def thm31_range(inputs: ExponentInputs, side: int = 0) -> ExponentReport:
    """Range below 2 for forward operators with ``L^q - L^2`` decay, ``q`` in ``[1, 2]``.

    Case 1, ``q' <= 2n/(m(1-beta))``: ``(p_c, 2]``.  Case 2: ``(sup(p_M, pt_c), 2]``.
    ``side`` evaluates the case test at ``q + 0`` or ``q - 0``.
    """
    n, m, beta, q, M = inputs.n, inputs.m, inputs.beta, inputs.q, inputs.M
    info = inputs.as_dict()
    if not 1 <= q <= 2:
        return _violation("thm31", f"needs q in [1,2], got q={q}", info)
    if not beta < 1:
        return _violation("thm31", f"needs beta < 1, got beta={beta}", info)
    if not M > Fraction(n) / (2 * m):
        return _violation("thm31", f"needs M > n/(2m) = {Fraction(n) / (2 * m)}, got M={M}", info)
    qd = inputs.q_dual
    thr = dual_threshold(n, m, beta)
    pm, pc, pt = p_M(n, m, M), p_c(n, m, beta, q), tilde_p_c(n, m, beta, q)
    values = {"q_dual": qd, "threshold": thr, "p_M": pm, "p_c": pc, "tilde_p_c": pt}
    tags = ["p_M=0: all p>0"] if M is INF else []
    # 1/q' is increasing in q, and case 1 reads 1/q' >= 1/threshold
    if _ge(_recip(qd), 1 / thr, side):
        return _report(values, lower_half(pc), "thm31-case1",
                       f"q'={qd} <= 2n/(m(1-beta))={thr}", info, tags)
    lo = max(pm, pt)
    return _report(values, lower_half(lo), "thm31-case2",
                   f"q'={qd} > 2n/(m(1-beta))={thr}; sup(p_M, tilde p_c)={lo}", info, tags)


def prop36_range(n: int, m, beta, q, M) -> ExponentReport:
    """Backward operators with ``L^q - L^2`` decay: ``(p_M, 2)``, for ``beta > -1``."""
    m, beta, q, M = (as_exponent(x) for x in (m, beta, q, M))
    info = {"n": Fraction(n), "m": m, "beta": beta, "q": q, "M": M}
    if not 1 <= q <= 2:
        return _violation("prop36", f"needs q in [1,2], got q={q}", info)
    if not beta > -1:
        return _violation("prop36", f"needs beta > -1, got beta={beta}", info)
    if not M > Fraction(n) / (2 * m):
        return _violation("prop36", f"needs M > n/(2m) = {Fraction(n) / (2 * m)}, got M={M}", info)
    pm = p_M(n, m, M)
    return _report({"p_M": pm}, lower_half(pm, upper_closed=False), "prop36",
                   f"p_M={pm} from M={M}", info, ["p_M=0: all p>0"] if M is INF else [])


@_one_sided
def thm41_range(inputs: ExponentInputs, side: int = 0) -> ExponentReport:
    """Range above 2 for backward operators with ``L^2 - L^q`` decay, ``q`` in ``[2, inf]``.

    Case 1, ``q <= 2n/(m(1-beta))``: ``[2, p_c')`` with ``p_c = 4n/(2n + m(1-beta)q)``.
    Case 2: ``[2, inf]``.  At equality ``p_c = 1`` and ``p_c' = inf``; whether it
    is attained is not decided, so the endpoint is open and tagged.
    """
    n, m, beta, q, M = inputs.n, inputs.m, inputs.beta, inputs.q, inputs.M
    info = inputs.as_dict()
    if not q >= 2:
        return _violation("thm41", f"needs q in [2,inf], got q={q}", info)
    if not -1 < beta < 1:
        return _violation("thm41", f"needs -1 < beta < 1 for a finite threshold, got beta={beta}", info)
    if not M > Fraction(n) / (2 * m):
        return _violation("thm41", f"needs M > n/(2m) = {Fraction(n) / (2 * m)}, got M={M}", info)
    thr = dual_threshold(n, m, beta)
    pc = p_c_dual(n, m, beta, q)
    values = {"threshold": thr, "p_c": pc, "p_c_dual": conjugate(pc) if pc >= 1 else None}
    # q <= thr, with -1/q increasing in q
    case1 = q is not INF and not _ge(-_recip(q), -1 / thr, side, strict=True)
    if case1:
        top = conjugate(pc)
        tags = ["boundary: attainment of p_c' unstated"] if q == thr and side == 0 else []
        return _report(values, upper_half(top, closed=False), "thm41-case1",
                       f"q={q} <= 2n/(m(1-beta))={thr}", info, tags)
    return _report(values, upper_half(INF, closed=True), "thm41-case2",
                   f"q={q} > 2n/(m(1-beta))={thr}", info)


def prop42_range(inputs: ExponentInputs) -> ExponentReport:
    """Forward operators with ``L^2 - L^q`` decay, ``q >= 2``: ``[2, inf]`` for ``beta < 1``."""
    n, m, beta, q, M = inputs.n, inputs.m, inputs.beta, inputs.q, inputs.M
    info = inputs.as_dict()
    if not q >= 2:
        return _violation("prop42", f"needs q in [2,inf], got q={q}", info)
    if not beta < 1:
        return _violation("prop42", f"needs beta < 1, got beta={beta}", info)
    if not M > Fraction(n) / (2 * m):
        return _violation("prop42", f"needs M > n/(2m) = {Fraction(n) / (2 * m)}, got M={M}", info)
    return _report({}, upper_half(INF, closed=True), "prop42", "q >= 2 and M > n/(2m)", info)


DIRECTIONS = ("A-forward", "B-forward", "A-backward", "B-backward")


@_one_sided
def cor56_pL(n: int, m, beta, q, direction: str, side: int = 0) -> ExponentReport:
    """``p_L`` for the maximal-regularity operator from resolvent decay at ``q``.

    ``A-forward`` (``q <= 2``) gives ``(p_L, 2)``, ``B-forward`` (``q >= 2``)
    gives ``(2, p_L)`` or ``(2, inf]``; the backward directions mirror them.
    In A-forward case 2 the bound is ``sup(tilde p_c, p_c)``, which is what the
    underlying two-case range produces.
    """
    m, beta, q = as_exponent(m), as_exponent(beta), as_exponent(q)
    if direction not in DIRECTIONS:
        raise ParameterError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    info = {"n": Fraction(n), "m": m, "beta": beta, "q": q, "direction": direction}
    nn = Fraction(n)
    half = Fraction(1, 2)

    if direction in ("A-forward", "B-backward"):
        if not 1 <= q <= 2:
            return _violation(direction, f"needs q in [1,2], got q={q}", info)
        qd = conjugate(q)
        rqd = _recip(qd)
        Mq = M_q(1, n, m, q)
        if direction == "B-backward":
            # m q' <= n reads 1/q' >= m/n
            if _ge(rqd, m / nn, side):
                pl = 2 * nn / (nn + m * qd)
                return _report({"q_dual": qd, "p_L": pl}, lower_half(pl, upper_closed=False),
                               "B-backward-finite", f"m q'={m * qd} <= n={n}", info)
            pl = p_M(n, m, Mq)
            return _report({"q_dual": qd, "M_q": Mq, "p_L": pl}, lower_half(pl, upper_closed=False),
                           "B-backward-pM", f"m q'={'inf' if qd is INF else m * qd} > n={n}", info)
        if not beta < 1:
            return _violation(direction, f"needs beta < 1, got beta={beta}", info)
        pc, pt = p_c(n, m, beta, q), tilde_p_c(n, m, beta, q)
        values = {"q_dual": qd, "M_q": Mq, "p_c": pc, "tilde_p_c": pt}
        # n/(m q') < 1 reads (n/m)(1/q') < 1, increasing in q
        small = not _ge(nn / m * rqd, Fraction(1), side)
        if small and beta <= -1:
            pl = p_M(n, m, Mq)
            return _report({**values, "p_L": pl}, lower_half(pl, upper_closed=False), "A1",
                           f"n/(m q')={nn / m * rqd} < 1 and beta={beta} <= -1", info)
        if small:
            pl = max(pt, pc)
            return _report({**values, "p_L": pl}, lower_half(pl, upper_closed=False), "A2",
                           f"n/(m q')={nn / m * rqd} < 1 and -1 < beta={beta} < 1", info)
        inv = half + m * qd / nn * (1 / min(pc, Fraction(1)) - half)
        pl = 1 / inv
        tags = ["p_c=1: attainment at p_L unstated"] if pc == 1 else []
        return _report({**values, "p_L": pl}, lower_half(pl, upper_closed=False), "A3",
                       f"n/(m q')={nn / m * rqd} >= 1", info, tags)

    if not q >= 2:
        return _violation(direction, f"needs q in [2,inf], got q={q}", info)
    rq = _recip(q)
    if direction == "B-forward":
        # m q <= n reads -1/q <= -m/n, i.e. not (-1/q > -m/n)
        if q is not INF and not _ge(-rq, -m / nn, side, strict=True):
            if m * q == nn:
                return _report({"p_L": INF}, upper_half(INF, closed=False), "B-finite",
                               f"m q={m * q} = n", info, ["p_L=inf not attained"])
            pl = 2 * nn / (nn - m * q)
            return _report({"p_L": pl}, upper_half(pl, closed=False, lower_closed=False),
                           "B-finite", f"m q={m * q} <= n={n}", info)
        return _report({"p_L": INF}, upper_half(INF, closed=True, lower_closed=False), "B-infty",
                       f"m q={'inf' if q is INF else m * q} > n={n}", info)

    # A-backward
    # n/(m q) < 1 reads -(n/m)(1/q) > -1, with -(n/m)/q increasing in q
    small = _ge(-(nn / m) * rq, -Fraction(1), side, strict=True)
    if small and beta >= 1:
        return _report({"p_L": INF}, upper_half(INF, closed=True, lower_closed=False),
                       "A1-backward", f"n/(m q) < 1 and beta={beta} >= 1", info)
    if small and -1 < beta < 1:
        pc = p_c_dual(n, m, beta, q)
        if pc < 1:
            return _report({"p_c": pc, "p_L": INF}, upper_half(INF, closed=True, lower_closed=False),
                           "A2-backward", f"p_c={pc} < 1", info)
        pl = conjugate(pc)
        return _report({"p_c": pc, "p_L": pl}, upper_half(pl, closed=False, lower_closed=False),
                       "A2-backward", f"p_c={pc} >= 1", info)
    if small:
        return _violation("A-backward", f"n/(m q) < 1 with beta={beta} <= -1 is not covered", info)
    if m * q == nn:
        return _report({"p_L": INF}, upper_half(INF, closed=False, lower_closed=False), "A3-backward",
                       "n/(m q)=1", info, ["p_L=inf not attained"])
    pl = 2 * nn / (nn - m * q)
    return _report({"p_L": pl}, upper_half(pl, closed=False, lower_closed=False), "A3-backward",
                   f"n/(m q)={nn / (m * q)} >= 1", info)


# ---------------------------------------------------------------- presets


PRESETS = ("prop14-heat", "prop14-sqrt", "prop15", "prop16", "prop17")


def default_p_minus(n: int) -> Fraction:
    return Fraction(2 * n, n + 2)


def default_p_plus(n: int) -> Exponent:
    return INF if n <= 2 else Fraction(2 * n, n - 2)


def _pointwise_heat(n):
    lo = thm31_range(ExponentInputs(n, 2, 0, 1, INF))
    hi = prop42_range(ExponentInputs(n, 2, 0, INF, INF))
    return lo, hi


def _pointwise_sqrt(n):
    M = Fraction(n, 2) + 1
    lo = thm31_range(ExponentInputs(n, 1, -1, 1, M))
    hi = prop42_range(ExponentInputs(n, 1, -1, INF, M))
    return lo, hi


def _combine(tag, n, lo_rep, hi_rep, lo_limit=False, hi_limit=False, extra=None):
    lo, hi = lo_rep.interval.lower, hi_rep.interval.upper
    interval = Interval(Endpoint(lo.value, lo.closed, lo_limit), Endpoint(hi.value, hi.closed, hi_limit))
    values = {"lower": lo.value, "upper": hi.value}
    values.update(extra or {})
    why = f"lower via {lo_rep.case_tag} ({lo_rep.provenance}); upper via {hi_rep.case_tag} ({hi_rep.provenance})"
    tags = tuple(lo_rep.tags) + tuple(hi_rep.tags)
    return ExponentReport(values, interval, tag, why, tags, {"n": Fraction(n)})


def preset(tag: str, n: int, p_minus=None, p_plus=None) -> ExponentReport:
    """Published ranges for the concrete operators.

    ``prop14-heat``
        ``-Delta + V`` or real divergence form, ``T^{p,2,2}(dt dy)``.
    ``prop14-sqrt``
        Their square roots, ``T^{p,2,1}(t^-1 dt dy)``.
    ``prop15``
        The same two operator classes; the range coincides with ``prop14``.
    ``prop16``
        Complex divergence form, ``T^{p,2,2}(dt dy)``.
    ``prop17``
        Its square root, ``T^{p,2,1}(t^-1 dt dy)``.

    For ``prop16``/``prop17`` with ``n >= 3`` the range depends on the
    exponents ``p_-(L) < 2n/(n+2)`` and ``p_+(L) > 2n/(n-2)``.  Left as
    ``None`` they default to those limits and the endpoints are flagged
    ``limit``.  Supplied values are treated as the operator's exponents, and
    the endpoint is the exact limit of ``q -> p_- + 0`` or ``q -> p_+ - 0``.
    """
    key = tag.lower().replace("_", "-")
    if key not in PRESETS:
        raise ParameterError(f"unknown preset {tag!r}; expected one of {PRESETS}")
    if not (isinstance(n, int) and n >= 1):
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    if key in ("prop14-heat", "prop15"):
        return _combine(key, n, *_pointwise_heat(n))
    if key == "prop14-sqrt":
        return _combine(key, n, *_pointwise_sqrt(n))
    if n <= 2:
        return _combine(key, n, *(_pointwise_heat(n) if key == "prop16" else _pointwise_sqrt(n)))

    lo_limit, hi_limit = p_minus is None, p_plus is None
    pm = default_p_minus(n) if lo_limit else as_exponent(p_minus)
    pp = default_p_plus(n) if hi_limit else as_exponent(p_plus)
    if not 1 <= pm < 2 < pp:
        raise ParameterError(f"need 1 <= p_- < 2 < p_+, got p_-={pm}, p_+={pp}")
    # default limits sit on the far side of the true exponents
    lo_side, hi_side = (-1 if lo_limit else 1), (1 if hi_limit else -1)
    extra = {"p_minus": pm, "p_plus": pp}
    if key == "prop16":
        lo_rep = thm31_range(ExponentInputs(n, 2, 0, pm, INF), side=lo_side)
        hi_rep = prop42_range(ExponentInputs(n, 2, 0, 2 if pp is INF else pp, INF))
        return _combine(key, n, lo_rep, hi_rep, lo_limit, False, extra)
    lo_rep = cor56_pL(n, 1, -1, pm, "A-forward", side=lo_side)
    hi_rep = cor56_pL(n, 1, -1, pp, "B-forward", side=hi_side)
    up_limit = hi_limit and hi_rep.interval.upper.value is not INF
    return _combine(key, n, lo_rep, hi_rep, lo_limit, up_limit, extra)


def golden_rows(ns=range(1, 7)) -> list:
    """One row per preset and ``n``: exact endpoints with flags, ready for CSV."""
    rows = []
    for tag in PRESETS:
        for n in ns:
            rep = preset(tag, n)
            lo, hi = rep.interval.lower, rep.interval.upper
            rows.append({
                "preset": tag, "n": n,
                "lower": fmt(lo.value), "lower_closed": lo.closed, "lower_limit": lo.limit,
                "upper": fmt(hi.value), "upper_closed": hi.closed, "upper_limit": hi.limit,
                "case": rep.provenance,
            })
    return rows


# ---------------------------------------------------------------- invariant sweep


SWEEP_N = (1, 2, 3, 5, 8)
SWEEP_M = (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2))
SWEEP_BETA = tuple(Fraction(b) for b in ("-3", "-2", "-1", "-1/2", "-1/3", "0", "1/4", "1/2", "2/3", "9/10"))
SWEEP_Q = tuple(1 + Fraction(k, 48) for k in range(49))


@dataclass
class SweepResult:
    """Violation counts per invariant, with up to five witnesses each."""

    points: int = 0
    violations: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)

    def record(self, name: str, ok: bool, witness) -> None:
        self.violations.setdefault(name, 0)
        self.witnesses.setdefault(name, [])
        if not ok:
            self.violations[name] += 1
            if len(self.witnesses[name]) < 5:
                self.witnesses[name].append(witness)

    @property
    def passed(self) -> bool:
        return all(v == 0 for v in self.violations.values())

    def to_dict(self) -> dict:
        return {"points": self.points, "violations": dict(self.violations),
                "witnesses": {k: [[fmt(x) for x in w] for w in ws] for k, ws in self.witnesses.items()}}


def boundary_q(n: int, m, beta) -> Optional[Fraction]:
    """The ``q`` in ``[1, 2]`` with ``q' = 2n/(m(1-beta))``, if there is one."""
    thr = dual_threshold(n, m, beta)
    return thr / (thr - 1) if thr >= 2 else None


def invariant_sweep() -> SweepResult:
    """Check the exponent invariants on a fixed grid of 10**4 rational points.

    9800 points form the product of :data:`SWEEP_N`, :data:`SWEEP_M`,
    :data:`SWEEP_BETA` and :data:`SWEEP_Q`.  For each of the 200 ``(n, m,
    beta)`` triples one more point sits on the case boundary (or at ``q = 3/2``
    when the boundary lies outside ``[1, 2]``).

    Invariants: ``chain`` (the four statements of :func:`equivalence_chain`
    coincide), ``chain_off_q2`` (the same with ``q = 2`` excluded, where
    ``p_c = tilde p_c`` always holds), ``monotone`` (``p_c`` and ``tilde p_c``
    nondecreasing in ``q``), ``continuity`` (both branch formulas equal 1 on the
    boundary) and ``dual`` (the dual-side ``p_c`` at ``q'`` equals ``p_c`` at
    ``q``).
    """
    res = SweepResult()
    for n in SWEEP_N:
        for m in SWEEP_M:
            for beta in SWEEP_BETA:
                qb = boundary_q(n, m, beta)
                qs = sorted(SWEEP_Q + ((qb,) if qb is not None else (Fraction(3, 2),)))
                prev = None
                for q in qs:
                    res.points += 1
                    w = (Fraction(n), m, beta, q)
                    chain = equivalence_chain(n, m, beta, q)
                    res.record("chain", len(set(chain)) == 1, w)
                    if q != 2:
                        res.record("chain_off_q2", len(set(chain)) == 1, w)
                    pc, pt = p_c(n, m, beta, q), tilde_p_c(n, m, beta, q)
                    if prev is not None:
                        res.record("monotone", pc >= prev[0] and pt >= prev[1], w)
                    prev = (pc, pt)
                    res.record("dual", p_c_dual(n, m, beta, conjugate(q)) == pc, w)
                    if q == qb:
                        res.record("continuity", pc == 1 and max(p_M(n, m, INF), pt) == 1, w)
    return res
