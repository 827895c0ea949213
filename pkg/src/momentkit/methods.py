"""Moment method identities and order-set enumeration.

A method is a radial-kernel family plus its parameters.  Three groups
exist: Jacobi-polynomial kernels (ZM, PZM, OFMM, CHFM, PJFM, JFM and the
fractional FJFM), harmonic kernels (RHFM, EFM, PCET, PCT, PST and their
generic fractional forms GRHFM, GPCET, GPCT, GPST), and the Bessel
eigenfunction kernel BFM.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, NamedTuple

from .errors import DomainError

JACOBI_FAMILIES = ("ZM", "PZM", "OFMM", "CHFM", "PJFM", "JFM", "FJFM")
HARMONIC_FAMILIES = ("RHFM", "EFM", "PCET", "PCT", "PST",
                     "GRHFM", "GPCET", "GPCT", "GPST")
BESSEL_FAMILIES = ("BFM",)
ALL_FAMILIES = JACOBI_FAMILIES + HARMONIC_FAMILIES + BESSEL_FAMILIES

# families whose radial kernel is complex-valued
COMPLEX_FAMILIES = ("EFM", "PCET", "GPCET")
# families carrying the fractional parameter alpha
FRACTIONAL_FAMILIES = ("FJFM", "GRHFM", "GPCET", "GPCT", "GPST")
# families taking the Jacobi (p, q) parameters
PQ_FAMILIES = ("JFM", "FJFM")

# classical -> (generic family, alpha) specialisations; the generic
# harmonic kernels are defined so that alpha = 1 is the linear-argument
# form and alpha = 2 the r^2-argument form.
CLASSICAL_AS_GENERIC = {
    "RHFM": ("GRHFM", 1.0),
    "EFM": ("GPCET", 1.0),
    "PCET": ("GPCET", 2.0),
    "PCT": ("GPCT", 2.0),
    "PST": ("GPST", 2.0),
}


class OrderIndex(NamedTuple):
    n: int
    m: int


@dataclass(frozen=True)
class MethodSpec:
    """A kernel family together with its parameters.

    Parameters
    ----------
    family : str
        One of `ALL_FAMILIES` (case-insensitive on input).
    p, q : float, optional
        Jacobi parameters, JFM/FJFM only.  Must satisfy p - q > -1 and
        q > 0.
    alpha : float, optional
        Fractional parameter (> 0), fractional families only.
    bessel_order : float
        Order v of the Bessel kernel, BFM only.  Defaults to 1.0.
    """

    family: str
    p: float | None = None
    q: float | None = None
    alpha: float | None = None
    bessel_order: float = 1.0

    def __post_init__(self):
        fam = self.family.upper()
        object.__setattr__(self, "family", fam)
        if fam not in ALL_FAMILIES:
            raise DomainError(
                f"unknown family {self.family!r}; valid: {', '.join(ALL_FAMILIES)}")
        if fam in PQ_FAMILIES:
            if self.p is None or self.q is None:
                raise DomainError(f"{fam} requires the Jacobi parameters p and q")
            if not (self.p - self.q > -1.0 and self.q > 0.0):
                raise DomainError(
                    f"{fam} parameters must satisfy p - q > -1 and q > 0 "
                    f"(got p={self.p}, q={self.q})")
        elif self.p is not None or self.q is not None:
            raise DomainError(f"{fam} does not take p/q parameters")
        if fam in FRACTIONAL_FAMILIES:
            a = 1.0 if self.alpha is None else float(self.alpha)
            if not a > 0.0:
                raise DomainError(f"alpha must be > 0 (got {self.alpha})")
            object.__setattr__(self, "alpha", a)
        else:
            # present-but-ignored alpha is dropped so specs compare equal
            object.__setattr__(self, "alpha", None)
        if fam == "BFM" and not self.bessel_order >= 0.0:
            raise DomainError(f"bessel_order must be >= 0 (got {self.bessel_order})")

    # -- classification helpers -------------------------------------------

    @property
    def kind(self) -> str:
        if self.family in JACOBI_FAMILIES:
            return "jacobi"
        if self.family in HARMONIC_FAMILIES:
            return "harmonic"
        return "bessel"

    @property
    def complex_radial(self) -> bool:
        return self.family in COMPLEX_FAMILIES

    @property
    def radial_uses_m(self) -> bool:
        """ZM/PZM radial kernels depend on the angular repetition."""
        return self.family in ("ZM", "PZM")

    def generic_form(self) -> "MethodSpec":
        """Rewrite a classical harmonic method as its fractional generic."""
        if self.family in CLASSICAL_AS_GENERIC:
            gfam, a = CLASSICAL_AS_GENERIC[self.family]
            return MethodSpec(gfam, alpha=a)
        return self

    def label(self) -> str:
        args = []
        if self.family in PQ_FAMILIES:
            args += [f"{self.p:g}", f"{self.q:g}"]
        if self.family in FRACTIONAL_FAMILIES:
            args.append(f"{self.alpha:g}")
        if self.family == "BFM" and self.bessel_order != 1.0:
            args.append(f"v={self.bessel_order:g}")
        return self.family + (f"({','.join(args)})" if args else "")

    def to_dict(self) -> dict:
        d = {"family": self.family}
        if self.family in PQ_FAMILIES:
            d["p"] = self.p
            d["q"] = self.q
        if self.family in FRACTIONAL_FAMILIES:
            d["alpha"] = self.alpha
        if self.family == "BFM":
            d["bessel_order"] = self.bessel_order
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MethodSpec":
        return cls(d["family"], p=d.get("p"), q=d.get("q"),
                   alpha=d.get("alpha"), bessel_order=d.get("bessel_order", 1.0))

    # -- order legality -----------------------------------------------------

    def check_order(self, n: int, m: int | None = None) -> None:
        """Raise DomainError if (n, m) is not a legal index for this family."""
        fam = self.family
        if fam == "ZM":
            if m is None:
                raise DomainError("ZM radial kernel needs the angular repetition m")
            if n < 0 or abs(m) > n or (n - abs(m)) % 2 != 0:
                raise DomainError(f"illegal ZM order (n={n}, m={m})")
        elif fam == "PZM":
            if m is None:
                raise DomainError("PZM radial kernel needs the angular repetition m")
            if n < 0 or abs(m) > n:
                raise DomainError(f"illegal PZM order (n={n}, m={m})")
        elif fam in ("PST", "GPST"):
            if n < 1:
                raise DomainError(f"{fam} requires n >= 1 (got {n})")
        elif fam in ("EFM", "PCET", "GPCET"):
            pass  # any integer n
        else:
            if n < 0:
                raise DomainError(f"{fam} requires n >= 0 (got {n})")


@dataclass(frozen=True)
class OrderSet:
    """The set S(K) of legal (n, m) indices, lexicographically ordered."""

    method: MethodSpec
    K: int
    indices: tuple[OrderIndex, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[OrderIndex]:
        return iter(self.indices)


@lru_cache(maxsize=512)
def order_set(method: MethodSpec, K: int) -> OrderSet:
    """Enumerate S(K) for `method`.

    Cardinalities: ZM (K+1)(K+2)/2; PZM (K+1)^2; the OFMM-class families
    (K+1)(2K+1); EFM/PCET/GPCET (2K+1)^2; PST/GPST K(2K+1).
    """
    if K < 0:
        raise DomainError(f"K must be >= 0 (got {K})")
    fam = method.family
    idx: list[OrderIndex] = []
    if fam == "ZM":
        for n in range(K + 1):
            for m in range(-n, n + 1):
                if (n - abs(m)) % 2 == 0:
                    idx.append(OrderIndex(n, m))
    elif fam == "PZM":
        for n in range(K + 1):
            for m in range(-n, n + 1):
                idx.append(OrderIndex(n, m))
    elif fam in ("EFM", "PCET", "GPCET"):
        for n in range(-K, K + 1):
            for m in range(-K, K + 1):
                idx.append(OrderIndex(n, m))
    elif fam in ("PST", "GPST"):
        for n in range(1, K + 1):
            for m in range(-K, K + 1):
                idx.append(OrderIndex(n, m))
    else:
        for n in range(K + 1):
            for m in range(-K, K + 1):
                idx.append(OrderIndex(n, m))
    idx.sort()
    return OrderSet(method, K, tuple(idx))


def order_set_cardinality(method: MethodSpec, K: int) -> int:
    """Closed-form |S(K)| used to cross-check enumeration."""
    fam = method.family
    if fam == "ZM":
        return (K + 1) * (K + 2) // 2
    if fam == "PZM":
        return (K + 1) ** 2
    if fam in ("EFM", "PCET", "GPCET"):
        return (2 * K + 1) ** 2
    if fam in ("PST", "GPST"):
        return K * (2 * K + 1)
    return (K + 1) * (2 * K + 1)
