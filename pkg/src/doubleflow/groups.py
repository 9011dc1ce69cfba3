"""The group triple SU(2), SB(2,C), SL(2,C) and the Lie algebra pieces.

Elements store minimal coordinates (alpha, nu) / (r, gamma) / (z1..z4) rather
than raw matrices, so membership invariants are checkable and small drift is
renormalizable.  Constructors project inputs that violate the invariant by at
most ``PROJECT_TOL`` and reject anything worse.
"""

import cmath
import math

import numpy as np

from .mat2 import check_finite, det2, expm2, rodrigues3, sinhc

__all__ = [
    "MembershipError",
    "SU2Element",
    "SB2Element",
    "SL2Element",
    "AlgebraElement",
    "iwasawa_gu",
    "iwasawa_ug",
    "exp_group",
    "random_element",
]

# Constructors repair violations up to this size; membership checks use
# the tighter MEMBER_TOL.
PROJECT_TOL = 1e-8
MEMBER_TOL = 1e-10
ALGEBRA_TOL = 1e-12


class MembershipError(ValueError):
    """Input does not satisfy (or nearly satisfy) a group/algebra invariant."""


def _finite_complex(z, name) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise MembershipError(f"non-finite {name}")
    return z


class SU2Element:
    """Unitary factor, as a matrix [[alpha, -conj(nu)], [nu, conj(alpha)]]."""

    __slots__ = ("alpha", "nu")

    def __init__(self, alpha, nu):
        alpha = _finite_complex(alpha, "alpha")
        nu = _finite_complex(nu, "nu")
        norm2 = abs(alpha) ** 2 + abs(nu) ** 2
        if abs(norm2 - 1.0) > PROJECT_TOL:
            raise MembershipError(f"|alpha|^2 + |nu|^2 = {norm2!r} is not 1")
        s = math.sqrt(norm2)
        self.alpha = alpha / s
        self.nu = nu / s

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0)

    @classmethod
    def from_matrix(cls, m):
        m = check_finite(np.asarray(m, dtype=complex))
        g = cls(m[0, 0], m[1, 0])
        if np.max(np.abs(g.as_matrix() - m)) > PROJECT_TOL:
            raise MembershipError("matrix is not of SU(2) form")
        return g

    def as_matrix(self) -> np.ndarray:
        return np.array(
            [[self.alpha, -np.conj(self.nu)], [self.nu, np.conj(self.alpha)]],
            dtype=complex,
        )

    def inverse(self) -> "SU2Element":
        return SU2Element(np.conj(self.alpha), -self.nu)

    def __matmul__(self, other: "SU2Element") -> "SU2Element":
        a = self.alpha * other.alpha - np.conj(self.nu) * other.nu
        n = self.nu * other.alpha + np.conj(self.alpha) * other.nu
        return SU2Element(a, n)

    def membership_defect(self) -> float:
        return abs(abs(self.alpha) ** 2 + abs(self.nu) ** 2 - 1.0)

    def __repr__(self):
        return f"SU2Element(alpha={self.alpha!r}, nu={self.nu!r})"


class SB2Element:
    """Upper-triangular factor [[r, gamma], [0, 1/r]] with r > 0."""

    __slots__ = ("r", "gamma")

    def __init__(self, r, gamma):
        r = float(r)
        if not math.isfinite(r) or r <= 0.0:
            raise MembershipError(f"r = {r!r} must be finite and positive")
        self.r = r
        self.gamma = _finite_complex(gamma, "gamma")

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0)

    @classmethod
    def from_matrix(cls, m):
        m = check_finite(np.asarray(m, dtype=complex))
        if abs(m[1, 0]) > PROJECT_TOL or abs(m[0, 0].imag) > PROJECT_TOL:
            raise MembershipError("matrix is not of SB(2,C) form")
        u = cls(m[0, 0].real, m[0, 1])
        if np.max(np.abs(u.as_matrix() - m)) > PROJECT_TOL:
            raise MembershipError("matrix is not of SB(2,C) form")
        return u

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.r, self.gamma], [0.0, 1.0 / self.r]], dtype=complex)

    def inverse(self) -> "SB2Element":
        return SB2Element(1.0 / self.r, -self.gamma)

    def __matmul__(self, other: "SB2Element") -> "SB2Element":
        return SB2Element(self.r * other.r, self.r * other.gamma + self.gamma / other.r)

    def __repr__(self):
        return f"SB2Element(r={self.r!r}, gamma={self.gamma!r})"


class SL2Element:
    """An element of SL(2,C) with z1*z4 - z2*z3 = 1."""

    __slots__ = ("z1", "z2", "z3", "z4")

    def __init__(self, z1, z2, z3, z4):
        z = [_finite_complex(v, f"z{i}") for i, v in enumerate((z1, z2, z3, z4), start=1)]
        d = z[0] * z[3] - z[1] * z[2]
        if abs(d - 1.0) > PROJECT_TOL:
            raise MembershipError(f"det = {d!r} is not 1")
        s = cmath.sqrt(d)
        self.z1, self.z2, self.z3, self.z4 = (v / s for v in z)

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_matrix(cls, m):
        m = check_finite(np.asarray(m, dtype=complex))
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.z1, self.z2], [self.z3, self.z4]], dtype=complex)

    def inverse(self) -> "SL2Element":
        return SL2Element(self.z4, -self.z2, -self.z3, self.z1)

    def __matmul__(self, other: "SL2Element") -> "SL2Element":
        return SL2Element.from_matrix(self.as_matrix() @ other.as_matrix())

    def membership_defect(self) -> float:
        return abs(self.z1 * self.z4 - self.z2 * self.z3 - 1.0)

    def __repr__(self):
        return f"SL2Element({self.z1!r}, {self.z2!r}, {self.z3!r}, {self.z4!r})"


class AlgebraElement:
    """A Lie algebra element tagged by the subalgebra it lives in.

    kind "su2": traceless anti-Hermitian 2x2; "sb2": upper-triangular with
    real trace-free diagonal; "sl2c": traceless 2x2; "so3": a 3-vector.
    """

    __slots__ = ("kind", "value")

    def __init__(self, kind: str, value):
        if kind == "so3":
            value = check_finite(np.asarray(value, dtype=float))
            if value.shape != (3,):
                raise MembershipError("so3 element must be a 3-vector")
        else:
            value = check_finite(np.asarray(value, dtype=complex))
            if value.shape != (2, 2):
                raise MembershipError(f"{kind} element must be a 2x2 matrix")
            defect = _algebra_defect(kind, value)
            if defect > ALGEBRA_TOL:
                raise MembershipError(f"matrix fails the {kind} check by {defect:.3e}")
        self.kind = kind
        self.value = value

    def __repr__(self):
        return f"AlgebraElement({self.kind!r}, {self.value!r})"


def _algebra_defect(kind: str, m: np.ndarray) -> float:
    if kind == "su2":
        return float(max(np.max(np.abs(m + np.conj(m.T))), abs(m[0, 0] + m[1, 1])))
    if kind == "sb2":
        return float(max(abs(m[1, 0]), abs(m[0, 0] + m[1, 1]), abs(m[0, 0].imag), abs(m[1, 1].imag)))
    if kind == "sl2c":
        return float(abs(m[0, 0] + m[1, 1]))
    raise MembershipError(f"unknown algebra kind {kind!r}")


def iwasawa_gu(a: SL2Element):
    """Factor a = g*u with g in SU(2), u in SB(2,C).

    With s = 1/sqrt(|z1|^2 + |z3|^2):
        g = [[s*z1, -s*conj(z3)], [s*z3, s*conj(z1)]]
        u = [[1/s, s*(conj(z1)*z2 + conj(z3)*z4)], [0, s]]
    """
    s = 1.0 / math.sqrt(abs(a.z1) ** 2 + abs(a.z3) ** 2)
    g = SU2Element(s * a.z1, s * a.z3)
    u = SB2Element(1.0 / s, s * (np.conj(a.z1) * a.z2 + np.conj(a.z3) * a.z4))
    return g, u


def iwasawa_ug(a: SL2Element):
    """Factor a = u*g with u in SB(2,C), g in SU(2).

    With t = 1/sqrt(|z3|^2 + |z4|^2):
        u = [[t, t*(z1*conj(z3) + z2*conj(z4))], [0, 1/t]]
        g = [[t*conj(z4), -t*conj(z3)], [t*z3, t*z4]]
    """
    t = 1.0 / math.sqrt(abs(a.z3) ** 2 + abs(a.z4) ** 2)
    u = SB2Element(t, t * (a.z1 * np.conj(a.z3) + a.z2 * np.conj(a.z4)))
    g = SU2Element(t * np.conj(a.z4), t * a.z3)
    return u, g


def exp_group(x: AlgebraElement):
    """Exponentiate onto the matching subgroup.

    su2 goes through the closed-form 2x2 exponential; sb2 has the explicit
    triangular exponential [[e^x, y*sinhc(x)], [0, e^-x]]; so3 is Rodrigues.
    """
    if x.kind == "su2":
        return SU2Element.from_matrix(expm2(x.value))
    if x.kind == "sb2":
        d = complex(x.value[0, 0]).real
        y = complex(x.value[0, 1])
        return SB2Element(math.exp(d), y * sinhc(d))
    if x.kind == "so3":
        return rodrigues3(x.value, 1.0)
    raise MembershipError(f"cannot exponentiate algebra kind {x.kind!r}")


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_element(kind: str, seed):
    """Seeded random group element.

    SU(2) is sampled uniformly (normalized 4-component Gaussian), SB(2,C)
    with log-normal r (sigma = 0.5) and complex-Gaussian gamma, SL(2,C) as
    the product g*u of the former two.  Deterministic per seed.
    """
    rng = _as_rng(seed)
    if kind == "su2":
        v = rng.standard_normal(4)
        v = v / np.linalg.norm(v)
        return SU2Element(complex(v[0], v[1]), complex(v[2], v[3]))
    if kind == "sb2":
        r = math.exp(0.5 * rng.standard_normal())
        gamma = complex(rng.standard_normal(), rng.standard_normal()) / math.sqrt(2.0)
        return SB2Element(r, gamma)
    if kind in ("sl2", "sl2c"):
        g = random_element("su2", rng)
        u = random_element("sb2", rng)
        return SL2Element.from_matrix(g.as_matrix() @ u.as_matrix())
    raise MembershipError(f"unknown group kind {kind!r}")
