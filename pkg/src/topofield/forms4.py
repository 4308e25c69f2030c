"""Antisymmetric rank-2 tensors at a 4D point and the Hodge star.

Components are stored in the fixed order (F01, F02, F03, F23, F13, F12).
The E/B dictionary is deliberately centralized here because the sign
pattern is asymmetric: E_a = F_{0a} (Minkowski) or -F_{0a} (Euclidean,
temporal-gauge convention), and the magnetic block carries the mixed signs
-B1 = F23, +B2 = F13, -B3 = F12.  All other modules go through
`from_eb` / `to_eb` and never touch raw component signs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

IDX = ("01", "02", "03", "23", "13", "12")


class Signature(Enum):
    MINKOWSKI = "minkowski"
    EUCLIDEAN = "euclidean"


@dataclass(frozen=True)
class FourForm2:
    """Six independent components of a 2-form at a point, plus signature."""

    components: tuple
    signature: Signature = Signature.MINKOWSKI

    def __post_init__(self):
        if len(self.components) != 6:
            raise ValueError("need exactly 6 components (F01,F02,F03,F23,F13,F12)")
        object.__setattr__(
            self,
            "components",
            tuple(np.asarray(c, dtype=float) if np.ndim(c) else float(c)
                  for c in self.components),
        )

    def __add__(self, other: "FourForm2") -> "FourForm2":
        _check_sig(self, other)
        return FourForm2(
            tuple(a + b for a, b in zip(self.components, other.components)),
            self.signature,
        )

    def __sub__(self, other: "FourForm2") -> "FourForm2":
        _check_sig(self, other)
        return FourForm2(
            tuple(a - b for a, b in zip(self.components, other.components)),
            self.signature,
        )

    def __mul__(self, s: float) -> "FourForm2":
        return FourForm2(tuple(s * c for c in self.components), self.signature)

    __rmul__ = __mul__

    def __neg__(self) -> "FourForm2":
        return self * -1.0

    def max_abs(self) -> float:
        return max(abs(c) for c in self.components)


def _check_sig(a: FourForm2, b: FourForm2):
    if a.signature is not b.signature:
        raise ValueError("signature mismatch")


def from_eb(E, B, signature: Signature = Signature.MINKOWSKI) -> FourForm2:
    """Assemble F from 3-vectors E, B.  Minkowski: F_{0a} = E_a; Euclidean
    (temporal gauge, F_{0i} = dA_i/dt = -E_i): F_{0a} = -E_a.  Magnetic
    block in both cases: F23 = -B1, F13 = +B2, F12 = -B3."""
    E = np.asarray(E, dtype=float)
    B = np.asarray(B, dtype=float)
    se = 1.0 if signature is Signature.MINKOWSKI else -1.0
    return FourForm2(
        (se * E[0], se * E[1], se * E[2], -B[0], B[1], -B[2]), signature
    )


def to_eb(F: FourForm2) -> tuple[np.ndarray, np.ndarray]:
    f01, f02, f03, f23, f13, f12 = F.components
    se = 1.0 if F.signature is Signature.MINKOWSKI else -1.0
    E = se * np.array([f01, f02, f03])
    B = np.array([-f23, f13, -f12])
    return E, B


def hodge_star(F: FourForm2) -> FourForm2:
    """Hodge dual.  Minkowski (g = diag(1,-1,-1,-1), eps^0123 = 1):
    star(star F) = -F; in E/B language (E,B) -> (-B, E).  Euclidean:
    star(star F) = +F; componentwise (a,b,c,d,e,f) -> (d,-e,f,a,-b,c)."""
    if F.signature is Signature.MINKOWSKI:
        E, B = to_eb(F)
        return from_eb(-B, E, F.signature)
    a, b, c, d, e, f = F.components
    return FourForm2((d, -e, f, a, -b, c), F.signature)


def sd_asd_split(F: FourForm2) -> tuple[FourForm2, FourForm2]:
    """Split F = F+ + F- with F+- = (F +- *F)/2.

    Exact linear projections: in Euclidean signature *F+ = F+, *F- = -F-.
    In Minkowski signature ** = -1, so the real split is not an eigensplit;
    the caller gets the same (F + *F)/2 pair flagged by the stored
    signature and must treat it as the complexified decomposition.
    """
    s = hodge_star(F)
    half = 0.5
    return (half * (F + s), half * (F - s))


def is_anti_self_dual(F: FourForm2, tol: float = 0.0) -> bool:
    """Componentwise F01 = -F23, F02 = -F31 (= +F13 in stored order),
    F03 = -F12; meaningful in Euclidean signature."""
    f01, f02, f03, f23, f13, f12 = F.components
    r = max(np.abs(f01 + f23).max(), np.abs(f02 - f13).max(),
            np.abs(f03 + f12).max())
    return bool(r <= tol)


def hodge3_project(F: FourForm2) -> tuple[np.ndarray, np.ndarray]:
    """3+1 split of the Hodge star: returns (phi, *3 phi).

    phi is the dt-block 1-form (components F_{0i} read as a 3-vector) and
    *3 phi its 3D dual 2-form identified with the same 3-vector.  The
    assembled Phi = phi ^ dt + *3 phi is anti-self-dual by construction
    (see assemble_asd below).
    """
    phi = np.array(F.components[:3], dtype=float)
    return phi, phi.copy()


def assemble_asd(phi, signature: Signature = Signature.EUCLIDEAN) -> FourForm2:
    """Build Phi = phi ^ dt + *3 phi from a 1-form phi on the 3-slice.

    phi ^ dt has F_{0i} = -phi_i; *3 phi contributes the spatial block
    F23 = phi1, F13 = -phi2, F12 = phi3.  The result satisfies *Phi = -Phi
    exactly in Euclidean signature.
    """
    p = np.asarray(phi, dtype=float)
    return FourForm2((-p[0], -p[1], -p[2], p[0], -p[1], p[2]), signature)
