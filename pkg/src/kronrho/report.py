"""Check results shared by all verification routines."""

from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"

# Every check names the statement it verifies through one of these slugs.
ANCHORS = {
    "hilbert-recurrence": "dimensions of R_n obey r(n+1) = N r(n) - r(n-1)",
    "koszul-exact-sequence": "0 -> R(n-1) -> V (x) R(n) -> R(n+1) -> 0 is exact",
    "relation-ideal": "degree-n part of the two-sided ideal generated by sum Xi^2",
    "graded-multiplication": "multiplication of R on normal forms",
    "gamma-isomorphism": "words to composites of chain maps give R_n = Hom(P1, rho^n P1)",
    "ar-sequence": "rho^(n+1) P1 is the cokernel of psi: rho^(n-1) P1 -> V (x) rho^n P1",
    "purity": "psi and Hom(P1, psi) are injective",
    "coxeter-reflection": "BGP reflections realise the inverse translate on preprojectives",
    "euler-form": "dim Hom - dim Ext1 equals the Euler form",
    "preinjective-chain": "rho^-(n+1) S0 is the kernel of V (x) rho^-n S0 -> rho^-(n-1) S0",
    "preinjective-evaluation": "Hom(rho^-(n+1) S0, rho^-n S0) (x) rho^-(n+1) S0 -> rho^-n S0 is onto",
    "torsion-pair": "torsion part t_n and free part f_n with Hom(rho^-n S0, f_n) = 0",
    "torsion-stabilization": "t_n(M) stabilises; Ext1(rho^-n S0, M') = 0 = Hom(rho^-n S0, M'')",
    "canonical-sequence": "0 -> Hom(P1,M) (x) P1 -> M -> Hom(P0,M) (x) S0 -> 0",
    "mesh-equivalence": "mesh category of the translation quiver matches the preprojective component",
    "qgr-hom": "Hom in qgr R as stable tails of graded Homs",
    "tilting-endomorphisms": "End(R + R(1)) is the Kronecker path algebra",
    "gamma-star-projectives": "Gamma_* of P1 and P0 are R and R(1)",
    "determinism": "identical configuration and seed give identical output",
}


@dataclass
class Check:
    """One verified statement: pass/fail plus the numbers that support it."""

    name: str
    anchor: str
    status: str
    numbers: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.anchor not in ANCHORS:
            raise ValueError(f"unknown anchor {self.anchor!r}")
        if self.status not in (PASS, FAIL, INCONCLUSIVE):
            raise ValueError(f"bad status {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self) -> Dict[str, Any]:
        return {"name": self.name, "paper_anchor": self.anchor,
                "status": self.status, "numbers": plain(self.numbers)}


def plain(value: Any) -> Any:
    """Numpy scalars and tuples to JSON-native values, recursively."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def check(name: str, anchor: str, ok: bool, **numbers) -> Check:
    return Check(name, anchor, PASS if ok else FAIL, numbers)


def all_passed(checks: List[Check]) -> bool:
    return all(c.passed for c in checks)
