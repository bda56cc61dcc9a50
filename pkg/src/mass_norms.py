from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .chain_core import SimplicialChain, canonical, collect, coordinate_planes, project
from .errors import ParameterRangeError

logger = logging.getLogger("mass_norms")

MassKind = Literal["exact", "upper_bound"]


@dataclass(frozen=True)
class MassValue:
    value: float
    kind: MassKind
    lam: float
    plane: Optional[int] = None

    def __post_init__(self):
        if self.value < 0:
            raise ParameterRangeError(f"Mass values are nonnegative (got {self.value})")

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"


def _check_lambda(chain: SimplicialChain, lam: float) -> None:
    if not 0.0 <= lam <= chain.n:
        raise ParameterRangeError(f"lambda={lam} outside [0, n={chain.n}]")


def _power_sum(coefs: np.ndarray, masses: np.ndarray, exponent: float) -> float:
    # 0^(λ/n) = 0 también cuando λ = 0
    powered = np.where(masses > 0.0, np.power(np.where(masses > 0.0, masses, 1.0), exponent), 0.0)
    return float(np.sum(np.abs(coefs) * powered))


# ============================================================
# n-masa
# ============================================================

def mass_upper_bound(chain: SimplicialChain) -> float:
    """Σ|a_i| M_n(σ_i) sobre el representante dado, sin reducir."""
    return float(np.sum(np.abs(chain.coefs) * chain.masses))


def mass(chain: SimplicialChain) -> MassValue:
    """
    M_n(A). Se reduce la cadena cuando refine lo permite (n ≤ 2) y el valor
    es exacto; en otro caso se combinan símplices idénticos y el valor es cota
    superior salvo que quede un solo término.
    """
    rep, exact = canonical(chain)
    kind: MassKind = "exact" if exact or len(rep) <= 1 else "upper_bound"
    if kind == "upper_bound":
        logger.debug(f"mass of a ({chain.n}, {chain.m}) chain reported as upper bound")
    return MassValue(mass_upper_bound(rep), kind, float(chain.n))


# ============================================================
# λ-masa proyectada y norma natural (caso base)
# ============================================================

def projected_mass(chain: SimplicialChain, plane: int, lam: float) -> MassValue:
    """
    M_{λ,π_i}(A) = Σ|a_i| M_n(π_i σ_i)^{λ/n}.

    Con λ = n se evalúa sobre el representante reducido: la masa proyectada
    es aditiva bajo subdivisión y el valor no depende del refinamiento.
    Con λ < n la subdivisión aumenta la suma, así que solo se combinan
    símplices idénticos; el valor es cota superior y es subaditivo y
    homogéneo en los coeficientes.
    """
    _check_lambda(chain, lam)
    if chain.n == 0:
        # 0-cadenas: la proyección sobre el único plano es la identidad
        rep, _ = canonical(chain)
        return MassValue(float(np.sum(np.abs(rep.coefs))), "exact", lam, plane)
    if lam == chain.n:
        rep, exact = canonical(chain)
    else:
        rep, exact = collect(chain), False
    # project() descarta imágenes degeneradas: contribuyen 0
    image = project(rep, plane)
    value = _power_sum(image.coefs, image.masses, lam / chain.n)
    kind: MassKind = "exact" if exact else "upper_bound"
    return MassValue(value, kind, lam, plane)


def natural_norm_base(chain: SimplicialChain, lam: float) -> MassValue:
    """|A|^♮_λ = Σ_i M_{λ,π_i}(A) para 0 ≤ λ ≤ n."""
    _check_lambda(chain, lam)
    values = [projected_mass(chain, i, lam) for i in range(1, len(coordinate_planes(chain.m, chain.n)) + 1)]
    kind: MassKind = "exact" if all(v.is_exact for v in values) else "upper_bound"
    return MassValue(float(sum(v.value for v in values)), kind, lam)
