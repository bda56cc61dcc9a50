from __future__ import annotations

from typing import Any, Dict, List, Literal, Optional

import numpy as np
import sympy
from pydantic import BaseModel, ConfigDict, Field

from .chain_core import SimplicialChain
from .errors import DimensionMismatchError
from .forms import PolynomialForm, coordinate_symbols
from .lebesgue_bridge import StepFunction, StepPiece
from .mass_norms import MassValue
from .norm_bounds import NormBound, SpanningWitness, WitnessNode

# ============================================================
# Cadenas
# ============================================================

class ChainTerm(BaseModel):
    coef: float
    vertices: List[List[float]] = Field(..., min_length=1, description="n+1 vértices de m coordenadas")


class ChainIn(BaseModel):
    n: int = Field(..., ge=0, description="Dimensión de los símplices")
    m: int = Field(..., ge=1, description="Dimensión del espacio ambiente")
    terms: List[ChainTerm] = Field(default_factory=list)

    def to_chain(self) -> SimplicialChain:
        for i, term in enumerate(self.terms):
            if len(term.vertices) != self.n + 1 or any(len(v) != self.m for v in term.vertices):
                raise DimensionMismatchError(
                    f"Term {i} needs {self.n + 1} vertices with {self.m} coordinates"
                )
        coefs = np.array([t.coef for t in self.terms], dtype=float)
        verts = np.array([t.vertices for t in self.terms], dtype=float).reshape(len(self.terms), self.n + 1, self.m)
        return SimplicialChain(self.n, self.m, coefs, verts)

    @classmethod
    def from_chain(cls, chain: SimplicialChain) -> "ChainIn":
        return cls(
            n=chain.n,
            m=chain.m,
            terms=[ChainTerm(coef=float(c), vertices=v.tolist()) for c, v in zip(chain.coefs, chain.vertices)],
        )


# ============================================================
# Formas
# ============================================================

class FormMonomial(BaseModel):
    coef: float
    powers: List[int] = Field(..., description="Exponentes e_1..e_m")


class FormIn(BaseModel):
    degree: int = Field(..., ge=0)
    ambient: int = Field(..., ge=1)
    components: Dict[str, List[FormMonomial]] = Field(
        default_factory=dict, description='Multi-índice creciente en base 1, ej: "1,3"'
    )

    def to_form(self) -> PolynomialForm:
        symbols = coordinate_symbols(self.ambient)
        terms = {}
        for index, monomials in self.components.items():
            expr = sympy.Integer(0)
            for mono in monomials:
                if len(mono.powers) != self.ambient or any(p < 0 for p in mono.powers):
                    raise DimensionMismatchError(
                        f"Monomial powers {mono.powers} invalid for a form on R^{self.ambient}"
                    )
                expr += sympy.nsimplify(mono.coef, rational=True) * sympy.Mul(
                    *(s ** p for s, p in zip(symbols, mono.powers))
                )
            terms[index] = expr
        return PolynomialForm.from_terms(self.degree, self.ambient, terms)

    @classmethod
    def from_form(cls, form: PolynomialForm) -> "FormIn":
        components = {}
        for index, poly in form.components.items():
            key = ",".join(str(i + 1) for i in index)
            components[key] = [
                FormMonomial(coef=float(coef), powers=list(powers)) for powers, coef in poly.terms()
            ]
        return cls(degree=form.degree, ambient=form.ambient, components=components)


# ============================================================
# Testigos
# ============================================================

class WitnessPlane(BaseModel):
    chain: ChainIn
    children: Optional[List["WitnessPlane"]] = None


WitnessPlane.model_rebuild()


class WitnessIn(BaseModel):
    lambda_: float = Field(..., alias="lambda", gt=0)
    planes: List[WitnessPlane] = Field(..., min_length=1)

    model_config = ConfigDict(populate_by_name=True)

    def to_witness(self) -> SpanningWitness:
        return SpanningWitness(self.lambda_, tuple(self._node(p) for p in self.planes))

    def _node(self, plane: WitnessPlane) -> WitnessNode:
        children = None
        if plane.children:
            children = SpanningWitness(self.lambda_, tuple(self._node(c) for c in plane.children))
        return WitnessNode(plane.chain.to_chain(), children)

    @classmethod
    def from_witness(cls, witness: SpanningWitness) -> "WitnessIn":
        def plane(node: WitnessNode) -> WitnessPlane:
            children = [plane(c) for c in node.children.planes] if node.children is not None else None
            return WitnessPlane(chain=ChainIn.from_chain(node.chain), children=children)

        return cls(lambda_=witness.lam, planes=[plane(node) for node in witness.planes])


# ============================================================
# Funciones escalonadas
# ============================================================

class StepPieceIn(BaseModel):
    a: float
    b: float
    v: float


class StepFunctionIn(BaseModel):
    pieces: List[StepPieceIn] = Field(default_factory=list)

    def to_step_function(self) -> StepFunction:
        return StepFunction(tuple(StepPiece(p.a, p.b, p.v) for p in self.pieces))


# ============================================================
# Resultados
# ============================================================

class MassValueOut(BaseModel):
    value: float = Field(..., ge=0)
    kind: Literal["exact", "upper_bound"]
    lam: float
    plane: Optional[int] = None

    @classmethod
    def from_value(cls, value: MassValue) -> "MassValueOut":
        return cls(value=value.value, kind=value.kind, lam=value.lam, plane=value.plane)


class NormBoundOut(BaseModel):
    value: float
    kind: Literal["flat", "natural"]
    lam: float
    residual_masses: List[float]
    plane_values: List[float]
    witness: WitnessIn

    @classmethod
    def from_bound(cls, bound: NormBound) -> "NormBoundOut":
        return cls(
            value=bound.value,
            kind=bound.kind,
            lam=bound.lam,
            residual_masses=list(bound.residual_masses),
            plane_values=list(bound.plane_values),
            witness=WitnessIn.from_witness(bound.witness),
        )


Verdict = Literal["pass", "fail", "diverged"]


class ExperimentReport(BaseModel):
    name: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    rows: List[Dict[str, Any]] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)
    verdict: Verdict
    tolerances: Dict[str, float] = Field(default_factory=dict)


# ============================================================
# Peticiones HTTP
# ============================================================

class ChainRequest(BaseModel):
    chain: ChainIn


class NaturalNormRequest(BaseModel):
    chain: ChainIn
    lambda_: float = Field(..., alias="lambda", gt=0)
    witness: Optional[WitnessIn] = None
    complex_cells: Optional[List[ChainIn]] = Field(
        None, description="Celdas generadoras; si se envían se busca un testigo sobre ellas"
    )
    budget: Optional[int] = Field(None, ge=1)
    seed: int = 0

    model_config = ConfigDict(populate_by_name=True)


class FlatNormRequest(BaseModel):
    chain: ChainIn
    complex_cells: List[ChainIn] = Field(..., min_length=1)


class FormChainRequest(BaseModel):
    form: FormIn
    chain: ChainIn


class FormRequest(BaseModel):
    form: FormIn


class ValueOut(BaseModel):
    value: float


class ExperimentRequest(BaseModel):
    levels: Optional[List[int]] = None
    tol: Optional[float] = Field(None, gt=0)
    budget: Optional[int] = Field(None, ge=1)
    seed: int = 0
    cases: Optional[int] = Field(None, ge=1, le=1000)
