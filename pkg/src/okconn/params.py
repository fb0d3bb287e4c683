"""Scalar parameters of the penalised Ohta-Kawasaki model."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Optional

# Modica-Mortola normalisation: integral of sqrt(2 W) over [0, 1].
C0 = 1.0 / (6.0 * math.sqrt(2.0))


@dataclass(frozen=True)
class ModelParams:
    """All scalars of the model.

    ``alpha`` is the knee of the connectedness weights; when left as ``None``
    it defaults to ``eps ** s_exponent``. ``lam`` is the repulsion strength
    (``lambda`` in config files).
    """

    eps: float
    lam: float = 0.0
    tau: float = 1e-6
    kappa: float = 2.0
    zeta1: float = 0.0
    zeta2: float = 0.0
    alpha: Optional[float] = None
    s_exponent: float = 0.25
    m_bar: float = 0.0
    c0: float = field(default=C0, init=False)

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")
        if self.lam < 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if not self.tau > 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if self.zeta1 < 0 or self.zeta2 < 0:
            raise ValueError("zeta1 and zeta2 must be >= 0")
        if not 0 < self.s_exponent < 0.5:
            raise ValueError(f"s_exponent must lie in (0, 1/2), got {self.s_exponent}")
        if self.alpha is not None and not 0 < self.alpha < 0.5:
            raise ValueError(f"alpha must lie in (0, 1/2), got {self.alpha}")
        if not 0 < self.alpha_eff < 0.5:
            raise ValueError(f"eps**s_exponent = {self.alpha_eff} is not a valid alpha; set alpha")

    @property
    def alpha_eff(self) -> float:
        return self.alpha if self.alpha is not None else self.eps**self.s_exponent

    @property
    def c1(self) -> float:
        """Normalisation making the integral of beta over [1 - alpha, 1] equal 1."""
        return 6.0 / self.alpha_eff**3

    @property
    def penalty_scale(self) -> float:
        return self.eps ** (-self.kappa)

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.init}
