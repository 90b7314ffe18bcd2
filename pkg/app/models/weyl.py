# app/models/weyl.py

from pydantic import BaseModel, ConfigDict, Field, model_validator


class MomentData(BaseModel):
    model_config = ConfigDict(frozen=True)

    m: complex = Field(..., description="Primer momento m = ⟨u, Au⟩")
    self_adjoint: bool = Field(default=False, description="A = A* dentro de la tolerancia")

    @model_validator(mode="after")
    def _real_when_self_adjoint(self):
        if self.self_adjoint and abs(self.m.imag) > 1e-12:
            raise ValueError("m debe ser real cuando A es autoadjunta")
        return self
