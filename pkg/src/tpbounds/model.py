"""Interface a turning-point problem must provide to the bound machinery."""

from __future__ import annotations

from typing import Protocol, Sequence


class ProblemModel(Protocol):
    """Everything lgbounds and tploop need from a concrete equation.

    The equation is d²w/dz² = (u² f(z) + g(z)) w with a simple turning point
    z0.  Evaluators take a complex z and return mpmath numbers at the
    precision of the model's context.
    """

    z0: complex

    def f(self, z): ...

    def g(self, z): ...

    def phi(self, z): ...

    def f_half(self, z):
        """The branch of f^{1/2} with dξ/dz = f^{1/2}."""

    def candidate_paths(self, z, j: int):
        """Candidate paths from z to z^{(j)}; the first progressive one is used."""

    def point(self, z):
        """Liouville data at z: xi, zeta, arg of zeta and the f^{1/2} factor."""

    def fhat_values(self, z, upto: int) -> Sequence:
        """F̂_1(z), ..., F̂_upto(z)."""

    def ehat_values(self, z, upto: int) -> Sequence:
        """Ê_1(z), ..., Ê_upto(z)."""

    def ehat_reference(self, s: int, j: int):
        """Ê_s at the reference point z^{(j)}."""

    def connection(self, nu, n: int):
        """λ_{±1} and δ_{n,±1} for the parameter value nu."""
