"""Sparse real polynomials with explicit exponents.

Used to define graphing functions from JSON coefficient lists, with
exact partial derivatives.

>>> p = Polynomial([(1.0, (2, 0)), (-3.0, (0, 2))])
>>> float(p(2.0, 1.0))
1.0
>>> float(p.deriv(0)(2.0, 1.0))
4.0
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Polynomial:
    terms: tuple

    def __init__(self, terms, nvars: int | None = None):
        cleaned = []
        for coef, exps in terms:
            exps = tuple(int(e) for e in exps)
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent")
            cleaned.append((float(coef), exps))
        if nvars is None:
            nvars = len(cleaned[0][1]) if cleaned else 0
        for _, e in cleaned:
            if len(e) != nvars:
                raise ValueError("inconsistent number of variables")
        object.__setattr__(self, "terms", tuple(cleaned))
        object.__setattr__(self, "_nvars", nvars)

    @property
    def nvars(self) -> int:
        return self._nvars

    @classmethod
    def from_json(cls, spec) -> "Polynomial":
        """Accept ``{"terms": [[coef, [e1, e2, ...]], ...], "nvars": k}``."""
        if isinstance(spec, dict):
            return cls([(c, e) for c, e in spec["terms"]], spec.get("nvars"))
        return cls([(c, e) for c, e in spec])

    def __call__(self, *xs):
        if len(xs) != self.nvars:
            raise ValueError(f"expected {self.nvars} arguments, got {len(xs)}")
        xs = [np.asarray(x, dtype=float) for x in xs]
        shape = np.broadcast(*xs).shape if xs else ()
        out = np.zeros(shape)
        for coef, exps in self.terms:
            term = np.full(shape, coef)
            for x, e in zip(xs, exps):
                if e:
                    term = term * x**e
            out = out + term
        return out

    def deriv(self, var: int) -> "Polynomial":
        new = []
        for coef, exps in self.terms:
            e = exps[var]
            if e == 0:
                continue
            ne = list(exps)
            ne[var] = e - 1
            new.append((coef * e, tuple(ne)))
        return Polynomial(new, self.nvars)

    def degree(self) -> int:
        return max((sum(e) for c, e in self.terms if c != 0.0), default=0)
