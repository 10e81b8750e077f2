from __future__ import annotations

from typing import Callable

from autodiff import backend


class NonFiniteResult(ArithmeticError):
    """Raised when an operation produces or would produce NaN/inf.

    Attributes:
    - operation (str): the operation or subexpression that failed.
    """

    def __init__(self, operation: str, detail: str = ""):
        self.operation = operation
        self.detail = detail
        message = f"non-finite result in {operation}"
        if detail:
            message += f": {detail}"
        super().__init__(message)


_COMPONENTS = ("v", "gx", "gy", "hxx", "hxy", "hyy")


class Jet2:
    """
    Second-order Taylor jet in two spatial variables (x, y).

    Carries a value, the gradient (gx, gy) and the Hessian entries
    (hxx, hxy, hyy). Arithmetic follows the truncated Taylor rules, so any
    expression built from jets yields its exact first and second spatial
    derivatives. Components may be Python floats, numpy arrays or torch
    tensors; arrays are treated pointwise and may carry any leading batch
    shape. Derivative components of a constant are stored as the float 0.0
    and broadcast where needed.

    Torch components make every jet component a differentiable quantity, so
    reverse-mode gradients with respect to parameters flow through spatial
    derivatives (reverse over forward).
    """

    __slots__ = _COMPONENTS
    # numpy defers binary operators to the jet instead of building object arrays
    __array_ufunc__ = None

    def __init__(self, v, gx=0.0, gy=0.0, hxx=0.0, hxy=0.0, hyy=0.0):
        self.v = v
        self.gx = gx
        self.gy = gy
        self.hxx = hxx
        self.hxy = hxy
        self.hyy = hyy

    # Seeding

    @classmethod
    def constant(cls, c) -> "Jet2":
        return cls(c)

    @classmethod
    def variable_x(cls, x) -> "Jet2":
        return cls(x, gx=1.0)

    @classmethod
    def variable_y(cls, y) -> "Jet2":
        return cls(y, gy=1.0)

    @classmethod
    def seed(cls, x, y) -> tuple["Jet2", "Jet2"]:
        """Seed the two independent variables at the given point(s)."""
        return cls.variable_x(x), cls.variable_y(y)

    # Views

    def components(self) -> tuple:
        return (self.v, self.gx, self.gy, self.hxx, self.hxy, self.hyy)

    def laplacian(self):
        return self.hxx + self.hyy

    def grad_norm2(self):
        return self.gx * self.gx + self.gy * self.gy

    def map(self, fn: Callable) -> "Jet2":
        return Jet2(*(fn(c) for c in self.components()))

    def is_finite(self) -> bool:
        return all(backend.all_finite(c) for c in self.components())

    @property
    def shape(self) -> tuple:
        return backend.shape_of(self.v)

    def __getitem__(self, idx) -> "Jet2":
        return self.map(lambda c: c[idx] if backend.is_array(c) and c.ndim > 0 else c)

    def __repr__(self) -> str:
        return (
            f"Jet2(v={self.v}, gx={self.gx}, gy={self.gy}, "
            f"hxx={self.hxx}, hxy={self.hxy}, hyy={self.hyy})"
        )

    # Arithmetic

    def __neg__(self) -> "Jet2":
        return self.map(lambda c: -c)

    def __pos__(self) -> "Jet2":
        return self

    def __add__(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            return Jet2(*(a + b for a, b in zip(self.components(), other.components())))
        return Jet2(self.v + other, self.gx, self.gy, self.hxx, self.hxy, self.hyy)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            return Jet2(*(a - b for a, b in zip(self.components(), other.components())))
        return Jet2(self.v - other, self.gx, self.gy, self.hxx, self.hxy, self.hyy)

    def __rsub__(self, other) -> "Jet2":
        return (-self) + other

    def __mul__(self, other) -> "Jet2":
        if not isinstance(other, Jet2):
            return self.map(lambda c: c * other)
        a, b = self, other
        return Jet2(
            a.v * b.v,
            a.gx * b.v + a.v * b.gx,
            a.gy * b.v + a.v * b.gy,
            a.hxx * b.v + 2.0 * a.gx * b.gx + a.v * b.hxx,
            a.hxy * b.v + a.gx * b.gy + a.gy * b.gx + a.v * b.hxy,
            a.hyy * b.v + 2.0 * a.gy * b.gy + a.v * b.hyy,
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        if backend.any_true(self.v == 0):
            raise NonFiniteResult("div", "denominator value is zero")
        r = 1.0 / self.v
        return self.chain(r, -r * r, 2.0 * r * r * r)

    def __truediv__(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        if backend.any_true(other == 0):
            raise NonFiniteResult("div", "denominator value is zero")
        return self.map(lambda c: c / other)

    def __rtruediv__(self, other) -> "Jet2":
        return self.reciprocal() * other

    def __pow__(self, exponent) -> "Jet2":
        if isinstance(exponent, Jet2):
            return (exponent * self.log()).exp()
        if float(exponent).is_integer():
            return self.ipow(int(exponent))
        v = self.v
        return self.chain(
            backend.power(v, exponent),
            exponent * backend.power(v, exponent - 1.0),
            exponent * (exponent - 1.0) * backend.power(v, exponent - 2.0),
        )

    def __rpow__(self, base) -> "Jet2":
        return (self * backend.log(base)).exp()

    def ipow(self, n: int) -> "Jet2":
        """Integer power; exact at v = 0 for n >= 0."""
        if n == 0:
            return Jet2(self.v * 0.0 + 1.0)
        if n == 1:
            return self
        if n == 2:
            return self * self
        if n < 0:
            return self.ipow(-n).reciprocal()
        v = self.v
        return self.chain(v**n, n * v ** (n - 1), n * (n - 1) * v ** (n - 2))

    # Elementary functions

    def chain(self, f, d1, d2) -> "Jet2":
        """Compose with a scalar function given f(v), f'(v) and f''(v)."""
        return Jet2(
            f,
            d1 * self.gx,
            d1 * self.gy,
            d2 * self.gx * self.gx + d1 * self.hxx,
            d2 * self.gx * self.gy + d1 * self.hxy,
            d2 * self.gy * self.gy + d1 * self.hyy,
        )

    def sin(self) -> "Jet2":
        s, c = backend.sin(self.v), backend.cos(self.v)
        return self.chain(s, c, -s)

    def cos(self) -> "Jet2":
        s, c = backend.sin(self.v), backend.cos(self.v)
        return self.chain(c, -s, -c)

    def exp(self) -> "Jet2":
        e = backend.exp(self.v)
        return self.chain(e, e, e)

    def log(self) -> "Jet2":
        if backend.any_true(self.v <= 0):
            raise NonFiniteResult("log", "argument is not positive")
        r = 1.0 / self.v
        return self.chain(backend.log(self.v), r, -r * r)

    def tanh(self) -> "Jet2":
        t = backend.tanh(self.v)
        d1 = 1.0 - t * t
        return self.chain(t, d1, -2.0 * t * d1)

    def sqrt(self) -> "Jet2":
        if backend.any_true(self.v <= 0):
            raise NonFiniteResult("sqrt", "argument is not positive")
        s = backend.sqrt(self.v)
        return self.chain(s, 0.5 / s, -0.25 / (s * self.v))

    def square(self) -> "Jet2":
        return self * self

    def linear(self, weight, bias) -> "Jet2":
        """Affine map over the last axis: z @ weight.T + bias."""
        out = self.map(lambda c: backend.matmul_t(c, weight) if backend.is_array(c) else c)
        out.v = out.v + bias
        return out

    # Batch helpers

    @staticmethod
    def stack(jets: list, axis: int = -1) -> "Jet2":
        """Stack jets (or plain values) along a new axis."""
        jets = [j if isinstance(j, Jet2) else Jet2(j) for j in jets]
        shape = _common_shape([j.v for j in jets])
        parts = []
        for name in _COMPONENTS:
            items = [backend.broadcast_to(getattr(j, name), shape, like=j.v) for j in jets]
            parts.append(backend.stack(items, axis=axis))
        return Jet2(*parts)

    @staticmethod
    def concat(jets: list, axis: int = -1) -> "Jet2":
        jets = [j if isinstance(j, Jet2) else Jet2(j) for j in jets]
        parts = []
        for name in _COMPONENTS:
            items = [backend.broadcast_to(getattr(j, name), j.shape, like=j.v) for j in jets]
            parts.append(backend.concat(items, axis=axis))
        return Jet2(*parts)

    def sum(self, axis: int = -1, keepdims: bool = False) -> "Jet2":
        shape = self.shape
        return self.map(
            lambda c: backend.reduce_sum(backend.broadcast_to(c, shape, like=self.v), axis, keepdims)
        )

    def materialize(self) -> "Jet2":
        """Give every component the full shape of the value."""
        shape = self.shape
        return self.map(lambda c: backend.broadcast_to(c, shape, like=self.v))

    @staticmethod
    def where(mask, a, b) -> "Jet2":
        a = a if isinstance(a, Jet2) else Jet2(a)
        b = b if isinstance(b, Jet2) else Jet2(b)
        return Jet2(
            *(backend.where(mask, ca, cb) for ca, cb in zip(a.components(), b.components()))
        )


def _common_shape(values: list) -> tuple:
    shapes = [backend.shape_of(v) for v in values]
    return max(shapes, key=len) if shapes else ()
