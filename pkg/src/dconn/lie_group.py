"""Matrix Lie groups used as structure groups.

Supported groups: SO(2), SO(3), SE(3) and the additive translation groups
R^n (represented as homogeneous matrices so every group shares one code
path).  Each group fixes a Lie-algebra basis through ``hat``/``vee``; all
algebra coordinates below refer to that basis.

Conventions:
  * so(3) uses the standard hat map, so ``exp`` is the Rodrigues formula.
  * se(3) coordinates are ordered (omega, v): rotation first, then
    translation.  Elements are 4x4 homogeneous matrices.
  * Logarithms are principal: the rotation angle must stay strictly below
    pi, enforced with a 1e-6 safety margin (``CutLocusError`` otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CutLocusError, GroupMismatchError

# Angle below which trig coefficient ratios switch to their Taylor series.
_SMALL_ANGLE = 1.0e-8
# Principal-log domain: rotation angle must be < pi - _CUT_MARGIN.
_CUT_MARGIN = 1.0e-6


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


class MatrixGroup:
    """A matrix Lie group with a fixed algebra basis and closed-form exp/log."""

    name: str
    dim: int
    matrix_size: int

    def hat(self, vector: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def vee(self, matrix: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def exp_matrix(self, vector: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def log_vector(self, matrix: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def identity_matrix(self) -> np.ndarray:
        return np.eye(self.matrix_size)

    def cayley_matrix(self, vector: np.ndarray) -> np.ndarray:
        # (I - xi/2)^-1 (I + xi/2); lands in the group for all four families.
        half = 0.5 * self.hat(vector)
        eye = np.eye(self.matrix_size)
        return np.linalg.solve(eye - half, eye + half)

    def check_matrix(self, matrix: np.ndarray, tol: float = 1.0e-8) -> None:
        """Validate that ``matrix`` lies in the group (raises ValueError)."""
        m = np.asarray(matrix, dtype=float)
        if m.shape != (self.matrix_size, self.matrix_size):
            raise ValueError(
                f"{self.name}: expected {self.matrix_size}x{self.matrix_size} matrix, got {m.shape}"
            )
        self._check_structure(m, tol)

    def _check_structure(self, m: np.ndarray, tol: float) -> None:
        raise NotImplementedError

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return self.name


def _check_rotation(r: np.ndarray, tol: float, name: str) -> None:
    err = np.max(np.abs(r.T @ r - np.eye(r.shape[0])))
    if err > tol:
        raise ValueError(f"{name}: rotation block not orthonormal (error {err:.2e})")
    if np.linalg.det(r) < 0.0:
        raise ValueError(f"{name}: rotation block has negative determinant")


class _SO2(MatrixGroup):
    name = "SO2"
    dim = 1
    matrix_size = 2

    def hat(self, vector):
        (t,) = np.asarray(vector, dtype=float).reshape(1)
        return np.array([[0.0, -t], [t, 0.0]])

    def vee(self, matrix):
        return np.array([matrix[1, 0]])

    def exp_matrix(self, vector):
        (t,) = np.asarray(vector, dtype=float).reshape(1)
        c, s = np.cos(t), np.sin(t)
        return np.array([[c, -s], [s, c]])

    def log_vector(self, matrix):
        t = np.arctan2(matrix[1, 0], matrix[0, 0])
        if abs(t) >= np.pi - _CUT_MARGIN:
            raise CutLocusError(f"SO2: rotation angle {t:.8f} within 1e-6 of pi")
        return np.array([t])

    def _check_structure(self, m, tol):
        _check_rotation(m, tol, self.name)


def _so3_hat(w: np.ndarray) -> np.ndarray:
    return np.array(
        [
            [0.0, -w[2], w[1]],
            [w[2], 0.0, -w[0]],
            [-w[1], w[0], 0.0],
        ]
    )


def _so3_exp(w: np.ndarray) -> np.ndarray:
    theta = np.linalg.norm(w)
    k = _so3_hat(w)
    if theta < _SMALL_ANGLE:
        # sin(t)/t and (1-cos t)/t^2 to second order.
        a = 1.0 - theta**2 / 6.0
        b = 0.5 - theta**2 / 24.0
    else:
        a = np.sin(theta) / theta
        b = (1.0 - np.cos(theta)) / theta**2
    return np.eye(3) + a * k + b * (k @ k)


def _so3_rotation_angle(r: np.ndarray) -> float:
    c = (np.trace(r) - 1.0) / 2.0
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def _so3_log(r: np.ndarray) -> np.ndarray:
    theta = _so3_rotation_angle(r)
    if theta >= np.pi - _CUT_MARGIN:
        raise CutLocusError(f"SO3: rotation angle {theta:.8f} within 1e-6 of pi")
    skew = 0.5 * (r - r.T)
    w = np.array([skew[2, 1], skew[0, 2], skew[1, 0]])
    if theta < _SMALL_ANGLE:
        # w = sin(theta) * axis; sin(t)/t inverse to second order.
        return w * (1.0 + theta**2 / 6.0)
    return w * (theta / np.sin(theta))


class _SO3(MatrixGroup):
    name = "SO3"
    dim = 3
    matrix_size = 3

    def hat(self, vector):
        return _so3_hat(np.asarray(vector, dtype=float).reshape(3))

    def vee(self, matrix):
        return np.array([matrix[2, 1], matrix[0, 2], matrix[1, 0]])

    def exp_matrix(self, vector):
        return _so3_exp(np.asarray(vector, dtype=float).reshape(3))

    def log_vector(self, matrix):
        return _so3_log(matrix)

    def _check_structure(self, m, tol):
        _check_rotation(m, tol, self.name)


def _se3_v_matrix(w: np.ndarray) -> np.ndarray:
    theta = np.linalg.norm(w)
    k = _so3_hat(w)
    if theta < _SMALL_ANGLE:
        b = 0.5 - theta**2 / 24.0
        c = 1.0 / 6.0 - theta**2 / 120.0
    else:
        b = (1.0 - np.cos(theta)) / theta**2
        c = (theta - np.sin(theta)) / theta**3
    return np.eye(3) + b * k + c * (k @ k)


def _se3_v_inverse(w: np.ndarray) -> np.ndarray:
    theta = np.linalg.norm(w)
    k = _so3_hat(w)
    if theta < 1.0e-4:
        c = 1.0 / 12.0 + theta**2 / 720.0
    else:
        c = (1.0 - 0.5 * theta * np.sin(theta) / (1.0 - np.cos(theta))) / theta**2
    return np.eye(3) - 0.5 * k + c * (k @ k)


class _SE3(MatrixGroup):
    name = "SE3"
    dim = 6
    matrix_size = 4

    def hat(self, vector):
        x = np.asarray(vector, dtype=float).reshape(6)
        out = np.zeros((4, 4))
        out[:3, :3] = _so3_hat(x[:3])
        out[:3, 3] = x[3:]
        return out

    def vee(self, matrix):
        return np.array(
            [matrix[2, 1], matrix[0, 2], matrix[1, 0], matrix[0, 3], matrix[1, 3], matrix[2, 3]]
        )

    def exp_matrix(self, vector):
        x = np.asarray(vector, dtype=float).reshape(6)
        w, v = x[:3], x[3:]
        out = np.eye(4)
        out[:3, :3] = _so3_exp(w)
        out[:3, 3] = _se3_v_matrix(w) @ v
        return out

    def log_vector(self, matrix):
        w = _so3_log(matrix[:3, :3])
        v = _se3_v_inverse(w) @ matrix[:3, 3]
        return np.concatenate([w, v])

    def _check_structure(self, m, tol):
        _check_rotation(m[:3, :3], tol, self.name)
        bottom = np.abs(m[3] - np.array([0.0, 0.0, 0.0, 1.0]))
        if np.max(bottom) > tol:
            raise ValueError(f"{self.name}: bottom row is not (0,0,0,1)")


class _Translation(MatrixGroup):
    """Additive group R^n as (n+1)x(n+1) homogeneous matrices."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("translation group needs n >= 1")
        self.name = f"T{n}"
        self.dim = n
        self.matrix_size = n + 1

    def hat(self, vector):
        v = np.asarray(vector, dtype=float).reshape(self.dim)
        out = np.zeros((self.matrix_size, self.matrix_size))
        out[:-1, -1] = v
        return out

    def vee(self, matrix):
        return np.array(matrix[:-1, -1])

    def exp_matrix(self, vector):
        # hat(v) is nilpotent of index 2, so exp is I + hat(v).
        return np.eye(self.matrix_size) + self.hat(vector)

    def log_vector(self, matrix):
        return self.vee(matrix)

    def _check_structure(self, m, tol):
        n = self.dim
        err = np.max(np.abs(m[:n, :n] - np.eye(n)))
        bottom = np.max(np.abs(m[n] - np.eye(self.matrix_size)[n]))
        if max(err, bottom) > tol:
            raise ValueError(f"{self.name}: not a homogeneous translation matrix")


SO2 = _SO2()
SO3 = _SO3()
SE3 = _SE3()

_TRANSLATION_CACHE: dict[int, _Translation] = {}


def translation_group(n: int) -> MatrixGroup:
    """The additive group R^n (cached so instances compare by identity)."""
    if n not in _TRANSLATION_CACHE:
        _TRANSLATION_CACHE[n] = _Translation(n)
    return _TRANSLATION_CACHE[n]


_NAMED = {"SO2": SO2, "SO3": SO3, "SE3": SE3}


def group_by_name(name: str) -> MatrixGroup:
    """Look up a group by tag: SO2, SO3, SE3, or Tn for R^n."""
    if name in _NAMED:
        return _NAMED[name]
    if name.startswith("T") and name[1:].isdigit():
        return translation_group(int(name[1:]))
    raise ValueError(f"unknown group tag {name!r}")


@dataclass(frozen=True, eq=False)
class GroupElement:
    """A group element: an immutable square matrix plus its group tag."""

    group: MatrixGroup
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _readonly(self.matrix))


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """A Lie-algebra element in basis coordinates."""

    group: MatrixGroup
    vector: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vector", _readonly(np.reshape(self.vector, (self.group.dim,))))


def element(group: MatrixGroup, matrix: np.ndarray) -> GroupElement:
    return GroupElement(group, matrix)


def algebra(group: MatrixGroup, vector: np.ndarray) -> AlgebraElement:
    return AlgebraElement(group, vector)


def identity(group: MatrixGroup) -> GroupElement:
    return GroupElement(group, group.identity_matrix())


def _same_group(a, b, what: str) -> None:
    if a.group is not b.group:
        raise GroupMismatchError(f"{what}: {a.group.name} vs {b.group.name}")


def compose(a: GroupElement, b: GroupElement) -> GroupElement:
    """Group product a*b.  No re-orthonormalization is applied."""
    _same_group(a, b, "compose")
    return GroupElement(a.group, a.matrix @ b.matrix)


def inverse(a: GroupElement) -> GroupElement:
    """Group inverse; exploits the rigid-transform block structure."""
    g = a.group
    if g is SO2 or g is SO3:
        return GroupElement(g, a.matrix.T)
    if g is SE3:
        r = a.matrix[:3, :3]
        out = np.eye(4)
        out[:3, :3] = r.T
        out[:3, 3] = -r.T @ a.matrix[:3, 3]
        return GroupElement(g, out)
    out = 2.0 * np.eye(g.matrix_size) - a.matrix
    return GroupElement(g, out)


def exp(xi: AlgebraElement) -> GroupElement:
    """Group exponential (closed form for each supported group)."""
    return GroupElement(xi.group, xi.group.exp_matrix(xi.vector))


def log(g: GroupElement) -> AlgebraElement:
    """Principal logarithm.  Raises CutLocusError near the cut locus."""
    return AlgebraElement(g.group, g.group.log_vector(g.matrix))


def cayley(xi: AlgebraElement) -> GroupElement:
    """Cayley transform (I - xi/2)^-1 (I + xi/2): a second-order map to the group."""
    return GroupElement(xi.group, xi.group.cayley_matrix(xi.vector))


def hat(xi: AlgebraElement) -> np.ndarray:
    return xi.group.hat(xi.vector)


def vee(group: MatrixGroup, matrix: np.ndarray) -> AlgebraElement:
    return AlgebraElement(group, group.vee(matrix))


def adjoint(g: GroupElement, xi: AlgebraElement) -> AlgebraElement:
    """Adjoint action Ad_g(xi) = vee(g hat(xi) g^-1)."""
    _same_group(g, xi, "adjoint")
    conj = g.matrix @ g.group.hat(xi.vector) @ inverse(g).matrix
    return AlgebraElement(g.group, g.group.vee(conj))


def bracket(xi: AlgebraElement, eta: AlgebraElement) -> AlgebraElement:
    """Lie bracket [xi, eta] in algebra coordinates."""
    _same_group(xi, eta, "bracket")
    g = xi.group
    m = g.hat(xi.vector) @ g.hat(eta.vector) - g.hat(eta.vector) @ g.hat(xi.vector)
    return AlgebraElement(g, g.vee(m))


def conj_invariant_norm(g: GroupElement) -> float:
    """Norm of the principal logarithm in algebra coordinates.

    Invariant under conjugation whenever the adjoint action is orthogonal
    in the chosen basis (SO(2), SO(3) and R^n; for SE(3) only conjugation
    by rotations preserves it, since no nondegenerate fully
    conjugation-invariant norm exists there).
    """
    return float(np.linalg.norm(log(g).vector))


def distance(a: GroupElement, b: GroupElement) -> float:
    """Frobenius distance between matrices (used as a plain closeness test)."""
    _same_group(a, b, "distance")
    return float(np.max(np.abs(a.matrix - b.matrix)))


def random_algebra(group: MatrixGroup, rng: np.random.Generator, scale: float = 1.0) -> AlgebraElement:
    return AlgebraElement(group, scale * rng.standard_normal(group.dim))


def random_element(group: MatrixGroup, rng: np.random.Generator, scale: float = 1.0) -> GroupElement:
    return exp(random_algebra(group, rng, scale))
