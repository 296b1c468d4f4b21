"""Transition-matrix builders for tandem single-server queueing systems.

Each variant of the tandem system admits a linear state recursion
d(k) = T_k (x) d(k-1) over the max-plus semiring, where d(k) collects
the k-th departure epochs and T_k is built from the service-time vector
tau_k.  Variants:

  closed          customers recirculate, c customers initially per station
  open_infinite   external arrival stream at station 1, infinite buffers
  open_mfg        finite buffers, manufacturing blocking
  open_comm       finite buffers, communication blocking

Finite buffers of capacity b (and closed populations c >= 2) need the
history d(k-2), ..., so their recursions are made first-order by
stacking past state vectors; the transition matrix then acts on an
augmented state of b+1 (resp. c) blocks of n entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import EPS, MaxPlusMatrix, ShapeError
from .solver import star_truncated

VARIANTS = ("closed", "open_infinite", "open_mfg", "open_comm")
_BLOCKING = ("open_mfg", "open_comm")


class ModelConfigError(ValueError):
    """Unsupported or inconsistent model configuration."""


@dataclass(frozen=True)
class TandemSpec:
    """Topology and horizon of a tandem system.

    ``population`` is the per-station initial customer count c (closed
    variant only); ``buffer_capacity`` is the per-station buffer size b
    for stations 2..n (blocking variants only).  Both are uniform
    across stations; the scalar oracle could handle heterogeneous
    values but the matrix derivations assume uniformity, so mixed
    values are rejected here.

    ``initial_state`` selects the d(0) convention: "zero" is the
    all-e vector (the convention that yields finite departures);
    "epsilon" keeps d(0) all-eps for study of the literal serial
    algorithm.
    """

    variant: str
    n: int
    horizon: int
    population: int = 1
    buffer_capacity: int = 0
    initial_state: str = "zero"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ModelConfigError(
                f"unknown variant {self.variant!r}; expected one of {VARIANTS}"
            )
        if self.n < 1:
            raise ModelConfigError("station count n must be >= 1")
        if self.horizon < 1:
            raise ModelConfigError("horizon K must be >= 1")
        if self.initial_state not in ("zero", "epsilon"):
            raise ModelConfigError("initial_state must be 'zero' or 'epsilon'")
        if self.variant == "closed":
            if self.population < 1:
                raise ModelConfigError("closed variant needs population c >= 1")
            if self.n < 2:
                raise ModelConfigError("closed variant needs n >= 2")
        else:
            if self.population != 1:
                raise ModelConfigError("population applies to the closed variant only")
        if self.variant in _BLOCKING:
            if self.buffer_capacity < 0:
                raise ModelConfigError("buffer capacity b must be >= 0")
            if self.n < 2:
                raise ModelConfigError("blocking variants need n >= 2")
        elif self.buffer_capacity != 0:
            raise ModelConfigError("buffer_capacity applies to blocking variants only")

    @property
    def arity(self) -> int:
        """Length of the (possibly augmented) state vector."""
        if self.variant == "closed":
            return self.population * self.n
        if self.variant in _BLOCKING:
            return (self.buffer_capacity + 1) * self.n
        return self.n


@dataclass(frozen=True)
class ServiceTimes:
    """Service times tau[i-1, k-1] for station i = 1..n, customer k = 1..K.

    For open variants row 1 holds the interarrival times of the
    external stream.
    """

    tau: np.ndarray

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=np.float64)
        if tau.ndim != 2:
            raise ModelConfigError("service times must form an n x K matrix")
        if not np.isfinite(tau).all() or (tau < 0).any():
            raise ModelConfigError("service times must be finite and >= 0")
        tau.setflags(write=False)
        object.__setattr__(self, "tau", tau)

    @property
    def n(self) -> int:
        return self.tau.shape[0]

    @property
    def horizon(self) -> int:
        return self.tau.shape[1]

    def column(self, k: int) -> np.ndarray:
        """Service vector of customer k (1-based)."""
        return self.tau[:, k - 1]


def _check_tau(tau_k) -> np.ndarray:
    v = np.asarray(tau_k, dtype=np.float64)
    if v.ndim != 1:
        raise ModelConfigError("service vector must be 1-dimensional")
    if not np.isfinite(v).all() or (v < 0).any():
        raise ModelConfigError("service times must be finite and >= 0")
    return v


def shift_matrix(kind: str, n: int) -> MaxPlusMatrix:
    """Routing shifts: F (circular subdiagonal), G (subdiagonal), GT.

    F routes station i-1 -> i with wraparound n -> 1 (closed systems);
    G is the acyclic subdiagonal (open systems); GT its transpose.
    """
    if n < 1:
        raise ModelConfigError("shift matrix needs n >= 1")
    a = np.full((n, n), EPS)
    if kind == "F":
        for i in range(1, n):
            a[i, i - 1] = 0.0
        a[0, n - 1] = 0.0
    elif kind == "G":
        for i in range(1, n):
            a[i, i - 1] = 0.0
    elif kind == "GT":
        for i in range(1, n):
            a[i - 1, i] = 0.0
    else:
        raise ModelConfigError(f"unknown shift kind {kind!r}")
    return MaxPlusMatrix(a)


def service_diag(tau_k) -> MaxPlusMatrix:
    """Diagonal matrix of the service vector."""
    return MaxPlusMatrix.diag(_check_tau(tau_k))


def transition_closed(tau_k) -> MaxPlusMatrix:
    """Closed tandem, one initial customer per station.

    Diagonal tau_i, subdiagonal tau_i, and tau_1 in the corner (1, n);
    equals service_diag(tau) (x) (F (+) E).
    """
    v = _check_tau(tau_k)
    n = v.size
    if n < 2:
        raise ModelConfigError("closed tandem needs n >= 2")
    a = np.full((n, n), EPS)
    for i in range(n):
        a[i, i] = v[i]
        a[i, i - 1 if i else n - 1] = v[i]
    return MaxPlusMatrix(a)


def transition_open_infinite(tau_k) -> MaxPlusMatrix:
    """Open tandem with infinite buffers: lower-triangular prefix sums.

    Entry (i, j), i >= j, is tau_j + ... + tau_i accumulated row by
    row (t[i][j] = t[i-1][j] + tau_i), the same order the serial
    algorithm uses, so all strategies agree bit for bit.
    """
    v = _check_tau(tau_k)
    n = v.size
    a = np.full((n, n), EPS)
    a[0, 0] = v[0]
    for i in range(1, n):
        a[i, : i] = a[i - 1, : i] + v[i]
        a[i, i] = v[i]
    return MaxPlusMatrix(a)


def transition_mfg_b0(tau_k) -> MaxPlusMatrix:
    """Manufacturing blocking, zero buffers: infinite-buffer matrix with
    the first superdiagonal raised to e."""
    v = _check_tau(tau_k)
    if v.size < 2:
        raise ModelConfigError("blocking needs n >= 2")
    a = transition_open_infinite(v).to_array()
    for i in range(v.size - 1):
        a[i, i + 1] = 0.0
    return MaxPlusMatrix(a)


def transition_comm_b0(tau_k) -> MaxPlusMatrix:
    """Communication blocking, zero buffers.

    Column j >= 2 repeats column j-1 of the infinite-buffer matrix on
    and below row j-1 (the product with E (+) GT).
    """
    v = _check_tau(tau_k)
    if v.size < 2:
        raise ModelConfigError("blocking needs n >= 2")
    t = transition_open_infinite(v).to_array()
    a = t.copy()
    a[:, 1:] = np.maximum(t[:, 1:], t[:, :-1])
    return MaxPlusMatrix(a)


def _block(blocks: list[list[MaxPlusMatrix]]) -> MaxPlusMatrix:
    rows = [np.hstack([b.readonly() for b in row]) for row in blocks]
    return MaxPlusMatrix(np.vstack(rows))


def transition_closed_c2(tau_k) -> MaxPlusMatrix:
    """Closed tandem, two initial customers per station (augmented 2n)."""
    return closed_augmented(tau_k, 2)


def closed_augmented(tau_k, c: int) -> MaxPlusMatrix:
    """Closed tandem with c >= 2 initial customers per station.

    State (d(k), ..., d(k-c+1)); top block row is
    (T_k, eps, ..., eps, T_k (x) F), identity shifts below.
    """
    v = _check_tau(tau_k)
    n = v.size
    if n < 2:
        raise ModelConfigError("closed tandem needs n >= 2")
    if c < 2:
        raise ModelConfigError("augmented closed form needs c >= 2")
    tk = service_diag(v)
    null = MaxPlusMatrix.null(n)
    top = [tk] + [null] * (c - 2) + [tk @ shift_matrix("F", n)]
    rows = [top]
    for j in range(c - 1):
        row = [null] * c
        row[j] = MaxPlusMatrix.identity(n)
        rows.append(row)
    return _block(rows)


def transition_blocking_b1(tau_k, rule: str) -> MaxPlusMatrix:
    """Blocking with unit buffers (augmented 2n)."""
    return blocking_augmented(tau_k, rule, 1)


def blocking_augmented(tau_k, rule: str, b: int) -> MaxPlusMatrix:
    """Blocking with uniform buffer capacity b >= 1 (augmented (b+1)n).

    State (d(k), ..., d(k-b)); the blocking feedback enters through the
    last block, S_k (x) GT for manufacturing and S_k (x) T_k (x) GT for
    communication, with S_k the truncated star of T_k (x) G.  The b = 1
    case reproduces the closed-form block matrices; larger b follows
    the same stacking and is validated against the scalar oracle.
    """
    v = _check_tau(tau_k)
    n = v.size
    if n < 2:
        raise ModelConfigError("blocking needs n >= 2")
    if b < 1:
        raise ModelConfigError("augmented blocking form needs b >= 1")
    if rule not in ("manufacturing", "communication"):
        raise ModelConfigError(f"unknown blocking rule {rule!r}")
    tk = service_diag(v)
    g = shift_matrix("G", n)
    gt = shift_matrix("GT", n)
    s = star_truncated(tk @ g, n)
    feedback = s @ gt if rule == "manufacturing" else s @ (tk @ gt)
    null = MaxPlusMatrix.null(n)
    top = [s @ tk] + [null] * (b - 1) + [feedback]
    rows = [top]
    for j in range(b):
        row = [null] * (b + 1)
        row[j] = MaxPlusMatrix.identity(n)
        rows.append(row)
    return _block(rows)


def build_transition(spec: TandemSpec, tau_k) -> MaxPlusMatrix:
    """Transition matrix for one customer step, dispatched on the spec.

    The result is square of order spec.arity and acts on the (possibly
    augmented) state vector.
    """
    v = _check_tau(tau_k)
    if v.size != spec.n:
        raise ModelConfigError(
            f"service vector length {v.size} != station count {spec.n}"
        )
    if spec.variant == "closed":
        if spec.population == 1:
            return transition_closed(v)
        return closed_augmented(v, spec.population)
    if spec.variant == "open_infinite":
        return transition_open_infinite(v)
    rule = "manufacturing" if spec.variant == "open_mfg" else "communication"
    if spec.buffer_capacity == 0:
        return transition_mfg_b0(v) if rule == "manufacturing" else transition_comm_b0(v)
    return blocking_augmented(v, rule, spec.buffer_capacity)
