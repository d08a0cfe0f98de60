"""Switched Boolean control networks in algebraic form, plus constraints and costs."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .logic import LogicalMatrix, index_to_bits


@dataclass(frozen=True, eq=False)
class SbcnModel:
    """``x(t+1) = L_sigma u(t) x(t)`` with ``z`` subsystems.

    ``L`` holds one ``N x MN`` logical matrix per subsystem.
    """

    n: int
    m: int
    L: tuple[LogicalMatrix, ...]
    state_names: tuple[str, ...] = ()
    input_names: tuple[str, ...] = ()
    _table: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        L = tuple(self.L)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "state_names", tuple(self.state_names))
        object.__setattr__(self, "input_names", tuple(self.input_names))
        if not L:
            raise ValueError("a model needs at least one subsystem")
        if self.n < 1 or self.m < 0:
            raise ValueError("need n >= 1 and m >= 0")
        for l, mat in enumerate(L, start=1):
            if mat.shape != (self.N, self.M * self.N):
                raise ValueError(f"L_{l} has shape {mat.shape}, expected {(self.N, self.M * self.N)}")
        if self.state_names and len(self.state_names) != self.n:
            raise ValueError("state_names length differs from n")
        if self.input_names and len(self.input_names) != self.m:
            raise ValueError("input_names length differs from m")
        # table[l-1, (k-1)N + i-1] = successor index
        table = np.stack([mat.col_index for mat in L])
        table.setflags(write=False)
        object.__setattr__(self, "_table", table)

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def M(self) -> int:
        return 1 << self.m

    @property
    def z(self) -> int:
        return len(self.L)

    def step(self, x: int, u: int, sigma: int) -> int:
        """Successor of state ``x`` under input ``u`` and subsystem ``sigma``."""
        if not 1 <= x <= self.N:
            raise IndexError(f"state {x} out of range 1..{self.N}")
        if not 1 <= u <= self.M:
            raise IndexError(f"input {u} out of range 1..{self.M}")
        if not 1 <= sigma <= self.z:
            raise IndexError(f"subsystem {sigma} out of range 1..{self.z}")
        return int(self._table[sigma - 1, (u - 1) * self.N + x - 1])

    def state_bits(self, x: int) -> str:
        return index_to_bits(x, self.n)

    def exploration_order(self, inputs: Sequence[int]) -> list[int]:
        """Inputs in ascending bit value of the input tuple, i.e. descending delta index."""
        return sorted(inputs, reverse=True)


def to_augmented_bcn(model: SbcnModel) -> SbcnModel:
    """Fold the switching signal into the input: ``u_bar = (sigma-1)M + u``.

    The result has one subsystem with ``zM`` inputs. When ``z`` is not a power
    of two the augmented input count is not ``2^m``; the model then records
    ``m`` as the fractional exponent via :class:`AugmentedBcn`.
    """
    if model.z == 1:
        return model
    cols = np.concatenate([mat.col_index for mat in model.L])
    return AugmentedBcn(model.n, model.m, (LogicalMatrix(model.N, cols),), model.state_names,
                        model.input_names, n_actions=model.z * model.M, block=model.M)


@dataclass(frozen=True, eq=False)
class AugmentedBcn(SbcnModel):
    """Single-subsystem model whose input count ``n_actions`` need not be a power of two.

    ``block`` is the input count of the switched model it came from.
    """

    n_actions: int = 0
    block: int = 1

    def __post_init__(self):
        object.__setattr__(self, "L", tuple(self.L))
        (mat,) = self.L
        if mat.shape != (self.N, self.n_actions * self.N):
            raise ValueError(f"augmented matrix has shape {mat.shape}")
        object.__setattr__(self, "state_names", tuple(self.state_names))
        object.__setattr__(self, "input_names", tuple(self.input_names))
        table = mat.col_index[None, :]
        object.__setattr__(self, "_table", table)

    @property
    def M(self) -> int:
        return self.n_actions

    def exploration_order(self, inputs):
        # the source model's order: subsystem ascending, then input descending
        return sorted(inputs, key=lambda ub: ((ub - 1) // self.block, -ub))


class ConstraintSet:
    """State set ``Cx`` and state-dependent input/subsystem sets.

    ``Cx`` is a boolean mask; ``Cu``/``Csigma`` are sparse overrides on top of
    a default set (all inputs / all subsystems unless given).
    """

    def __init__(self, N: int, M: int, z: int, states: Iterable[int] | None = None,
                 inputs: Mapping[int, Iterable[int]] | None = None,
                 subsystems: Mapping[int, Iterable[int]] | None = None,
                 default_inputs: Iterable[int] | None = None,
                 default_subsystems: Iterable[int] | None = None):
        self.N, self.M, self.z = N, M, z
        mask = np.zeros(N + 1, dtype=bool)
        if states is None:
            mask[1:] = True
            self._bad_states = []
        else:
            states = list(states)
            self._bad_states = [x for x in states if not 1 <= x <= N]
            good = [x for x in states if 1 <= x <= N]
            mask[good] = True
        mask.setflags(write=False)
        self.mask = mask
        self.default_inputs = tuple(sorted(set(range(1, M + 1) if default_inputs is None else default_inputs)))
        self.default_subsystems = tuple(sorted(set(range(1, z + 1) if default_subsystems is None
                                                   else default_subsystems)))
        self.inputs = {int(x): tuple(sorted(set(v))) for x, v in (inputs or {}).items()}
        self.subsystems = {int(x): tuple(sorted(set(v))) for x, v in (subsystems or {}).items()}

    @classmethod
    def unconstrained(cls, model: SbcnModel) -> "ConstraintSet":
        return cls(model.N, model.M, model.z)

    def admissible(self, x: int) -> bool:
        return 1 <= x <= self.N and bool(self.mask[x])

    def states(self) -> np.ndarray:
        """Admissible states in increasing order."""
        return np.flatnonzero(self.mask)

    def Cu(self, x: int) -> tuple[int, ...]:
        return self.inputs.get(x, self.default_inputs)

    def Csigma(self, x: int) -> tuple[int, ...]:
        return self.subsystems.get(x, self.default_subsystems)

    def violations(self) -> list[str]:
        errors = []
        if self._bad_states:
            errors.append(f"state constraint lists out-of-range states {self._bad_states}")
        for name, default, overrides, limit in (("input", self.default_inputs, self.inputs, self.M),
                                                ("subsystem", self.default_subsystems, self.subsystems, self.z)):
            bad = [v for v in default if not 1 <= v <= limit]
            if bad:
                errors.append(f"default {name} set has out-of-range entries {bad} (valid 1..{limit})")
            for x, vals in sorted(overrides.items()):
                if not self.admissible(x):
                    errors.append(f"{name} constraint given for state {x} outside Cx")
                bad = [v for v in vals if not 1 <= v <= limit]
                if bad:
                    errors.append(f"{name} constraint of state {x} references {bad} (valid 1..{limit})")
        return errors


class StageCost:
    """A bounded stage cost ``g(x, u, sigma)``."""

    def __call__(self, x: int, u: int, sigma: int) -> float:
        raise NotImplementedError

    def bound(self, instance: "ProblemInstance") -> float:
        """An upper bound on ``|g|`` over the instance's domain."""
        raise NotImplementedError


class QuadraticCost(StageCost):
    """``x'Qx x + u'Qu u + s'Qs s`` with diagonal weights (one entry per index)."""

    def __init__(self, qx: Sequence[float], qu: Sequence[float], qsigma: Sequence[float]):
        self.qx = np.asarray(qx, dtype=np.float64)
        self.qu = np.asarray(qu, dtype=np.float64)
        self.qsigma = np.asarray(qsigma, dtype=np.float64)
        for arr in (self.qx, self.qu, self.qsigma):
            if not np.all(np.isfinite(arr)):
                raise ValueError("cost weights must be finite")

    def __call__(self, x, u, sigma):
        return float(self.qx[x - 1] + self.qu[u - 1] + self.qsigma[sigma - 1])

    def bound(self, instance):
        return float(np.abs(self.qx).max() + np.abs(self.qu).max() + np.abs(self.qsigma).max())


def quadratic_cost(qx: Sequence[float], qu: Sequence[float], qsigma: Sequence[float],
                   model: SbcnModel | None = None) -> QuadraticCost:
    if model is not None:
        for name, arr, size in (("Qx", qx, model.N), ("Qu", qu, model.M), ("Qsigma", qsigma, model.z)):
            if len(arr) != size:
                raise ValueError(f"{name} has {len(arr)} entries, expected {size}")
    return QuadraticCost(qx, qu, qsigma)


class TargetCost(StageCost):
    """Two-level cost: ``on_target`` when ``x`` is in ``targets``, else ``otherwise``."""

    def __init__(self, targets: Iterable[int], on_target: float, otherwise: float):
        self.targets = frozenset(int(t) for t in targets)
        self.on_target = float(on_target)
        self.otherwise = float(otherwise)

    def __call__(self, x, u, sigma):
        return self.on_target if x in self.targets else self.otherwise

    def bound(self, instance):
        return max(abs(self.on_target), abs(self.otherwise))


class TableCost(StageCost):
    """Explicit entries ``(x, u, sigma) -> g`` over a default value."""

    def __init__(self, entries: Mapping[tuple[int, int, int], float], default: float = 0.0):
        self.entries = {tuple(int(i) for i in k): float(v) for k, v in entries.items()}
        self.default = float(default)

    def __call__(self, x, u, sigma):
        return self.entries.get((x, u, sigma), self.default)

    def bound(self, instance):
        return max([abs(self.default)] + [abs(v) for v in self.entries.values()])


class FunctionCost(StageCost):
    """Wraps a plain callable; the bound is found by enumeration when asked."""

    def __init__(self, func: Callable[[int, int, int], float]):
        self.func = func

    def __call__(self, x, u, sigma):
        return float(self.func(x, u, sigma))

    def bound(self, instance):
        m = instance.model
        return max(abs(self(x, u, s)) for x in instance.constraints.states()
                   for u in range(1, m.M + 1) for s in range(1, m.z + 1))


@dataclass
class ProblemInstance:
    model: SbcnModel
    constraints: ConstraintSet
    cost: StageCost
    x0: int | None = None

    def with_x0(self, x0: int) -> "ProblemInstance":
        return ProblemInstance(self.model, self.constraints, self.cost, x0)


def validate(instance: ProblemInstance, *, need_x0: bool = True) -> list[str]:
    """Every violated invariant of ``instance``; empty when it is consistent."""
    errors = []
    m, c = instance.model, instance.constraints
    if (c.N, c.M, c.z) != (m.N, m.M, m.z):
        errors.append(f"constraint dimensions {(c.N, c.M, c.z)} differ from model {(m.N, m.M, m.z)}")
    errors.extend(c.violations())
    if not c.mask.any():
        errors.append("state constraint set is empty")
    if isinstance(instance.cost, QuadraticCost):
        cost = instance.cost
        for name, arr, size in (("Qx", cost.qx, m.N), ("Qu", cost.qu, m.M), ("Qsigma", cost.qsigma, m.z)):
            if arr.size != size:
                errors.append(f"{name} has {arr.size} entries, expected {size}")
    if instance.x0 is None:
        if need_x0:
            errors.append("no initial state given")
    elif not 1 <= instance.x0 <= m.N:
        errors.append(f"initial state {instance.x0} out of range 1..{m.N}")
    elif not c.admissible(instance.x0):
        errors.append("initial state excluded by the state constraints")
    return errors


def augment_instance(instance: ProblemInstance) -> ProblemInstance:
    """The instance rewritten over :func:`to_augmented_bcn` of its model."""
    model, c, cost = instance.model, instance.constraints, instance.cost
    if model.z == 1:
        return instance
    aug = to_augmented_bcn(model)
    M = model.M

    def merged(x):
        return [(s - 1) * M + u for s in c.Csigma(x) for u in c.Cu(x)]

    keys = set(c.inputs) | set(c.subsystems)
    default = [(s - 1) * M + u for s in c.default_subsystems for u in c.default_inputs]
    states = c.states().tolist() if not c.mask[1:].all() else None
    cons = ConstraintSet(aug.N, aug.M, 1, states, {x: merged(x) for x in keys}, None,
                         default_inputs=default)
    return ProblemInstance(aug, cons, AugmentedCost(cost, M), instance.x0)


class AugmentedCost(StageCost):
    def __init__(self, base: StageCost, M: int):
        self.base = base
        self.M = M

    def __call__(self, x, u_bar, sigma):
        s, u = divmod(u_bar - 1, self.M)
        return self.base(x, u + 1, s + 1)

    def bound(self, instance):
        return self.base.bound(instance)
