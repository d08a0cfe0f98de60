"""State-feedback laws read off an optimal transient and cycle, plus closed-loop checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .mmc import MmcResult
from .model import ProblemInstance
from .ostg import Ostg


class FreeStateError(RuntimeError):
    """The closed loop reached a state the law leaves free."""


@dataclass(frozen=True)
class FeedbackLaw:
    """Partial column maps ``K_u`` and ``K_sigma`` over the states they fix.

    Every state of ``1..N`` outside ``ku`` is free; the law never picks an
    action for it.
    """

    ku: dict[int, int]
    ksigma: dict[int, int]
    N: int
    mu_star: float
    cycle: tuple[int, ...]
    transient: tuple[int, ...]
    law_id: int = 0

    def __post_init__(self):
        if set(self.ku) != set(self.ksigma):
            raise ValueError("ku and ksigma must cover the same states")

    @property
    def domain(self) -> list[int]:
        return sorted(self.ku)

    def is_free(self, x: int) -> bool:
        return x not in self.ku

    def action(self, x: int) -> tuple[int, int]:
        if x not in self.ku:
            raise FreeStateError(f"state {x} is free under this law")
        return self.ku[x], self.ksigma[x]

    def free_ranges(self) -> list[tuple[int, int]]:
        """Free states of ``1..N`` as inclusive ``(lo, hi)`` runs."""
        runs = []
        lo = 1
        for x in self.domain + [self.N + 1]:
            if x > lo:
                runs.append((lo, x - 1))
            lo = x + 1
        return runs

    def column_list(self, which: str = "u") -> list[int | None]:
        """Dense column list, ``None`` at free states (only sensible for small ``N``)."""
        src = self.ku if which == "u" else self.ksigma
        return [src.get(x) for x in range(1, self.N + 1)]

    def to_dict(self) -> dict:
        return {
            "law_id": self.law_id,
            "N": self.N,
            "mu_star": self.mu_star,
            "cycle": list(self.cycle),
            "transient": list(self.transient),
            "columns": [{"state": x, "u": self.ku[x], "sigma": self.ksigma[x]} for x in self.domain],
            "free": [list(r) for r in self.free_ranges()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FeedbackLaw":
        cols = data["columns"]
        return cls({int(c["state"]): int(c["u"]) for c in cols},
                   {int(c["state"]): int(c["sigma"]) for c in cols},
                   int(data["N"]), float(data["mu_star"]),
                   tuple(data["cycle"]), tuple(data["transient"]), int(data.get("law_id", 0)))


def law_from_walk(graph: Ostg, walk: Sequence[int], cycle: Sequence[int], transient: Sequence[int],
                  mu_star: float, law_id: int = 0) -> FeedbackLaw:
    """Map each state of ``walk`` (transient then one cycle lap) to its edge action."""
    ku, ksigma = {}, {}
    for a, b in zip(walk, walk[1:]):
        if a not in graph or b not in graph:
            raise RuntimeError(f"law walk leaves the graph at {a} -> {b}")
        e = graph.edge(a, b)
        prev = ku.get(a)
        if prev is not None and (prev, ksigma[a]) != e.action:
            raise RuntimeError(f"state {a} would need two different actions")
        ku[a], ksigma[a] = e.action
    return FeedbackLaw(ku, ksigma, graph.N or max(graph.vertices), mu_star,
                       tuple(cycle), tuple(transient), law_id)


def synthesize(graph: Ostg, mmc: MmcResult) -> FeedbackLaw:
    """The law steering ``x0`` along ``mmc.transient`` into ``mmc.cycle`` forever."""
    walk = list(mmc.transient) + list(mmc.cycle[1:])
    return law_from_walk(graph, walk, mmc.cycle, mmc.transient, mmc.mu_star)


@dataclass
class Trajectory:
    states: list[int]
    inputs: list[int]
    subsystems: list[int]
    costs: list[float]

    @property
    def horizon(self) -> int:
        return len(self.costs)

    @property
    def average(self) -> float:
        return sum(self.costs) / len(self.costs) if self.costs else 0.0

    def running_averages(self) -> list[float]:
        out, total = [], 0.0
        for t, g in enumerate(self.costs, start=1):
            total += g
            out.append(total / t)
        return out


def simulate(instance: ProblemInstance, law: FeedbackLaw, T: int, x0: int | None = None) -> Trajectory:
    """Run the closed loop for ``T`` steps; ``states`` has ``T + 1`` entries.

    With ``T = 0`` only ``x0`` is returned and the average is 0.
    """
    if T < 0:
        raise ValueError("horizon must be non-negative")
    x = instance.x0 if x0 is None else x0
    if x is None:
        raise ValueError("no initial state")
    model, cost = instance.model, instance.cost
    traj = Trajectory([x], [], [], [])
    for _ in range(T):
        u, s = law.action(x)
        traj.inputs.append(u)
        traj.subsystems.append(s)
        traj.costs.append(cost(x, u, s))
        x = model.step(x, u, s)
        traj.states.append(x)
    return traj


@dataclass
class CertificateRow:
    T: int
    average: float
    deviation: float
    bound: float
    ok: bool


@dataclass
class Certificate:
    mu_star: float
    constant: float
    rows: list[CertificateRow] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)


def certify_average(instance: ProblemInstance, law: FeedbackLaw,
                    horizons: Sequence[int] = (10, 100, 1000), tol: float = 1e-9) -> Certificate:
    """Check ``|avg(T) - mu*| <= C / T`` with ``C = max|g| * (|transient| + |cycle|)``.

    The deviation comes from the transient's excess over ``mu*`` and from a
    partial final lap. For non-negative costs each step of either deviates
    by at most ``max|g|``.
    """
    C = instance.cost.bound(instance) * (len(law.transient) + len(law.cycle))
    cert = Certificate(law.mu_star, C)
    traj = simulate(instance, law, max(horizons))
    avgs = traj.running_averages()
    for T in sorted(horizons):
        if T <= 0:
            continue
        avg = avgs[T - 1]
        dev = abs(avg - law.mu_star)
        bound = C / T
        cert.rows.append(CertificateRow(T, avg, dev, bound, dev <= bound + tol))
    return cert
