"""Parameter bundles for the four force models and for a layout run."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

from ..validation import check_random_seed

__all__ = [
    "Algorithm",
    "KKParams",
    "FA2Params",
    "FRParams",
    "JiggleParams",
    "LayoutRun",
    "default_params",
    "canvas_side",
]

SMALL_GRAPH_NODES = 150
DEFAULT_CANVAS = 600.0


def canvas_side(n_nodes: int) -> float:
    """Canvas width (= height) for a layout of ``n_nodes`` nodes.

    The fixed 600-unit canvas is used up to 150 nodes; beyond that the
    canvas grows as 4 units per node so dense drawings do not overlap.
    """
    if n_nodes < 1:
        raise ValueError("n_nodes must be positive")
    return DEFAULT_CANVAS if n_nodes <= SMALL_GRAPH_NODES else 4.0 * n_nodes


class Algorithm(str, enum.Enum):
    KK = "kk"
    FA2 = "fa2"
    FR = "fr"
    JIGGLE = "jiggle"

    @classmethod
    def coerce(cls, value) -> "Algorithm":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            valid = ", ".join(a.value for a in cls)
            raise ValueError(f"unknown algorithm {value!r}; expected one of: {valid}") from None


def _positive(obj, *names):
    for name in names:
        v = getattr(obj, name)
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise ValueError(f"{type(obj).__name__}.{name} must be a positive real, got {v!r}")


@dataclass(frozen=True)
class KKParams:
    """Spring model on graph distances.

    Target length of pair (i, j) is
    ``stiffness * (unit_edge_length * hops(i, j) - 2 * node_radius)``.
    """

    stiffness: float = 1.0
    node_radius: float = 0.0
    time_step: float = 0.1
    unit_edge_length: float = 1.0

    def __post_init__(self):
        _positive(self, "stiffness", "time_step", "unit_edge_length")
        if not self.node_radius >= 0:
            raise ValueError("KKParams.node_radius must be non-negative")


@dataclass(frozen=True)
class FA2Params:
    """Degree-weighted repulsion, linear attraction, gravity to the centre.

    ``mass_normalized`` divides each node's net force by its mass
    ``deg + 1`` before damping; see :func:`default_params`.
    """

    k_rep: float = 1.0
    gravity: float = 1.0
    damping: float = 0.9
    mass_normalized: bool = False

    def __post_init__(self):
        _positive(self, "k_rep")
        if not self.gravity >= 0:
            raise ValueError("FA2Params.gravity must be non-negative")
        if not 0 < self.damping <= 1:
            raise ValueError("FA2Params.damping must lie in (0, 1]")


@dataclass(frozen=True)
class FRParams:
    """Inverse-square repulsion, logarithmic attraction, cooling step cap."""

    k_r: float = 1.0
    k_a: float = 1.0
    initial_temperature: float = 10.0
    cooling_factor: float = 0.95

    def __post_init__(self):
        _positive(self, "k_r", "k_a", "initial_temperature")
        if not 0 < self.cooling_factor < 1:
            raise ValueError("FRParams.cooling_factor must lie in (0, 1)")

    def temperature(self, iteration: int) -> float:
        return self.initial_temperature * self.cooling_factor ** iteration


@dataclass(frozen=True)
class JiggleParams:
    """Repulsion, log attraction and a linear spring around ``edge_length``.

    ``step`` scales the summed force into a displacement (1.0 applies the
    raw force).
    """

    k_r: float = 1.0
    k_a: float = 1.0
    k_s: float = 1.0
    edge_length: float = 1.0
    step: float = 1.0

    def __post_init__(self):
        _positive(self, "k_r", "k_a", "k_s", "edge_length", "step")


_PARAM_TYPES = {
    "kk": KKParams,
    "fa2": FA2Params,
    "fr": FRParams,
    "jiggle": JiggleParams,
}


def default_params(algorithm, n_nodes: int, canvas_size: float, max_degree: int = 0):
    """Defaults for ``algorithm`` on a graph of ``n_nodes`` nodes.

    Every constant is expressed relative to the canvas size ``S`` and a
    nominal edge length ``S / sqrt(n)``. Step sizes are bounded by the
    node count or maximum degree so explicit updates stay stable on large
    graphs (a plain 0.1 time step over all-pairs springs diverges once
    ``n`` exceeds a few tens of nodes).
    """
    algo = Algorithm.coerce(algorithm)
    n = max(int(n_nodes), 1)
    S = float(canvas_size)
    unit = S / math.sqrt(n)
    if algo is Algorithm.KK:
        return KKParams(stiffness=1.0, node_radius=0.0,
                        time_step=min(0.1, 0.5 / n), unit_edge_length=unit)
    if algo is Algorithm.FA2:
        # Unnormalised damped steps diverge once degrees exceed ~2.
        return FA2Params(k_rep=unit, gravity=1.0, damping=0.9, mass_normalized=True)
    if algo is Algorithm.FR:
        # k_r / k_a = unit^2 puts the two-node balance near the nominal length
        return FRParams(k_r=unit ** 3, k_a=unit, initial_temperature=S / 10.0, cooling_factor=0.95)
    return JiggleParams(k_r=unit ** 3, k_a=1.0, k_s=1.0, edge_length=unit,
                        step=1.0 / (2.0 * (max_degree + 1)))


def params_from_dict(algorithm, values: dict):
    cls = _PARAM_TYPES[Algorithm.coerce(algorithm).value]
    return cls(**values)


@dataclass(frozen=True)
class LayoutRun:
    algorithm: Algorithm
    params: object = None
    max_iterations: int = 1000
    stability_epsilon: float = 1e-4
    canvas_size: float | None = None
    seed: int = 0

    def __post_init__(self):
        algo = Algorithm.coerce(self.algorithm)
        object.__setattr__(self, "algorithm", algo)
        if isinstance(self.max_iterations, bool) or int(self.max_iterations) != self.max_iterations \
                or self.max_iterations < 1:
            raise ValueError(f"max_iterations must be an integer >= 1, got {self.max_iterations!r}")
        object.__setattr__(self, "max_iterations", int(self.max_iterations))
        if not self.stability_epsilon > 0:
            raise ValueError("stability_epsilon must be positive")
        if self.canvas_size is not None and not self.canvas_size > 0:
            raise ValueError("canvas_size must be positive")
        object.__setattr__(self, "seed", check_random_seed(self.seed))
        if self.params is not None and not isinstance(self.params, _PARAM_TYPES[algo.value]):
            raise TypeError(f"{algo.value} needs {_PARAM_TYPES[algo.value].__name__}, "
                            f"got {type(self.params).__name__}")

    def resolved(self, n_nodes: int, max_degree: int = 0) -> "LayoutRun":
        """Copy with ``canvas_size`` and ``params`` filled from defaults."""
        S = self.canvas_size if self.canvas_size is not None else canvas_side(n_nodes)
        params = self.params
        if params is None:
            params = default_params(self.algorithm, n_nodes, S, max_degree)
        return LayoutRun(self.algorithm, params, self.max_iterations,
                         self.stability_epsilon, float(S), self.seed)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm.value,
            "params": asdict(self.params) if self.params is not None else None,
            "max_iterations": self.max_iterations,
            "stability_epsilon": self.stability_epsilon,
            "canvas_size": self.canvas_size,
            "seed": self.seed,
        }
