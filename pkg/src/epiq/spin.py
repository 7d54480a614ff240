"""Spin-1/2 measurements indexed by spatial directions.

Direction-indexed +/-1 questions, the cosine transition law cross-checked
against squared overlaps, the two-particle total-spin-zero state with its
correlations, CHSH values for quantum and deterministic sources, and the
two-detector three-switch experiment with classical instruction sets, the
quantum source, and the urn-context model.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import NotUnit
from .hilbert import Observable, born_probability
from .linalg import hermitian_eig
from .tolerances import TOL

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class Direction:
    """Unit 3-vector indexing a spin question."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        n2 = self.x * self.x + self.y * self.y + self.z * self.z
        if abs(n2 - 1.0) > TOL.unit3:
            raise NotUnit(f"({self.x}, {self.y}, {self.z}) has squared norm {n2!r}")

    @classmethod
    def normalized(cls, x: float, y: float, z: float) -> "Direction":
        n = np.sqrt(x * x + y * y + z * z)
        if n == 0.0:
            raise NotUnit("zero vector has no direction")
        return cls(x / n, y / n, z / n)

    @classmethod
    def from_polar(cls, theta: float, phi: float = 0.0) -> "Direction":
        st = np.sin(theta)
        return cls.normalized(st * np.cos(phi), st * np.sin(phi), np.cos(theta))

    def dot(self, other: "Direction") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def opposite(self) -> "Direction":
        return Direction(-self.x, -self.y, -self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


Z_DIR = Direction(0.0, 0.0, 1.0)
X_DIR = Direction(1.0, 0.0, 0.0)


def _require_outcome(v: int) -> int:
    if v not in (1, -1):
        raise ValueError(f"spin outcome must be +1 or -1, got {v!r}")
    return v


def spin_observable(a: Direction) -> Observable:
    """The +/-1-valued component operator a . sigma (z axis gives diag(+1,-1))."""
    return Observable(a.x * SIGMA_X + a.y * SIGMA_Y + a.z * SIGMA_Z)


def spin_state(a: Direction, v: int) -> np.ndarray:
    """Unit eigenvector of spin_observable(a) with eigenvalue v, phase-canonical."""
    _require_outcome(v)
    dec = hermitian_eig(spin_observable(a).matrix)
    idx = 1 if v > 0 else 0  # eigenvalues come back ascending (-1, +1)
    return dec.vectors[:, idx]


def transition_probability(a: Direction, va: int, b: Direction, vb: int) -> float:
    """P(answer vb along b | answer va along a) = (1 + va*vb*cos angle)/2."""
    _require_outcome(va)
    _require_outcome(vb)
    return 0.5 * (1.0 + va * vb * a.dot(b))


@dataclass(frozen=True)
class SingletState:
    """Two-particle total-spin-zero state in the (++, +-, -+, --) product basis."""

    ket: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.ket, dtype=complex)
        if amp.shape != (4,):
            raise ValueError("singlet lives in the 4-dim product space")
        if abs(np.linalg.norm(amp) - 1.0) > TOL.norm:
            raise NotUnit("state is not normalized")
        if abs(amp[0]) > 1e-12 or abs(amp[3]) > 1e-12:
            raise ValueError("total-z eigenvalue is not 0")


def singlet() -> SingletState:
    return SingletState(ket=np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2.0))


def singlet_joint_probability(a: Direction, va: int, b: Direction, vb: int) -> float:
    """P(first particle va along a AND second vb along b) on the singlet."""
    psi = singlet().ket
    proj = np.kron(spin_state(a, va), spin_state(b, vb))
    return born_probability(psi, proj)


def singlet_correlation(a: Direction, b: Direction) -> float:
    """E(product of the two +/-1 answers) on the singlet; equals -cos angle."""
    total = 0.0
    for va in (1, -1):
        for vb in (1, -1):
            total += va * vb * singlet_joint_probability(a, va, b, vb)
    return total


def chsh_value(
    a: Direction,
    b: Direction,
    c: Direction,
    d: Direction,
    strategy: tuple[int, int, int, int] | None = None,
) -> float:
    """E(ac) + E(bc) + E(bd) - E(ad).

    Quantum source (default): singlet correlations for the four direction
    pairs.  Deterministic source: `strategy` assigns fixed +/-1 answers
    (lam_a, lam_b, eta_c, eta_d) and the value is the algebraic combination,
    always +/-2.
    """
    if strategy is not None:
        la, lb, ec, ed = (_require_outcome(v) for v in strategy)
        return float(la * ec + lb * ec + lb * ed - la * ed)
    return (
        singlet_correlation(a, c)
        + singlet_correlation(b, c)
        + singlet_correlation(b, d)
        - singlet_correlation(a, d)
    )


def deterministic_chsh_values() -> list[float]:
    """All 16 deterministic-strategy values (each is +2 or -2)."""
    dirs = (Z_DIR, Z_DIR, Z_DIR, Z_DIR)
    return [
        chsh_value(*dirs, strategy=s)
        for s in itertools.product((1, -1), repeat=4)
    ]


def _planar(angle: float) -> Direction:
    return Direction.normalized(np.sin(angle), 0.0, np.cos(angle))


def _chsh_of_angles(tb, tc, td):
    # first angle pinned to 0 by rotational freedom in the plane
    return -np.cos(-tc) - np.cos(tb - tc) - np.cos(tb - td) + np.cos(-td)


def chsh_maximize(grid_steps: int = 360) -> tuple[tuple[Direction, Direction, Direction, Direction], float]:
    """Coarse coplanar grid search plus local refinement of the CHSH value.

    Returns the four directions and the value they attain via `chsh_value`.
    """
    if grid_steps < 8:
        raise ValueError("grid_steps must be >= 8")
    grid = np.linspace(0.0, 2.0 * np.pi, grid_steps, endpoint=False)
    tc_mesh, td_mesh = np.meshgrid(grid, grid, indexing="ij")
    best_val = -np.inf
    best = (0.0, 0.0, 0.0)
    for tb in grid:
        vals = _chsh_of_angles(tb, tc_mesh, td_mesh)
        k = int(np.argmax(vals))
        if vals.flat[k] > best_val:
            best_val = float(vals.flat[k])
            best = (float(tb), float(tc_mesh.flat[k]), float(td_mesh.flat[k]))

    # local refinement: shrink a 3-point-per-axis pattern around the best point
    tb, tc, td = best
    step = 2.0 * np.pi / grid_steps
    offsets = np.array([-1.0, 0.0, 1.0])
    while step > 1e-10:
        cand_b = tb + offsets * step
        cand_c = tc + offsets * step
        cand_d = td + offsets * step
        bb, cc, dd = np.meshgrid(cand_b, cand_c, cand_d, indexing="ij")
        vals = _chsh_of_angles(bb, cc, dd)
        k = int(np.argmax(vals))
        if vals.flat[k] > best_val:
            best_val = float(vals.flat[k])
            tb, tc, td = float(bb.flat[k]), float(cc.flat[k]), float(dd.flat[k])
        else:
            step *= 0.5

    dirs = (_planar(0.0), _planar(tb), _planar(tc), _planar(td))
    return dirs, chsh_value(*dirs)


# --- the two-detector, three-switch experiment -------------------------------

INSTRUCTION_SETS = tuple("".join(t) for t in itertools.product("RG", repeat=3))

# Alice's axes: z, then 120 and 240 degrees away in the x-z plane.
ALICE_AXES = (
    Direction(0.0, 0.0, 1.0),
    Direction(np.sqrt(3.0) / 2.0, 0.0, -0.5),
    Direction(-np.sqrt(3.0) / 2.0, 0.0, -0.5),
)
# Bob's axes point opposite to Alice's.
BOB_AXES = tuple(a.opposite() for a in ALICE_AXES)


def instruction_same_color_frequency(instruction: str) -> Fraction:
    """Exact frequency of equal colors over the 9 equally likely switch pairs."""
    if len(instruction) != 3 or any(ch not in "RG" for ch in instruction):
        raise ValueError(f"bad instruction set {instruction!r}")
    hits = sum(
        1 for i in range(3) for j in range(3) if instruction[i] == instruction[j]
    )
    return Fraction(hits, 9)


def mermin_classical_bound() -> Fraction:
    """Minimum over the 8 instruction sets of the same-color frequency (= 5/9)."""
    return min(instruction_same_color_frequency(s) for s in INSTRUCTION_SETS)


@dataclass(frozen=True)
class MerminModel:
    """Source model for the experiment.

    kind: 'classical_instruction' (a distribution over the 8 shared
    instruction sets), 'quantum' (singlet source with the detector geometry
    above), or 'charles_context' (an urn with three yellow balls and one
    blue: equal switches always agree; unequal switches agree only on blue).
    """

    kind: str
    rng_seed: int = 0
    distribution: tuple[float, ...] = field(
        default_factory=lambda: tuple([1.0 / 8.0] * 8)
    )

    def __post_init__(self):
        if self.kind not in ("classical_instruction", "quantum", "charles_context"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == "classical_instruction":
            total = float(sum(self.distribution))
            if len(self.distribution) != 8 or abs(total - 1.0) > TOL.dist:
                raise ValueError("instruction distribution must have 8 weights summing to 1")


@dataclass(frozen=True)
class MerminReport:
    n_events: int
    same_switch_same_color_freq: float
    overall_same_color_freq: float
    per_pair_table: np.ndarray      # 3x3 same-color frequency per switch pair
    per_pair_counts: np.ndarray     # 3x3 event counts per switch pair
    kind: str
    seed: int


def _pair_table(sa, sb, same):
    counts = np.zeros((3, 3), dtype=np.int64)
    hits = np.zeros((3, 3), dtype=np.int64)
    np.add.at(counts, (sa, sb), 1)
    np.add.at(hits, (sa, sb), same.astype(np.int64))
    freq = np.divide(hits, counts, out=np.zeros((3, 3)), where=counts > 0)
    return freq, counts


def mermin_simulate(model: MerminModel, n_events: int) -> MerminReport:
    """Run the experiment and tabulate color agreement; deterministic per seed."""
    if n_events < 1:
        raise ValueError("n_events must be >= 1")
    rng = np.random.default_rng(model.rng_seed)
    sa = rng.integers(0, 3, size=n_events)
    sb = rng.integers(0, 3, size=n_events)

    if model.kind == "classical_instruction":
        table = np.array(
            [[1 if ch == "G" else -1 for ch in instr] for instr in INSTRUCTION_SETS]
        )
        which = rng.choice(8, size=n_events, p=np.asarray(model.distribution))
        ca = table[which, sa]
        cb = table[which, sb]
    elif model.kind == "quantum":
        dots = np.array([[ai.dot(bj) for bj in BOB_AXES] for ai in ALICE_AXES])
        # the same-axis anticorrelation is mathematically exact; unit-norm
        # roundoff must not leak into the equal-switch branch
        np.fill_diagonal(dots, -1.0)
        ca = rng.integers(0, 2, size=n_events) * 2 - 1  # uniform marginal
        # particle 2 holds the opposite answer along Alice's axis; Bob reads
        # it along his own axis with the cosine transition law
        p_plus = 0.5 * (1.0 - ca * dots[sa, sb])
        cb = np.where(rng.random(n_events) < p_plus, 1, -1)
    else:  # charles_context
        ca = rng.integers(0, 2, size=n_events) * 2 - 1
        blue = rng.random(n_events) < 0.25
        agree = (sa == sb) | blue
        cb = np.where(agree, ca, -ca)

    same = ca == cb
    equal_switch = sa == sb
    same_switch_freq = float(np.mean(same[equal_switch])) if equal_switch.any() else float("nan")
    freq, counts = _pair_table(sa, sb, same)
    return MerminReport(
        n_events=n_events,
        same_switch_same_color_freq=same_switch_freq,
        overall_same_color_freq=float(np.mean(same)),
        per_pair_table=freq,
        per_pair_counts=counts,
        kind=model.kind,
        seed=model.rng_seed,
    )


__all__ = [
    "Direction",
    "SingletState",
    "MerminModel",
    "MerminReport",
    "X_DIR",
    "Z_DIR",
    "ALICE_AXES",
    "BOB_AXES",
    "INSTRUCTION_SETS",
    "spin_observable",
    "spin_state",
    "transition_probability",
    "singlet",
    "singlet_joint_probability",
    "singlet_correlation",
    "chsh_value",
    "deterministic_chsh_values",
    "chsh_maximize",
    "mermin_classical_bound",
    "instruction_same_color_frequency",
    "mermin_simulate",
]
