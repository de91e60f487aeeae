"""Graphon kernels and their discretization into weighted interaction matrices.

A graphon is a symmetric kernel w: [0,1]^2 -> [0,1]. We support three
families: power-law w(x,y) = c*(x*y)^(-exponent), piecewise-constant on a
block partition of [0,1], and a constant kernel. Populations are finite
samples of agent indices together with the evaluated weight matrix.
"""

from dataclasses import dataclass

import numpy as np

# Indices are clamped away from 0 before power-law evaluation; the kernel
# blows up at the origin for the parameter ranges of interest.
EPS_IDX = 1e-6

POWER_LAW = "power_law"
PIECEWISE = "piecewise_constant"
CONSTANT = "constant"


@dataclass(frozen=True)
class GraphonSpec:
    """Declarative description of a graphon kernel.

    Use the classmethod constructors rather than filling fields by hand;
    they validate the variant-specific constraints.
    """

    kind: str
    c: float = 1.0
    exponent: float = -1.0
    block_lengths: tuple = ()
    block_matrix: tuple = ()
    w0: float = 0.0

    @classmethod
    def power_law(cls, c: float = 1.0, exponent: float = -1.0) -> "GraphonSpec":
        if c <= 0:
            raise ValueError("power_law scale c must be positive")
        return cls(kind=POWER_LAW, c=float(c), exponent=float(exponent))

    @classmethod
    def piecewise_constant(cls, block_lengths, block_matrix) -> "GraphonSpec":
        lengths = tuple(float(v) for v in block_lengths)
        mat = tuple(tuple(float(v) for v in row) for row in block_matrix)
        k = len(lengths)
        if k == 0:
            raise ValueError("piecewise graphon needs at least one block")
        if any(v <= 0 for v in lengths):
            raise ValueError("block lengths must be positive")
        if abs(sum(lengths) - 1.0) > 1e-12:
            raise ValueError("block lengths must sum to 1")
        if len(mat) != k or any(len(row) != k for row in mat):
            raise ValueError("block matrix must be square and match block count")
        arr = np.array(mat)
        if np.any(arr < 0) or np.any(arr > 1):
            raise ValueError("block matrix entries must lie in [0, 1]")
        if not np.allclose(arr, arr.T, rtol=0, atol=1e-12):
            raise ValueError("block matrix must be symmetric")
        return cls(kind=PIECEWISE, block_lengths=lengths, block_matrix=mat)

    @classmethod
    def constant(cls, w0: float) -> "GraphonSpec":
        if not 0.0 <= w0 <= 1.0:
            raise ValueError("constant graphon value must lie in [0, 1]")
        return cls(kind=CONSTANT, w0=float(w0))

    def n_groups(self) -> int:
        return len(self.block_lengths) if self.kind == PIECEWISE else 1

    def block_edges(self) -> np.ndarray:
        """Right endpoints of the blocks (piecewise kind only)."""
        return np.cumsum(np.asarray(self.block_lengths, dtype=float))


@dataclass(frozen=True, eq=False)
class AgentPopulation:
    """A finite sample of agent indices with the evaluated interaction matrix.

    indices       -- sorted agent positions in [0, 1], shape (n,)
    quad_weight   -- uniform quadrature weight 1/n for integrals over [0, 1]
    weight_matrix -- symmetric (n, n) matrix, entry (i, j) = w(x_i, x_j)
    group_of      -- block id per agent for piecewise graphons, else zeros
    """

    indices: np.ndarray
    quad_weight: float
    weight_matrix: np.ndarray
    group_of: np.ndarray

    @property
    def n_agents(self) -> int:
        return self.indices.shape[0]


def _group_index(spec: GraphonSpec, x: np.ndarray) -> np.ndarray:
    # right block edge belongs to the block on its left; x = 1 maps to the
    # last block
    edges = spec.block_edges()
    idx = np.searchsorted(edges, x, side="left")
    return np.minimum(idx, len(edges) - 1)


def eval_graphon(spec: GraphonSpec, x, y):
    """Evaluate the kernel at (x, y). Accepts scalars or same-shape arrays."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(x > 1) or np.any(y < 0) or np.any(y > 1):
        raise ValueError("graphon arguments must lie in [0, 1]")
    if spec.kind == CONSTANT:
        out = np.full(np.broadcast(x, y).shape, spec.w0)
    elif spec.kind == POWER_LAW:
        xc = np.maximum(x, EPS_IDX)
        yc = np.maximum(y, EPS_IDX)
        out = np.clip(spec.c * (xc * yc) ** (-spec.exponent), 0.0, 1.0)
    elif spec.kind == PIECEWISE:
        mat = np.asarray(spec.block_matrix)
        out = mat[_group_index(spec, x), _group_index(spec, y)]
    else:
        raise ValueError(f"unknown graphon kind: {spec.kind!r}")
    return float(out) if out.ndim == 0 else out


def _apportion(block_lengths, n: int) -> np.ndarray:
    """Largest-remainder apportionment of n agents across blocks."""
    quotas = np.asarray(block_lengths, dtype=float) * n
    counts = np.floor(quotas).astype(int)
    short = n - counts.sum()
    if short > 0:
        # ties broken toward lower block index for determinism
        order = np.lexsort((np.arange(len(quotas)), -(quotas - counts)))
        counts[order[:short]] += 1
    return counts


def sample_population(spec: GraphonSpec, n: int, seed: int,
                      mode: str = "uniform_iid") -> AgentPopulation:
    """Sample n agent indices and evaluate the pairwise weight matrix.

    mode 'uniform_iid' draws indices i.i.d. uniform on [0,1] and sorts them.
    mode 'group_proportional' (piecewise graphons only) places agents
    deterministically: counts proportional to block lengths (largest
    remainder, total exactly n), evenly spaced midpoints within each block.
    """
    if n < 1:
        raise ValueError("population size must be at least 1")
    if mode == "uniform_iid":
        rng = np.random.default_rng(seed)
        indices = np.sort(rng.uniform(0.0, 1.0, size=n))
    elif mode == "group_proportional":
        if spec.kind != PIECEWISE:
            raise ValueError("group_proportional sampling requires a "
                             "piecewise_constant graphon")
        counts = _apportion(spec.block_lengths, n)
        edges = np.concatenate(([0.0], spec.block_edges()))
        chunks = []
        for k, m in enumerate(counts):
            if m == 0:
                continue
            a, b = edges[k], edges[k + 1]
            chunks.append(a + (b - a) * (np.arange(m) + 0.5) / m)
        indices = np.concatenate(chunks)
    else:
        raise ValueError(f"unknown sampling mode: {mode!r}")

    w = eval_graphon(spec, indices[:, None], indices[None, :])
    w = np.ascontiguousarray(w, dtype=float)
    if spec.kind == PIECEWISE:
        group_of = _group_index(spec, indices).astype(np.int64)
    else:
        group_of = np.zeros(n, dtype=np.int64)
    return AgentPopulation(indices=indices, quad_weight=1.0 / n,
                           weight_matrix=w, group_of=group_of)
