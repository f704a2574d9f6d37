"""Rasterized open sets, ball-intersection measures, and density sweeps.

A domain is an occupancy bit grid over [0, L]^n with spacing h; a cell is
occupied exactly when its center satisfies the analytic membership predicate.
Measures are cell counts times h**n, so boundary error scales like
h * perimeter.  Grids are immutable after generation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.signal import fftconvolve

__all__ = [
    "DomainError",
    "ResolutionExhausted",
    "RasterDomain",
    "DensityReport",
    "generate",
    "ball_measure",
    "density_profile",
    "density_constant",
    "halving_radius",
    "save_ord1",
    "load_ord1",
]


class DomainError(ValueError):
    """Invalid domain parameters or query."""


class ResolutionExhausted(RuntimeError):
    """The grid is too coarse for the requested operation."""


@dataclass(frozen=True, eq=False)
class RasterDomain:
    ndim: int
    h: float
    occupancy: np.ndarray  # bool, shape (nx, ny[, nz])
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    closure_predicate: object = None  # optional callable x -> bool

    def __post_init__(self):
        if self.ndim not in (2, 3):
            raise DomainError(f"dimension must be 2 or 3, got {self.ndim}")
        if self.h <= 0:
            raise DomainError("grid spacing must be positive")
        occ = np.ascontiguousarray(self.occupancy, dtype=bool)
        if occ.ndim != self.ndim:
            raise DomainError("occupancy rank does not match dimension")
        if not occ.any():
            raise DomainError("empty domain")
        object.__setattr__(self, "occupancy", occ)

    @property
    def measure(self) -> float:
        return float(self.occupancy.sum()) * self.h**self.ndim

    @property
    def extent(self) -> tuple[float, ...]:
        return tuple(n * self.h for n in self.occupancy.shape)

    def axis_centers(self, axis: int) -> np.ndarray:
        return (np.arange(self.occupancy.shape[axis]) + 0.5) * self.h

    def cell_of(self, x) -> tuple[int, ...]:
        idx = tuple(int(np.floor(c / self.h)) for c in x)
        if any(i < 0 or i >= n for i, n in zip(idx, self.occupancy.shape)):
            raise DomainError(f"point {tuple(x)} outside the grid box")
        return idx

    def contains(self, x) -> bool:
        try:
            return bool(self.occupancy[self.cell_of(x)])
        except DomainError:
            return False

    def in_closure(self, x) -> bool:
        if self.closure_predicate is not None:
            return bool(self.closure_predicate(np.asarray(x, dtype=float)))
        return self.contains(x)

    def boundary_mask(self) -> np.ndarray:
        """Occupied cells with at least one unoccupied or out-of-grid face neighbor."""
        occ = self.occupancy
        interior = np.ones_like(occ)
        for axis in range(self.ndim):
            pad = [(0, 0)] * self.ndim
            pad[axis] = (1, 1)
            padded = np.pad(occ, pad, constant_values=False)
            lo = [slice(None)] * self.ndim
            hi = [slice(None)] * self.ndim
            lo[axis] = slice(0, -2)
            hi[axis] = slice(2, None)
            interior &= padded[tuple(lo)] & padded[tuple(hi)]
        return occ & ~interior

    def occupied_centers(self) -> np.ndarray:
        idx = np.argwhere(self.occupancy)
        return (idx + 0.5) * self.h


# ---------------------------------------------------------------------------
# generators


def _centers_mesh(shape, h):
    axes = [(np.arange(n) + 0.5) * h for n in shape]
    return np.meshgrid(*axes, indexing="ij")


def _carpet_removed(coords, stages):
    """Removed iff, at some stage k, the point falls in the centered square of
    relative side 4**-k of its 3**(k-1)-grid block."""
    removed = np.zeros(coords[0].shape, dtype=bool)
    for k in range(1, stages + 1):
        blocks = 3 ** (k - 1)
        half = 0.5 * 4.0**-k
        inside = np.ones_like(removed)
        for c in coords:
            frac = c * blocks - np.floor(c * blocks)
            inside &= np.abs(frac - 0.5) < half
        removed |= inside
    return removed


def generate(kind: str, h: float, **params) -> RasterDomain:
    """Rasterize one of the built-in families at spacing h.

    cube(side), ball(radius, center), lipschitz-graph(amp, freq),
    inward-cusp(gamma), fat-carpet(stages); fat-carpet and inward-cusp are
    two-dimensional, the rest accept n in {2, 3}.
    """
    n = int(params.pop("n", 2))
    if kind == "cube":
        side = float(params.pop("side", 1.0))
        if side <= 0:
            raise DomainError("cube side must be positive")
        shape = (max(int(round(side / h)), 1),) * n
        occ = np.ones(shape, dtype=bool)
        pred = lambda x: bool(np.all((x > 0) & (x < side)))  # noqa: E731
        return RasterDomain(n, h, occ, "cube", {"side": side, "n": n}, pred)
    if kind == "ball":
        radius = float(params.pop("radius", 0.5))
        side = 2.0 * radius
        shape = (max(int(round(side / h)), 1),) * n
        center = np.full(n, radius)
        mesh = _centers_mesh(shape, h)
        d2 = sum((c - ci) ** 2 for c, ci in zip(mesh, center))
        occ = d2 < radius**2
        pred = lambda x: bool(np.sum((np.asarray(x) - center) ** 2) <= radius**2)  # noqa: E731
        return RasterDomain(n, h, occ, "ball", {"radius": radius, "n": n}, pred)
    if kind == "lipschitz-graph":
        amp = float(params.pop("amp", 0.25))
        freq = float(params.pop("freq", 2.0))
        if not 0 < amp < 0.5:
            raise DomainError("amp must lie in (0, 0.5)")
        shape = (max(int(round(1.0 / h)), 1),) * n
        mesh = _centers_mesh(shape, h)

        def graph(xs):
            if n == 2:
                return 0.5 + amp * np.sin(2 * math.pi * freq * xs[0])
            return 0.5 + amp * np.sin(2 * math.pi * freq * xs[0]) * np.sin(2 * math.pi * freq * xs[1])

        occ = mesh[-1] < graph(mesh[:-1])
        pred = lambda x: bool(np.all((np.asarray(x) >= 0) & (np.asarray(x) <= 1)) and x[-1] <= graph([np.asarray(x[i]) for i in range(n - 1)]))  # noqa: E731
        return RasterDomain(n, h, occ, "lipschitz-graph", {"amp": amp, "freq": freq, "n": n}, pred)
    if kind == "inward-cusp":
        gamma = float(params.pop("gamma", 2.0))
        if gamma <= 1.0:
            raise DomainError("cusp exponent gamma must exceed 1")
        shape = (max(int(round(1.0 / h)), 1),) * n
        mesh = _centers_mesh(shape, h)
        occ = mesh[1] < mesh[0] ** gamma
        if n == 3:
            occ &= mesh[2] < 1.0
        pred = lambda x: bool(0 <= x[0] <= 1 and 0 <= x[1] <= x[0] ** gamma and (n == 2 or 0 <= x[2] <= 1))  # noqa: E731
        return RasterDomain(n, h, occ, "inward-cusp", {"gamma": gamma, "n": n}, pred)
    if kind == "fat-carpet":
        if n != 2:
            raise DomainError("fat-carpet is a planar construction")
        stages = int(params.pop("stages", 4))
        if stages < 1:
            raise DomainError("need at least one stage")
        shape = (max(int(round(1.0 / h)), 1),) * 2
        mesh = _centers_mesh(shape, h)
        occ = ~_carpet_removed(mesh, stages)
        retained = float(np.prod([1.0 - 16.0**-k for k in range(1, stages + 1)]))
        meta = {"stages": stages, "removal_side_ratios": [4.0**-k for k in range(1, stages + 1)],
                "retained_lower_bound": retained, "n": 2}
        pred = lambda x: bool(np.all((np.asarray(x) >= 0) & (np.asarray(x) <= 1)))  # noqa: E731
        return RasterDomain(2, h, occ, "fat-carpet", meta, pred)
    raise DomainError(f"unknown domain kind {kind!r}")


# ---------------------------------------------------------------------------
# ball measures


def _window_distances(dom: RasterDomain, x, r: float):
    """Squared distances from x to occupied cell centers inside the r-window."""
    occ = dom.occupancy
    h = dom.h
    slices = []
    for axis in range(dom.ndim):
        lo = max(int(math.floor((x[axis] - r) / h - 0.5)), 0)
        hi = min(int(math.ceil((x[axis] + r) / h + 0.5)), occ.shape[axis])
        if lo >= hi:
            return np.empty(0)
        slices.append(slice(lo, hi))
    sub = occ[tuple(slices)]
    if not sub.any():
        return np.empty(0)
    axes = [((np.arange(s.start, s.stop) + 0.5) * h - x[i]) ** 2 for i, s in enumerate(slices)]
    mesh = np.meshgrid(*axes, indexing="ij")
    d2 = sum(mesh)
    return d2[sub]


def ball_measure(dom: RasterDomain, x, r: float) -> float:
    """Measure of the r-ball around x intersected with the domain."""
    if r <= 0:
        raise DomainError("radius must be positive")
    d2 = _window_distances(dom, x, r)
    if not len(d2):
        return 0.0
    return float(np.count_nonzero(d2 <= r * r)) * dom.h**dom.ndim


def _counts_all_cells(dom: RasterDomain, r: float) -> np.ndarray:
    """Occupied-cell count within r of every cell center, via FFT convolution."""
    k = int(math.floor(r / dom.h + 1e-9))
    offsets = np.arange(-k, k + 1)
    mesh = np.meshgrid(*([offsets] * dom.ndim), indexing="ij")
    kernel = (sum(m.astype(float) ** 2 for m in mesh) <= (r / dom.h) ** 2 + 1e-9).astype(float)
    conv = fftconvolve(dom.occupancy.astype(float), kernel, mode="same")
    return np.rint(conv).astype(np.int64)


# ---------------------------------------------------------------------------
# density


@dataclass(frozen=True)
class DensityReport:
    points: np.ndarray = field(repr=False)
    radii: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)  # shape (len(points), len(radii))
    inf_value: float
    argmin_point: tuple
    argmin_radius: float
    protocol: str
    seed: int | None = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "inf": self.inf_value,
                "argmin": {"x": list(self.argmin_point), "r": self.argmin_radius},
                "protocol": self.protocol,
                "seed": self.seed,
                "radii": [float(r) for r in self.radii],
                "points": [[float(c) for c in p] for p in self.points],
                "values": [[float(v) for v in row] for row in self.values],
            },
            sort_keys=True,
        )


def density_profile(dom: RasterDomain, x, radii) -> np.ndarray:
    """c(x, r) = |B(x,r) n domain| / r**n for each radius; x must lie in the
    domain closure."""
    x = np.asarray(x, dtype=float)
    if not (dom.contains(x) or dom.in_closure(x)):
        raise DomainError(f"point {tuple(x)} is not in the domain")
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0) or np.any(radii > 1.0):
        raise DomainError("radii must lie in (0, 1]")
    return np.array([ball_measure(dom, x, float(r)) / float(r) ** dom.ndim for r in radii])


def default_radii(dom: RasterDomain, count: int = 12, c_min: float = 8.0) -> np.ndarray:
    r_lo = c_min * dom.h
    if r_lo >= 1.0:
        raise ResolutionExhausted("grid too coarse: the minimum radius exceeds 1")
    return np.geomspace(r_lo, 1.0, count)


def density_constant(
    dom: RasterDomain,
    mode: str = "boundary",
    k: int = 64,
    radii=None,
    seed: int = 0,
) -> DensityReport:
    """Infimum of c(x, r) over sampled centers and a radius grid.

    mode 'boundary' sweeps every boundary cell center (FFT-accelerated);
    mode 'random' draws k occupied cell centers with a seeded generator.
    """
    radii = default_radii(dom) if radii is None else np.asarray(radii, dtype=float)
    if np.any(radii < 8.0 * dom.h - 1e-12) or np.any(radii > 1.0):
        raise DomainError("radius grid must lie within (8h, 1]")
    hn = dom.h**dom.ndim
    if mode == "boundary":
        mask = dom.boundary_mask()
        idx = np.argwhere(mask)
        points = (idx + 0.5) * dom.h
        cols = []
        for r in radii:
            counts = _counts_all_cells(dom, float(r))
            cols.append(counts[mask] * hn / float(r) ** dom.ndim)
        values = np.column_stack(cols)
        used_seed = None
        protocol = f"all {len(points)} boundary cell centers x {len(radii)} radii in [{radii[0]:.4g}, {radii[-1]:.4g}]"
    elif mode == "random":
        rng = np.random.default_rng(seed)
        centers = dom.occupied_centers()
        pick = rng.choice(len(centers), size=min(k, len(centers)), replace=False)
        points = centers[np.sort(pick)]
        values = np.array([density_profile(dom, p, radii) for p in points])
        used_seed = seed
        protocol = f"{len(points)} random occupied cell centers (seed {seed}) x {len(radii)} radii"
    else:
        raise DomainError(f"unknown sampling mode {mode!r}")
    flat = int(np.argmin(values))
    i, j = divmod(flat, values.shape[1])
    return DensityReport(
        points=points,
        radii=radii,
        values=values,
        inf_value=float(values[i, j]),
        argmin_point=tuple(float(c) for c in points[i]),
        argmin_radius=float(radii[j]),
        protocol=protocol,
        seed=used_seed,
    )


# ---------------------------------------------------------------------------
# half-measure radius


def halving_radius(dom: RasterDomain, x, R: float) -> float:
    """Smallest radius whose ball keeps at least half the measure of the R-ball.

    Chosen on the lattice of attained center distances: measure jumps only
    there, so this is the exact minimizer of the half-measure condition.
    """
    x = np.asarray(x, dtype=float)
    d2 = _window_distances(dom, x, R)
    d2 = d2[d2 <= R * R]
    n_full = len(d2)
    if n_full * dom.h**dom.ndim < 16.0 * dom.h**dom.ndim:
        raise ResolutionExhausted(
            f"ball at {tuple(x)} holds {n_full} cells < 16: refine h below {dom.h:.3g}")
    # smallest count with count >= n/2 - 1
    want = max(int(math.ceil(n_full / 2.0 - 1.0)), 1)
    # nudge up one ulp-scale so the defining cell survives the sqrt round trip
    dist = math.sqrt(float(np.partition(d2, want - 1)[want - 1])) * (1.0 + 1e-12)
    return float(min(dist, R * (1.0 - 1e-12)))


# ---------------------------------------------------------------------------
# ORD1 raster exchange format


def save_ord1(dom: RasterDomain, path) -> None:
    shape = dom.occupancy.shape
    header = f"ORD1 {dom.ndim} {dom.h!r} " + " ".join(str(n) for n in shape)
    flat = dom.occupancy.reshape(-1)
    tokens = []
    i = 0
    while i < len(flat):
        j = i
        while j < len(flat) and flat[j] == flat[i]:
            j += 1
        tokens.append(f"{j - i}{'o' if flat[i] else 'e'}")
        i = j
    lines = [header]
    for k in range(0, len(tokens), 12):
        lines.append(" ".join(tokens[k:k + 12]))
    text = "\n".join(lines) + "\n"
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def load_ord1(path) -> RasterDomain:
    if hasattr(path, "read"):
        text = path.read()
    else:
        with open(path) as fh:
            text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("ORD1"):
        raise DomainError("not an ORD1 file")
    head = lines[0].split()
    ndim = int(head[1])
    h = float(head[2])
    shape = tuple(int(t) for t in head[3:3 + ndim])
    flat = np.empty(int(np.prod(shape)), dtype=bool)
    pos = 0
    for token in " ".join(lines[1:]).split():
        count, mark = int(token[:-1]), token[-1]
        if mark not in ("o", "e"):
            raise DomainError(f"bad RLE token {token!r}")
        flat[pos:pos + count] = mark == "o"
        pos += count
    if pos != len(flat):
        raise DomainError(f"RLE covers {pos} cells, grid has {len(flat)}")
    return RasterDomain(ndim, h, flat.reshape(shape), "loaded", {})
