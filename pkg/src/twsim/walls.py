"""Catalog of inhomogeneous wall cases and their rasterization.

Two families: three-layer dielectric walls (soft outer facades around a
denser core) and homogeneous slabs with periodic air gaps. The catalog is
a fixed, deterministically ordered grid of 60 + 60 parameter combinations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .fdtd import FdtdError, GridConfig

__all__ = ["WallCase", "enumerate_cases", "case_by_id", "rasterize",
           "catalog_json", "GAP_WIDTH", "GAP_DEPTH"]

# Air-gap rectangles are a fixed size: 0.25 m along x, 0.10 m along z.
GAP_WIDTH = 0.25
GAP_DEPTH = 0.10

MULTILAYER_EPS2 = (4.0, 5.0, 6.0, 7.0, 8.0)
MULTILAYER_EPS1 = (2.0, 2.5, 3.0)
MULTILAYER_L2 = (0.15, 0.20)
MULTILAYER_L1 = (0.05, 0.10)

AIRGAP_EPS = tuple(np.linspace(4.0, 8.0, 10))
AIRGAP_TH = (0.20, 0.30)
AIRGAP_COUNT = (3, 4, 5)


@dataclass(frozen=True)
class WallCase:
    kind: str  # "multilayer" | "air_gap"
    eps1: float | None = None  # outer layers (multilayer)
    eps2: float | None = None  # inner layer (multilayer)
    l1: float | None = None
    l2: float | None = None
    eps: float | None = None  # slab permittivity (air_gap)
    th: float | None = None
    gap_count: int | None = None

    @property
    def id(self) -> str:
        if self.kind == "multilayer":
            return (f"ml_er1-{self.eps1:g}_er2-{self.eps2:g}"
                    f"_l1-{round(self.l1 * 100)}_l2-{round(self.l2 * 100)}")
        return (f"ag_er-{self.eps:.3f}_th-{round(self.th * 100)}"
                f"_g{self.gap_count}")

    @property
    def depth(self) -> float:
        if self.kind == "multilayer":
            return 2 * self.l1 + self.l2
        return self.th

    def validate(self) -> None:
        if self.kind == "multilayer":
            if not (self.eps2 > self.eps1):
                raise ValueError(f"{self.id}: inner layer must be denser than outer")
            if not (self.l2 > self.l1):
                raise ValueError(f"{self.id}: inner layer must be thicker than outer")
        elif self.kind == "air_gap":
            if GAP_DEPTH > self.th:
                raise ValueError(f"{self.id}: gaps deeper than the wall")
            if self.gap_count < 0:
                raise ValueError(f"{self.id}: negative gap count")
        else:
            raise ValueError(f"unknown wall kind {self.kind!r}")

    def to_json(self) -> dict:
        d = {"id": self.id, "kind": self.kind}
        if self.kind == "multilayer":
            d.update(eps1=self.eps1, eps2=self.eps2, l1=self.l1, l2=self.l2)
        else:
            d.update(eps=self.eps, th=self.th, gap_count=self.gap_count,
                     gap_width=GAP_WIDTH, gap_depth=GAP_DEPTH)
        return d


def enumerate_cases() -> list[WallCase]:
    """All 120 wall cases in a fixed lexicographic order (multilayer grid
    first, then air-gap grid)."""
    cases = []
    for eps2 in MULTILAYER_EPS2:
        for eps1 in MULTILAYER_EPS1:
            for l2 in MULTILAYER_L2:
                for l1 in MULTILAYER_L1:
                    cases.append(WallCase(kind="multilayer", eps1=eps1,
                                          eps2=eps2, l1=l1, l2=l2))
    for eps in AIRGAP_EPS:
        for th in AIRGAP_TH:
            for n in AIRGAP_COUNT:
                cases.append(WallCase(kind="air_gap", eps=eps, th=th,
                                      gap_count=n))
    for c in cases:
        c.validate()
    return cases


def case_by_id(wall_id: str) -> WallCase:
    for c in enumerate_cases():
        if c.id == wall_id:
            return c
    raise KeyError(f"unknown wall id {wall_id!r}")


def catalog_json() -> str:
    return json.dumps([c.to_json() for c in enumerate_cases()], indent=2)


def _cells(length: float, cell: float) -> int:
    return round(length / cell)


def rasterize(case: WallCase, grid: GridConfig, front_z: float = 1.0) -> np.ndarray:
    """Full-interior (nx, nz) relative-permittivity array for one wall.

    The wall spans the full interior width; its front face sits at
    ``front_z``. Layer thicknesses round to whole cells.
    """
    case.validate()
    cell = grid.cell_size
    nx, nz = grid.nx, grid.nz
    iz0 = round((front_z - grid.z_extent[0]) / cell)
    n_depth = _cells(case.depth, cell)
    if iz0 < 0 or iz0 + n_depth > nz:
        raise FdtdError(f"wall {case.id} does not fit the interior "
                        f"(front_z={front_z}, depth={case.depth})")
    eps = np.ones((nx, nz))
    if case.kind == "multilayer":
        n1 = _cells(case.l1, cell)
        n2 = _cells(case.l2, cell)
        eps[:, iz0:iz0 + n1] = case.eps1
        eps[:, iz0 + n1:iz0 + n1 + n2] = case.eps2
        eps[:, iz0 + n1 + n2:iz0 + 2 * n1 + n2] = case.eps1
    else:
        eps[:, iz0:iz0 + n_depth] = case.eps
        n_gap_w = _cells(GAP_WIDTH, cell)
        n_gap_d = _cells(GAP_DEPTH, cell)
        if n_gap_d > n_depth:
            raise FdtdError(f"wall {case.id}: gaps deeper than rasterized wall")
        jz0 = iz0 + (n_depth - n_gap_d) // 2
        width = grid.x_extent[1] - grid.x_extent[0]
        n = case.gap_count
        if n > 0:
            margin = (width - n * GAP_WIDTH) / (n + 1)
            if margin < 0:
                raise FdtdError(f"wall {case.id}: gaps wider than the wall")
            for g in range(n):
                x_start = margin * (g + 1) + GAP_WIDTH * g
                ix0 = round(x_start / cell)
                eps[ix0:ix0 + n_gap_w, jz0:jz0 + n_gap_d] = 1.0
    return eps
