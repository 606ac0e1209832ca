"""Multiplicative-chaos masses on balls, sample banks, and the exact
scale decomposition.

A mass sample is sum_i vol_i * exp(gamma Z_i - gamma^2/2 Var Z_i) over
grid cells; the variance in the normalizer is the post-repair diagonal,
which keeps the weights exactly mean-one so bank means match the grid
volume.  Banks persist to disk as a one-line JSON header followed by
raw little-endian float64 masses -- no timestamps, so identical
arguments give byte-identical files.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import ParameterError
from .field import CovarianceFactor, FieldSample, Grid, build_grid, covariance_factor
from .params import ModelParams

BANK_FORMAT = 1
_CHUNK = 1024  # samples per gemm block; fixed so results never depend on workers


@dataclass(frozen=True)
class GmcConstants:
    """Scale-change constants for a ball of radius r:
    a = 1/(2 gamma^2 ln(1/r)), b = 1/2 + d/gamma^2, and the prefactor
    Cr = r^{gamma^2/8 + d/2 + d^2/(2 gamma^2)} / sqrt(2 pi gamma^2 ln(1/r))."""

    a: float
    b: float
    Cr: float
    r: float


def scaling_constants(params: ModelParams, r: float) -> GmcConstants:
    if not 0.0 < r < 1.0:
        raise ParameterError(f"scale r must lie in (0, 1), got {r}")
    g2 = params.gamma**2
    if g2 == 0:
        raise ParameterError("scale constants need gamma > 0")
    log_inv = math.log(1.0 / r)
    a = 1.0 / (2.0 * g2 * log_inv)
    expo = g2 / 8.0 + params.d / 2.0 + params.d**2 / (2.0 * g2)
    cr = r**expo / math.sqrt(2.0 * math.pi * g2 * log_inv)
    return GmcConstants(a=a, b=params.b, Cr=cr, r=r)


def gmc_mass(
    field: FieldSample, factor: CovarianceFactor, grid: Grid, params: ModelParams
) -> float:
    """Mass of the chaos measure on the grid's ball for one field draw."""
    if field.values.shape[0] != grid.n_cells:
        raise ParameterError("field length does not match grid")
    g = params.gamma
    w = np.exp(g * field.values - 0.5 * g * g * factor.diag)
    return float(grid.volumes @ w)


@dataclass
class SampleBank:
    """Persisted i.i.d. mass samples with full provenance."""

    params: ModelParams
    radius: float
    cells_per_axis: int
    epsilon: float
    bank_id: int
    n_samples: int
    n_cells: int
    total_volume: float
    masses: np.ndarray

    def mean(self) -> float:
        return float(self.masses.mean())

    def std_error(self) -> float:
        return float(self.masses.std(ddof=1) / math.sqrt(self.n_samples))

    def header(self) -> dict:
        return {
            "format": BANK_FORMAT,
            "kind": "sample-bank",
            "params": self.params.to_dict(),
            "radius": self.radius,
            "cellsPerAxis": self.cells_per_axis,
            "epsilon": self.epsilon,
            "bankId": self.bank_id,
            "N": self.n_samples,
            "cells": self.n_cells,
            "totalVolume": self.total_volume,
        }


def _chunk_masses(factor, volumes, params, bank_id, start, count):
    m = factor.matrix_factor.shape[0]
    xi = np.empty((m, count))
    for k in range(count):
        xi[:, k] = rng.field_normals(bank_id, start + k, m)
    g = params.gamma
    w = factor.matrix_factor @ xi
    w *= g
    w -= 0.5 * g * g * factor.diag[:, None]
    np.exp(w, out=w)
    return volumes @ w


def create_bank(
    params: ModelParams,
    radius: float,
    cells_per_axis: int,
    N: int,
    bank_id: int,
    epsilon: float | None = None,
    workers: int | None = None,
    repair_gate: float = 1e-6,
) -> SampleBank:
    """N independent masses on B(0, radius).

    Sample i is driven entirely by the counter stream (bank_id, i), and
    the gemm chunking is fixed, so the result is bit-identical for any
    worker count.
    """
    if N < 1:
        raise ParameterError("need at least one sample")
    grid = build_grid(params.d, radius, cells_per_axis)
    factor = covariance_factor(grid, params, epsilon, repair_gate=repair_gate)
    volumes = grid.volumes

    starts = list(range(0, N, _CHUNK))
    if workers is None:
        workers = min(4, os.cpu_count() or 1)
    masses = np.empty(N)
    if workers <= 1 or len(starts) == 1:
        for s in starts:
            c = min(_CHUNK, N - s)
            masses[s : s + c] = _chunk_masses(factor, volumes, params, bank_id, s, c)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = {
                s: pool.submit(
                    _chunk_masses, factor, volumes, params, bank_id, s, min(_CHUNK, N - s)
                )
                for s in starts
            }
            for s in starts:
                c = min(_CHUNK, N - s)
                masses[s : s + c] = futs[s].result()

    return SampleBank(
        params=params,
        radius=radius,
        cells_per_axis=cells_per_axis,
        epsilon=factor.epsilon,
        bank_id=bank_id,
        n_samples=N,
        n_cells=grid.n_cells,
        total_volume=grid.total_volume,
        masses=masses,
    )


def save_bank(bank: SampleBank, path: str) -> None:
    header = json.dumps(bank.header(), sort_keys=True)
    with open(path, "wb") as fh:
        fh.write(header.encode("utf-8"))
        fh.write(b"\n")
        fh.write(np.ascontiguousarray(bank.masses, dtype="<f8").tobytes())


def load_bank(path: str) -> SampleBank:
    with open(path, "rb") as fh:
        header_line = fh.readline()
        raw = fh.read()
    header = json.loads(header_line.decode("utf-8"))
    if header.get("kind") != "sample-bank" or header.get("format") != BANK_FORMAT:
        raise ParameterError(f"{path} is not a format-{BANK_FORMAT} sample bank")
    masses = np.frombuffer(raw, dtype="<f8").copy()
    if masses.shape[0] != header["N"]:
        raise ParameterError(
            f"bank payload has {masses.shape[0]} samples, header says {header['N']}"
        )
    return SampleBank(
        params=ModelParams.from_dict(header["params"]),
        radius=header["radius"],
        cells_per_axis=header["cellsPerAxis"],
        epsilon=header["epsilon"],
        bank_id=header["bankId"],
        n_samples=header["N"],
        n_cells=header["cells"],
        total_volume=header["totalVolume"],
        masses=masses,
    )


def sample_scaled_masses(bank: SampleBank, r: float, stream_key: int) -> np.ndarray:
    """Masses on B(0, r) obtained from unit-ball masses by the exact
    scale decomposition: r^d exp(gamma W - gamma^2/2 ln(1/r)) M with W
    centered Gaussian of variance ln(1/r), independent of M."""
    if bank.radius != 1.0:
        raise ParameterError("scale decomposition starts from a unit-ball bank")
    if not 0.0 < r < 1.0:
        raise ParameterError(f"scale r must lie in (0, 1), got {r}")
    g = bank.params.gamma
    log_inv = math.log(1.0 / r)
    omega = rng.scale_normals(stream_key, bank.n_samples) * math.sqrt(log_inv)
    return r**bank.params.d * np.exp(g * omega - 0.5 * g * g * log_inv) * bank.masses
