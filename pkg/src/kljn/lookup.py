"""Exhaustive setting enumeration and the singularity look-up table.

For quasi-continuum variants every joint setting (R_A-level, T_A-level,
R_B-level, T_B-level) maps to an analytic observable triple.  Triples
are quantized into relative-width cells; a cell is *singular* when all
settings landing in it imply the same bit assignment, so observing such
a triple hands the bit to an eavesdropper.  Secure operation requires
the drawn setting's cell to be degenerate (at least two opposite bit
situations within one cell).

Tables for fine grids are large (levels^4 settings), so everything is
kept in flat numpy arrays and cells are addressed by packed integer
keys; per-cell member lists are materialized only on demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridTooLarge
from .physics import PhysicalConstants, analytic_observable_arrays

#: Default enumeration budget: settings pairs, not bytes.  64-level
#: resistance and temperature grids need 64^4 ~ 1.7e7 pairs.
DEFAULT_MAX_COMBINATIONS = 40_000_000

_KEY_BITS = 21
_KEY_OFFSET = 1 << (_KEY_BITS - 1)


def _quantize_positive(values: np.ndarray, rel_width: float) -> np.ndarray:
    """Cell index for positive observables: log-spaced cells of relative
    width `rel_width`."""
    return np.floor(np.log(values) / np.log1p(rel_width)).astype(np.int64)


def _quantize_signed(values: np.ndarray, rel_width: float, scale: float) -> np.ndarray:
    """Cell index for the (sign-changing) power observable: linear cells
    of width rel_width * max|p| over the grid."""
    if scale <= 0.0:
        return np.zeros(len(values), dtype=np.int64)
    return np.floor(values / (rel_width * scale)).astype(np.int64)


def _pack_keys(i_su: np.ndarray, i_si: np.ndarray, i_p: np.ndarray) -> np.ndarray:
    cols = []
    for idx in (i_su, i_si, i_p):
        shifted = idx + _KEY_OFFSET
        if shifted.min() < 0 or shifted.max() >= (1 << _KEY_BITS):
            raise ValueError("quantization indices out of packing range; "
                             "increase the cell width")
        cols.append(shifted)
    return (cols[0] << (2 * _KEY_BITS)) | (cols[1] << _KEY_BITS) | cols[2]


@dataclass
class LookupTable:
    """Quantized observable triples -> generating settings, with
    per-cell singularity flags."""

    r_grid: np.ndarray
    t_grid: np.ndarray
    rel_cell_width: float
    bandwidth_hz: float
    k: float
    p_scale: float
    cell_keys: np.ndarray          # sorted unique packed keys
    cell_singular: np.ndarray      # bool, aligned with cell_keys
    cell_sizes: np.ndarray         # int, aligned with cell_keys
    combo_cells: np.ndarray        # cell index per enumerated setting
    combo_bits: np.ndarray         # sign(R_B - R_A) per setting: -1/0/+1
    exact_cells: bool = field(default=False)  # rel_cell_width == 0 mode

    @property
    def n_settings(self) -> int:
        return len(self.combo_cells)

    @property
    def n_cells(self) -> int:
        return len(self.cell_keys)

    def singular_fraction(self) -> float:
        """Fraction of enumerated settings falling in singular cells."""
        return float(np.mean(self.cell_singular[self.combo_cells]))

    def _key_for(self, r_a: float, t_a: float, r_b: float, t_b: float) -> int:
        s_u, s_i, p = analytic_observable_arrays(r_a, t_a, r_b, t_b,
                                                 self.bandwidth_hz, self.k)
        i_su = _quantize_positive(np.atleast_1d(s_u), self.rel_cell_width)
        i_si = _quantize_positive(np.atleast_1d(s_i), self.rel_cell_width)
        i_p = _quantize_signed(np.atleast_1d(p), self.rel_cell_width, self.p_scale)
        return int(_pack_keys(i_su, i_si, i_p)[0])

    def _grid_position(self, value: float, grid: np.ndarray, name: str) -> int:
        pos = int(np.argmin(np.abs(grid - value)))
        if not np.isclose(grid[pos], value, rtol=1e-12, atol=0.0):
            raise KeyError(f"{name} value {value} is not on the configured grid")
        return pos

    def cell_index_for(self, r_a: float, t_a: float, r_b: float, t_b: float) -> int:
        """Cell index of a drawn setting; the setting must lie on the grids."""
        if self.exact_cells:
            n_t = len(self.t_grid)
            n_party = len(self.r_grid) * n_t
            a = self._grid_position(r_a, self.r_grid, "r_a") * n_t \
                + self._grid_position(t_a, self.t_grid, "t_a")
            b = self._grid_position(r_b, self.r_grid, "r_b") * n_t \
                + self._grid_position(t_b, self.t_grid, "t_b")
            return a * n_party + b
        key = self._key_for(r_a, t_a, r_b, t_b)
        pos = int(np.searchsorted(self.cell_keys, key))
        if pos >= len(self.cell_keys) or self.cell_keys[pos] != key:
            raise KeyError(f"setting ({r_a}, {t_a}, {r_b}, {t_b}) maps to no "
                           f"enumerated cell; is it on the configured grids?")
        return pos

    def is_singular(self, r_a: float, t_a: float, r_b: float, t_b: float) -> bool:
        return bool(self.cell_singular[self.cell_index_for(r_a, t_a, r_b, t_b)])

    def cell_members(self, cell_index: int) -> np.ndarray:
        """Indices of enumerated settings in a cell (row-major over
        (r_a, t_a, r_b, t_b) grid levels)."""
        return np.flatnonzero(self.combo_cells == cell_index)

    def setting_values(self, member_index: int) -> tuple[float, float, float, float]:
        """(r_a, t_a, r_b, t_b) for an enumerated setting index."""
        n_t = len(self.t_grid)
        n_per_party = len(self.r_grid) * n_t
        a, b = divmod(member_index, n_per_party)
        return (float(self.r_grid[a // n_t]), float(self.t_grid[a % n_t]),
                float(self.r_grid[b // n_t]), float(self.t_grid[b % n_t]))


def build_table(r_grid: np.ndarray, t_grid: np.ndarray, bandwidth_hz: float,
                constants: PhysicalConstants, rel_cell_width: float,
                max_combinations: int = DEFAULT_MAX_COMBINATIONS) -> LookupTable:
    """Enumerate all joint settings and group them into quantized cells.

    `rel_cell_width` zero is a degenerate mode: every setting becomes
    its own cell (and is therefore singular).
    """
    r_grid = np.asarray(r_grid, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    n_party = len(r_grid) * len(t_grid)
    n_combos = n_party * n_party
    if n_combos > max_combinations:
        raise GridTooLarge(
            f"grid enumeration needs {n_combos} setting pairs, over the "
            f"budget of {max_combinations}", required=n_combos,
            budget=max_combinations)

    r_party = np.repeat(r_grid, len(t_grid))
    t_party = np.tile(t_grid, len(r_grid))
    r_a = np.repeat(r_party, n_party)
    t_a = np.repeat(t_party, n_party)
    r_b = np.tile(r_party, n_party)
    t_b = np.tile(t_party, n_party)

    s_u, s_i, p = analytic_observable_arrays(r_a, t_a, r_b, t_b,
                                             bandwidth_hz, constants.k)
    p_scale = float(np.max(np.abs(p)))
    bits = np.sign(r_b - r_a).astype(np.int8)

    if rel_cell_width == 0.0:
        keys = np.arange(n_combos, dtype=np.int64)
        exact = True
    else:
        keys = _pack_keys(_quantize_positive(s_u, rel_cell_width),
                          _quantize_positive(s_i, rel_cell_width),
                          _quantize_signed(p, rel_cell_width, p_scale))
        exact = False

    cell_keys, combo_cells, cell_sizes = np.unique(
        keys, return_inverse=True, return_counts=True)

    bit_min = np.full(len(cell_keys), 127, dtype=np.int8)
    bit_max = np.full(len(cell_keys), -127, dtype=np.int8)
    np.minimum.at(bit_min, combo_cells, bits)
    np.maximum.at(bit_max, combo_cells, bits)
    singular = bit_min == bit_max

    return LookupTable(r_grid=r_grid, t_grid=t_grid,
                       rel_cell_width=rel_cell_width,
                       bandwidth_hz=bandwidth_hz, k=constants.k,
                       p_scale=p_scale, cell_keys=cell_keys,
                       cell_singular=singular, cell_sizes=cell_sizes,
                       combo_cells=combo_cells, combo_bits=bits,
                       exact_cells=exact)
