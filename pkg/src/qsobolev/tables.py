"""Named zero/critical-mass tables and their reference digits."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .errors import PrecisionError, QSobolevError
from .families import asci, stieltjes_wigert
from .sobolev import SobolevSpec
from .zeros import n0_critical, zeros_sobolev

TABLE_IDS = ("asci-n20", "asci-n11", "asci-n14-left", "asci-n14-right", "sw-n14")
DEFAULT_BITS = 512


@dataclass
class Table:
    table_id: str
    key: str
    columns: list  # names of the value columns
    rows: list  # (key value, [values]) with mpf entries
    sig_bits: int
    eps_trunc: object

    def flat(self) -> list:
        return [v for _, vals in self.rows for v in vals]


def _extreme(fam, n, N, alpha, last):
    zs = zeros_sobolev(SobolevSpec(fam, N, alpha), n)
    return zs.zeros[-1] if last else zs.zeros[0]


def _mass_sweep(table_id, a, n, masses, series, bits):
    """Rows keyed by N; one column per (alpha, extreme zero) series, then an N0 row."""
    fam = asci(a, "1/2", bits)
    cols = [name for name, _, _ in series]
    rows = []
    for m in masses:
        N = fam.real(m)
        rows.append((N, [_extreme(fam, n, N, alpha, last) for _, alpha, last in series]))
    rows.append(("N0", [n0_critical(fam, n, alpha) for _, alpha, _ in series]))
    return Table(table_id, "N", cols, rows, bits, fam.ctx.eps_trunc)


def _critical_sweep(table_id, n, alpha, masses, last, bits):
    """Rows keyed by N where the entry None stands for the critical mass."""
    fam = asci(-1, "1/2", bits)
    N0 = n0_critical(fam, n, alpha)
    col = f"eta_{n}_{n if last else 1}"
    rows = []
    for m in masses:
        N = N0 if m is None else fam.real(m)
        rows.append((N, [_extreme(fam, n, N, alpha, last)]))
    return Table(table_id, "N", [col], rows, bits, fam.ctx.eps_trunc)


SW_QS = ("0.5", "0.8", "0.9", "0.99")
SW_MULTIPLIERS = ("1e-5", "1", "1e5", "1e10")


def _sw_table(bits):
    rows = []
    eps = None
    for q in SW_QS:
        fam = stieltjes_wigert(q, bits)
        eps = fam.ctx.eps_trunc
        N0 = n0_critical(fam, 14, -1)
        etas = [_extreme(fam, 14, N0 * fam.real(m), -1, False) for m in SW_MULTIPLIERS]
        rows.append((fam.q, [N0] + etas))
    cols = ["N0"] + [f"eta_14_1@{m}N0" for m in SW_MULTIPLIERS]
    return Table("sw-n14", "q", cols, rows, bits, eps)


def compute_table(table_id: str, bits: int = DEFAULT_BITS) -> Table:
    if table_id == "asci-n20":
        return _mass_sweep(table_id, -1, 20, ["7e-120", "7e-118", "7e-116", "7e-114"],
                           [("eta_20_1", -75, False), ("eta_20_20", 72, True)], bits)
    if table_id == "asci-n11":
        return _mass_sweep(table_id, -5, 11, ["7e-36", "7e-34", "7e-32", "7e-30"],
                           [("eta_11_1", -42, False), ("eta_11_11", 45, True)], bits)
    if table_id == "asci-n14-left":
        return _critical_sweep(table_id, 14, -3, ["5e-45", None, "5e-35", "5e-30"], False, bits)
    if table_id == "asci-n14-right":
        return _critical_sweep(table_id, 14, 21, ["6e-65", None, "6e-55", "6e-50"], True, bits)
    if table_id == "sw-n14":
        return _sw_table(bits)
    raise KeyError(f"unknown table {table_id!r}; choose from {', '.join(TABLE_IDS)}")


def _fmt(mp, v, digits):
    return mp.nstr(v, digits, strip_zeros=False, min_fixed=-4, max_fixed=8)


def table_records(table: Table, mp) -> tuple[list, list]:
    """Header and string rows: key, then each column at 6 significant digits
    followed by its full-precision companion."""
    header = [table.key]
    for c in table.columns:
        header += [c, c + "_full"]
    full = mp.dps
    out = []
    for key, vals in table.rows:
        row = [key if isinstance(key, str) else _fmt(mp, key, 6)]
        for v in vals:
            row += [_fmt(mp, v, 6), _fmt(mp, v, full)]
        out.append(row)
    return header, out


def reference_values() -> dict:
    """Reference digits for every table, keyed like ``table_records`` rows."""
    text = resources.files("qsobolev").joinpath("data/reference_tables.json").read_text()
    return json.loads(text)


def agrees(computed, reference: float, digits: int = 4) -> bool:
    """Agreement to ``digits`` significant digits: relative error at most
    5 * 10^-digits.  A reference of exactly 0 means |computed| < 5e-5."""
    if reference == 0:
        return abs(computed) < 5e-5
    return abs(float(computed) - reference) <= 5 * 10 ** (-digits) * abs(reference)


def compare_to_reference(table: Table) -> list:
    """(row index, column, computed, reference, ok) for every reference entry.

    Each column carries its own significant-digit count; a trailing
    critical-mass row and row keys that are critical masses use their own.
    """
    ref = reference_values()[table.table_id]
    out = []
    last = len(table.rows) - 1
    for i, (row_ref, (_, vals)) in enumerate(zip(ref["rows"], table.rows)):
        for j, (col, r, v) in enumerate(zip(table.columns, row_ref, vals)):
            digits = ref["last_row_digits"] if i == last and "last_row_digits" in ref else ref["digits"][j]
            out.append((i, col, v, r, agrees(v, r, digits)))
    for i, r in ref.get("row_keys", {}).items():
        key = table.rows[int(i)][0]
        out.append((int(i), table.key, key, r, agrees(key, r, 5)))
    return out


def guarded_table(table_id: str, bits: int = DEFAULT_BITS, extra_bits: int = 128,
                  digits: int = 8) -> Table:
    """Compute a table at ``bits`` and again at ``bits + extra_bits``; values
    must agree to ``digits`` significant digits or PrecisionError is raised."""
    try:
        low = compute_table(table_id, bits)
    except QSobolevError as exc:
        raise PrecisionError(
            f"{table_id}: computation failed at {bits} bits ({type(exc).__name__}: {exc}); "
            f"the masses and kernel values in this table need more precision") from exc
    high = compute_table(table_id, bits + extra_bits)
    # values that are zero to working precision (a zero sitting on an endpoint) are compared absolutely
    floor = high.rows[0][1][0].context.ldexp(1, -bits // 2)
    for a, b in zip(low.flat(), high.flat()):
        if abs(a - b) > 10 ** (-digits) * max(abs(b), floor):
            raise PrecisionError(
                f"{table_id}: value changes beyond {digits} significant digits between "
                f"{bits} and {bits + extra_bits} bits; increase the precision")
    return low
