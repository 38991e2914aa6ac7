"""Published reference values, one record per table row.

``known`` is alpha (tables 1-5) or chi (tables 6-7); a pair means only a
range is known and ``None`` means unknown.  Times are seconds.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass

from .model import Problem


@dataclass(frozen=True)
class ReferenceRecord:
    name: str
    n: int
    m: int
    known: int | tuple[int, int] | None
    theta: float
    bound1: float
    bound2: float
    gr: float | None
    table: int
    time1: float | None = None
    time2: float | None = None

    @property
    def problem(self) -> Problem:
        return Problem.STABLE if self.table <= 5 else Problem.COLORING

    def known_range(self) -> tuple[int, int] | None:
        if self.known is None:
            return None
        if isinstance(self.known, tuple):
            return self.known
        return (self.known, self.known)


def _rows(table: int, rows) -> list[ReferenceRecord]:
    out = []
    for r in rows:
        name, n, m, known, th, b1, t1, b2, t2 = r[:9]
        gr = r[9] if len(r) > 9 else None
        out.append(ReferenceRecord(name, n, m, known, th, b1, b2, gr, table, t1, t2))
    return out


REFERENCE: tuple[ReferenceRecord, ...] = tuple(
    _rows(1, [
        ("reg_n100_r4", 100, 195, 40, 43.449, 41.246, 17, 40.713, 41, 40.687),
        ("reg_n100_r6", 100, 294, 34, 37.815, 36.224, 7, 35.047, 32, 35.246),
        ("reg_n100_r8", 100, 377, 31, 34.480, 33.337, 4, 32.063, 21, 32.190),
        ("reg_n200_r4", 200, 400, 80, 87.759, 83.498, 111, 82.246, 260, 83.772),
        ("reg_n200_r6", 200, 593, 68, 79.276, 76.047, 25, 73.709, 229, 75.555),
        ("reg_n200_r8", 200, 792, 60, 70.790, 69.110, 11, 66.789, 78, 67.785),
        ("reg_n200_r10", 200, 980, 57, 66.418, 65.142, 6, 62.695, 75, 62.894),
    ])
    + _rows(2, [
        ("rand_n100_p004", 100, 212, 45, 46.067, 45.032, 22, 45.032, 1, 45.021),
        ("rand_n100_p006", 100, 303, 38, 40.361, 38.909, 13, 38.435, 20, 38.439),
        ("rand_n100_p008", 100, 443, 32, 34.847, 33.575, 5, 32.433, 23, 32.579),
        ("rand_n100_p010", 100, 489, 32, 34.020, 32.934, 5, 32.151, 17, 32.191),
        ("rand_n200_p002", 200, 407, 95, 95.778, 95.044, 222, 95.044, 1, 95.032),
        ("rand_n200_p003", 200, 631, 80, 83.662, 81.560, 39, 81.079, 52, 81.224),
        ("rand_n200_p004", 200, 816, 67, 73.908, 71.654, 17, 69.818, 96, 70.839),
        ("rand_n200_p005", 200, 991, 62, 69.039, 67.313, 19, 65.544, 70, 66.091),
    ])
    + _rows(3, [
        ("torus_5", 25, 50, 10, 11.180, 10.000, 1, 10.000, 1, 10.002),
        ("torus_7", 49, 98, 21, 23.224, 21.000, 2, 21.000, 1, 21.009),
        ("torus_9", 81, 162, 36, 39.241, 36.000, 24, 36.000, 7, 36.021),
        ("torus_11", 121, 242, 55, 59.249, 55.022, 81, 55.019, 19, 55.066),
        ("torus_13", 169, 338, 78, 83.254, 78.379, 337, 78.048, 129, 79.084),
        ("torus_15", 225, 450, 105, 111.257, 108.208, 1517, 105.214, 504, 106.287),
    ])
    + _rows(4, [
        ("spin5", 125, 375, 50, 55.902, 50.000, 17, 50.000, 6),
        ("spin7", 343, 1029, (147, 151), 162.566, 147.000, 1225, 147.000, 639),
        ("MANN_a9", 45, 72, 16, 17.475, 17.220, 2, 17.220, 1),
        ("MANN_a27", 378, 702, 126, 132.763, 131.709, 781, 131.112, 874),
        ("C125.9", 125, 787, 34, 37.805, 36.920, 4, 35.568, 32),
        ("C250.9", 250, 3141, 44, 56.241, 55.771, 18, 54.899, 479),
        ("sanr200_0_9", 200, 2037, 42, 49.274, 48.723, 11, 47.472, 229),
    ])
    + _rows(5, [
        ("evil-N120-p98-chv12x10", 120, 545, 20, 24.526, 24.526, 1, 20.000, 2),
        ("evil-N120-p98-myc5x24", 120, 236, 48, 52.607, 48.000, 22, 48.000, 16),
        ("evil-N121-p98-myc11x11", 121, 508, 22, 26.397, 26.397, 1, 22.000, 1),
        ("evil-N125-p98-s3m25x5", 125, 873, 20, 25.000, 22.361, 1, 22.361, 5),
        ("evil-N138-p98-myc23x6", 138, 1242, 12, 15.177, 15.177, 1, 15.177, 3),
        ("evil-N150-p98-myc5x30", 150, 338, 60, 65.121, 60.000, 32, 60.000, 43),
        ("evil-N150-p98-s3m25x6", 150, 1102, 24, 30.000, 26.833, 2, 26.833, 8),
        ("evil-N154-p98-myc11x14", 154, 701, 28, 33.596, 33.596, 1, 28.000, 2),
        ("evil-N180-p98-chv12x15", 180, 944, 30, 36.788, 36.788, 1, 30.000, 5),
        ("evil-N184-p98-myc23x8", 184, 1764, 16, 20.235, 20.235, 2, 20.235, 7),
    ])
    + _rows(6, [
        ("myciel5", 47, 236, 6, 2.639, 3.093, 3, 3.468, 17, 3.510),
        ("myciel6", 95, 755, 7, 2.734, 3.253, 21, 3.622, 406, 3.534),
        ("mug88_1", 88, 146, 4, 3.000, 3.001, 3, 3.001, 1, 3.022),
        ("1_FullIns_4", 93, 593, 5, 3.124, 3.487, 3, 3.837, 23, 3.939),
        ("2_FullIns_4", 212, 1621, 6, 4.056, 4.343, 4, 4.670, 17, 4.700),
    ])
    + _rows(7, [
        ("dsjc125.1", 125, 736, 5, 4.106, 4.218, 2, 4.430, 14),
        ("dsjc250.1", 250, 3218, 8, 4.906, 4.939, 12, 5.040, 457),
        ("3_FullIns_3", 80, 346, 6, 5.016, 5.194, 1, 5.194, 1),
        ("4_FullIns_3", 114, 541, 7, 6.010, 6.010, 1, 6.309, 1),
        ("5_FullIns_3", 154, 792, 8, 7.007, 7.007, 1, 7.267, 2),
        ("Queen_8_8", 64, 728, 9, 8.000, 8.000, 1, 8.000, 7),
        ("Queen_9_9", 81, 1056, 10, 9.000, 9.000, 1, 9.000, 25),
        ("Queen_10_10", 100, 1470, 11, 10.000, 10.000, 1, 10.000, 62),
        ("G100_25", 100, 1240, None, 5.823, 5.867, 2, 6.235, 76),
        ("G150_25", 150, 2802, None, 6.864, 6.918, 6, 7.184, 529),
        ("G200_1", 200, 2047, None, 4.447, 4.473, 10, 4.600, 178),
        ("G250_1", 250, 3149, None, 4.805, 4.831, 12, 4.928, 512),
    ])
)

TABLES = tuple(sorted({r.table for r in REFERENCE}))


def table(t: int) -> list[ReferenceRecord]:
    rows = [r for r in REFERENCE if r.table == t]
    if not rows:
        raise KeyError(f"no reference table {t}; have {TABLES}")
    return rows


def lookup(name: str) -> ReferenceRecord | None:
    key = _norm(name)
    for r in REFERENCE:
        if _norm(r.name) == key:
            return r
    return None


def _norm(name: str) -> str:
    return "".join(ch for ch in name.lower() if ch.isalnum())


def checksum() -> str:
    """sha256 over a canonical JSON dump of every record."""
    blob = json.dumps([asdict(r) for r in REFERENCE], sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
