"""Trace and calibration containers and their file formats."""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from ..errors import AmineScreenError

TRACE_HEADER = ("time_s", "ch_4_3um", "ch_3_9um")


class TraceError(AmineScreenError, ValueError):
    pass


@dataclass(frozen=True)
class SignalTrace:
    """Time stamps (s) with raw 4.3 um signal and 3.9 um reference readings."""

    t: np.ndarray
    ch_signal: np.ndarray
    ch_reference: np.ndarray

    def __post_init__(self):
        arrays = [np.asarray(a, dtype=float) for a in (self.t, self.ch_signal, self.ch_reference)]
        n = len(arrays[0])
        if any(a.ndim != 1 or len(a) != n for a in arrays):
            raise TraceError("trace channels must be 1-D and of equal length")
        if n < 10:
            raise TraceError(f"trace needs at least 10 samples, got {n}")
        if np.any(np.diff(arrays[0]) <= 0):
            raise TraceError("time stamps must be strictly increasing")
        if not all(np.all(np.isfinite(a)) for a in arrays):
            raise TraceError("trace contains non-finite values")
        for name, a in zip(("t", "ch_signal", "ch_reference"), arrays):
            object.__setattr__(self, name, a)

    def __len__(self):
        return len(self.t)

    def save(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TRACE_HEADER)
            for row in zip(self.t, self.ch_signal, self.ch_reference):
                w.writerow([repr(float(v)) for v in row])

    @classmethod
    def load(cls, path) -> "SignalTrace":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = tuple(h.strip() for h in next(reader, ()))
            if header != TRACE_HEADER:
                raise TraceError(f"{path}: expected header {','.join(TRACE_HEADER)}, got {','.join(header)}")
            rows = [r for r in reader if r and any(c.strip() for c in r)]
        try:
            data = np.array(rows, dtype=float)
        except ValueError as exc:
            raise TraceError(f"{path}: non-numeric value ({exc})") from None
        if data.ndim != 2 or data.shape[1] != 3:
            raise TraceError(f"{path}: every row needs three values")
        return cls(data[:, 0], data[:, 1], data[:, 2])


@dataclass(frozen=True)
class Calibration:
    """Modified Beer-Lambert parameters and run conditions.

    ``A = a * (1 - exp(-b * C**c))`` links absorbance fraction ``A = 1 - T``
    to the outlet CO2 volume fraction ``C``.  ``q_sccm`` is the metered flow,
    ``f_o`` the supply CO2 fraction.  ``zero_T`` is the raw signal/reference
    ratio at zero CO2.  ``sat_T``, the normalised transmission at ``f_o``, is
    derived from (a, b, c) when not given; when given and different, measured
    absorbances are rescaled so that ``1 - sat_T`` maps onto ``f_o``.
    """

    a: float = 0.9
    b: float = 12.0
    c: float = 1.1
    f_o: float = 0.2
    q_sccm: float = 10.0
    T_gas_K: float = 298.15
    P_atm: float = 1.0
    zero_T: float = 1.0
    sat_T: float | None = None
    delay_min: float = 0.16

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.c > 0):
            raise ValueError("Beer-Lambert parameters a, b, c must be positive")
        if not 0 < self.f_o <= 1:
            raise ValueError("f_o must lie in (0, 1]")
        if self.q_sccm <= 0 or self.T_gas_K <= 0 or self.P_atm <= 0 or self.zero_T <= 0:
            raise ValueError("q_sccm, T_gas_K, P_atm and zero_T must be positive")
        if self.delay_min < 0:
            raise ValueError("delay_min must be non-negative")
        if self.sat_T is not None and not 0 < self.sat_T < 1:
            raise ValueError("sat_T must lie in (0, 1)")

    @property
    def model_sat_T(self) -> float:
        return 1.0 - self.a * (1.0 - np.exp(-self.b * self.f_o**self.c))

    def save(self, path) -> None:
        lines = [f"{k}={v}" for k, v in asdict(self).items() if v is not None]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "Calibration":
        names = {f.name for f in fields(cls)}
        values = {}
        for n, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in names:
                raise ValueError(f"{path}:{n}: expected one of {sorted(names)} as key=value")
            try:
                values[key] = float(value)
            except ValueError:
                raise ValueError(f"{path}:{n}: {key} is not a number") from None
        return cls(**values)
