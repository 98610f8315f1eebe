# Location: src/latgauge/storage.py
import io
import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from latgauge.errors import KernelCacheError
from latgauge.lattice import GridSpec, ScalarField

logger = logging.getLogger(__name__)

KERNEL_MAGIC = b"LGK1"
KERNEL_HEADER = np.dtype([("magic", "S4"), ("n", "<u4"), ("a", "<f8"), ("policy", "u1")])
POLICY_CODES = {"exclude": 0}


def load_json(path: Path, default=None) -> dict | None:
    """Load JSON from a file, with optional default."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError):
        return default


def save_json(path: Path, data: dict) -> None:
    """Save JSON to a file, creating parent folders."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=2)
        f.write("\n")


# ---------- field documents ----------


class SiteValue(BaseModel):
    i: int
    j: int
    value: float


class FieldDocument(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    n: int = Field(alias="N", ge=3)
    a: float = Field(gt=0)
    values: list[SiteValue]

    @model_validator(mode="after")
    def _complete(self):
        if len(self.values) != self.n * self.n:
            raise ValueError(f"Expected {self.n * self.n} site values, got {len(self.values)}")
        return self

    @classmethod
    def from_field(cls, f: ScalarField) -> "FieldDocument":
        rows = [
            SiteValue(i=i, j=j, value=float(f.values[i, j])) for i, j in f.grid.sites()
        ]
        return cls(N=f.grid.n, a=f.grid.spacing, values=rows)

    def to_field(self) -> ScalarField:
        grid = GridSpec(self.n, self.a)
        arr = np.zeros(grid.shape)
        for row in self.values:
            arr[row.i % grid.n, row.j % grid.n] = row.value
        return ScalarField(grid, arr)


def field_to_json(f: ScalarField) -> str:
    # json.dumps writes floats with repr, the shortest string that round-trips
    return json.dumps(FieldDocument.from_field(f).model_dump(by_alias=True), indent=2)


def field_from_json(raw: str) -> ScalarField:
    return FieldDocument(**json.loads(raw)).to_field()


def field_to_csv(f: ScalarField) -> str:
    i, j = np.indices(f.grid.shape)
    rows = pd.DataFrame({"i": i.ravel(), "j": j.ravel(), "value": f.values.ravel()})
    buf = io.StringIO()
    buf.write("N,a\n")
    buf.write(f"{f.grid.n},{f.grid.spacing!r}\n")
    rows.to_csv(buf, index=False, lineterminator="\n")
    return buf.getvalue()


def field_from_csv(raw: str) -> ScalarField:
    lines = raw.splitlines()
    if len(lines) < 3 or lines[0].strip() != "N,a":
        raise ValueError("Field CSV must start with an 'N,a' header line")
    n_text, a_text = lines[1].split(",")
    rows = pd.read_csv(io.StringIO("\n".join(lines[2:])), float_precision="round_trip")
    return FieldDocument(
        N=int(n_text),
        a=float(a_text),
        values=[
            SiteValue(i=int(r.i), j=int(r.j), value=float(r.value))
            for r in rows.itertuples(index=False)
        ],
    ).to_field()


def save_field(path: Path, f: ScalarField) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = field_to_csv(f) if path.suffix.lower() == ".csv" else field_to_json(f)
    path.write_text(text, encoding="utf-8")


def load_field(path: Path) -> ScalarField:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return field_from_csv(text) if path.suffix.lower() == ".csv" else field_from_json(text)


# ---------- series ----------


def write_series(path: Path, frame: pd.DataFrame) -> None:
    """Write a sweep table as CSV; column order is the frame's."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")


# ---------- kernel cache ----------


def kernel_cache_path(cache_dir: Path, grid: GridSpec, policy: str = "exclude") -> Path:
    return Path(cache_dir) / f"kernels_n{grid.n}_a{grid.spacing.hex()}_{policy}.lgk"


def write_kernel_cache(
    path: Path, grid: GridSpec, g_values: np.ndarray, d_values: np.ndarray, policy: str = "exclude"
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = np.array(
        [(KERNEL_MAGIC, grid.n, grid.spacing, POLICY_CODES[policy])], dtype=KERNEL_HEADER
    )
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as f:
        f.write(header.tobytes())
        f.write(np.ascontiguousarray(g_values, dtype="<f8").tobytes())
        f.write(np.ascontiguousarray(d_values, dtype="<f8").tobytes())
    tmp.replace(path)


def read_kernel_cache(
    path: Path, grid: GridSpec, policy: str = "exclude"
) -> tuple[np.ndarray, np.ndarray]:
    """Read (G, D) for `grid`; raise KernelCacheError on any mismatch or truncation."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise KernelCacheError(f"Cannot read kernel cache {path}: {exc}") from exc

    size = grid.n * grid.n
    expected = KERNEL_HEADER.itemsize + 2 * size * 8
    if len(raw) != expected:
        raise KernelCacheError(f"Kernel cache {path} has {len(raw)} bytes, expected {expected}")

    header = np.frombuffer(raw, dtype=KERNEL_HEADER, count=1)[0]
    if header["magic"] != KERNEL_MAGIC:
        raise KernelCacheError(f"Kernel cache {path} has bad magic {header['magic']!r}")
    if (
        int(header["n"]) != grid.n
        or float(header["a"]) != grid.spacing
        or int(header["policy"]) != POLICY_CODES[policy]
    ):
        raise KernelCacheError(f"Kernel cache {path} was written for another grid")

    body = np.frombuffer(raw, dtype="<f8", offset=KERNEL_HEADER.itemsize)
    if not np.all(np.isfinite(body)):
        raise KernelCacheError(f"Kernel cache {path} holds non-finite values")
    g_values = body[:size].reshape(grid.shape).astype(np.float64)
    d_values = body[size:].reshape(grid.shape).astype(np.float64)
    return g_values, d_values
