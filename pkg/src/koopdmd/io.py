"""Trajectory CSV and JSON model files.

Trajectory CSV: optional ``#`` comment lines, a header ``index,x1,...,xn``,
then one row per sample. A blank line starts a new trajectory. Indices are
in original units and must be evenly spaced with one spacing per dataset.

Model files are JSON. Floats are written with ``repr`` (shortest string that
round-trips), so a loaded model is bit-identical to the one saved.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .dmd import DmdModel, ModeKind, TrajectorySet
from .errors import (
    InputError,
    IrregularSpacing,
    ModelFileError,
    NonFiniteInput,
    TrajectoryTooShort,
)
from .koopman import KoopmanModel, dictionary_from_spec

SCHEMA_VERSION = 1
SPACING_RTOL = 1e-9


# trajectory CSV ----------------------------------------------------------------


def _parse_blocks(text: str, source: str):
    header = None
    blocks, current = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("#"):
            continue
        if not stripped:
            if current:
                blocks.append(current)
                current = []
            continue
        fields = next(csv.reader([stripped]))
        if header is None:
            header = [f.strip() for f in fields]
            if not header or header[0] != "index" or len(header) < 2:
                raise InputError(f"{source}:{lineno}: header must be 'index,x1,...,xn'")
            continue
        if len(fields) != len(header):
            raise InputError(
                f"{source}:{lineno}: expected {len(header)} fields, got {len(fields)}"
            )
        try:
            row = [float(f) for f in fields]
        except ValueError as exc:
            raise InputError(f"{source}:{lineno}: {exc}") from None
        if not all(math.isfinite(v) for v in row):
            raise NonFiniteInput(f"{source}:{lineno}: non-finite value")
        current.append(row)
    if current:
        blocks.append(current)
    if header is None or not blocks:
        raise InputError(f"{source}: no data rows")
    return header, [np.array(b) for b in blocks]


def _select(block: np.ndarray, wanted: np.ndarray) -> np.ndarray:
    idx = block[:, 0]
    keep = np.any(
        np.abs(idx[:, None] - wanted[None, :]) <= 1e-9 * np.maximum(1.0, np.abs(wanted)), axis=1
    )
    return block[keep]


def _spacing(idx: np.ndarray, source: str) -> float:
    gaps = np.diff(idx)
    if np.any(gaps <= 0):
        raise InputError(f"{source}: index must be strictly increasing within a trajectory")
    dk = gaps[0]
    if np.any(np.abs(gaps - dk) > SPACING_RTOL * dk):
        raise IrregularSpacing(
            f"{source}: index spacing is not uniform (gaps {sorted(set(np.round(gaps, 12).tolist()))});"
            " pick an evenly spaced subset with --select-indices"
        )
    return float((idx[-1] - idx[0]) / (idx.size - 1))


def parse_trajectories(
    texts: Sequence[tuple], select_indices: Optional[Iterable[float]] = None
) -> TrajectorySet:
    """Build a ``TrajectorySet`` from ``(source_name, csv_text)`` pairs."""
    wanted = None if select_indices is None else np.array(list(select_indices), dtype=float)
    width = None
    blocks = []
    for source, text in texts:
        header, found = _parse_blocks(text, source)
        if width is None:
            width = len(header)
        elif len(header) != width:
            raise InputError(f"{source}: state dimension differs from earlier input")
        for b in found:
            if wanted is not None:
                b = _select(b, wanted)
            if b.shape[0] < 2:
                raise TrajectoryTooShort(f"{source}: a trajectory needs at least 2 samples")
            blocks.append((source, b))
    steps = [_spacing(b[:, 0], src) for src, b in blocks]
    dk = steps[0]
    for (src, _), s in zip(blocks, steps):
        if abs(s - dk) > SPACING_RTOL * dk:
            raise IrregularSpacing(f"{src}: spacing {s!r} differs from {dk!r} in the first trajectory")
    start = float(blocks[0][1][0, 0])
    if len(blocks) > 1 and start != 0.0:
        raise InputError("with several trajectories the first must start at index 0")
    return TrajectorySet(tuple(b[:, 1:] for _, b in blocks), dk, start)


def read_trajectories(paths: Sequence[Union[str, Path]], select_indices=None):
    """Read CSV files; returns the data set and a SHA-256 digest of the raw bytes."""
    digest = hashlib.sha256()
    texts = []
    for p in paths:
        raw = Path(p).read_bytes()
        digest.update(raw)
        texts.append((str(p), raw.decode("utf-8")))
    return parse_trajectories(texts, select_indices), digest.hexdigest()


def format_trajectories(data: TrajectorySet, comments: Sequence[str] = ()) -> str:
    out = io.StringIO()
    for c in comments:
        out.write(f"# {c}\n")
    out.write(",".join(["index"] + [f"x{i + 1}" for i in range(data.n)]) + "\n")
    for t, traj in enumerate(data.trajectories):
        if t:
            out.write("\n")
        for index, row in zip(data.indices(t), traj.states):
            out.write(",".join(repr(float(v)) for v in (index, *row)) + "\n")
    return out.getvalue()


# model files -------------------------------------------------------------------


def _cpairs(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        return [[float(z.real), float(z.imag)] for z in a]
    return [_cpairs(row) for row in a]


def _from_cpairs(data) -> np.ndarray:
    arr = np.array(data, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def _enc_array(a):
    if a is None:
        return None
    a = np.asarray(a)
    out = {"shape": list(a.shape), "re": np.real(a).ravel().tolist()}
    if np.iscomplexobj(a):
        out["im"] = np.imag(a).ravel().tolist()
    return out


def _dec_array(d):
    if d is None:
        return None
    re = np.array(d["re"], dtype=float).reshape(d["shape"])
    if "im" in d:
        return re + 1j * np.array(d["im"], dtype=float).reshape(d["shape"])
    return re


def _frozen(a):
    if a is not None:
        a.setflags(write=False)
    return a


def model_to_dict(model: Union[DmdModel, KoopmanModel], provenance: Optional[dict] = None) -> dict:
    if isinstance(model, KoopmanModel):
        kind, inner, n = "koopman", model.lifted_model, model.n
    else:
        kind, inner, n = "dmd", model, model.n
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "n": n,
        "r": inner.r,
        "delta_k": inner.delta_k,
        "start_index": inner.start_index,
        "mode_kind": inner.mode_kind.value,
        "eigenvalues": _cpairs(inner.eigenvalues),
        "modes": _cpairs(inner.modes),
        "amplitudes": _cpairs(inner.amplitudes),
        "anchor": np.asarray(inner.x_init, dtype=float).tolist(),
        "svd": {
            "U": _enc_array(inner.U),
            "sigma": _enc_array(inner.sigma),
            "V": _enc_array(inner.V),
            "A_tilde": _enc_array(inner.A_tilde),
        },
        "diagnostics": dict(inner.diagnostics),
        "provenance": dict(provenance or {}),
    }
    if kind == "koopman":
        doc["p"] = model.p
        doc["dictionary"] = model.dictionary.to_spec()
    return doc


def model_from_dict(doc: dict) -> Union[DmdModel, KoopmanModel]:
    try:
        if doc["schema_version"] != SCHEMA_VERSION:
            raise ModelFileError(f"unsupported schema_version {doc['schema_version']!r}")
        kind = doc["kind"]
        if kind not in ("dmd", "koopman"):
            raise ModelFileError(f"unknown model kind {kind!r}")
        svd = doc.get("svd") or {}
        modes = _from_cpairs(doc["modes"])
        inner = DmdModel(
            n=modes.shape[0],
            r=int(doc["r"]),
            eigenvalues=_frozen(_from_cpairs(doc["eigenvalues"])),
            modes=_frozen(modes),
            amplitudes=_frozen(_from_cpairs(doc["amplitudes"])),
            delta_k=float(doc["delta_k"]),
            start_index=float(doc["start_index"]),
            mode_kind=ModeKind(doc["mode_kind"]),
            x_init=_frozen(np.array(doc["anchor"], dtype=float)),
            U=_frozen(_dec_array(svd.get("U"))),
            sigma=_frozen(_dec_array(svd.get("sigma"))),
            V=_frozen(_dec_array(svd.get("V"))),
            A_tilde=_frozen(_dec_array(svd.get("A_tilde"))),
            diagnostics=dict(doc.get("diagnostics", {})),
        )
        if inner.eigenvalues.shape != (inner.r,) or inner.modes.shape[1] != inner.r:
            raise ModelFileError("eigenvalue / mode shapes disagree with r")
        if kind == "dmd":
            return inner
        dictionary = dictionary_from_spec(doc["dictionary"], int(doc["n"]))
        if dictionary.p != inner.n:
            raise ModelFileError(f"dictionary has p = {dictionary.p}, modes have {inner.n} rows")
        return KoopmanModel(dictionary, inner)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        if isinstance(exc, InputError):
            raise
        raise ModelFileError(f"malformed model file: {exc!r}") from exc


def dumps_model(model, provenance: Optional[dict] = None) -> str:
    return json.dumps(model_to_dict(model, provenance), indent=1, allow_nan=False) + "\n"


def save_model(model, path: Union[str, Path], provenance: Optional[dict] = None) -> None:
    Path(path).write_text(dumps_model(model, provenance))


def load_model(path: Union[str, Path]):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: not valid JSON ({exc})") from exc
    return model_from_dict(doc)
