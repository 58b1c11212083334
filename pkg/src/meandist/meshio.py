"""Minimal OFF / OBJ triangle mesh reader and OFF writer."""
from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)


class MeshFormatError(ValueError):
    pass


def _tokens(text: str):
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            yield line


def read_off(path) -> tuple[np.ndarray, np.ndarray]:
    lines = list(_tokens(Path(path).read_text()))
    if not lines:
        raise MeshFormatError(f"{path}: empty file")
    head = lines[0].split()
    if head[0] != "OFF":
        raise MeshFormatError(f"{path}: missing OFF header")
    rest = head[1:]
    body = lines[1:]
    if not rest:
        rest, body = body[0].split(), body[1:]
    try:
        nv, nf = int(rest[0]), int(rest[1])
    except (IndexError, ValueError) as exc:
        raise MeshFormatError(f"{path}: bad OFF counts line") from exc
    if len(body) < nv + nf:
        raise MeshFormatError(f"{path}: expected {nv} vertices and {nf} faces")
    verts = np.array([[float(x) for x in body[i].split()[:3]] for i in range(nv)])
    faces = []
    for line in body[nv:nv + nf]:
        parts = line.split()
        k = int(parts[0])
        if k != 3:
            raise MeshFormatError(f"{path}: only triangular faces are supported (found a {k}-gon)")
        faces.append([int(x) for x in parts[1:4]])
    return verts, np.array(faces, dtype=np.int64).reshape(-1, 3)


def read_obj(path) -> tuple[np.ndarray, np.ndarray]:
    verts, faces = [], []
    skipped = set()
    for line in _tokens(Path(path).read_text()):
        parts = line.split()
        tag = parts[0]
        try:
            if tag == "v":
                verts.append([float(x) for x in parts[1:4]])
                continue
            if tag == "f":
                idx = [int(p.split("/")[0]) for p in parts[1:]]
        except ValueError as exc:
            raise MeshFormatError(f"{path}: malformed {tag!r} record: {line!r}") from exc
        if tag == "f":
            if len(idx) != 3:
                raise MeshFormatError(f"{path}: only triangular faces are supported")
            # OBJ is 1-based; negative indices count from the end
            faces.append([i - 1 if i > 0 else len(verts) + i for i in idx])
        else:
            skipped.add(tag)
    if skipped:
        logger.warning("%s: ignored OBJ records %s", path, ", ".join(sorted(skipped)))
    return np.array(verts, dtype=float).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3)


def read_mesh(path) -> tuple[np.ndarray, np.ndarray]:
    suffix = Path(path).suffix.lower()
    if suffix == ".off":
        return read_off(path)
    if suffix == ".obj":
        return read_obj(path)
    raise MeshFormatError(f"{path}: unsupported mesh format {suffix!r} (use .off or .obj)")


def write_off(path, vertices: np.ndarray, faces: np.ndarray) -> None:
    vertices = np.asarray(vertices, dtype=float)
    if vertices.shape[1] == 2:
        vertices = np.column_stack([vertices, np.zeros(len(vertices))])
    lines = ["OFF", f"{len(vertices)} {len(faces)} 0"]
    lines += [" ".join(repr(float(x)) for x in v) for v in vertices]
    lines += [f"3 {a} {b} {c}" for a, b, c in np.asarray(faces)]
    Path(path).write_text("\n".join(lines) + "\n")
