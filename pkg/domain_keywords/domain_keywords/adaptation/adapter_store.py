"""Adapter weights file: a JSON object with `version`, `dimension`, `model_name`
and the four matrices as row-major nested arrays written with 17 significant
digits, so loading reproduces every float64 bit for bit."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..constants import ADAPTER_FORMAT_VERSION
from ..exceptions import DimensionMismatch, ParseError, VersionMismatch
from ..handlers import throw
from .few_shot import WEIGHT_NAMES, AdapterWeights


def _format_matrix(matrix: np.ndarray) -> str:
    rows = (
        "[" + ", ".join(format(float(value), ".17g") for value in row) + "]"
        for row in matrix
    )
    return "[\n    " + ",\n    ".join(rows) + "\n  ]"


def dump_adapter(w: AdapterWeights) -> str:
    """Serializes the adapter into the weights file text"""
    fields = [
        f'  "version": {ADAPTER_FORMAT_VERSION}',
        f'  "dimension": {w.dimension}',
        f'  "model_name": {json.dumps(w.model_name)}',
    ]
    fields.extend(
        f'  "{name}": {_format_matrix(matrix)}' for name, matrix in w.matrices().items()
    )

    return "{\n" + ",\n".join(fields) + "\n}\n"


def save_adapter(w: AdapterWeights, path: str | Path) -> None:
    """Writes the adapter weights file

    Args:
        w (AdapterWeights): The weights to store
        path (str | Path): Destination file
    """
    try:
        Path(path).write_text(dump_adapter(w), encoding="utf-8")

    except OSError as error:
        throw(f"Could not write adapter to {path}: {error}", ParseError)


def parse_adapter(text: str, source: str = "<adapter>") -> AdapterWeights:
    """Parses the weights file text

    Args:
        text (str): The file content
        source (str, optional): Name used in error messages

    Returns:
        AdapterWeights: The stored weights
    """
    try:
        data = json.loads(text)

    except json.JSONDecodeError as error:
        throw(f"{source} is not valid JSON: {error}", ParseError)

    if not isinstance(data, dict):
        throw(f"{source} must hold a JSON object", ParseError)

    version = data.get("version")
    if version != ADAPTER_FORMAT_VERSION or isinstance(version, bool):
        throw(
            f"{source} has format version {version!r}; this build reads version {ADAPTER_FORMAT_VERSION}",
            VersionMismatch,
        )

    dimension = data.get("dimension")
    if not isinstance(dimension, int) or dimension <= 0:
        throw(f"{source} has an invalid dimension {dimension!r}", ParseError)

    matrices = {}
    for name in WEIGHT_NAMES:
        if name not in data:
            throw(f"{source} is missing matrix {name}", ParseError)

        try:
            matrix = np.asarray(data[name], dtype=np.float64)

        except (TypeError, ValueError):
            throw(f"{source}: matrix {name} must be a nested array of numbers", ParseError)

        if matrix.shape != (dimension, dimension):
            throw(
                f"{source}: matrix {name} has shape {matrix.shape}, expected {dimension}x{dimension}",
                DimensionMismatch,
            )

        matrices[name] = matrix

    model_name = data.get("model_name")
    if not isinstance(model_name, str):
        throw(f"{source} has an invalid model_name", ParseError)

    return AdapterWeights(**matrices, model_name=model_name)


def load_adapter(path: str | Path) -> AdapterWeights:
    """Reads an adapter weights file

    Args:
        path (str | Path): The file written by save_adapter

    Returns:
        AdapterWeights: The stored weights
    """
    try:
        text = Path(path).read_text(encoding="utf-8")

    except (OSError, UnicodeDecodeError) as error:
        throw(f"Could not read adapter {path}: {error}", ParseError)

    return parse_adapter(text, source=str(path))
