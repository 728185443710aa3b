import json
import math
import os
import sys

import numpy as np
import yaml

from src.exception.exception import CustomException, ReportWriteError


def read_yaml_file(file_path: str) -> dict:
    """
    Reads a YAML file and returns its contents as a Python dictionary.

    Args:
        file_path (str): Path to the YAML file.

    Returns:
        dict: Contents of the YAML file.
    """
    try:
        with open(file_path, "rb") as yaml_file:
            return yaml.safe_load(yaml_file)
    except Exception as e:
        raise CustomException(e, sys) from e


def write_bytes_file(file_path: str, content: bytes) -> None:
    """
    Writes raw bytes to a file, creating the parent directory if needed.

    Args:
        file_path (str): Destination file path.
        content (bytes): Data to write.

    Raises:
        ReportWriteError: If the directory or file cannot be written.
    """
    try:
        dir_path = os.path.dirname(file_path)
        if dir_path:
            os.makedirs(dir_path, exist_ok=True)
        with open(file_path, "wb") as file_obj:
            file_obj.write(content)
    except OSError as e:
        raise ReportWriteError(file_path, str(e)) from e


def json_float(value: float):
    """Map a float to a JSON-safe value; non-finite floats become strings."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def parse_json_float(value) -> float:
    """Inverse of :func:`json_float`."""
    return float(value)


def to_jsonable(obj):
    """
    Recursively convert numpy arrays, numpy scalars and floats into JSON-safe objects.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return json_float(obj)
    return obj


def dump_json_bytes(obj) -> bytes:
    """Serialize to deterministic, standard JSON bytes."""
    return (json.dumps(to_jsonable(obj), indent=2, allow_nan=False) + "\n").encode("utf-8")
