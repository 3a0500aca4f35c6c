"""Serialization utilities for residue maps, reports and experiment tables."""

import csv
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, TextIO, Tuple, Union

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .exceptions import ProcessingError


class ReportEncoder(json.JSONEncoder):
    """JSON encoder that handles complex numbers, fractions and numpy scalars."""

    def default(self, obj):
        if isinstance(obj, complex):
            return {"__complex__": [obj.real, obj.imag]}
        elif isinstance(obj, Fraction):
            return {"__fraction__": f"{obj.numerator}/{obj.denominator}"}
        elif isinstance(obj, np.integer):
            return int(obj)
        elif isinstance(obj, np.floating):
            return float(obj)
        elif isinstance(obj, np.ndarray):
            return obj.tolist()
        return super().default(obj)


def report_decoder(dct: Dict[str, Any]) -> Any:
    """JSON decoder matching ReportEncoder."""
    if "__complex__" in dct:
        real, imag = dct["__complex__"]
        return complex(real, imag)
    elif "__fraction__" in dct:
        return Fraction(dct["__fraction__"])
    return dct


def serialize_report(data: Any) -> str:
    """
    Serialize report data to a JSON string.

    Raises:
        ProcessingError: If serialization fails
    """
    try:
        return json.dumps(data, cls=ReportEncoder, ensure_ascii=False, sort_keys=True)
    except Exception as e:
        raise ProcessingError(f"Failed to serialize data: {e}")


def deserialize_report(data: str) -> Any:
    """
    Deserialize a JSON string written by serialize_report.

    Raises:
        ProcessingError: If deserialization fails
    """
    try:
        return json.loads(data, object_hook=report_decoder)
    except Exception as e:
        raise ProcessingError(f"Failed to deserialize data: {e}")


def serialize_pydantic_model(model: Any) -> str:
    """
    Serialize a Pydantic model to JSON string.

    Args:
        model: The Pydantic model instance

    Returns:
        JSON string representation

    Raises:
        ProcessingError: If serialization fails
    """
    try:
        return model.model_dump_json()
    except Exception as e:
        raise ProcessingError(f"Failed to serialize Pydantic model: {e}")


def deserialize_pydantic_model(model_class: type, data: str) -> Any:
    """
    Deserialize JSON string to Pydantic model.

    Args:
        model_class: The Pydantic model class
        data: JSON string data

    Returns:
        Pydantic model instance

    Raises:
        ProcessingError: If deserialization fails
    """
    try:
        return model_class.model_validate_json(data)
    except Exception as e:
        raise ProcessingError(f"Failed to deserialize Pydantic model: {e}")


def _data_lines(text: str) -> Iterable[Tuple[int, str]]:
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if line:
            yield number, line


def format_residue_map(per_prime: Dict[int, Sequence[int]]) -> str:
    """One line per prime: ``p: z1 z2 ... zd``."""
    return "".join(
        f"{p}: {' '.join(str(component) for component in z)}\n" for p, z in sorted(per_prime.items())
    )


def format_certificates(certificates: Dict[int, Tuple[float, float]]) -> str:
    """One line per prime: ``p: sum=<decimal> threshold=<decimal>``."""
    return "".join(
        f"{p}: sum={value!r} threshold={threshold!r}\n"
        for p, (value, threshold) in sorted(certificates.items())
    )


def parse_residue_map(text: str) -> Tuple[Dict[int, Tuple[int, ...]], Dict[int, Tuple[float, float]]]:
    """
    Parse residue lines and optional certificate lines.

    A trailing block of bare integers, as written by ``format_composed``, is
    read as the composed vector and must reduce to every listed residue.

    Returns:
        (residues, certificates) keyed by prime

    Raises:
        ProcessingError: If a line is malformed, a prime repeats or the composed
            vector disagrees with the residues
    """
    residues: Dict[int, Tuple[int, ...]] = {}
    certificates: Dict[int, Tuple[float, float]] = {}
    composed: List[int] = []
    for number, line in _data_lines(text):
        head, sep, body = line.partition(":")
        try:
            if not sep:
                if " " in line or "\t" in line:
                    raise ValueError("missing ':'")
                composed.append(int(line))
                continue
            if composed:
                raise ValueError("residue line after the composed vector")
            p = int(head)
            fields = body.split()
            if fields and "=" in fields[0]:
                values = dict(field.split("=", 1) for field in fields)
                target = certificates
                entry: Any = (float(values["sum"]), float(values["threshold"]))
            else:
                target = residues
                entry = tuple(int(field) for field in fields)
                if not entry:
                    raise ValueError("empty residue vector")
        except (ValueError, KeyError) as e:
            raise ProcessingError(f"Malformed residue line {number}: {line!r} ({e})")
        if p in target:
            raise ProcessingError(f"Duplicate entry for prime {p} on line {number}")
        target[p] = entry
    if composed:
        _check_composed(composed, residues)
    return residues, certificates


def _check_composed(composed: Sequence[int], residues: Dict[int, Tuple[int, ...]]) -> None:
    for p, z in sorted(residues.items()):
        if len(z) != len(composed):
            raise ProcessingError(f"Composed vector has {len(composed)} components, prime {p} has {len(z)}")
        if tuple(component % p for component in composed) != z:
            raise ProcessingError(f"Composed vector does not reduce to the residues of prime {p}")


def format_composed(z: Sequence[int]) -> str:
    """Composed big integers, one decimal per line."""
    return "".join(f"{component}\n" for component in z)


def parse_coefficient_file(text: str) -> Dict[Tuple[int, ...], complex]:
    """
    Parse Fourier coefficients from lines ``h1 ... hd  re im``.

    Raises:
        ProcessingError: If lines are malformed or dimensions disagree
    """
    coefficients: Dict[Tuple[int, ...], complex] = {}
    dimension = None
    for number, line in _data_lines(text):
        fields = line.split()
        try:
            if len(fields) < 3:
                raise ValueError("need at least one frequency and two coefficient parts")
            h = tuple(int(field) for field in fields[:-2])
            value = complex(float(fields[-2]), float(fields[-1]))
        except ValueError as e:
            raise ProcessingError(f"Malformed coefficient line {number}: {line!r} ({e})")
        if dimension is None:
            dimension = len(h)
        elif len(h) != dimension:
            raise ProcessingError(f"Line {number} has dimension {len(h)}, expected {dimension}")
        coefficients[h] = coefficients.get(h, 0j) + value
    if not coefficients:
        raise ProcessingError("Coefficient file contains no modes")
    return coefficients


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Load a key-value configuration file (TOML syntax).

    Raises:
        ProcessingError: If the file cannot be read or parsed
    """
    try:
        with open(path, "rb") as handle:
            return tomllib.load(handle)
    except (OSError, tomllib.TOMLDecodeError) as e:
        raise ProcessingError(f"Failed to read configuration {path}: {e}")


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], stream: TextIO) -> None:
    """Write rows with deterministic cell formatting."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(value) for value in row])


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    write_csv(header, rows, buffer)
    return buffer.getvalue()


def read_csv(text: str) -> List[Dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))
