# array_types.py
# numpy-backed field types: validated from nested lists, dumped back to lists.
from typing import Annotated

import numpy as np
from pydantic import BeforeValidator, PlainSerializer, WithJsonSchema


def _frozen(dtype):
    def convert(value):
        arr = np.array(value, dtype=dtype)
        arr.setflags(write=False)
        return arr
    return convert


def _to_list(value: np.ndarray) -> list:
    return value.tolist()


_dump = PlainSerializer(_to_list, return_type=list)

Vector = Annotated[
    np.ndarray,
    BeforeValidator(_frozen(float)),
    _dump,
    WithJsonSchema({"type": "array", "items": {"type": "number"}}),
]

Matrix = Annotated[
    np.ndarray,
    BeforeValidator(_frozen(float)),
    _dump,
    WithJsonSchema({"type": "array", "items": {"type": "array", "items": {"type": "number"}}}),
]

IntVector = Annotated[
    np.ndarray,
    BeforeValidator(_frozen(int)),
    _dump,
    WithJsonSchema({"type": "array", "items": {"type": "integer"}}),
]

BoolVector = Annotated[
    np.ndarray,
    BeforeValidator(_frozen(bool)),
    _dump,
    WithJsonSchema({"type": "array", "items": {"type": "boolean"}}),
]
