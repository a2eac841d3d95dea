import math
from abc import ABC, ABCMeta
from typing import Any


class RecordMeta(ABCMeta):
    def __init__(cls, name, bases, props):
        def check_meta_fields(cls, field_name, field_type):
            if not hasattr(cls, field_name):
                raise AttributeError(
                    f"Class `{cls.__name__}` lacks `{field_name}` class attribute"
                )
            if not getattr(cls, field_name):
                raise ValueError(
                    f"Class `{cls.__name__}` lacks `{field_name}` class attribute"
                )
            if not isinstance(getattr(cls, field_name), field_type):
                raise ValueError(
                    f"Class `{cls.__name__}` `{field_name}` class attribute must be of type {field_type}"
                )

        super().__init__(name, bases, props)

        if not ABC in bases:
            check_meta_fields(cls, "type", str)
            check_meta_fields(cls, "columns", tuple)


class Record(dict, ABC, metaclass=RecordMeta):
    """One CSV row. `type` names the file, `columns` fixes the header order."""

    __final_fields__: list[str] = ["type", "columns"]

    type: str = None
    columns: tuple[str, ...] = ()

    def __init__(self, **kwargs):
        unknown = set(kwargs) - set(self.columns)
        if unknown:
            raise ValueError(
                f"`{self.__class__.__name__}` got unknown columns {sorted(unknown)}"
            )

        for column in self.columns:
            super().__setitem__(column, kwargs.get(column))

    def __getattr__(self, name: str) -> Any:
        try:
            return self[name]
        except KeyError:
            raise AttributeError(name) from None

    def __setitem__(self, key, value):
        if key in self.__final_fields__:
            raise ValueError(f"Not allowed to set attribute {key}")
        if key not in self.columns:
            raise ValueError(f"`{self.__class__.__name__}` has no column {key}")
        super().__setitem__(key, value)

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} {super().__repr__()}>"

    def as_row(self) -> list[str]:
        return [encode_cell(self[column]) for column in self.columns]


def encode_cell(value) -> str:
    """Shortest round-trip text for floats, empty cell for missing values."""
    if value is None:
        return ""
    if hasattr(value, "item"):
        value = value.item()
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return "nan" if math.isnan(value) else repr(value)
    return str(value)
