from pathlib import Path
from typing import Any, Iterable, Union


SIGNIFICANT_DIGITS = 15
FLOAT_FORMAT = f"%.{SIGNIFICANT_DIGITS}g"


def format_number(value: float) -> float:
    return float(f"{value:.{SIGNIFICANT_DIGITS}g}")


def round_floats(value: Any) -> Any:
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return format_number(value)
    if isinstance(value, dict):
        return {key: round_floats(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_floats(item) for item in value]
    return value


def join_ints(values: Iterable[int]) -> str:
    return ",".join(str(int(v)) for v in values)


def companion_path(path: Union[str, Path], suffix: str) -> Path:
    """figure4.csv + "_brace" -> figure4_brace.csv"""
    path = Path(path)
    if not suffix:
        return path
    return path.with_name(f"{path.stem}{suffix}{path.suffix}")
