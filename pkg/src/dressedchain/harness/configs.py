"""Locate the regression and oracle configs shipped with the package."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..model import ValidationError


def _root() -> Path:
    return Path(str(resources.files("dressedchain") / "configs"))


def shipped_configs() -> list[str]:
    """Names (without ``.cfg``) of all shipped experiment configs."""
    return sorted(p.stem for p in _root().glob("*.cfg"))


def config_path(name: str) -> Path:
    """Path of a shipped config (``"fig4b"``) or device file (``"devices/josephson_example.ini"``)."""
    path = _root() / (name if "." in name else f"{name}.cfg")
    if not path.exists():
        raise ValidationError(f"no shipped config {name!r}; available: {shipped_configs()}")
    return path
