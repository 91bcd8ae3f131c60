"""Run configuration for the command-line tool."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .exceptions import ValidationError
from .rcf import RcfParams
from .thermal import (
    KAPPA_BULK_GE,
    REFERENCE_WAVELENGTH_NM,
    load_absorption_table,
    normalize_absorption_table,
)


@dataclass(frozen=True)
class RunConfig:
    """Parameters shared by all subcommands.

    ``q_cond`` and ``dimension_ratio`` (heat-path L/A) are recorded for
    documentation only: both cancel in the bulk-relative conductivity.
    """

    params: RcfParams = field(default_factory=RcfParams)
    absorption_table: dict = field(default_factory=load_absorption_table)
    gamma_coeff: float = 1.0
    kappa_bulk: float = KAPPA_BULK_GE
    output_dir: str = "."
    reference_wavelength_nm: float = REFERENCE_WAVELENGTH_NM
    q_cond: Optional[float] = None
    dimension_ratio: Optional[float] = None

    def __post_init__(self):
        if not self.kappa_bulk > 0:
            raise ValidationError("kappa_bulk must be > 0")
        if not self.gamma_coeff > 0:
            raise ValidationError("gamma_coeff must be > 0")

    def replace(self, **changes) -> "RunConfig":
        return replace(self, **changes)


def _resolve(base: Path, value: str) -> Path:
    p = Path(value)
    path = p if p.is_absolute() else base / p
    if not path.exists():
        raise ValidationError(f"referenced file not found: {path}")
    return path


def load_config(path=None) -> RunConfig:
    """Read a JSON run configuration.

    ``params`` and ``absorption_table`` may be inline objects or paths
    (relative to the config file) to JSON documents. Without ``path`` all
    defaults apply.
    """
    if path is None:
        return RunConfig()
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"config file not found: {path}")
    data = json.loads(path.read_text(encoding="utf-8"))
    base = path.parent
    kwargs = {}
    unknown = set(data) - set(RunConfig.__dataclass_fields__)
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")

    params = data.pop("params", None)
    if isinstance(params, str):
        params = json.loads(_resolve(base, params).read_text(encoding="utf-8"))
    if params is not None:
        kwargs["params"] = RcfParams.from_dict(params)

    table = data.pop("absorption_table", None)
    if isinstance(table, str):
        table = load_absorption_table(_resolve(base, table))
    elif table is not None:
        table = normalize_absorption_table(table)
    if table is not None:
        kwargs["absorption_table"] = table

    kwargs.update(data)
    return RunConfig(**kwargs)
