# /handlers/base_handlers.py

from pathlib import Path

import pandas as pd


def _read_delimited(sep: str):
    def reader(path: Path) -> pd.DataFrame:
        return pd.read_csv(path, sep=sep, skipinitialspace=True, encoding="utf-8")
    return reader


def register():
    return {
        ".csv": _read_delimited(","),
        ".data": _read_delimited(","),
        ".tsv": _read_delimited("\t"),
    }
