# -*- coding: utf-8 -*-
"""
Writes and reads the result tables of the sweeps

Numbers are written with 17 significant digits, so every double survives
a write and read cycle unchanged. Tables are lists of dicts, the column
order of csv files is fixed by the caller.
"""

import csv
import json
import logging
import os
from os.path import dirname, splitext

import numpy as np

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json")


def format_value(value):
    """Text form of a table entry"""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if value is None:
        return ""
    return str(value)


def _plain(value):
    # numpy scalars and arrays to json types
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def _prepare(path):
    directory = dirname(path)
    if directory != "":
        os.makedirs(directory, exist_ok=True)
    logger.info("Writing %s", path)


def write_csv(path, rows, columns):
    """
    Write rows to a csv file

    Parameters
    ----------
    path : str
        output file
    rows : list(dict)
        one dict per row, extra keys are ignored
    columns : list(str)
        the header, in order
    """
    _prepare(path)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(c)) for c in columns])


def write_json(path, data):
    """Write a dict of tables to a json file"""
    _prepare(path)
    with open(path, "w") as f:
        json.dump(_plain(data), f, indent=2)
        f.write("\n")


def sibling(path, name):
    """<stem>.<name>.csv next to path"""
    stem, _ = splitext(path)
    return f"{stem}.{name}.csv"


def write_report(path, tables, columns, fmt="csv"):
    """
    Write the tables of a step

    For csv the first table goes to path and every further table to
    <stem>.<name>.csv, for json all tables go to path keyed by name.

    Parameters
    ----------
    path : str
        output file
    tables : dict(str: list(dict))
        the tables by name, in order
    columns : dict(str: list(str))
        csv header of each table
    fmt : {"csv", "json"}, optional
        output format (default: "csv")

    Returns
    -------
    files : list(str)
        the written files
    """
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt}")
    if fmt == "json":
        write_json(path, tables)
        return [path]

    files = []
    for i, (name, rows) in enumerate(tables.items()):
        target = path if i == 0 else sibling(path, name)
        write_csv(target, rows, columns[name])
        files.append(target)
    return files


def _parse(text):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(path):
    """Read a table written by write_csv, numbers are converted back"""
    logger.info("Reading %s", path)
    with open(path, newline="") as f:
        return [{k: _parse(v) for k, v in row.items()} for row in csv.DictReader(f)]
