"""JSON/CSV serialization of configs, sets, and emitted artifacts.

Matrices are stored row-major as nested lists; floats in CSV files are
printed with 17 significant digits so the round trip is lossless.
Emitted files contain no timestamps, so identical config and seed give
byte-identical output.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .harness import ExperimentConfig, LtiSystem
from .sets import ConstrainedPolyZonotope, Zonotope

PROJECTION_HEADER = ["set_label", "k", "dim_i", "dim_j", "xi", "xj"]
WIDTHS_HEADER = ["k", "coord", "enclosure_width_a", "enclosure_width_b",
                 "support_width_a", "support_width_b"]


def _mat(a) -> list:
    return np.asarray(a).tolist()


def zonotope_to_dict(Z: Zonotope) -> dict:
    return {"c": _mat(Z.c), "G": _mat(Z.G)}


def zonotope_from_dict(d: dict) -> Zonotope:
    return Zonotope(np.asarray(d["c"], dtype=float),
                    np.asarray(d["G"], dtype=float))


def cpz_to_dict(P: ConstrainedPolyZonotope) -> dict:
    return {"c": _mat(P.c), "G": _mat(P.G), "E": _mat(P.E), "A": _mat(P.A),
            "b": _mat(P.b), "R": _mat(P.R), "id": _mat(P.id)}


def cpz_from_dict(d: dict) -> ConstrainedPolyZonotope:
    p = len(d["id"])
    a = np.asarray(d["A"], dtype=float)
    r = np.asarray(d["R"], dtype=np.int64)
    if a.size == 0:
        a = a.reshape(0, 0)
    if r.size == 0:
        r = r.reshape(p, 0)
    e = np.asarray(d["E"], dtype=np.int64)
    if e.size == 0:
        e = e.reshape(p, len(np.asarray(d["G"])[0]) if np.asarray(d["G"]).size else 0)
    return ConstrainedPolyZonotope(
        np.asarray(d["c"], dtype=float), np.asarray(d["G"], dtype=float),
        e, a, np.asarray(d["b"], dtype=float), r,
        np.asarray(d["id"], dtype=np.int64))


def config_to_dict(cfg: ExperimentConfig) -> dict:
    return {
        "system": {"Phi": _mat(cfg.system.Phi), "Gamma": _mat(cfg.system.Gamma)},
        "x0": cpz_to_dict(cfg.x0),
        "input_set": zonotope_to_dict(cfg.input_set),
        "noise_set": zonotope_to_dict(cfg.noise_set),
        "horizon": cfg.horizon,
        "offline_length": cfg.offline_length,
        "online_lengths": list(cfg.online_lengths),
        "seed": cfg.seed,
        "samples_per_set": cfg.samples_per_set,
        "max_generators": cfg.max_generators,
        "data_x0": None if cfg.data_x0 is None else _mat(cfg.data_x0),
    }


def config_from_dict(d: dict) -> ExperimentConfig:
    return ExperimentConfig(
        system=LtiSystem(np.asarray(d["system"]["Phi"], dtype=float),
                         np.asarray(d["system"]["Gamma"], dtype=float)),
        x0=cpz_from_dict(d["x0"]),
        input_set=zonotope_from_dict(d["input_set"]),
        noise_set=zonotope_from_dict(d["noise_set"]),
        horizon=int(d.get("horizon", 4)),
        offline_length=int(d.get("offline_length", 6)),
        online_lengths=tuple(d.get("online_lengths", [6])),
        seed=int(d.get("seed", 0)),
        samples_per_set=int(d.get("samples_per_set", 5000)),
        max_generators=int(d.get("max_generators", 300_000)),
        data_x0=None if d.get("data_x0") is None
        else np.asarray(d["data_x0"], dtype=float),
    )


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


def save_config(cfg: ExperimentConfig, path):
    write_json(path, config_to_dict(cfg))


def write_json(path, obj):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_projection_csv(path, rows):
    """Rows are (set_label, k, dim_i, dim_j, xi, xj) tuples."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PROJECTION_HEADER)
        for label, k, i, j, xi, xj in rows:
            writer.writerow([label, k, i, j, _fmt(xi), _fmt(xj)])


def write_widths_csv(path, rows):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(WIDTHS_HEADER)
        for r in rows:
            writer.writerow([r["k"], r["coord"],
                             _fmt(r["enclosure_width_a"]),
                             _fmt(r["enclosure_width_b"]),
                             _fmt(r["support_width_a"]),
                             _fmt(r["support_width_b"])])
