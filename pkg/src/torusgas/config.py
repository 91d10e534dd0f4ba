"""Flat key/value run configurations for the command-line client.

A config file holds one ``key = value`` pair per line ('#' starts a
comment).  The client turns it into JSON payloads for the service; all
numeric validation happens there, but structural problems (missing keys,
unparseable numbers, absent table files) are reported here with the field
name, so the CLI can exit with a config error naming it.
"""

from __future__ import annotations

import os
from typing import Dict, List, Optional

from .errors import ConfigurationError


def parse_kv_file(path: str) -> Dict[str, str]:
    if not os.path.exists(path):
        raise ConfigurationError("config", f"file not found: {path}")
    out: Dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError("config", f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _get(cfg, key, cast, default=None, required=False):
    if key not in cfg:
        if required:
            raise ConfigurationError(key, "missing required key")
        return default
    try:
        return cast(cfg[key])
    except (TypeError, ValueError):
        raise ConfigurationError(key, f"cannot parse {cfg[key]!r}") from None


def _int_list(text: str) -> List[int]:
    return [int(part) for part in text.replace(",", " ").split()]


def system_payload(cfg: Dict[str, str]) -> dict:
    payload = {
        "n": _get(cfg, "n", int, required=True),
        "d": _get(cfg, "d", int, required=True),
        "box_length": _get(cfg, "box_length", float, required=True),
        "beta": _get(cfg, "beta", float, required=True),
        "statistics": _get(cfg, "statistics", str, default="bose"),
    }
    lam = _get(cfg, "lambda_beta", float)
    mass = _get(cfg, "mass", float)
    if (lam is None) == (mass is None):
        raise ConfigurationError("lambda_beta", "set exactly one of lambda_beta or mass")
    if lam is not None:
        payload["lambda_beta"] = lam
    else:
        payload["mass"] = mass
        payload["hbar"] = _get(cfg, "hbar", float, default=1.0)
    return payload


def potential_payload(cfg: Dict[str, str]) -> dict:
    kind = _get(cfg, "potential.kind", str, default="zero").lower()
    if kind == "zero":
        return {"kind": "zero"}
    if kind == "gaussian":
        return {
            "kind": "gaussian",
            "strength": _get(cfg, "potential.strength", float, required=True),
            "range": _get(cfg, "potential.range", float, required=True),
        }
    if kind == "tabulated":
        path = _get(cfg, "potential.table", str, required=True)
        if not os.path.exists(path):
            raise ConfigurationError("potential.table", f"file not found: {path}")
        entries = []
        with open(path) as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) < 2:
                    raise ConfigurationError("potential.table",
                                             f"{path}:{lineno}: expected 'z_1 ... z_d value'")
                try:
                    entries.append([int(p) for p in parts[:-1]] + [float(parts[-1])])
                except ValueError:
                    raise ConfigurationError("potential.table",
                                             f"{path}:{lineno}: bad number") from None
        return {"kind": "tabulated", "entries": entries}
    raise ConfigurationError("potential.kind", f"unknown kind {kind!r}")


def policy_payload(cfg: Dict[str, str]) -> dict:
    payload = {}
    for key, cast in (("alpha_max", int), ("z_radius", int), ("coeff_bound", int),
                      ("quad_nodes", int), ("theta_tol", float)):
        value = _get(cfg, f"policy.{key}", cast)
        if value is not None:
            payload[key] = value
    return payload


def discrete_payload(cfg: Dict[str, str]) -> dict:
    payload = {}
    m_list = _get(cfg, "oracle.m_list", _int_list)
    if m_list:
        payload["m_list"] = m_list
    for key, cast in (("z_cutoff", int), ("alpha_max", int)):
        value = _get(cfg, f"oracle.{key}", cast)
        if value is not None:
            payload[key] = value
    partition = _get(cfg, "oracle.partition", _int_list)
    if partition:
        payload["partition"] = partition
    return payload


def oracle_momentum_cutoff(cfg: Dict[str, str]) -> Optional[int]:
    return _get(cfg, "oracle.momentum_cutoff", int)


def oracle_matrix_m(cfg: Dict[str, str]) -> Optional[int]:
    return _get(cfg, "oracle.matrix_m", int)


def threads_value(cfg: Dict[str, str]) -> int:
    return _get(cfg, "threads", int, default=1)
