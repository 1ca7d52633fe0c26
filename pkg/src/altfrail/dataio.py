"""Dataset files and JSON artifact helpers.

Datasets are two-column CSV (``time,status``) with an optional header row and
an optional leading metadata comment declaring the censoring scheme, e.g.::

    # scheme=type2 r=8
    time,status
    99,1
    ...

Failure status is 1, right-censored is 0.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .inference import CensoredSample, Scheme

__all__ = [
    "ParseError",
    "parse_csv",
    "write_csv",
    "read_dataset",
    "save_dataset",
    "appliance_b_lab",
    "synthetic_field_sample",
    "dump_json",
]

FORMAT_VERSION = "1"

# Wear-test failures for the turbine appliance: 10 units on test, stopped at
# the 8th failure, so the two unfailed units are censored at 687.
_APPLIANCE_B_FAILURES = (99.0, 141.0, 163.0, 300.0, 350.0, 523.0, 602.0, 687.0)


class ParseError(ValueError):
    """Malformed dataset text; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _parse_scheme_comment(text: str, line_no: int) -> Scheme:
    fields = text.split()
    kv = {}
    for item in fields:
        if "=" not in item:
            raise ParseError(f"bad scheme metadata item {item!r}", line_no)
        key, value = item.split("=", 1)
        kv[key] = value
    kind = kv.pop("scheme", None)
    if kind == "complete":
        return Scheme("complete")
    if kind == "type1":
        try:
            return Scheme("type1", censor_time=float(kv["censor_time"]))
        except (KeyError, ValueError):
            raise ParseError("type1 metadata requires censor_time=<positive>", line_no)
    if kind == "type2":
        try:
            return Scheme("type2", r=int(kv["r"]))
        except (KeyError, ValueError):
            raise ParseError("type2 metadata requires r=<count>", line_no)
    raise ParseError(f"unknown scheme kind {kind!r}", line_no)


def parse_csv(text: str, scheme: Scheme | None = None) -> CensoredSample:
    """Parse dataset text into a :class:`CensoredSample`.

    An explicit ``scheme`` argument overrides any metadata comment.  Without
    either, a sample with no censored rows is treated as complete; censored
    rows all sharing one time are treated as type1 at that time.
    """
    times, status = [], []
    declared = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.startswith("scheme="):
                declared = _parse_scheme_comment(body, line_no)
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 2:
            raise ParseError(f"expected two comma-separated columns, got {raw!r}", line_no)
        if cells[0].lower() == "time" and cells[1].lower() == "status":
            continue
        try:
            t = float(cells[0])
            s = int(cells[1])
        except ValueError:
            raise ParseError(f"could not parse row {raw!r}", line_no)
        if not (np.isfinite(t) and t > 0):
            raise ParseError(f"time must be positive and finite, got {cells[0]}", line_no)
        if s not in (0, 1):
            raise ParseError(f"status must be 0 or 1, got {cells[1]}", line_no)
        times.append(t)
        status.append(s)
    if not times:
        raise ParseError("no data rows found", 1)
    use = scheme or declared
    if use is None:
        censored = [t for t, s in zip(times, status) if s == 0]
        if not censored:
            use = Scheme("complete")
        elif len(set(censored)) == 1:
            use = Scheme("type1", censor_time=censored[0])
        else:
            raise ValueError(
                "censored rows with mixed times: declare the scheme via metadata or argument"
            )
    return CensoredSample(np.array(times), np.array(status, dtype=int), use)


def write_csv(sample: CensoredSample) -> str:
    """Serialize a sample; ``parse_csv(write_csv(s))`` reproduces ``s``."""
    scheme = sample.scheme
    if scheme.kind == "type1":
        meta = f"# scheme=type1 censor_time={scheme.censor_time!r}"
    elif scheme.kind == "type2":
        meta = f"# scheme=type2 r={scheme.r}"
    else:
        meta = "# scheme=complete"
    lines = [meta, "time,status"]
    for t, s in zip(sample.times, sample.status):
        lines.append(f"{t!r},{int(s)}")
    return "\n".join(lines) + "\n"


def read_dataset(path: str) -> CensoredSample:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_csv(fh.read())


def save_dataset(path: str, sample: CensoredSample) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_csv(sample))


def appliance_b_lab() -> CensoredSample:
    """The embedded wear-test dataset: 8 ordered failures, 2 units censored at 687."""
    times = np.array(_APPLIANCE_B_FAILURES + (687.0, 687.0))
    status = np.array([1] * 8 + [0, 0], dtype=int)
    return CensoredSample(times, status, Scheme("type2", r=8))


def synthetic_field_sample(n: int = 4708, seed: int = 20230615) -> CensoredSample:
    """Synthetic stand-in for unavailable warranty-return data.

    Draws Burr-XII(298.6, 2.66, 0.0223) lifetimes and censors them at the
    time giving 93 expected failures out of ``n``; entirely simulated, for
    demos and pipeline exercises only.
    """
    from .distributions import BurrXII

    dist = BurrXII(298.6, 2.66, 0.0223)
    tau = float(dist.quantile(93.0 / 4708.0))
    draws = dist.sample(n, seed)
    status = (draws <= tau).astype(int)
    times = np.minimum(draws, tau)
    return CensoredSample(times, status, Scheme("type1", censor_time=tau))


def dump_json(payload: dict, path: str, provenance: dict | None = None) -> None:
    """Write a JSON artifact with a format_version field and optional provenance."""
    body = {"format_version": FORMAT_VERSION}
    body.update(payload)
    if provenance:
        body["provenance"] = provenance
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(body, fh, indent=2, sort_keys=True)
        fh.write("\n")
