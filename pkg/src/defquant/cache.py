"""JSON-lines cache for Monte Carlo weight estimates.

One record per line:

    {"key": "K(2,2)[...]", "lambda": [re, im], "value": [re, im],
     "stderr": s, "n_samples": n, "seed": 7, "convention": "raw"}

Records are looked up by exact (key, lambda, convention) match; several
records for the same triple are pooled by inverse variance, which is the
right way to merge independent runs.  Corrupt lines are skipped with a
warning rather than poisoning the store.

The default location is ~/.cache/defquant/weights.jsonl, overridable with
the KW_CACHE environment variable.
"""

from __future__ import annotations

import json
import math
import os
import warnings
from pathlib import Path

from .weight_mc import MCResult

_ENV_VAR = "KW_CACHE"


def default_path() -> Path:
    env = os.environ.get(_ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "defquant" / "weights.jsonl"


def _lam_key(lam) -> tuple[float, float]:
    c = complex(lam)
    return (float(c.real), float(c.imag))


class WeightCache:
    def __init__(self, path: str | os.PathLike | None = None):
        self.path = Path(path) if path is not None else default_path()
        self._records: dict[tuple, list[dict]] = {}
        self._load()

    def _load(self) -> None:
        if not self.path.exists():
            return
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    trip = (rec["key"], tuple(rec["lambda"]),
                            rec.get("convention", "raw"))
                    float(rec["stderr"]); int(rec["n_samples"])
                    re, im = rec["value"]
                    float(re); float(im)
                except (ValueError, KeyError, TypeError) as exc:
                    warnings.warn(
                        f"{self.path}:{lineno}: skipping corrupt cache line "
                        f"({exc!r})")
                    continue
                self._records.setdefault(trip, []).append(rec)

    def put(self, res: MCResult) -> None:
        """Append a result to the store (and the in-memory view)."""
        rec = {
            "key": res.key,
            "lambda": list(_lam_key(res.lam)),
            "value": [float(res.value.real), float(res.value.imag)],
            "stderr": float(res.stderr),
            "n_samples": int(res.n_samples),
            "seed": res.seed,
            "convention": res.convention,
        }
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec) + "\n")
        trip = (rec["key"], tuple(rec["lambda"]), rec["convention"])
        self._records.setdefault(trip, []).append(rec)

    def get(self, key: str, lam, convention: str = "raw") -> MCResult | None:
        """Inverse-variance pooled estimate for an exact triple, or None."""
        trip = (key, _lam_key(lam), convention)
        recs = self._records.get(trip)
        if not recs:
            return None
        num = 0j
        den = 0.0
        n_tot = 0
        for rec in recs:
            re, im = rec["value"]
            s = max(float(rec["stderr"]), 1e-300)
            wgt = 1.0 / s ** 2
            num += wgt * complex(re, im)
            den += wgt
            n_tot += int(rec["n_samples"])
        return MCResult(num / den, math.sqrt(1.0 / den), n_tot,
                        lam=complex(*trip[1]), convention=convention,
                        key=key, meta={"pooled": len(recs)})

    def __len__(self) -> int:
        return sum(len(v) for v in self._records.values())
