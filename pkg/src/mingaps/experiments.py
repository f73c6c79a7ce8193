"""Monte Carlo scans and verification gates over sampled angles.

Almost-sure statements about minimal gaps are operationalized here as
violation/satisfaction fractions over i.i.d. uniform dyadic angles, with
slack thresholds that live in the config rather than the code. The same
derived per-sample random streams make every table reproducible from
(config, seed) alone, independent of how the cells would be scheduled.
"""

from __future__ import annotations

import json
import math
import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .circle import Dyadic, default_bits, derive_rng, minimal_gap, orbit, sample_angle
from .energy import additive_energy
from .errors import ConfigError
from .paircount import pair_count_of_orbit
from .sequences import IntegerSequence, from_spec
from .window import get_window

GRID_CAP = 10**7

EXPERIMENTS = ("mingap", "theorem1", "theorem2", "threegap", "primes", "energy")


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------


def integer_root(x: int, r: int) -> int:
    """Largest t with t^r <= x, exact."""
    if x < 0 or r < 1:
        raise ConfigError("integer_root needs x >= 0, r >= 1")
    if x < 2 or r == 1:
        return x
    t = int(round(x ** (1.0 / r)))
    while t > 0 and t**r > x:
        t -= 1
    while (t + 1) ** r <= x:
        t += 1
    return t


def _floor_power(k: int, exponent: Fraction) -> int:
    """floor(k^exponent) in exact integer arithmetic."""
    return integer_root(k ** exponent.numerator, exponent.denominator)


def checkpoint_grid(kind: str, eta: float, k_max: int) -> list[int]:
    """Sparse N grid along which the almost-sure gap laws get sampled.

    kind="floor" uses N_k = floor(k^(2/eta)) (lower-bound law); "ceiling"
    uses N_k = floor(k^(4/eta)). Values below 2 are dropped, duplicates
    merged; anything beyond 10^7 is cut with a warning.
    """
    if not 0.0 < eta < 2.0:
        raise ConfigError("eta must be in (0,2)")
    if k_max < 2:
        raise ConfigError(f"k_max must be >= 2, got {k_max}")
    if kind == "floor":
        exponent = Fraction(2) / Fraction(str(eta))
    elif kind == "ceiling":
        exponent = Fraction(4) / Fraction(str(eta))
    else:
        raise ConfigError(f"grid kind must be floor or ceiling, got {kind!r}")
    out: list[int] = []
    for k in range(1, k_max + 1):
        nk = _floor_power(k, exponent)
        if nk < 2:
            continue
        if nk > GRID_CAP:
            warnings.warn(f"grid truncated at N={out[-1] if out else None}: N_k exceeded {GRID_CAP}")
            break
        if not out or nk > out[-1]:
            out.append(nk)
    return out


def parse_grid(spec) -> list[int]:
    """Accept [a, b, c], "a,b,c", or "geom:start:stop:factor"."""
    if isinstance(spec, (list, tuple)):
        ns = [int(v) for v in spec]
    elif isinstance(spec, str) and spec.startswith("geom:"):
        try:
            _, start, stop, factor = spec.split(":")
            start, stop, factor = int(start), int(stop), float(factor)
        except ValueError:
            raise ConfigError(f"malformed geometric grid {spec!r}") from None
        if factor <= 1.0 or start < 2 or stop < start:
            raise ConfigError(f"geometric grid needs start >= 2 <= stop and factor > 1: {spec!r}")
        ns = []
        x = float(start)
        while round(x) <= stop:
            v = int(round(x))
            if not ns or v > ns[-1]:
                ns.append(v)
            x *= factor
    elif isinstance(spec, str):
        try:
            ns = [int(v) for v in spec.split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"malformed grid {spec!r}") from None
    else:
        raise ConfigError(f"malformed grid {spec!r}")
    if not ns:
        raise ConfigError("empty N grid")
    if any(n < 2 for n in ns):
        raise ConfigError("all grid values must be >= 2")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ConfigError("grid values must be strictly ascending")
    if ns[-1] > GRID_CAP:
        raise ConfigError(f"grid value {ns[-1]} exceeds the {GRID_CAP} cap")
    return ns


# ---------------------------------------------------------------------------
# config
# ---------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    experiment: str = "mingap"
    sequence: str = "monomial:d=2"
    ns: list[int] = field(default_factory=lambda: [256, 512, 1024])
    samples: int = 32
    seed: int = 1
    bits: int | None = None
    window: str = "triangle"
    eta: float = 0.5
    epsilon: float = 0.1
    with_pair_count: bool = False  # attach D values on mingap scans too
    violation_max: float = 0.10  # theorem1 gate
    satisfaction_min: float = 0.90  # theorem2 gate
    energy_exponent_cap: float = 2.7  # theorem2 hypothesis guard
    energy_probe_n: int = 4096
    out: str | None = None
    format: str = "csv"

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if not 0.0 < self.eta < 2.0:
            raise ConfigError("eta must be in (0,2)")
        if self.epsilon <= 0.0:
            raise ConfigError("epsilon must be > 0")
        if self.samples < 1:
            raise ConfigError("need at least 1 angle sample")
        if self.bits is not None and self.bits < 64:
            raise ConfigError("experiment precision must be >= 64 bits")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        self.ns = parse_grid(self.ns)
        return self

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**raw).validate()

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "sequence": self.sequence,
            "ns": list(self.ns),
            "samples": self.samples,
            "seed": self.seed,
            "bits": self.bits,
            "window": self.window,
            "eta": self.eta,
            "epsilon": self.epsilon,
            "with_pair_count": self.with_pair_count,
            "violation_max": self.violation_max,
            "satisfaction_min": self.satisfaction_min,
            "energy_exponent_cap": self.energy_exponent_cap,
            "energy_probe_n": self.energy_probe_n,
            "out": self.out,
            "format": self.format,
        }


# ---------------------------------------------------------------------------
# result tables
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


@dataclass
class ResultRow:
    n: int
    alpha_id: int
    alpha_hex: str
    delta_min_hex: str
    delta_min: float
    scaled: float  # N^2 * delta_min
    d_value: float | None = None
    m: int | None = None
    flags: str = ""
    normalized: float | None = None  # prime diagnostic column
    distinct_gaps: int = 0  # internal, not serialized

    CSV_COLUMNS = (
        "N",
        "alpha_id",
        "alpha_hex",
        "delta_min_hex",
        "delta_min",
        "scaled",
        "d_value",
        "M",
        "flags",
    )

    def csv_cells(self, with_normalized: bool) -> list[str]:
        cells = [
            str(self.n),
            str(self.alpha_id),
            self.alpha_hex,
            self.delta_min_hex,
            _fmt(self.delta_min),
            _fmt(self.scaled),
            _fmt(self.d_value),
            _fmt(self.m),
            self.flags,
        ]
        if with_normalized:
            cells.append(_fmt(self.normalized))
        return cells

    def json_obj(self, with_normalized: bool) -> dict:
        obj = {
            "N": self.n,
            "alpha_id": self.alpha_id,
            "alpha_hex": self.alpha_hex,
            "delta_min_hex": self.delta_min_hex,
            "delta_min": _fmt(self.delta_min),
            "scaled": _fmt(self.scaled),
            "d_value": _fmt(self.d_value),
            "M": self.m,
            "flags": self.flags,
        }
        if with_normalized:
            obj["normalized"] = _fmt(self.normalized)
        return obj


@dataclass
class ResultTable:
    rows: list[ResultRow]
    meta: dict
    with_normalized: bool = False

    def header(self) -> list[str]:
        cols = list(ResultRow.CSV_COLUMNS)
        if self.with_normalized:
            cols.append("normalized")
        return cols

    def to_csv(self) -> str:
        lines = [",".join(self.header())]
        for row in self.rows:
            lines.append(",".join(row.csv_cells(self.with_normalized)))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "meta": self.meta,
            "rows": [r.json_obj(self.with_normalized) for r in self.rows],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def write(self, path, fmt: str) -> None:
        text = self.to_csv() if fmt == "csv" else self.to_json()
        Path(path).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------


def _sampled_angles(cfg: ExperimentConfig, bits: int) -> list[Dyadic]:
    return [sample_angle(derive_rng(cfg.seed, i), bits) for i in range(cfg.samples)]


def _m_for(cfg: ExperimentConfig, n: int) -> int | None:
    """The localization scale tied to the experiment's gap law."""
    if cfg.experiment == "theorem2":
        return max(1, round(0.5 * n ** (2.0 - cfg.eta)))
    if cfg.experiment == "theorem1":
        return max(1, round(n ** (2.0 + cfg.eta) / 8.0))
    if cfg.with_pair_count:
        return n  # pair-correlation scale
    return None


def scan_minimal_gap(cfg: ExperimentConfig) -> ResultTable:
    """One ResultRow per (alpha sample, N); deterministic given the seed."""
    seq = from_spec(cfg.sequence, cfg.ns[-1])
    bits = cfg.bits or default_bits(seq, cfg.ns[-1])
    w = get_window(cfg.window)
    rows: list[ResultRow] = []
    for alpha_id, alpha in enumerate(_sampled_angles(cfg, bits)):
        orb = orbit(alpha, seq, cfg.ns[-1])
        for n in cfg.ns:
            pre = orb.prefix(n)
            rep = minimal_gap(pre)
            delta = rep.delta_min.as_float()
            m = _m_for(cfg, n)
            d_value = None
            flags = []
            if rep.collision:
                flags.append("collision")
            if m is not None:
                pc = pair_count_of_orbit(pre, m, w)
                d_value = pc.value
                # exact threshold event: delta_min <= 1/(4M)
                if 4 * m * rep.delta_min.mantissa <= (1 << bits):
                    flags.append("dthresh")
                    if pc.value < 1.0:
                        flags.append("implication-broken")
            rows.append(
                ResultRow(
                    n=n,
                    alpha_id=alpha_id,
                    alpha_hex=alpha.hex_str(),
                    delta_min_hex=rep.delta_min.hex_str(),
                    delta_min=delta,
                    scaled=delta * n * n,
                    d_value=d_value,
                    m=m,
                    flags=";".join(flags),
                    distinct_gaps=rep.distinct_gap_count,
                )
            )
    meta = {
        "experiment": cfg.experiment,
        "sequence": seq.spec_str,
        "label": seq.label,
        "bits": bits,
        "window": cfg.window,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "ns": list(cfg.ns),
    }
    return ResultTable(rows=rows, meta=meta)


@dataclass
class FitResult:
    slopes: dict[int, float]
    median_slope: float
    excluded_rows: int


def fit_exponent(table: ResultTable) -> FitResult:
    """Per-alpha least-squares slope of log delta_min against log N."""
    by_alpha: dict[int, list[tuple[int, float]]] = {}
    excluded = 0
    for row in table.rows:
        if "collision" in row.flags:
            excluded += 1
            continue
        by_alpha.setdefault(row.alpha_id, []).append((row.n, row.delta_min))
    slopes: dict[int, float] = {}
    for alpha_id, pts in sorted(by_alpha.items()):
        ns = sorted({n for n, _ in pts})
        if len(ns) < 3:
            raise ConfigError(
                f"alpha {alpha_id} has only {len(ns)} usable N values; need >= 3 for a slope"
            )
        x = np.log([n for n, _ in pts])
        y = np.log([d for _, d in pts])
        slope = float(np.polyfit(x, y, 1)[0])
        slopes[alpha_id] = slope
    if not slopes:
        raise ConfigError("no usable rows to fit")
    return FitResult(
        slopes=slopes,
        median_slope=float(np.median(list(slopes.values()))),
        excluded_rows=excluded,
    )


# ---------------------------------------------------------------------------
# verification gates
# ---------------------------------------------------------------------------


@dataclass
class GateReport:
    experiment: str
    table: ResultTable
    total: int
    hits: int  # violations (floor) or satisfied rows (ceiling)
    fraction: float
    gate: float
    passed: bool
    details: dict = field(default_factory=dict)

    def summary(self) -> str:
        kind = {
            "theorem1": "floor violations",
            "theorem2": "ceiling satisfied",
            "threegap": "rows over 3 gaps",
            "primes": "floor violations",
        }.get(self.experiment, "hits")
        return (
            f"{self.experiment}: {kind} {self.hits}/{self.total} "
            f"({self.fraction:.3%}), gate {self.gate}, "
            f"{'PASS' if self.passed else 'FAIL'}"
        )


def verify_floor(cfg: ExperimentConfig) -> GateReport:
    """Gap-floor law: count samples with delta_min <= N^-(2+eta).

    Also reports the first-moment diagnostic: mean D at M = N^(2+eta)/8
    against the exact expectation N(N-1)/M (~ 8 N^-eta).
    """
    cfg = _as_experiment(cfg, "theorem1")
    table = scan_minimal_gap(cfg)
    violations = 0
    for row in table.rows:
        if row.delta_min <= row.n ** -(2.0 + cfg.eta):
            violations += 1
            row.flags = _add_flag(row.flags, "floor-violation")
    total = len(table.rows)
    fraction = violations / total
    diag = []
    for n in cfg.ns:
        sub = [r for r in table.rows if r.n == n]
        m = sub[0].m
        mean_d = float(np.mean([r.d_value for r in sub]))
        diag.append(
            {"n": n, "m": m, "mean_d": mean_d, "expected_mean": n * (n - 1) / m}
        )
    return GateReport(
        experiment="theorem1",
        table=table,
        total=total,
        hits=violations,
        fraction=fraction,
        gate=cfg.violation_max,
        passed=fraction <= cfg.violation_max,
        details={"eta": cfg.eta, "diagnostics": diag},
    )


def verify_ceiling(cfg: ExperimentConfig) -> GateReport:
    """Gap-ceiling law under the small-additive-energy hypothesis.

    Counts samples with delta_min < N^-(2-eta); the hypothesis is probed by
    measuring the energy exponent at a capped prefix, warning (not failing)
    when it looks too large. The exact pair-count implication
    delta_min <= 1/(4M) => D >= 1 is asserted on every row as it goes.
    """
    cfg = _as_experiment(cfg, "theorem2")
    seq = from_spec(cfg.sequence, cfg.ns[-1])
    probe_n = min(cfg.ns[-1], cfg.energy_probe_n)
    probe = additive_energy(seq, probe_n)
    hypothesis_ok = probe.exponent < cfg.energy_exponent_cap
    if not hypothesis_ok:
        warnings.warn(
            f"energy exponent {probe.exponent:.3f} at N={probe_n} exceeds "
            f"{cfg.energy_exponent_cap}; the ceiling law is not expected to hold"
        )
    table = scan_minimal_gap(cfg)
    satisfied = 0
    broken = 0
    for row in table.rows:
        if row.delta_min < row.n ** -(2.0 - cfg.eta):
            satisfied += 1
            row.flags = _add_flag(row.flags, "ceiling-ok")
        if "implication-broken" in row.flags:
            broken += 1
    total = len(table.rows)
    fraction = satisfied / total
    return GateReport(
        experiment="theorem2",
        table=table,
        total=total,
        hits=satisfied,
        fraction=fraction,
        gate=cfg.satisfaction_min,
        passed=(fraction >= cfg.satisfaction_min) and broken == 0 and hypothesis_ok,
        details={
            "eta": cfg.eta,
            "energy_probe_n": probe_n,
            "energy_exponent": probe.exponent,
            "hypothesis_ok": hypothesis_ok,
            "implication_broken_rows": broken,
        },
    )


def three_gap_check(cfg: ExperimentConfig) -> GateReport:
    """Exact distinct-gap counts; for naturals every row must show <= 3."""
    cfg = _as_experiment(cfg, "threegap")
    table = scan_minimal_gap(cfg)
    seq_family = table.meta["sequence"].split(":")[0]
    over = 0
    max_seen = 0
    for row in table.rows:
        max_seen = max(max_seen, row.distinct_gaps)
        if row.distinct_gaps > 3:
            over += 1
            row.flags = _add_flag(row.flags, f"gaps={row.distinct_gaps}")
    assertable = seq_family == "naturals"
    total = len(table.rows)
    return GateReport(
        experiment="threegap",
        table=table,
        total=total,
        hits=over,
        fraction=over / total,
        gate=0.0,
        passed=(over == 0) if assertable else True,
        details={"max_distinct_gaps": max_seen, "assertable": assertable},
    )


def prime_gap_diagnostic(cfg: ExperimentConfig) -> GateReport:
    """Dense-sequence diagnostic: normalized gaps delta * N (log N)^(2+eps).

    Only the universal floor delta_min > N^-2.1 is asserted (at N >= 1024);
    the normalized values are reported, not gated.
    """
    cfg = _as_experiment(cfg, "primes")
    if not cfg.sequence.startswith("primes"):
        raise ConfigError("prime diagnostic requires sequence=primes")
    table = scan_minimal_gap(cfg)
    table.with_normalized = True
    norms = []
    violations = 0
    asserted = 0
    for row in table.rows:
        row.normalized = row.delta_min * row.n * math.log(row.n) ** (2.0 + cfg.epsilon)
        if "collision" in row.flags:
            continue
        norms.append(row.normalized)
        if row.n >= 1024:
            asserted += 1
            if row.delta_min <= row.n**-2.1:
                violations += 1
                row.flags = _add_flag(row.flags, "floor-violation")
    return GateReport(
        experiment="primes",
        table=table,
        total=asserted,
        hits=violations,
        fraction=violations / asserted if asserted else 0.0,
        gate=0.0,
        passed=violations == 0,
        details={
            "epsilon": cfg.epsilon,
            "normalized_min": min(norms) if norms else None,
            "normalized_median": float(np.median(norms)) if norms else None,
        },
    )


def _add_flag(flags: str, flag: str) -> str:
    return f"{flags};{flag}" if flags else flag


def _as_experiment(cfg: ExperimentConfig, name: str) -> ExperimentConfig:
    if cfg.experiment != name:
        cfg = ExperimentConfig(**{**cfg.to_dict(), "experiment": name})
        cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# config-file runner
# ---------------------------------------------------------------------------


def run_config(path) -> tuple[int, object]:
    """Execute a JSON experiment config; returns (exit_code, report_or_table).

    Writes the rows (CSV or JSON) plus a JSON manifest next to them. Exit
    codes follow the CLI contract: 0 ok, 4 when a verification gate fails.
    """
    p = Path(path)
    try:
        raw = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{p.name}: invalid JSON at line {e.lineno}: {e.msg}") from None
    cfg = ExperimentConfig.from_dict(raw)
    started = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    t0 = time.perf_counter()

    if cfg.experiment == "energy":
        result = _run_energy(cfg)
        exit_code = 0
    else:
        runner = {
            "mingap": scan_minimal_gap,
            "theorem1": verify_floor,
            "theorem2": verify_ceiling,
            "threegap": three_gap_check,
            "primes": prime_gap_diagnostic,
        }[cfg.experiment]
        result = runner(cfg)
        exit_code = 0
        if isinstance(result, GateReport) and not result.passed:
            exit_code = 4

    if cfg.out:
        table = result.table if isinstance(result, GateReport) else result
        if isinstance(table, ResultTable):
            table.write(cfg.out, cfg.format)
        else:  # energy rows
            Path(cfg.out).write_text(table, encoding="utf-8")
        manifest = {
            "config": cfg.to_dict(),
            "seed": cfg.seed,
            "version": __version__,
            "started": started,
            "elapsed_s": round(time.perf_counter() - t0, 3),
        }
        Path(str(cfg.out) + ".manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return exit_code, result


def _run_energy(cfg: ExperimentConfig) -> str:
    seq = from_spec(cfg.sequence, cfg.ns[-1])
    lines = ["family,params,N,energy,diag_sum,exponent"]
    for n in cfg.ns:
        rep = additive_energy(seq, n)
        lines.append(
            f"{seq.family},{seq.params_str},{n},{rep.energy},{rep.diag_sum},"
            f"{format(rep.exponent, '.17g')}"
        )
    return "\n".join(lines) + "\n"
