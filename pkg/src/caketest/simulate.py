"""Seeded Monte Carlo engine for error rates of the Bayesian test and the LRT.

Every replicate owns a Philox stream keyed by ``(seed, cell)`` with the
replicate index in the counter, so a replicate's data never depend on how the
work is split between processes.  Counts are folded by integer addition,
which makes results bit-identical for any worker count.
"""

import configparser
import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy import stats

from .binomial import binomial_lambda, binomial_lrt
from .cake_core import PriorSettings, penalized_lrt, prefers_h1
from .errors import CakeError, ScenarioError
from .normal import one_sample_finite_h, one_sample_lrt, two_sample_statistics, z_test_augmented
from .specfun import chi2_quantile, chi2_sf

__all__ = [
    "FAMILIES",
    "Cell",
    "Scenario",
    "SimResult",
    "bundled_scenarios",
    "emit_figure_data",
    "load_scenario",
    "run_scenario",
    "table2",
    "write_table2_csv",
]

FAMILIES = ("one_sample", "two_sample", "binomial", "z_known_variance")
NU = {"one_sample": 1, "two_sample": 2, "binomial": 1, "z_known_variance": 1}
FIGURE_HEADER = ("family", "truth", "n", "bayes_rate", "lrt_rate", "disagree_rate", "se")
_CHUNK = 2000


def _fmt(x):
    return format(float(x), ".10g")


@dataclass(frozen=True)
class Scenario:
    """A data-generating configuration swept over a truth grid and an n grid.

    ``truths`` holds the true mean (one_sample, z_known_variance), the true
    success probability (binomial) or ``(mu1, sigma1)`` pairs (two_sample,
    group 0 is always ``N(0, sigma**2)``).  ``n_grid`` holds sample sizes; for
    two_sample each entry is ``(n0, n1)`` or a total split in half.

    ``lrt_reference`` picks the LRT critical value: ``"chi2"`` uses the
    asymptotic chi-square law, ``"exact"`` the exact t law (one_sample only),
    ``"auto"`` takes the exact law when one exists.
    """

    family: str
    truths: tuple
    n_grid: tuple
    replicates: int = 10_000
    seed: int = 0
    alpha: float = 0.05
    settings: PriorSettings = field(default_factory=PriorSettings)
    mu0: float = 0.0
    sigma: float = 1.0
    lrt_reference: str = "auto"
    name: str = ""

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ScenarioError(f"family must be one of {', '.join(FAMILIES)}, got {self.family!r}")
        if int(self.replicates) != self.replicates or self.replicates < 1:
            raise ScenarioError("replicates must be a positive integer")
        if not 0 < self.alpha < 1:
            raise ScenarioError("alpha must lie in (0, 1)")
        if not self.truths:
            raise ScenarioError("truth grid is empty")
        if not self.n_grid:
            raise ScenarioError("n grid is empty")
        if not self.sigma > 0:
            raise ScenarioError("sigma must be positive")
        if self.lrt_reference not in ("auto", "chi2", "exact"):
            raise ScenarioError("lrt_reference must be auto, chi2 or exact")
        if self.lrt_reference == "exact" and self.family != "one_sample":
            raise ScenarioError("an exact LRT reference is only available for one_sample")
        if not self.settings.is_limit and self.family in ("two_sample", "binomial"):
            raise ScenarioError(f"family {self.family} has no finite-h form; use h = inf")

        if self.family == "two_sample":
            truths = tuple(_pair(t, float, "truth") for t in self.truths)
            for mu1, sigma1 in truths:
                if sigma1 < 0:
                    raise ScenarioError("sigma1 must be non-negative")
            grid = tuple(_split(n) for n in self.n_grid)
        else:
            truths = tuple(float(t) for t in self.truths)
            grid = tuple(_count(n) for n in self.n_grid)
            minimum = 1 if self.family == "binomial" else 2
            if min(grid) < minimum:
                raise ScenarioError(f"every n must be at least {minimum}")
            if self.family == "binomial" and not all(0 <= t <= 1 for t in truths):
                raise ScenarioError("binomial truths are probabilities in [0, 1]")
        object.__setattr__(self, "truths", truths)
        object.__setattr__(self, "n_grid", grid)

    @property
    def reference(self):
        if self.lrt_reference == "auto":
            return "exact" if self.family == "one_sample" else "chi2"
        return self.lrt_reference

    def cells(self):
        """``(truth, n)`` pairs in the canonical cell order."""
        return [(t, n) for t in self.truths for n in self.n_grid]


def _count(n):
    if isinstance(n, (tuple, list)) or int(n) != n:
        raise ScenarioError(f"sample size {n!r} is not an integer")
    return int(n)


def _pair(value, kind, what):
    if not isinstance(value, (tuple, list)) or len(value) != 2:
        raise ScenarioError(f"{what} {value!r} must be a pair")
    return kind(value[0]), kind(value[1])


def _split(n):
    if isinstance(n, (tuple, list)):
        n0, n1 = _pair(n, _count, "group sizes")
    else:
        n0 = _count(n) // 2
        n1 = _count(n) - n0
    if min(n0, n1) < 2:
        raise ScenarioError("each two-sample group needs at least 2 observations")
    return n0, n1


@dataclass(frozen=True)
class Cell:
    """Counts for one ``(truth, n)`` cell; rates exclude failed replicates."""

    family: str
    truth: object
    n: int
    n0: int | None
    n1: int | None
    replicates: int
    bayes_count: int
    lrt_count: int
    disagree_count: int
    errors: int

    @property
    def valid(self):
        return self.replicates - self.errors

    def _rate(self, count):
        return count / self.valid if self.valid else math.nan

    @property
    def bayes_rate(self):
        return self._rate(self.bayes_count)

    @property
    def lrt_rate(self):
        return self._rate(self.lrt_count)

    @property
    def disagree_rate(self):
        return self._rate(self.disagree_count)

    @staticmethod
    def standard_error(p, r):
        return math.sqrt(p * (1.0 - p) / r) if r else math.nan

    @property
    def bayes_se(self):
        return self.standard_error(self.bayes_rate, self.valid)

    @property
    def lrt_se(self):
        return self.standard_error(self.lrt_rate, self.valid)

    @property
    def disagree_se(self):
        return self.standard_error(self.disagree_rate, self.valid)

    @property
    def truth_label(self):
        if isinstance(self.truth, tuple):
            return f"mu1={_fmt(self.truth[0])};sigma1={_fmt(self.truth[1])}"
        return _fmt(self.truth)


@dataclass(frozen=True)
class SimResult:
    scenario: Scenario
    cells: tuple

    def cell(self, truth, n):
        for c in self.cells:
            size = (c.n0, c.n1) if isinstance(n, tuple) else c.n
            if c.truth == truth and size == n:
                return c
        raise KeyError((truth, n))

    def series(self, truth):
        """Cells for one truth value, in n-grid order."""
        return [c for c in self.cells if c.truth == truth]

    @property
    def errors(self):
        return sum(c.errors for c in self.cells)


# ---------------------------------------------------------------------------
# Replicate streams and per-family statistics
# ---------------------------------------------------------------------------


def _cell_key(seed, cell):
    return np.random.SeedSequence(seed, spawn_key=(cell,)).generate_state(2, dtype=np.uint64)


def replicate_rng(seed, cell, rep):
    """Generator for replicate ``rep`` of cell ``cell``; independent of scheduling."""
    return _stream(_cell_key(seed, cell), rep)


def _stream(key, rep):
    return np.random.Generator(np.random.Philox(key=key, counter=[0, rep, 0, 0]))


def _lrt_threshold(sc, n):
    if sc.reference == "exact":
        # lambda_LRT = n ln(1 + T^2 / (n - 1)) with T ~ t_{n-1} under H0
        t = stats.t.isf(sc.alpha / 2.0, n - 1)
        return n * math.log1p(t * t / (n - 1))
    return chi2_quantile(sc.alpha, NU[sc.family])


def _one_sample_chunk(sc, truth, n, key, reps):
    lam_lrt = np.empty(len(reps))
    lam = np.empty(len(reps))
    bad = np.zeros(len(reps), dtype=bool)
    for i, rep in enumerate(reps):
        x = truth + sc.sigma * _stream(key, rep).standard_normal(n)
        xbar = x.mean()
        var1 = np.mean((x - xbar) ** 2)
        if var1 <= 0:
            bad[i] = True
            continue
        lam_lrt[i] = one_sample_lrt(n, xbar, var1, sc.mu0)
        if not sc.settings.is_limit:
            try:
                lam[i] = -2.0 * one_sample_finite_h(x, sc.mu0, sc.settings.h) + sc.settings.delta
            except CakeError:
                bad[i] = True
    if sc.settings.is_limit:
        lam = penalized_lrt(lam_lrt, 1, n, sc.settings)
    return lam, lam_lrt, bad


def _z_chunk(sc, truth, n, key, reps):
    lam_lrt = np.empty(len(reps))
    lam = np.empty(len(reps))
    bad = np.zeros(len(reps), dtype=bool)
    sigma2 = sc.sigma ** 2
    for i, rep in enumerate(reps):
        x = truth + sc.sigma * _stream(key, rep).standard_normal(n)
        if sc.settings.is_limit:
            lam_lrt[i] = n * (x.mean() - sc.mu0) ** 2 / sigma2
        else:
            try:
                res = z_test_augmented(x, sc.mu0, sigma2, settings=sc.settings)
            except CakeError:
                bad[i] = True
                continue
            lam_lrt[i], lam[i] = res.lambda_lrt, res.lambda_bayes
    if sc.settings.is_limit:
        lam = penalized_lrt(lam_lrt, 1, n, sc.settings)
    return lam, lam_lrt, bad


def _two_sample_chunk(sc, truth, sizes, key, reps):
    mu1, sigma1 = truth
    n0, n1 = sizes
    v = np.empty((len(reps), 3))
    for i, rep in enumerate(reps):
        rng = _stream(key, rep)
        x0 = sc.sigma * rng.standard_normal(n0)
        x1 = mu1 + sigma1 * rng.standard_normal(n1)
        both = np.concatenate([x0, x1])
        v[i] = np.var(both), np.var(x0), np.var(x1)
    bad = np.any(v <= 0, axis=1)
    v[bad] = 1.0
    lam_lrt, exact, _ = two_sample_statistics(n0, n1, v[:, 0], v[:, 1], v[:, 2])
    return exact + sc.settings.delta, lam_lrt, bad


def _binomial_chunk(sc, truth, n, key, reps):
    s = np.array([_stream(key, rep).binomial(n, truth) for rep in reps], dtype=float)
    return binomial_lambda(s, n) + sc.settings.delta, binomial_lrt(s, n), np.zeros(len(reps), bool)


_CHUNKERS = {
    "one_sample": _one_sample_chunk,
    "z_known_variance": _z_chunk,
    "two_sample": _two_sample_chunk,
    "binomial": _binomial_chunk,
}


def _run_chunk(task):
    sc, cell, start, stop = task
    truth, n = sc.cells()[cell]
    reps = range(start, stop)
    lam, lam_lrt, bad = _CHUNKERS[sc.family](sc, truth, n, _cell_key(sc.seed, cell), reps)
    size = sum(n) if isinstance(n, tuple) else n
    good = ~bad & np.isfinite(lam) & np.isfinite(lam_lrt)
    bayes = np.asarray(prefers_h1(lam[good], sc.settings))
    lrt = lam_lrt[good] > _lrt_threshold(sc, size)
    return cell, int(bayes.sum()), int(lrt.sum()), int((bayes != lrt).sum()), int((~good).sum())


def resolve_workers(workers=None):
    """Worker count, capped by the ``CAKETEST_THREADS`` environment variable."""
    cap = os.environ.get("CAKETEST_THREADS")
    limit = os.cpu_count() or 1
    if cap:
        try:
            limit = max(1, int(cap))
        except ValueError:
            raise ScenarioError(f"CAKETEST_THREADS must be an integer, got {cap!r}") from None
    if workers is None:
        return limit
    return max(1, min(int(workers), limit))


def run_scenario(scenario, workers=None):
    """Simulate every cell of ``scenario`` and count decisions.

    Replicates whose statistic cannot be computed (e.g. a zero group
    variance) are counted in ``Cell.errors`` and left out of the rates.
    """
    sc = scenario
    tasks = [
        (sc, cell, start, min(start + _CHUNK, sc.replicates))
        for cell in range(len(sc.cells()))
        for start in range(0, sc.replicates, _CHUNK)
    ]
    workers = resolve_workers(workers)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_chunk, tasks))
    else:
        outcomes = [_run_chunk(t) for t in tasks]

    totals = np.zeros((len(sc.cells()), 4), dtype=np.int64)
    for cell, *counts in outcomes:
        totals[cell] += counts
    cells = []
    for (truth, n), (b, l, d, e) in zip(sc.cells(), totals):
        n0, n1 = n if isinstance(n, tuple) else (None, None)
        size = n0 + n1 if n0 is not None else n
        cells.append(Cell(sc.family, truth, size, n0, n1, sc.replicates,
                          int(b), int(l), int(d), int(e)))
    return SimResult(sc, tuple(cells))


# ---------------------------------------------------------------------------
# Scenario files
# ---------------------------------------------------------------------------

_KEYS = {
    "name", "family", "truths", "n_grid", "replicates", "seed", "alpha", "h",
    "delta", "prior_odds", "mu0", "sigma", "lrt_reference",
}


def _split_list(text, key):
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise ScenarioError(f"key {key!r}: empty list")
    return items


def _number(text, key, kind=float):
    try:
        value = kind(text) if kind is not int else int(float(text))
        if kind is int and float(text) != value:
            raise ValueError
        return value
    except ValueError:
        raise ScenarioError(f"key {key!r}: cannot parse {text!r} as {kind.__name__}") from None


def _parse_item(text, key, kind):
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 2:
            raise ScenarioError(f"key {key!r}: malformed pair {text!r}")
        return tuple(_number(p.strip(), key, kind) for p in parts)
    return _number(text, key, kind)


def parse_scenario(text, source="<string>"):
    """Build a :class:`Scenario` from ``[scenario]`` key = value text.

    Lists are comma separated; two-sample pairs are written ``a:b``
    (``mu1:sigma1`` for truths, ``n0:n1`` for sizes).  ``h = inf`` selects the
    flat limit.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ScenarioError(f"{source}: {exc}") from None
    if not parser.has_section("scenario"):
        raise ScenarioError(f"{source}: missing [scenario] section")
    sec = parser["scenario"]
    unknown = set(sec) - _KEYS
    if unknown:
        raise ScenarioError(f"{source}: unknown key(s) {', '.join(sorted(unknown))}")
    for key in ("family", "truths", "n_grid"):
        if key not in sec:
            raise ScenarioError(f"{source}: required key {key!r} is missing")

    kwargs = {
        "family": sec["family"].strip(),
        "truths": tuple(_parse_item(t, "truths", float) for t in _split_list(sec["truths"], "truths")),
        "n_grid": tuple(_parse_item(t, "n_grid", int) for t in _split_list(sec["n_grid"], "n_grid")),
        "name": sec.get("name", "").strip(),
    }
    for key, kind in (("replicates", int), ("seed", int), ("alpha", float),
                      ("mu0", float), ("sigma", float)):
        if key in sec:
            kwargs[key] = _number(sec[key].strip(), key, kind)
    if "lrt_reference" in sec:
        kwargs["lrt_reference"] = sec["lrt_reference"].strip()
    prior = {}
    for key in ("h", "delta", "prior_odds"):
        if key in sec:
            prior[key] = _number(sec[key].strip(), key)
    try:
        kwargs["settings"] = PriorSettings(**prior)
        return Scenario(**kwargs)
    except ScenarioError as exc:
        raise ScenarioError(f"{source}: {exc}") from None
    except (CakeError, TypeError, ValueError) as exc:
        raise ScenarioError(f"{source}: {exc}") from None


def bundled_scenarios():
    """Names of the scenario files shipped with the package."""
    root = resources.files("caketest") / "scenarios"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def load_scenario(path_or_name):
    """Read a scenario file, or a bundled scenario by name (e.g. ``fig2_desk``)."""
    path = os.fspath(path_or_name)
    if not os.path.exists(path) and path in bundled_scenarios():
        text = (resources.files("caketest") / "scenarios" / f"{path}.ini").read_text()
        return parse_scenario(text, source=path)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from None
    return parse_scenario(text, source=path)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def figure_rows(result):
    """Rows of the figure CSV; ``se`` is the standard error of ``bayes_rate``."""
    return [
        (c.family, c.truth_label, str(c.n), _fmt(c.bayes_rate), _fmt(c.lrt_rate),
         _fmt(c.disagree_rate), _fmt(c.bayes_se))
        for c in result.cells
    ]


def emit_figure_data(result, path, svg_path=None):
    """Write the per-cell rates as CSV and, optionally, an SVG line chart."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(FIGURE_HEADER)
        writer.writerows(figure_rows(result))
    if svg_path is not None:
        with open(svg_path, "w", encoding="utf-8") as fh:
            fh.write(render_svg(result))


_PALETTE = ("#1b6ca8", "#d1495b", "#2e8b57", "#e09f3e", "#6a4c93", "#444444")


def render_svg(result, width=640, height=400):
    """Plain SVG line chart: rate against log10 n, one colour per truth.

    Solid lines are the Bayesian preference rate, dashed lines the LRT
    rejection rate, dotted grey the disagreement rate.
    """
    left, right, top, bottom = 60, 170, 30, 50
    pw, ph = width - left - right, height - top - bottom
    logs = sorted({math.log10(c.n) for c in result.cells})
    lo, hi = logs[0], logs[-1]
    span = hi - lo or 1.0

    def xy(n, rate):
        x = left + (math.log10(n) - lo) / span * pw
        y = top + (1.0 - rate) * ph
        return f"{x:.2f},{y:.2f}"

    title = result.scenario.name or result.scenario.family
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left}" y="18" font-size="13">{title}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = top + (1.0 - tick) * ph
        out.append(f'<line x1="{left - 4}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">{tick:g}</text>')
    for n in sorted({c.n for c in result.cells}):
        x = left + (math.log10(n) - lo) / span * pw
        out.append(f'<text x="{x:.2f}" y="{top + ph + 16}" text-anchor="middle">{n}</text>')
    out.append(f'<text x="{left + pw / 2:.0f}" y="{height - 12}" text-anchor="middle">n</text>')

    for k, truth in enumerate(result.scenario.truths):
        cells = result.series(truth)
        colour = _PALETTE[k % len(_PALETTE)]
        for attr, dash, stroke in (("bayes_rate", "", colour),
                                   ("lrt_rate", ' stroke-dasharray="6,4"', colour),
                                   ("disagree_rate", ' stroke-dasharray="2,3"', "#999999")):
            pts = " ".join(xy(c.n, getattr(c, attr)) for c in cells if c.valid)
            out.append(f'<polyline points="{pts}" fill="none" stroke="{stroke}"{dash}/>')
        y = top + 14 * k + 6
        out.append(f'<line x1="{left + pw + 10}" y1="{y}" x2="{left + pw + 30}" y2="{y}" '
                   f'stroke="{colour}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 34}" y="{y + 4}">{cells[0].truth_label}</text>')
    y = top + 14 * len(result.scenario.truths) + 12
    out.append(f'<text x="{left + pw + 10}" y="{y}">solid: Bayes, dashed: LRT</text>')
    out.append(f'<text x="{left + pw + 10}" y="{y + 14}">dotted grey: disagree</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# p-value / lambda_Bayes correspondence tables
# ---------------------------------------------------------------------------


def table2(n_list=(50, 100, 1000), nu_list=(1, 2, 3, 4), lambda_list=(0, 2, 6, 10),
           pvalue_list=(0.05, 0.01, 0.001, 0.0001)):
    """LRT p-value at each ``lambda_Bayes`` threshold and the converse.

    Returns
    -------
    (list of dict, list of dict)
        Left panel rows ``{nu, lambda_bayes, n, p_value}`` with
        ``p = P(chi2_nu >= lambda + nu ln n)``; right panel rows
        ``{nu, p_value, n, lambda_bayes}`` with
        ``lambda = chi2_quantile(p, nu) - nu ln n``.
    """
    left = [
        {"nu": nu, "lambda_bayes": lam, "n": n, "p_value": chi2_sf(lam + nu * math.log(n), nu)}
        for nu in nu_list for lam in lambda_list for n in n_list
    ]
    right = [
        {"nu": nu, "p_value": p, "n": n,
         "lambda_bayes": chi2_quantile(p, nu) - nu * math.log(n)}
        for nu in nu_list for p in pvalue_list for n in n_list
    ]
    return left, right


def write_table2_csv(path, left, right):
    """Both panels in one CSV, distinguished by the ``panel`` column."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(("panel", "nu", "n", "lambda_bayes", "p_value"))
        for row in left:
            writer.writerow(("p_value", row["nu"], row["n"], _fmt(row["lambda_bayes"]),
                             _fmt(row["p_value"])))
        for row in right:
            writer.writerow(("lambda_bayes", row["nu"], row["n"], _fmt(row["lambda_bayes"]),
                             _fmt(row["p_value"])))
