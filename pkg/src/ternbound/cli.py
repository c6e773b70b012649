"""Command line driver: one subcommand per verification task.

Reports are plain text.  Lines of the form ``key = value`` are meant for
machines; the line ``summary: ...`` for people.  Report files only depend
on the configuration and the package version; wall times go to stdout.
"""
from __future__ import annotations

import os
import sys
import time
from dataclasses import dataclass, field, asdict, fields
from fractions import Fraction
from typing import Optional

import click

from . import interval as iv
from .interval import Interval, ProofOutcome, I

VERSION = "0.1.0"
RESULTS_ENV = "TERNBOUND_RESULTS"
TASKS = ("appendix-b", "g-windows", "sieve-espagn", "minor-chain", "major-chain",
         "austeria", "ladder", "conclude", "all")


class ChainError(RuntimeError):
    """A sub-verification needed by the conclusion did not pass."""


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    qmax: int = 100_000
    tables_limit: int = 1_000_000
    tolerance: float = 1e-9
    delta_table: Optional[str] = None
    full_scale: bool = False
    certificates: bool = True

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        cfg = cls()
        types = {f.name: f.type for f in fields(cls)}
        with open(path, encoding="utf-8") as fh:
            for n, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{n}: expected key = value")
                key, val = (s.strip() for s in line.split("=", 1))
                name = key.replace("-", "_")
                if name not in types:
                    raise ConfigError(f"{path}:{n}: unknown key {key!r}")
                setattr(cfg, name, _parse_value(name, val, path, n))
        return cfg

    def snapshot(self) -> dict:
        return asdict(self)


def _parse_value(name: str, val: str, path: str, n: int):
    try:
        if name in ("qmax", "tables_limit"):
            return int(float(val)) if "e" in val.lower() else int(val)
        if name == "tolerance":
            return float(val)
        if name in ("full_scale", "certificates"):
            if val.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(val)
            return val.lower() in ("true", "1", "yes")
        return val or None
    except ValueError:
        raise ConfigError(f"{path}:{n}: bad value {val!r} for {name}") from None


@dataclass
class Check:
    """One reported quantity: ``direction`` is <=, >=, within, contains, digits or proven.

    ``digits`` reads the target as a truncated decimal "t...": the value lies
    in [t, t + one unit in the last place], and the enclosure must meet that
    cell and be narrower than ``max_width`` when one is given.
    """
    label: str
    direction: str
    target: str = ""
    computed: Optional[Interval] = None
    outcome: Optional[ProofOutcome] = None
    note: str = ""
    max_width: Optional[str] = None

    @property
    def status(self) -> str:
        return "pass" if self._passes() else "fail"

    def _passes(self) -> bool:
        if self.direction == "proven":
            return self.outcome is not None and self.outcome.proven
        c = self.computed
        if c is None:
            return False
        lo, hi = Fraction(float(c.lo)), Fraction(float(c.hi))
        if self.direction == "within":
            a, b = (Fraction(s) for s in self.target.split(","))
            return lo >= a and hi <= b
        t = Fraction(self.target)
        if self.direction == "<=":
            return hi <= t
        if self.direction == ">=":
            return lo >= t
        if self.direction == "contains":
            return lo <= t <= hi
        if self.direction == "digits":
            return digits_consistent(self.target, c, self.max_width)
        raise ValueError(self.direction)

    def line(self) -> str:
        if self.direction == "proven":
            o = self.outcome
            got = f"{o.status} boxes={o.boxes} depth={o.max_depth_used}" if o else "missing"
        else:
            got = f"[{self.computed.lo!r}, {self.computed.hi!r}]" if self.computed is not None else "missing"
        tgt = f" {self.target}" if self.target else ""
        if self.max_width:
            tgt += f" width < {self.max_width}"
        extra = f" ({self.note})" if self.note else ""
        return f"{self.label} = {got} | {self.direction}{tgt} | {self.status}{extra}"


def digits_consistent(target: str, c: Interval, max_width: Optional[str] = None) -> bool:
    """Does the enclosure meet the cell of the truncated decimal ``target``?"""
    t = Fraction(target)
    places = len(target.split(".")[1]) if "." in target else 0
    cell_hi = t + Fraction(1, 10 ** places)
    lo, hi = Fraction(float(c.lo)), Fraction(float(c.hi))
    if max_width is not None and hi - lo >= Fraction(max_width):
        return False
    return lo <= cell_hi and hi >= t


@dataclass
class Report:
    task: str
    checks: list = field(default_factory=list)
    wall_time: float = 0.0
    config: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)   # cached results for later tasks

    @property
    def labels(self) -> list:
        return [c.label for c in self.checks]

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.status == "pass" for c in self.checks)

    def failing(self) -> list:
        return [c.label for c in self.checks if c.status != "pass"]

    def add(self, *a, **k) -> Check:
        c = Check(*a, **k)
        self.checks.append(c)
        return c

    def render(self) -> str:
        out = [f"task = {self.task}", f"version = {VERSION}"]
        for k in sorted(self.config):
            out.append(f"config.{k} = {self.config[k]}")
        out += [c.line() for c in self.checks]
        n_ok = sum(c.status == "pass" for c in self.checks)
        out.append(f"status = {'pass' if self.passed else 'fail'}")
        out.append(f"summary: {self.task}: {n_ok}/{len(self.checks)} checks pass")
        return "\n".join(out) + "\n"


# tasks ------------------------------------------------------------------------

def task_appendix_b(cfg: RunConfig) -> Report:
    from . import arithfn as af
    rep = Report("appendix-b")
    c = af.convergent_products()
    rep.add("nagasa", "within", "2.591461,2.591463", c["nagasa"])
    rep.add("nagasa_odd", "within", "1.295730,1.295732", c["nagasa2"])
    rep.add("massacre", "within", "2.826419,2.826421", c["massacre"])
    tables = af.build_tables(min(cfg.tables_limit, 1_000_000))
    for s in af.phi_sum_bounds(150_000, tables):
        val = s.exact if s.exact is not None else s.bound
        bound = s.bound if s.exact is not None else None
        note = s.note or (f"bound [{bound.lo!r}, {bound.hi!r}]" if bound is not None else "")
        rep.checks.append(_bool_check(s.label, s.passed, val, note))
    return rep


def _bool_check(label: str, ok: bool, val: Interval, note: str) -> Check:
    out = ProofOutcome("proven" if ok else "unproven", 0, None, 1, label)
    c = Check(label, "proven", "", val, out, note + (f" value [{val.lo!r}, {val.hi!r}]" if val is not None else ""))
    return c


def task_g_windows(cfg: RunConfig) -> Report:
    from . import arithfn as af
    rep = Report("g-windows")
    R_max = cfg.tables_limit
    if cfg.full_scale:
        R_max = max(R_max, 160_000_000)
    tables = af.build_tables(R_max)
    for label, out in af.verify_G_windows(R_max, tables).items():
        rep.add(label, "proven", f"R <= {R_max}", outcome=out)
    rep.add("odd_sum_150000", "digits", "6.798779", af.odd_squarefree_sum(150_000, tables),
            max_width="1e-5")
    return rep


def task_sieve(cfg: RunConfig) -> Report:
    from . import sieve
    rep = Report("sieve-espagn")
    cert = sieve.espagn_verify(cfg.qmax)
    out = ProofOutcome("proven" if cert.valid else "unproven", 0, None, len(cert.records),
                       "espagn")
    rep.add("espagn", "proven", f"q <= {cfg.qmax}", outcome=out,
            note=f"failures={len(cert.failures)}")
    rep.values["certificate"] = cert
    return rep


def task_minor(cfg: RunConfig, J: Optional[Interval] = None) -> Report:
    from . import minor
    rep = Report("minor-chain")
    mb = minor.ostop_total(J=J)
    p = mb.parts
    rep.add("g(r0)", "<=", "0.041014", p["g(r0)"])
    rep.add("f1", "digits", "0.0163662", p["f1"], max_width="1e-5")
    rep.add("integral g/r", "<=", "0.086918", p["integral g/r"])
    rep.add("M", "<=", "0.77671", mb.M)
    rep.add("T", "<=", "3.5776e-4", mb.T)
    rep.add("E", "<=", "8.4031e-12", mb.E)
    rep.add("Z", "<=", "0.97392", mb.Z)
    rep.add("Z recomputed", "<=", "0.97392", mb.z_recomputed())
    if cfg.certificates:
        for out in minor.monotonicity_certs():
            rep.add(f"cert {out.label}", "proven", outcome=out)
        grid = minor.g_conv_grid_check()
        ok = all(s == "proven" for s in grid)
        rep.add("cert g decreasing on grid", "proven",
                outcome=ProofOutcome("proven" if ok else "unproven", 0, None, len(grid),
                                     "g grid"))
    rep.values["minor"] = mb
    return rep


def task_major(cfg: RunConfig) -> Report:
    from . import major
    rep = Report("major-chain")
    p = major.MajorParams()
    for name, (got, stated) in major.pinned_derivations(p).items():
        rep.add(f"pinned {name}", "<=", repr(stated.hi), got)
    mb = major.nefumo_total(p)
    lp = mb.parts["l2"]
    c = mb.parts
    rep.add("odd_sum", "digits", "6.798779", lp["odd_sum"], max_width="1e-5")
    rep.add("L", "within", "8.70517,8.70531", mb.L)
    rep.add("A", "<=", "8.7806", mb.A_eta)
    rep.add("K_r2/x", "<=", "9.71e-21", lp["K_r2/x"])
    rep.add("ET error term", "<=", "0.075272", lp["err_ET"])
    rep.add("E error term", "<=", "1.0034e-8", lp["err_E"])
    rep.add("C0 lower", ">=", "1.3203236", mb.C0_low)
    ce = c["C_eta_parts"]
    rep.add("c1", "within", "0.89762,0.89763", ce["c1"])
    rep.add("moment term * kappa^3", "<=", "2.0002", ce["moment_term"] * iv.pow_int(c["kappa"], 3))
    rep.add("C_eta slack * kappa", "<=", "0.000834", ce["kappa_slack"])
    rep.add("eps line", "<=", "2.9387e-5", c["eps_line"])
    rep.add("second line * kappa", "<=", "1.7815e-6", c["second_line*kappa"])
    rep.add("third line / (log x)^2", "<=", "43", c["third_line/log^2"])
    rep.add("error * kappa", "<=", "3.8613e-5", c["error*kappa"])
    rep.add("total coefficient * kappa", ">=", "1.058259", mb.total_coeff)
    rep.add("total recomputed", ">=", "1.058259", mb.recompute_total())
    aux = c["aux"]
    lx = aux["log x"]
    rep.add("LS_star / (24.32 log x + 0.57)", "<=", "1", aux["LS_star"] / (lx * I("24.32") + I("0.57")))
    rep.add("LS_plus / (18.57 log x + 28.39)", "<=", "1", aux["LS_plus"] / (lx * I("18.57") + I("28.39")))
    rep.add("Z_plus2 / log x", "<=", "0.640209", aux["Z_plus2/log x"])
    rep.add("Z_star2 / log x", "<=", "0.0362", aux["Z_star2/log x"])
    rep.add("|eta_star|_2^2 * kappa", "<=", "1.77082", aux["eta_star_l2sq"] * c["kappa"])
    rep.values["major"] = mb
    return rep


def task_austeria(cfg: RunConfig) -> Report:
    from . import zeros
    rep = Report("austeria")
    r = zeros.austeria_check()
    note = f"grid failures {r.grid_failures}, segments {r.segments}"
    rep.add("austeria grid to 2000", "proven", outcome=r.outcome, note=note)
    rep.add("crepe eps", "<=", "2.73e-10", zeros.crepe_epsilon())
    rep.add("crepe inner constant", "<=", "9.61114", zeros.eta2_inverse_cubic_integral())
    rep.add("crepe sqrt constant", "<=", "0.135", zeros.crepe_estimate(2000.0)["sqrt_coef"])
    return rep


LADDER_TARGETS = {3.061e10: "1.23163e+27", 2.419e11: "6.15697e+28", 2.44e12: "5.90698e+29"}


def task_ladder(cfg: RunConfig) -> Report:
    from . import zeros
    rep = Report("ladder")
    if cfg.delta_table:
        try:
            t = zeros.DeltaTable.load(cfg.delta_table)
            h = zeros.ZeroHypothesis(T0=t.height or zeros.DEFAULT_T0)
            L = zeros.ladder_replay(h, t)
        except (zeros.ContractError, ValueError) as e:
            # a malformed or gapped table is a failed verification, not a usage error
            rep.add("n0", "proven", outcome=ProofOutcome("unproven", 0), note=str(e))
            return rep
        rep.add(f"n0 {t.name}", ">=", "0", Interval.coerce(L.n0),
                note=f"six figures {zeros.six_figures(L.n0)}, exact {L.n0}")
        return rep
    for H, target in LADDER_TARGETS.items():
        L = zeros.ladder_replay(zeros.ZeroHypothesis(T0=H))
        got = zeros.six_figures(L.n0)
        ok = got == target
        rep.checks.append(Check(f"n0 H={H:g}", "proven", target, Interval.coerce(L.n0),
                                ProofOutcome("proven" if ok else "unproven", 0, None, len(L.steps)),
                                f"six figures {got}, exact {L.n0}"))
    return rep


def conclude(N_min: float = 1e27, major_bound=None, minor_bound=None,
             sub_reports: Optional[list] = None) -> Report:
    """Lower bound for the weighted count of representations of odd N >= N_min."""
    from . import major, minor
    from .smoothing import norms, eta_plus
    for sub in sub_reports or []:
        if not sub.passed:
            raise ChainError(f"{sub.task} failed: {', '.join(sub.failing())}")
    mb = major_bound or major.nefumo_total()
    nb = minor_bound or minor.ostop_total(J=mb.A_eta)
    rep = Report("conclude")
    k = I(repr(float(major.MajorParams().kappa)))
    N = I(repr(float(N_min)))
    x_over_N = Interval(1.0) / (major.c1_optimal() / k + 2.0)
    x_min = N * x_over_N
    if not x_min.lo >= float(major.X_PLUS):
        raise ChainError(f"x = {x_min.lo!r} is below x_plus")
    diff = mb.total_coeff - Interval(nb.Z.hi)
    rep.add("x/N", "within", "0.495461,0.495462", x_over_N)
    rep.add("major - minor (x^2/kappa)", ">=", "0.08433", diff)
    main = diff * x_over_N.sqr() / k
    rep.add("main (N^2)", ">=", "0.00042248", main)
    plus = norms(eta_plus(200.0))
    star_linf = I("1.414")
    c = plus.get("linf").sqr() * star_linf * 3.0 * I("1.4263") * I("1.03883")
    rep.add("non-prime coefficient", "<=", "7.3306", c)
    corr = c * iv.log(N) / iv.sqrt(N)
    rep.add("non-prime correction (N^2)", "<=", "1.4412e-11", corr)
    final = main - Interval(corr.hi)
    rep.add("final coefficient (N^2)", ">=", "0.000422", final)
    rep.values.update(final=final, diff=diff)
    return rep


def _run_all(cfg: RunConfig) -> Report:
    subs = [task_appendix_b(cfg), task_g_windows(cfg), task_sieve(cfg)]
    maj = task_major(cfg)
    mb = maj.values["major"]
    mino = task_minor(cfg, J=mb.A_eta)
    subs += [mino, maj, task_austeria(cfg), task_ladder(cfg)]
    rep = Report("all")
    try:
        con = conclude(major_bound=mb, minor_bound=mino.values["minor"], sub_reports=[maj, mino])
        subs.append(con)
    except ChainError as e:
        rep.add("conclude", "proven", outcome=ProofOutcome("unproven", 0), note=str(e))
    for s in subs:
        for c in s.checks:
            c.label = f"{s.task}: {c.label}"
            rep.checks.append(c)
    return rep


RUNNERS: dict = {
    "appendix-b": task_appendix_b, "g-windows": task_g_windows, "sieve-espagn": task_sieve,
    "minor-chain": task_minor, "major-chain": task_major, "austeria": task_austeria,
    "ladder": task_ladder, "conclude": lambda cfg: conclude(), "all": _run_all,
}


def run(task: str, config: Optional[RunConfig] = None) -> Report:
    if task not in RUNNERS:
        raise click.UsageError(f"unknown task {task!r}; choose from {', '.join(TASKS)}")
    cfg = config or RunConfig()
    t0 = time.time()
    rep = RUNNERS[task](cfg)
    rep.wall_time = time.time() - t0
    rep.config = cfg.snapshot()
    return rep


def write_report(rep: Report, out: Optional[str] = None) -> str:
    if out is None:
        d = os.environ.get(RESULTS_ENV, "results")
        os.makedirs(d, exist_ok=True)
        out = os.path.join(d, f"{rep.task}.txt")
    else:
        parent = os.path.dirname(os.path.abspath(out))
        os.makedirs(parent, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(rep.render())
    return out


@click.group()
@click.version_option(VERSION)
def main():
    """Rigorous numerical checks for the ternary circle-method bounds."""


@main.command("verify")
@click.argument("task", type=click.Choice(TASKS))
@click.option("--qmax", type=int, default=None, help="largest modulus for the sieve scan")
@click.option("--tables-limit", type=int, default=None, help="size of the mu/phi tables")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--delta-table", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--full-scale", is_flag=True, default=False, help="full verification ranges (slow)")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def verify(task, qmax, tables_limit, config_path, delta_table, full_scale, out):
    try:
        cfg = RunConfig.from_file(config_path) if config_path else RunConfig()
    except (ConfigError, OSError) as e:
        raise click.UsageError(str(e))
    if qmax is not None:
        cfg.qmax = qmax
    if tables_limit is not None:
        cfg.tables_limit = tables_limit
    if delta_table is not None:
        cfg.delta_table = delta_table
    if full_scale:
        cfg.full_scale = True
    if cfg.qmax < 1 or cfg.tables_limit < 200:
        raise click.UsageError("need qmax >= 1 and tables-limit >= 200")
    try:
        rep = run(task, cfg)
    except ChainError as e:
        click.echo(f"chain refused: {e}", err=True)
        sys.exit(1)
    path = write_report(rep, out)
    click.echo(rep.render(), nl=False)
    click.echo(f"wall_time = {rep.wall_time:.2f}s")
    click.echo(f"report written to {path}")
    sys.exit(0 if rep.passed else 1)


if __name__ == "__main__":
    main()
