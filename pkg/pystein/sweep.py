# -*- coding: utf-8 -*-
"""
Sweeps over laws, thresholds and system sizes

Every sweep is a Step, the Sweep runner creates the step from its
configuration section, runs it, writes its tables and finally checks the
results, so that a violated bound still leaves its report on disk.
"""

import logging
from fractions import Fraction
from itertools import product

import joblib
import numpy as np
from tqdm import tqdm

from . import report
from .configuration import load_config, model_name
from .limit_law import LimitLaw
from .metrics import model_setup, rate_fit, theorem_audit
from .oracles import MAX_DIMERS, MAX_SPINS, run_dimer_suite, run_spin_suite
from .stein_core import SteinSolution
from .util import BoundViolation, NumericConsistencyError, ResourceLimitError

logger = logging.getLogger(__name__)

#:list(str): audit csv header
AUDIT_COLUMNS = [
    "model",
    "n",
    "p",
    "distance",
    "argsup_z",
    "term_condvar",
    "term_remainder",
    "term_a",
    "term_a3",
    "term_delta4",
    "implied_const_rate",
    "implied_const_papernorm",
]
#:list(str): rate fit csv header
RATE_FIT_COLUMNS = [
    "model",
    "p",
    "slope",
    "intercept",
    "r_squared",
    "rate",
    "empirical_constant",
]
#:dict: proved rate of each model
MODEL_RATES = {"curie_weiss": 0.5, "monomer_dimer": 0.25}


def parse_law(text):
    """
    Parse a limiting law given as K:A, A may be a fraction like 1/12

    Returns
    -------
    law : LimitLaw
    """
    try:
        k, a = str(text).split(":")
        k = Fraction(k.strip())
        a = Fraction(a.strip().replace(" ", ""))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"law must be given as K:A, got {text!r}")
    if k.denominator != 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    return LimitLaw(int(k), float(a))


def threads_to_jobs(threads):
    """joblib n_jobs for a threads setting, "auto" uses all cores"""
    if threads == "auto":
        return -1
    threads = int(threads)
    if threads < 1:
        raise ValueError(f"threads must be a positive integer or 'auto', got {threads}")
    return threads


class Step:
    """Parent class for all steps"""

    #:str: name of the step, used in the output file name
    name = None

    def __init__(self, output, **config):
        #:str: output format, csv or json
        self.format = output.get("format", "csv")
        #:str: output file, may contain the tags {step} and {format}
        self._out = output.get("out", "pystein_{step}.{format}")
        #:int: joblib n_jobs of the worker pool
        self.n_jobs = threads_to_jobs(output.get("threads", 1))
        self.config = config

    def run(self):  # pragma: no cover
        """Execute the current step

        Raises
        ------
        NotImplementedError
            needs to be implemented for each step
        """
        raise NotImplementedError

    def check(self, data):
        """Raise if the results of this step violate a bound, default: no checks"""

    @property
    def columns(self):
        """dict(str: list(str)): csv header of each table of this step"""
        raise NotImplementedError  # pragma: no cover

    @property
    def output_file(self):
        """str: the report file of this step"""
        return self._out.format(step=self.name, format=self.format)

    def save(self, data):
        """Write the tables of this step

        Parameters
        ----------
        data : dict(str: list(dict))
            tables by name
        """
        return report.write_report(self.output_file, data, self.columns, self.format)


class LimitLawStep(Step):
    """Normalizers, moments and the tail bound margin of limiting laws"""

    name = "limit_law"

    def __init__(self, *args, **config):
        super().__init__(*args, **config)
        self.laws = [parse_law(law) for law in config["laws"]]
        self.moments = [float(m) for m in config["moments"]]
        self.grid = np.linspace(0, config["grid_max"], config["grid_points"] + 1)[1:]

    @property
    def columns(self):
        cols = ["k", "a", "b", "b_quadrature"]
        cols += [f"moment_{m:g}" for m in self.moments]
        return {"limit_law": cols + ["min_tail_margin"]}

    def run(self):
        rows = []
        for law in self.laws:
            row = {"k": law.k, "a": law.a, "b": law.b, "b_quadrature": law.b_quadrature}
            for m in self.moments:
                row[f"moment_{m:g}"] = law.abs_moment(m)
            margin = law.tail_bound(self.grid) - law.sf(self.grid)
            row["min_tail_margin"] = float(np.min(margin))
            logger.info("%s: b=%.12g, min tail margin %.3e", law, law.b, np.min(margin))
            rows.append(row)
        return {"limit_law": rows}

    def check(self, data):
        for row in data["limit_law"]:
            if row["min_tail_margin"] < 0:
                raise BoundViolation(
                    f"Tail bound fails for k={row['k']}, a={row['a']}: "
                    f"margin {row['min_tail_margin']}"
                )


def _minimum(values):
    # None for an empty selection, an empty cell in the report
    return float(np.min(values)) if values.size else None


class SteinCheckStep(Step):
    """Residual and bounds of the Stein solution on a grid"""

    name = "stein_check"

    def __init__(self, *args, **config):
        super().__init__(*args, **config)
        self.laws = [parse_law(law) for law in config["laws"]]
        self.z = [float(z) for z in config["z"]]
        if config["grid_max"] <= config["grid_min"]:
            raise ValueError("stein_check.grid_max must be larger than grid_min")
        self.grid = np.linspace(
            config["grid_min"], config["grid_max"], config["grid_points"]
        )
        self.exclusion = config["exclusion"]
        self.residual_tolerance = config["residual_tolerance"]
        self.log_derivative_tolerance = config["log_derivative_tolerance"]

    @property
    def columns(self):
        return {
            "stein_check": [
                "k",
                "a",
                "z",
                "max_residual",
                "max_f",
                "f_bound",
                "max_abs_f_prime",
                "max_log_derivative_error",
                "min_g_proven",
                "min_g_elsewhere",
            ]
        }

    def run(self):
        rows = []
        for law, z in product(self.laws, self.z):
            sol = SteinSolution(law, z)
            x = self.grid[np.abs(self.grid - z) >= self.exclusion]
            # g >= 0 is only established on [0, z) for z >= 5
            g = sol.g(x)
            proven = (x >= 0) & (x < z) if z >= 5 else np.zeros(x.shape, bool)
            rows.append(
                {
                    "k": law.k,
                    "a": law.a,
                    "z": z,
                    "max_residual": float(np.max(np.abs(sol.residual(x)))),
                    "max_f": float(np.max(sol.f(x))),
                    "f_bound": 1 / (2 * law.b),
                    "max_abs_f_prime": float(np.max(np.abs(sol.f_prime(x)))),
                    "max_log_derivative_error": sol.log_derivative_error(x),
                    "min_g_proven": _minimum(g[proven]),
                    "min_g_elsewhere": _minimum(g[~proven]),
                }
            )
            negative = int(np.sum(g[~proven] < 0))
            if negative:
                logger.info(
                    "g is negative at %i of %i grid points outside [0, z) for %s z=%g",
                    negative,
                    int(np.sum(~proven)),
                    law,
                    z,
                )
            logger.debug("Stein check %s z=%g: %s", law, z, rows[-1])
        return {"stein_check": rows}

    def check(self, data):
        for row in data["stein_check"]:
            where = f"k={row['k']}, a={row['a']}, z={row['z']}"
            if row["max_residual"] > self.residual_tolerance:
                raise NumericConsistencyError(
                    f"Stein residual {row['max_residual']} at {where}"
                )
            if row["max_log_derivative_error"] > self.log_derivative_tolerance:
                raise NumericConsistencyError(
                    f"log f does not solve the Stein equation at {where}, "
                    f"error {row['max_log_derivative_error']}"
                )
            if row["min_g_proven"] is not None and row["min_g_proven"] < 0:
                raise BoundViolation(f"g is negative on [0, z) at {where}")
            if row["max_f"] > row["f_bound"] + 1e-12:
                raise BoundViolation(f"max f {row['max_f']} above 1/(2b) at {where}")
            if row["max_abs_f_prime"] > 1 + 1e-12:
                raise BoundViolation(f"max |f'| {row['max_abs_f_prime']} at {where}")


def audit_job(model, n, p, a, weight, refine):
    """A single (n, p) audit, returns the audit row"""
    result = theorem_audit(model, n, p, a=a, weight=weight, refine=refine)
    row = result.row()
    row["implied_const_full"] = result.implied_const_full
    return row


class AuditStep(Step):
    """Weighted distances and bound terms over a sweep of n and p"""

    name = "audit"

    def __init__(self, *args, **config):
        super().__init__(*args, **config)
        self.model = model_name(config["model"])
        if self.model not in MODEL_RATES:
            raise ValueError(f"audit.model must be one of {list(MODEL_RATES)}")
        self.ns = [int(n) for n in config["n"]]
        if len(self.ns) == 0 or np.any(np.diff(self.ns) <= 0):
            raise ValueError(f"audit.n must be strictly increasing, got {self.ns}")
        self.ps = [float(p) for p in config["p"]]
        if len(self.ps) == 0:
            raise ValueError("audit.p must not be empty")
        if config.get("beta", 1.0) != 1.0:
            raise ValueError(
                f"audit.beta must be 1, audits are defined at the critical point, "
                f"got {config['beta']}"
            )
        self.a_rule = config["a_rule"]
        self.a = config.get("a")
        if self.a_rule == "fixed" and self.a is None:
            raise ValueError("audit.a is required for a_rule 'fixed'")
        self.weight = config["weight"]
        self.refine = config["refine"]

    @property
    def columns(self):
        return {"audit": AUDIT_COLUMNS, "ratefit": RATE_FIT_COLUMNS}

    def jobs(self):
        a = self.a if self.a_rule == "fixed" else None
        # n outer, p inner, the order of the report
        return [
            (self.model, n, p, a, self.weight, self.refine)
            for n, p in product(self.ns, self.ps)
        ]

    def run(self):
        jobs = self.jobs()
        if self.n_jobs == 1:
            rows = [audit_job(*job) for job in tqdm(jobs, desc="Audit")]
        else:
            # results come back in submission order
            rows = joblib.Parallel(n_jobs=self.n_jobs)(
                joblib.delayed(audit_job)(*job) for job in jobs
            )
        return {"audit": rows, "ratefit": fit_audit_rows(rows)}

    def save(self, data):
        if self.format == "json":
            tables = {"audit": data["audit"], "rate_fit": data["ratefit"]}
            return report.write_report(self.output_file, tables, {}, "json")
        return super().save(data)


def fit_audit_rows(rows, rate=None):
    """Rate fits of the distance over n, per model and p"""
    fits = []
    groups = {}
    for row in rows:
        groups.setdefault((model_name(row["model"]), float(row["p"])), []).append(row)
    for (model, p), group in groups.items():
        if len(group) < 3:
            logger.warning(
                "Only %i system sizes for %s at p=%g, skipping the rate fit",
                len(group),
                model,
                p,
            )
            continue
        target = rate if rate is not None else MODEL_RATES.get(model)
        fit = rate_fit(
            [int(r["n"]) for r in group], [r["distance"] for r in group], rate=target
        )
        logger.info(
            "Rate fit %s p=%g: slope %.4f, r2 %.4f", model, p, fit.slope, fit.r_squared
        )
        fits.append(
            {
                "model": model,
                "p": p,
                "slope": fit.slope,
                "intercept": fit.intercept,
                "r_squared": fit.r_squared,
                "rate": fit.rate,
                "empirical_constant": fit.empirical_constant,
            }
        )
    return fits


class OracleStep(Step):
    """Brute force enumeration checks of both models"""

    name = "oracle"

    def __init__(self, *args, **config):
        super().__init__(*args, **config)
        self.models = [model_name(m) for m in config["models"]]
        if len(self.models) == 0:
            raise ValueError("oracle.models must name at least one model")
        self.max_n = int(config["max_n"])
        if self.max_n > MAX_SPINS:
            raise ResourceLimitError(
                f"oracle.max_n must be at most {MAX_SPINS}, got {self.max_n}"
            )
        if self.max_n < 2:
            raise ValueError(f"oracle.max_n must be at least 2, got {self.max_n}")

    @property
    def columns(self):
        return {"oracle": ["model", "max_n", "checked"]}

    def run(self):
        rows = []
        for model in self.models:
            if model == "curie_weiss":
                checked = run_spin_suite(self.max_n)
                max_n = self.max_n
            elif model == "monomer_dimer":
                max_n = min(self.max_n, MAX_DIMERS)
                if max_n < self.max_n:
                    logger.warning(
                        "Dimer enumeration is limited to n=%i, using max_n=%i",
                        MAX_DIMERS,
                        max_n,
                    )
                checked = run_dimer_suite(max_n)
            else:
                raise ValueError(f"Unknown oracle model {model}")
            logger.info("Oracle %s passed for %i system sizes", model, checked)
            rows.append({"model": model, "max_n": max_n, "checked": checked})
        return {"oracle": rows}


class RateFitStep(Step):
    """Rate fits of given distances, or of the rows of an audit report"""

    name = "rate_fit"

    def __init__(self, *args, **config):
        super().__init__(*args, **config)
        self.model = config.get("model")
        self.ns = list(config["n"])
        self.distances = list(config["d"])
        self.input = config.get("input")
        self.rate = config.get("rate")
        if self.input is None and len(self.ns) == 0:
            raise ValueError("rate_fit needs either an input file or n and d")

    @property
    def columns(self):
        return {"rate_fit": RATE_FIT_COLUMNS}

    def run(self):
        if self.input is not None:
            rows = report.read_csv(self.input)
            missing = {"model", "n", "p", "distance"} - set(rows[0] if rows else {})
            if missing:
                raise KeyError(f"{self.input} is missing the columns {sorted(missing)}")
            return {"rate_fit": fit_audit_rows(rows, rate=self.rate)}

        rate = self.rate
        if rate is None and self.model is not None:
            rate = MODEL_RATES[model_name(self.model)]
        fit = rate_fit(self.ns, self.distances, rate=rate)
        row = {
            "model": model_name(self.model) if self.model else "",
            "p": "",
            "slope": fit.slope,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
            "rate": fit.rate,
            "empirical_constant": fit.empirical_constant,
        }
        logger.info("Rate fit: slope %.6g, r2 %.6g", fit.slope, fit.r_squared)
        return {"rate_fit": [row]}


class Sweep:
    """Runs the steps of a configuration"""

    modules = {
        "limit_law": LimitLawStep,
        "stein_check": SteinCheckStep,
        "audit": AuditStep,
        "oracle": OracleStep,
        "rate_fit": RateFitStep,
    }

    def __init__(self, config):
        #:dict: the validated configuration
        self.config = config
        #:dict: results of the steps that ran
        self.data = {}
        #:dict: files written by each step
        self.files = {}

    def run_module(self, step):
        if step not in self.modules:
            raise ValueError(
                f"Unknown step {step}, expected one of {list(self.modules)}"
            )
        module = self.modules[step](self.config["output"], **self.config[step])
        logger.info("Running step '%s'", step)
        data = module.run()
        self.files[step] = module.save(data)
        self.data[step] = data
        module.check(data)
        return data

    def run_steps(self, steps):
        for step in steps:
            self.run_module(step)
        logger.debug("--------------------------------")
        return self.data


def main(steps, configuration=None, model=None):
    """
    Run steps with a configuration

    Parameters
    ----------
    steps : str, list(str)
        steps to run, any of "limit_law", "stein_check", "audit", "oracle", "rate_fit"
    configuration : None, dict, str, optional
        configuration or configuration file, merged into the defaults of the model
    model : str, optional
        model whose defaults are used

    Returns
    -------
    data : dict
        the tables of each step
    """
    if isinstance(steps, str):
        steps = [steps]
    config = load_config(configuration, model)
    return Sweep(config).run_steps(steps)
