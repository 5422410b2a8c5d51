"""Task pipelines behind the command line: each turns a RunConfig into a SweepResult."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy.linalg as sla

from envprobe import __version__
from envprobe.config import RunConfig, with_bath_value
from envprobe.cv import (
    covariance_matrix,
    evolve_two_mode_squeezed,
    gaussian_log_negativity,
    marginal_mode1,
)
from envprobe.dynamics import (
    bloch_state,
    closed_form_cbf_steady,
    closed_form_xy_steady,
    null_dimension,
    product_state,
    sample_initial_states,
    steady_state,
    vectorize,
)
from envprobe.errors import SingularParametersError
from envprobe.model import BathParams, build_liouvillian, pauli
from envprobe.observables import mutual_information, negativity
from envprobe.spectrum import KERNEL_SIGN, emission_spectrum, peak_analysis


@dataclass
class SweepResult:
    task: str
    columns: list
    data: np.ndarray
    axes: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)


def conventions(cfg: RunConfig):
    return {
        "basis": "|00>,|01>,|10>,|11> (qubit 1 = probe first)",
        "sigma_z": "|1><1| - |0><0|",
        "vectorization": "row-major, index = binary(l m p q)",
        "negativity": f"-{cfg.negativity_factor:g} * min(0, lambda_min(partial transpose))",
        "negativity_factor": cfg.negativity_factor,
        "spectrum_kernel": "exp(-i nu tau)" if KERNEL_SIGN < 0 else "exp(+i nu tau)",
        "spectrum_resolvent": "Re Tr[sigma_+1 (i nu - Sigma)^-1 (sigma_-1 rho_ss)]",
        "entropy_base": "nats",
        "bloch_sampler_sigma": cfg.sampler_sigma,
        "bloch_sampler": "isotropic Gaussian, rejected outside the unit ball",
    }


def _liouvillian(cfg, bath=None):
    return build_liouvillian(cfg.model, cfg.free, cfg.coupling, bath or cfg.bath)


def _initial(cfg):
    return product_state(cfg.prep, bloch_state(cfg.bloch2))


def _probe_excited(rho):
    return float(np.real(np.trace(pauli("projector1", 1) @ rho)))


def _closed_form(cfg, bath):
    try:
        if cfg.model == "xy":
            return closed_form_xy_steady(cfg.free, cfg.coupling, bath)
        return closed_form_cbf_steady(cfg.free, cfg.coupling, bath, cfg.prep)
    except SingularParametersError:
        return None


def _run_evolve(cfg):
    sigma = _liouvillian(cfg)
    v0 = vectorize(_initial(cfg))
    rows = []
    for t in cfg.time_grid:
        rho = (sla.expm(sigma * t) @ v0).reshape(4, 4)
        rows.append([t, *np.real(np.diag(rho)),
                     negativity(rho, cfg.negativity_factor), _probe_excited(rho)])
    columns = ["t", "p00", "p01", "p10", "p11", "negativity", "probe_excited"]
    return columns, rows, [{"name": "t", "values": list(cfg.time_grid)}], {}


def _run_steady(cfg):
    sigma = _liouvillian(cfg)
    ss = steady_state(sigma, vectorize(_initial(cfg)))
    rows = [[i, j, ss[i, j].real, ss[i, j].imag] for i in range(4) for j in range(4)]
    closed = _closed_form(cfg, cfg.bath)
    summary = {
        "negativity": negativity(ss, cfg.negativity_factor),
        "mutual_information": mutual_information(ss),
        "probe_excited": _probe_excited(ss),
        "null_dimension": null_dimension(sigma),
        "closed_form_max_deviation": None if closed is None else float(np.max(np.abs(closed - ss))),
    }
    return ["row", "col", "re", "im"], rows, [], summary


def _run_negativity(cfg):
    sigma = _liouvillian(cfg)
    states = sample_initial_states(cfg.samples, cfg.seed, cfg.prep, cfg.sampler_sigma)
    v0 = np.stack([vectorize(s) for s in states], axis=1)
    if null_dimension(sigma) == 1:
        n_ss = negativity(steady_state(sigma), cfg.negativity_factor)
    else:
        n_ss = float(np.mean([negativity(steady_state(sigma, v0[:, k]), cfg.negativity_factor)
                              for k in range(v0.shape[1])]))
    rows = []
    for t in cfg.time_grid:
        vt = sla.expm(sigma * t) @ v0
        values = [negativity(vt[:, k].reshape(4, 4), cfg.negativity_factor)
                  for k in range(vt.shape[1])]
        rows.append([t, float(np.mean(values)), n_ss])
    summary = {"steady_negativity": n_ss, "final_mean_negativity": rows[-1][1],
               "samples": cfg.samples, "seed": cfg.seed}
    axes = [{"name": "t", "values": list(cfg.time_grid)}]
    return ["t", "mean_negativity", "steady_negativity"], rows, axes, summary


def _baths(cfg):
    if cfg.sweep_parameter is None:
        return [(None, cfg.bath)]
    return [(v, with_bath_value(cfg.bath, cfg.sweep_parameter, v)) for v in cfg.sweep_values]


def _run_spectrum(cfg):
    nus = np.asarray(cfg.nu_grid)
    v0 = vectorize(_initial(cfg))
    rows, cells = [], []
    for value, bath in _baths(cfg):
        sigma = _liouvillian(cfg, bath)
        ss = steady_state(sigma, v0)
        spec = emission_spectrum(sigma, ss, nus)
        peaks = peak_analysis(spec) if len(nus) >= 51 else None
        cell = {"discarded_weight": spec.discarded_weight, "warning": spec.warning,
                "steady_negativity": negativity(ss, cfg.negativity_factor)}
        if value is not None:
            cell[cfg.sweep_parameter] = value
        if peaks is not None:
            cell.update(peak_count=peaks.count, peak_positions=peaks.positions,
                        peak_heights=peaks.heights, dip_position=peaks.dip_position,
                        dip_depth=peaks.dip_depth)
        cells.append(cell)
        prefix = [] if value is None else [value]
        rows.extend([*prefix, nu, s] for nu, s in zip(nus, spec.values))
    columns = ["nu", "S"]
    axes = [{"name": "nu", "values": list(cfg.nu_grid)}]
    if cfg.sweep_parameter:
        columns.insert(0, cfg.sweep_parameter)
        axes.insert(0, {"name": cfg.sweep_parameter, "values": list(cfg.sweep_values)})
    return columns, rows, axes, {"cells": cells}


def _run_sweep(cfg):
    rows = []
    for value, bath in _baths(cfg):
        sigma = _liouvillian(cfg, bath)
        ss = steady_state(sigma, vectorize(_initial(cfg)))
        rows.append([value, negativity(ss, cfg.negativity_factor), mutual_information(ss),
                     _probe_excited(ss)])
    columns = [cfg.sweep_parameter, "negativity", "mutual_information", "probe_excited"]
    axes = [{"name": cfg.sweep_parameter, "values": list(cfg.sweep_values)}]
    return columns, rows, axes, {"quantity": cfg.sweep_quantity}


def _run_cv(cfg):
    rows = []
    for gamma in cfg.cv_gamma_diss:
        for nbar in cfg.cv_nbar:
            for tau in cfg.cv_tau:
                p = evolve_two_mode_squeezed(cfg.cv_r, BathParams(gamma, 0.0, nbar), tau)
                rows.append([gamma, nbar, tau, marginal_mode1(p).E_beta, p.E_alpha, p.F, p.D,
                             gaussian_log_negativity(covariance_matrix(p))])
    e_beta = sorted({row[3] for row in rows})
    summary = {"r": cfg.cv_r, "distinct_E_beta": e_beta,
               "max_log_negativity": max(row[7] for row in rows)}
    axes = [{"name": "gamma_diss", "values": list(cfg.cv_gamma_diss)},
            {"name": "nbar", "values": list(cfg.cv_nbar)},
            {"name": "tau", "values": list(cfg.cv_tau)}]
    columns = ["gamma_diss", "nbar", "tau", "E_beta", "E_alpha", "F", "D", "log_negativity"]
    return columns, rows, axes, summary


_TASKS = {
    "evolve": _run_evolve,
    "steady": _run_steady,
    "negativity": _run_negativity,
    "spectrum": _run_spectrum,
    "sweep": _run_sweep,
    "cv-marginal": _run_cv,
}


def run(cfg: RunConfig) -> SweepResult:
    columns, rows, axes, summary = _TASKS[cfg.task](cfg)
    metadata = {
        "tool": "envprobe",
        "version": __version__,
        "task": cfg.task,
        "model": cfg.model,
        "config": cfg.to_sections(),
        "conventions": conventions(cfg),
        "summary": summary,
    }
    data = np.array(rows, dtype=float).reshape(len(rows), len(columns))
    return SweepResult(cfg.task, columns, data, axes, _plain(metadata))


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _dumps(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def format_csv(result: SweepResult):
    meta = result.metadata
    lines = [
        f"# {meta['tool']} {meta['version']} task={result.task} model={meta['model']}",
        f"# conventions: {_dumps(meta['conventions'])}",
        f"# config: {_dumps(meta['config'])}",
        f"# summary: {_dumps(meta['summary'])}",
        "# columns: " + ",".join(result.columns),
    ]
    for row in result.data:
        lines.append(",".join(f"{x:.15g}" for x in row))
    return "\n".join(lines) + "\n"


def format_json(result: SweepResult, timestamp=True):
    meta = dict(result.metadata)
    if timestamp:
        meta["generated_at"] = datetime.now(timezone.utc).isoformat()
    payload = {
        "metadata": meta,
        "axes": result.axes,
        "columns": result.columns,
        "data": [[float(f"{x:.15g}") for x in row] for row in result.data],
    }
    return json.dumps(_plain(payload), indent=1, sort_keys=True) + "\n"


def write_atomic(path, text=None, writer=None):
    """Write a file through a temporary sibling so readers never see a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=path.suffix)
    try:
        if writer is None:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
        else:
            os.close(fd)
            writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
