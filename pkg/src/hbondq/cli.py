"""Command-line front end.

Each subcommand reads an optional JSON config, runs one scenario and emits
a result document (JSON with sorted keys, reals at 9 significant digits)
or a flat table.  Complex numbers in configs may be given as ``[re, im]``.

Exit codes: 0 success, 2 config error, 3 numerical or domain error.
``reproduce-paper`` also exits 1 when any claim row fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import bonds, claims, entanglement, environment, qmath, recognition

log = logging.getLogger("hbondq")

EXIT_OK = 0
EXIT_CLAIMS_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

RENORM_TOL = 1e-6
SIG_DIGITS = 9


class ConfigError(Exception):
    pass


# -- config parsing -------------------------------------------------------------

def _complex(x, where: str) -> complex:
    if isinstance(x, bool):
        raise ConfigError(f"{where}: expected a number, got {x!r}")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(x[0], x[1])
    raise ConfigError(f"{where}: expected a number or [re, im], got {x!r}")


def _real(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise ConfigError(f"{where}: expected a finite real number, got {x!r}")
    return float(x)


def _int(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(f"{where}: expected an integer, got {x!r}")
    return x


def _group(values: Sequence[complex], where: str) -> list[complex]:
    """Normalize an amplitude group, warning on small drift and rejecting large drift."""
    norm = math.sqrt(sum(abs(v) ** 2 for v in values))
    drift = abs(norm - 1.0)
    if drift > RENORM_TOL:
        raise ConfigError(f"{where}: norm {norm:.9g} is not 1 within {RENORM_TOL:g}")
    if drift > qmath.NORM_TOL:
        log.warning("%s: norm %.12g renormalized to 1", where, norm)
        values = [v / norm for v in values]
    return list(values)


def _amplitudes(cfg: dict, key: str, n: int | None = None) -> list[complex]:
    raw = cfg.get(key)
    if not isinstance(raw, list) or (n is not None and len(raw) != n):
        size = f"{n} " if n is not None else ""
        raise ConfigError(f"'{key}' must be a list of {size}amplitudes")
    return _group([_complex(v, f"{key}[{i}]") for i, v in enumerate(raw)], key)


def _weights(raw, where: str) -> list[float]:
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"'{where}' must be a non-empty list")
    w = [_real(v, f"{where}[{i}]") for i, v in enumerate(raw)]
    if any(v < 0 for v in w):
        raise ConfigError(f"'{where}' entries must be non-negative")
    total = sum(w)
    if abs(total - 1.0) > RENORM_TOL:
        raise ConfigError(f"'{where}' sums to {total:.9g}, not 1")
    if abs(total - 1.0) > qmath.NORM_TOL:
        log.warning("%s: weights summing to %.12g renormalized", where, total)
        w = [v / total for v in w]
    return w


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


# -- result rendering ---------------------------------------------------------------

def _clean(x: Any) -> Any:
    """Convert a result tree to JSON-ready values with rounded reals."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_clean(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_clean(float(x.real)), _clean(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            return str(float(x))
        v = float(f"{float(x):.{SIG_DIGITS}g}")
        return 0.0 if v == 0 else v
    return x


def render_json(doc: dict) -> str:
    return json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n"


def _flatten(prefix: str, x: Any, out: list[tuple[str, str]]):
    if isinstance(x, dict):
        for k in sorted(x):
            _flatten(f"{prefix}.{k}" if prefix else str(k), x[k], out)
    else:
        out.append((prefix, json.dumps(x)))


def render_table(doc: dict) -> str:
    rows: list[tuple[str, str]] = []
    _flatten("", _clean(doc), rows)
    width = max((len(k) for k, _ in rows), default=0)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


def _state_doc(psi: qmath.StateVector, tol: float = 1e-12) -> dict:
    return {
        "labels": list(psi.layout.labels),
        "amplitudes": {
            "".join(str(d) for d in np.unravel_index(i, psi.layout.dims)): a
            for i, a in enumerate(psi.amps) if abs(a) > tol
        },
    }


# -- subcommands ------------------------------------------------------------------

def _bond_eof(psi: qmath.StateVector) -> dict:
    labels = psi.layout.labels
    return {f"{'+'.join(labels[:k])}|{'+'.join(labels[k:])}":
            entanglement.entropy_of_entanglement(psi, labels[:k]) for k in range(1, len(labels))}


def run_bond(cfg: dict, seed: int) -> dict:
    """Build one bond model.  ``model`` picks the constructor; see README for fields."""
    model = cfg.get("model", "unified")
    if model == "covalent_qubit" or model == "covalent_qutrit":
        a, b = _amplitudes(cfg, "ab", 2) if "ab" in cfg else [1 / math.sqrt(2)] * 2
        alpha, beta, gamma = _amplitudes(cfg, "ionic", 3) if "ionic" in cfg else [1.0, 0.0, 0.0]
        amps = bonds.CovalentAmplitudes(a, b, alpha, beta, gamma)
        psi = bonds.covalent_qubit(amps) if model == "covalent_qubit" else bonds.covalent_qutrit(amps)
    elif model == "classical":
        psi = bonds.classical_hbond(*_amplitudes(cfg, "amplitudes", 2))
    elif model == "electron":
        psi = bonds.covalent_hbond_electron(*_amplitudes(cfg, "amplitudes", 2))
    elif model == "proton":
        psi = bonds.covalent_hbond_proton(*_amplitudes(cfg, "amplitudes", 2))
    elif model == "unified":
        c = _amplitudes(cfg, "c", 3) if "c" in cfg else [1 / math.sqrt(3)] * 3
        psi = bonds.unified_state(bonds.HBondAmplitudes(*c))
    else:
        raise ConfigError(f"unknown bond model {model!r}")
    return {"kind": "bond", "model": model, "seed": seed, "state": _state_doc(psi), "eof": _bond_eof(psi)}


def run_thermal(cfg: dict, seed: int) -> dict:
    levels = environment.symmetric_hbond_levels()
    if "levels" in cfg:
        raw = cfg["levels"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("'levels' must be a list of [c1, c2, c3] amplitude triples")
        levels = tuple(
            bonds.unified_state(bonds.HBondAmplitudes(*_amplitudes({"c": lv}, "c", 3))) for lv in raw
        )
    if "energies" in cfg:
        energies = cfg["energies"]
        if not isinstance(energies, list):
            raise ConfigError("'energies' must be a list")
        beta = _real(cfg.get("inverse_temperature", 1.0), "inverse_temperature")
        system = environment.EigenSystem.from_energies([_real(e, "energies") for e in energies], levels)
        rho = environment.thermal_state(system, beta)
    else:
        w = _weights(cfg.get("weights", [0.7, 0.2, 0.1]), "weights")
        rho = environment.thermal_state_from_weights(environment.EigenSystem.from_weights(w, levels))
    dephased = environment.dephase(rho)
    doc = {
        "kind": "thermal",
        "seed": seed,
        "concurrence": entanglement.concurrence_2q(rho),
        "eof": entanglement.eof_2q(rho),
        "dephased_diagonal": dephased.diagonal(),
        "dephased_eof": entanglement.eof_2q(dephased),
    }
    if cfg.get("roof", False):
        res = entanglement.eof_minimize(rho, ["X1"], seed=seed)
        doc["eof_roof"] = res.value
        doc["roof_converged"] = res.converged
    return doc


def run_swap(cfg: dict, seed: int) -> dict:
    c = _amplitudes(cfg, "c")
    if len(c) == 2:
        c.append(0.0)
    if len(c) != 3:
        raise ConfigError("'c' must hold 2 or 3 amplitudes")
    ligand = recognition.LigandProfile("config", bonds.HBondAmplitudes(*c))
    x2 = None
    if "x2_init" in cfg:
        x2 = qmath.StateVector(qmath.RegisterLayout.qubits("X2"), np.array(_amplitudes(cfg, "x2_init", 2)))
    final, tr = recognition.swap_protocol(ligand, x2_init=x2, seed=seed)
    return {
        "kind": "swap",
        "seed": seed,
        "outcome": tr.outcome_label,
        "probability": tr.probability,
        "corrections": list(tr.corrections),
        "final": _state_doc(final),
        "eof_before": entanglement.eof_2q(ligand.state()),
        "eof_after": entanglement.eof_2q(final),
    }


def run_recognize(cfg: dict, seed: int) -> dict:
    tol = _real(cfg.get("tol", 1e-6), "tol")
    known = recognition.standard_ligands()
    raw = cfg.get("ligands", sorted(known))
    ligands = []
    if isinstance(raw, list):
        for name in raw:
            if name not in known:
                raise ConfigError(f"unknown ligand {name!r}; define it under 'ligands' as an object")
            ligands.append(known[name])
    elif isinstance(raw, dict):
        for name in sorted(raw):
            c = _amplitudes(raw, name, 3)
            ligands.append(recognition.LigandProfile(name, bonds.HBondAmplitudes(*c)))
    else:
        raise ConfigError("'ligands' must be a list of names or an object of name -> [c1, c2, c3]")
    try:
        basis = recognition.EigenBasis.default()
        out = {}
        for lig in ligands:
            r = recognition.classify(lig, basis, tol)
            out[lig.name] = {
                "verdict": r.verdict,
                "index": r.index,
                "distribution": list(r.conformation_distribution),
                "coherence_residual": r.coherence_residual,
                "eof": entanglement.eof_2q(lig.state()),
            }
    except ValueError as exc:
        if isinstance(exc, qmath.QuantumStateError):
            raise
        raise ConfigError(str(exc)) from exc
    return {"kind": "recognize", "seed": seed, "tol": tol, "ligands": out}


def run_capacity(cfg: dict, seed: int) -> dict:
    doc: dict = {"kind": "capacity", "seed": seed}
    if "n" not in cfg and "N" not in cfg:
        raise ConfigError("capacity needs 'n' (bonds) and/or 'N' (agonists)")
    try:
        if "n" in cfg:
            doc["capacity"] = recognition.capacity(_int(cfg["n"], "n"))
        if "N" in cfg:
            mb = recognition.min_bonds(_int(cfg["N"], "N"))
            doc["min_bonds"] = {"exact": mb.exact, "rounded": mb.rounded}
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return doc


def run_reproduce(cfg: dict, seed: int) -> dict:
    report = claims.reproduce_paper()
    return {
        "kind": "reproduce",
        "all_passed": report.all_passed,
        "tolerance": claims.CLAIM_TOL,
        "claims": {r.claim_id: {"published": r.published, "computed": r.computed,
                                "abs_diff": r.abs_diff, "passed": r.passed} for r in report.rows},
    }


RUNNERS = {
    "bond": run_bond,
    "thermal": run_thermal,
    "swap": run_swap,
    "recognize": run_recognize,
    "capacity": run_capacity,
    "reproduce-paper": run_reproduce,
}


def run(kind: str, cfg: dict, seed: int = 0) -> dict:
    """Execute one scenario and return its result document."""
    if kind not in RUNNERS:
        raise ConfigError(f"unknown scenario kind {kind!r}")
    return RUNNERS[kind](cfg, seed)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hbondq", description="Entanglement in hydrogen bonds and molecular recognition.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("bond", "build a bond state and report its entanglement"),
        ("thermal", "thermal mixture, its dephased form and their entanglement"),
        ("swap", "run the entanglement-swapping protocol"),
        ("recognize", "classify ligands as agonists or antagonists"),
        ("capacity", "agonist capacity 3**n - 1 and bonds needed for N agonists"),
        ("reproduce-paper", "recompute every published number and compare"),
    ]:
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", help="JSON scenario file")
        sp.add_argument("--seed", type=int, default=None, help="RNG seed (overrides the config)")
        sp.add_argument("--out", help="write the JSON result document here")
        sp.add_argument("--format", choices=("table", "json"), default="table")
        if name == "capacity":
            sp.add_argument("--n", type=int, help="number of bonds")
            sp.add_argument("--N", dest="N", type=int, help="number of agonists")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "capacity":
            if args.n is not None:
                cfg["n"] = args.n
            if args.N is not None:
                cfg["N"] = args.N
        seed = args.seed if args.seed is not None else _int(cfg.get("seed", 0), "seed")
        doc = run(args.command, cfg, seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (qmath.QuantumStateError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    text = render_json(doc)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text if args.format == "json" else render_table(doc))
    if args.command == "reproduce-paper" and not doc["all_passed"]:
        return EXIT_CLAIMS_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
