#!/usr/bin/env python3
"""
corrwitness command-line interface

Usage:
    corrwitness witness --input rho.json
    corrwitness saturate --input rho.json --sigma sigma.json
    corrwitness sweep --hamiltonian H.json --input rho.json --t-max 10 --steps 200 --out sweep.csv
    corrwitness chain-demo --spins 4 --site 4 --trials 20
    corrwitness env-corr --input rho_SBC.json
    corrwitness tomography-demo --seed 7 --queries 3
    corrwitness validate --input rho.json --kind density

Operators are JSON files {"dims": [...], "re": [[...]], "im": [[...]]}.
Without --input a seeded random instance is drawn.

Exit codes: 0 ok, 2 input error, 3 domain refusal, 4 internal error.
"""
import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO, Tuple

import numpy as np

from .dynamics import TimeGrid, sweep, verify_undetectable
from .errors import (
    ConfigurationError,
    ConsistencyError,
    DimensionMismatchError,
    EigenDecompositionError,
    IdenticalStatesError,
    InvalidOperatorError,
    NotSaturableError,
    OperatorFileError,
    ScenarioError,
    UncorrelatedStateError,
)
from .operator_io import load_operator, operator_to_dict, read_operator_file
from .operators import (
    DensityOperator,
    SpaceDims,
    _rng,
    expm_hermitian,
    partial_trace_E,
    product_of_marginals,
    random_hermitian,
    random_kraus,
    random_state,
    random_unitary,
)
from .params import (
    CSV_SIGNIFICANT_DIGITS,
    DEFAULT_SEED,
    DEFAULT_STEPS,
    DEFAULT_T_MAX,
    DEFAULT_TOLERANCES,
    THREADS_ENV_VAR,
    Tolerances,
)
from .protocols import TripartiteState, detect_env_correlation
from .tomography import evaluate_query, initial_state_maps, local_family, run_tomography
from .validator import check_operator
from .witness import detect_correlation, saturate_pair

_log = logging.getLogger(__name__)

COMMANDS = ("witness", "saturate", "sweep", "chain-demo", "env-corr",
            "tomography-demo", "validate")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_REFUSED = 3
EXIT_INTERNAL = 4

_EXIT_CODES: Tuple[Tuple[type, int], ...] = (
    (OperatorFileError, EXIT_INPUT),
    (InvalidOperatorError, EXIT_INPUT),
    (DimensionMismatchError, EXIT_INPUT),
    (ConfigurationError, EXIT_INPUT),
    (UncorrelatedStateError, EXIT_REFUSED),
    (NotSaturableError, EXIT_REFUSED),
    (IdenticalStatesError, EXIT_REFUSED),
    (ScenarioError, EXIT_REFUSED),
    (ConsistencyError, EXIT_INTERNAL),
    (EigenDecompositionError, EXIT_INTERNAL),
)


def exit_code_for(exc: BaseException) -> int:
    for cls, code in _EXIT_CODES:
        if isinstance(exc, cls):
            return code
    return EXIT_INTERNAL


# ============================================================================
# RUN CONFIGURATION
# ============================================================================

@dataclass(frozen=True)
class RunConfig:
    """
    One CLI run. JSON config files use these field names; flags override them.

    The seed determines every random draw, so equal configs give equal output bytes.
    """

    command: str = "witness"
    input: Optional[str] = None
    sigma: Optional[str] = None
    hamiltonian: Optional[str] = None
    seed: int = DEFAULT_SEED
    dims: Tuple[int, ...] = (2, 2)
    t_max: float = DEFAULT_T_MAX
    steps: int = DEFAULT_STEPS
    out: Optional[str] = None
    format: str = "json"
    tol_det: Optional[float] = None
    tolerances: Dict[str, float] = field(default_factory=dict)
    spins: int = 4
    site: Optional[int] = None
    trials: int = 20
    control: bool = False
    queries: int = 0
    kind: str = "density"

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigurationError(f"command must be one of {list(COMMANDS)}, got {self.command!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not self.t_max > 0:
            raise ConfigurationError(f"t_max must be positive, got {self.t_max}")
        if int(self.steps) < 2:
            raise ConfigurationError(f"steps must be at least 2, got {self.steps}")
        if self.format not in ("json", "csv"):
            raise ConfigurationError(f"format must be 'json' or 'csv', got {self.format!r}")
        if self.trials < 1:
            raise ConfigurationError(f"trials must be positive, got {self.trials}")
        if self.queries < 0:
            raise ConfigurationError(f"queries must be nonnegative, got {self.queries}")
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ConfigurationError(f"dims must be positive integers, got {list(self.dims)}")
        object.__setattr__(self, "dims", dims)
        # unknown tolerance names fail here rather than mid-run
        _ = self.tol

    @property
    def tol(self) -> Tolerances:
        overrides = dict(self.tolerances)
        if self.tol_det is not None:
            overrides["det"] = self.tol_det
        try:
            return DEFAULT_TOLERANCES.with_overrides(**overrides)
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"invalid tolerance override: {exc}") from exc

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid(self.t_max, self.steps)

    @property
    def chain_site(self) -> int:
        return self.spins if self.site is None else self.site


CONFIG_KEYS = frozenset(f.name for f in fields(RunConfig))


def load_config(path: str) -> Dict[str, Any]:
    """Decoded config file; keys must be RunConfig field names."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"config file must hold a JSON object, got {type(data).__name__}")
    unknown = sorted(set(data) - CONFIG_KEYS)
    if unknown:
        raise ConfigurationError(f"unknown keys in config file: {unknown}")
    return data


def build_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then explicitly given flags."""
    values: Dict[str, Any] = load_config(args.config) if args.config else {}
    values.pop("command", None)
    for name in CONFIG_KEYS - {"command", "tolerances"}:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    try:
        return RunConfig(command=args.command, **values)
    except TypeError as exc:
        raise ConfigurationError(f"invalid config value: {exc}") from exc


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "1")
    try:
        workers = int(raw)
    except ValueError as exc:
        raise ConfigurationError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}") from exc
    if workers < 1:
        raise ConfigurationError(f"{THREADS_ENV_VAR} must be positive, got {workers}")
    return workers


# ============================================================================
# INPUTS
# ============================================================================

def _bipartite_state(config: RunConfig, path: Optional[str],
                     rng: np.random.Generator) -> DensityOperator:
    """State from `path`, else a random full-rank state on config.dims."""
    if path is None:
        space = SpaceDims.of(config.dims)
        return random_state(space.N, seed=rng, dims=space.dims)
    state = load_operator(path, "density", config.tol)
    SpaceDims.of(state.dims).require_bipartite()
    return state


def _hamiltonian(config: RunConfig, space: SpaceDims, rng: np.random.Generator) -> np.ndarray:
    if config.hamiltonian is None:
        return random_hermitian(space.N, seed=rng, dims=space.dims).matrix
    H = load_operator(config.hamiltonian, "hermitian", config.tol)
    if H.dim != space.N:
        raise DimensionMismatchError(f"Hamiltonian has size {H.dim}, states have {space.N}")
    return H.matrix


# ============================================================================
# COMMANDS
# ============================================================================

def cmd_witness(config: RunConfig) -> Dict[str, Any]:
    rng = _rng(config.seed)
    rho = _bipartite_state(config, config.input, rng)
    U, report = detect_correlation(rho, tol=config.tol)
    out = report.to_dict()
    out["U"] = operator_to_dict(U)
    return out


def cmd_saturate(config: RunConfig) -> Dict[str, Any]:
    """sigma defaults to the product of the marginals of rho."""
    rng = _rng(config.seed)
    rho = _bipartite_state(config, config.input, rng)
    if config.sigma is None:
        sigma = product_of_marginals(rho)
    else:
        sigma = load_operator(config.sigma, "density", config.tol)
    U, report = saturate_pair(rho, sigma, dims=rho.dims, tol=config.tol)
    out = report.to_dict()
    out["U"] = operator_to_dict(U)
    return out


def cmd_sweep(config: RunConfig) -> Tuple[Dict[str, Any], List[str]]:
    """Summary plus CSV rows; sigma defaults to the product of the marginals."""
    rng = _rng(config.seed)
    rho = _bipartite_state(config, config.input, rng)
    space = SpaceDims.of(rho.dims)
    if config.sigma is None:
        sigma = product_of_marginals(rho)
    else:
        sigma = load_operator(config.sigma, "density", config.tol)
    H = _hamiltonian(config, space, rng)
    result = sweep(H, rho.matrix, sigma.matrix, config.grid, dims=space,
                   workers=worker_count(), tol=config.tol)
    return result.summary(), result.csv_rows(CSV_SIGNIFICANT_DIGITS)


def cmd_chain_demo(config: RunConfig) -> Dict[str, Any]:
    report = verify_undetectable(config.spins, config.chain_site, config.trials, config.grid,
                                 seed=config.seed, control=config.control,
                                 workers=worker_count(), tol=config.tol)
    return report.to_dict()


def cmd_env_corr(config: RunConfig) -> Dict[str, Any]:
    """
    Input dims [d_S, d_B, d_C]; without --input a random rho_S (x) rho_BC on
    config.dims (default 2, 2, 2). --sigma replaces sigma_S.
    """
    rng = _rng(config.seed)
    if config.input is None:
        dims = config.dims if len(config.dims) == 3 else (2, 2, 2)
        rho_S = random_state(dims[0], seed=rng)
        rho_BC = random_state(dims[1] * dims[2], seed=rng)
        tri = TripartiteState.from_parts(rho_S, rho_BC, dims[1], dims[2])
    else:
        matrix, dims = read_operator_file(config.input)
        if len(dims) != 3:
            raise DimensionMismatchError(f"env-corr input needs dims [d_S, d_B, d_C], got {list(dims)}")
        state = DensityOperator(matrix, (dims[0], dims[1] * dims[2]), tol=config.tol)
        tri = TripartiteState(state, (dims[0], dims[1], dims[2]))
    sigma_S = None if config.sigma is None else load_operator(config.sigma, "density", config.tol)
    U, report = detect_env_correlation(tri, sigma_S=sigma_S, tol=config.tol)
    out = report.to_dict()
    out["U"] = operator_to_dict(U)
    return out


def cmd_tomography_demo(config: RunConfig) -> List[Dict[str, Any]]:
    """
    Tomography of rho_SE^(1) under U = exp(-i H t_max), or a Haar-random U
    without --hamiltonian. Queries: rho_S^(1) (x) rho_E^(1), then `queries` states
    prepared from rho_SE^(1) by random local channels.
    """
    rng = _rng(config.seed)
    rho = _bipartite_state(config, config.input, rng)
    space = SpaceDims.of(rho.dims)
    if config.hamiltonian is None:
        U = random_unitary(space.N, seed=rng, dims=space.dims)
    else:
        U = expm_hermitian(_hamiltonian(config, space, rng), config.t_max, config.tol)
    basis, maps = initial_state_maps(partial_trace_E(rho).matrix, config.tol)
    named: List[Tuple[str, np.ndarray]] = [("product", product_of_marginals(rho).matrix)]
    channels = [random_kraus(space.d_S, 2, seed=rng) for _ in range(config.queries)]
    for k, state in enumerate(local_family(rho, channels)):
        named.append((f"local-{k + 1}", state))
    record = run_tomography(rho, U, maps, basis=basis,
                            queries=[q for _, q in named], tol=config.tol)
    return [evaluate_query(record, q, config.tol).to_dict(name) for name, q in named]


def cmd_validate(config: RunConfig) -> Tuple[Dict[str, Any], List[Dict[str, Any]]]:
    if config.input is None:
        raise ConfigurationError("validate needs --input")
    matrix, dims = read_operator_file(config.input)
    violations = check_operator(matrix, config.kind, dims, config.tol)
    report = {"file": config.input, "kind": config.kind, "valid": not violations,
              "violations": violations}
    return report, violations


# ============================================================================
# ARGUMENT PARSING & OUTPUT
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrwitness",
        description="Detect initial system-environment correlations from reduced dynamics",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  corrwitness witness --input bell.json
  corrwitness sweep --input bell.json --hamiltonian H.json --t-max 10 --steps 1000 --out sweep.csv
  corrwitness chain-demo --spins 4 --site 4 --trials 50 --control
  corrwitness validate --input rho.json --kind density

Exit codes: 0 ok, 2 input error, 3 domain refusal, 4 internal error.
        """
    )
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for INFO, -vv for DEBUG logging on stderr")

    # every flag defaults to None so that only explicitly given flags override --config
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="JSON run configuration")
    common.add_argument("--input", type=str, default=None, help="operator file of the initial state")
    common.add_argument("--sigma", type=str, default=None, help="operator file of the comparison state")
    common.add_argument("--hamiltonian", type=str, default=None, help="operator file of H")
    common.add_argument("--seed", type=int, default=None, help=f"random seed (default: {DEFAULT_SEED})")
    common.add_argument("--dims", type=int, nargs="+", default=None,
                        help="factor dimensions of random instances (default: 2 2)")
    common.add_argument("--t-max", dest="t_max", type=float, default=None,
                        help=f"final time (default: {DEFAULT_T_MAX})")
    common.add_argument("--steps", type=int, default=None,
                        help=f"grid points including t = 0 (default: {DEFAULT_STEPS})")
    common.add_argument("--out", type=str, default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=["json", "csv"], default=None,
                        help="output format (csv only for sweep)")
    common.add_argument("--tol-det", dest="tol_det", type=float, default=None,
                        help=f"detection threshold (default: {DEFAULT_TOLERANCES.det})")
    common.add_argument("--spins", type=int, default=None, help="chain length (default: 4)")
    common.add_argument("--site", type=int, default=None,
                        help="first environment spin (default: last spin)")
    common.add_argument("--trials", type=int, default=None, help="random trials (default: 20)")
    common.add_argument("--control", action="store_true", default=None,
                        help="chain-demo: draw the detectable control states")
    common.add_argument("--queries", type=int, default=None,
                        help="tomography-demo: extra locally prepared queries (default: 0)")
    common.add_argument("--kind", choices=["density", "hermitian", "unitary"], default=None,
                        help="validate: operator kind (default: density)")

    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "witness": "witness unitary and detection report for rho_SE",
        "saturate": "unitary maximising D(rho'_S, sigma'_S) for a pair of states",
        "sweep": "detection trajectory under exp(-iHt)",
        "chain-demo": "ZZ spin-chain undetectability check",
        "env-corr": "detect correlations inside a bipartite environment",
        "tomography-demo": "linear process tomography with correlated inputs",
        "validate": "check an operator file against its invariants",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _write(text: str, path: Optional[str], stream: TextIO) -> None:
    if path is None:
        stream.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def run(config: RunConfig, stdout: TextIO) -> int:
    """Execute one configured command; errors propagate to main."""
    if config.format == "csv" and config.command != "sweep":
        raise ConfigurationError(f"--format csv is only available for sweep, not {config.command}")
    _log.info("running %s (seed=%d)", config.command, config.seed)

    if config.command == "sweep":
        summary, rows = cmd_sweep(config)
        csv_text = "\n".join(rows) + "\n"
        if config.out is not None:
            _write(csv_text, config.out, stdout)
            stdout.write(_dump(summary))
        elif config.format == "csv":
            stdout.write(csv_text)
        else:
            stdout.write(_dump(summary))
        return EXIT_OK

    if config.command == "validate":
        report, violations = cmd_validate(config)
        _write(_dump(report), config.out, stdout)
        if violations:
            first = violations[0]
            raise InvalidOperatorError(first["invariant"], first["value"], first["threshold"])
        return EXIT_OK

    handlers = {
        "witness": cmd_witness,
        "saturate": cmd_saturate,
        "chain-demo": cmd_chain_demo,
        "env-corr": cmd_env_corr,
        "tomography-demo": cmd_tomography_demo,
    }
    _write(_dump(handlers[config.command](config)), config.out, stdout)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(build_config(args), sys.stdout)
    except Exception as exc:  # every failure leaves as a JSON body and an exit code
        code = exit_code_for(exc)
        _log.debug("command failed", exc_info=True)
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc),
                                     "exit_code": code}) + "\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
