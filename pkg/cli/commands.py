import os
import sys
import logging
import argparse
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from typing import List, Optional, Tuple

from tqdm import tqdm

from cli.config import COMMANDS, VERSION, RunConfig, build_config, configure_logging
from cli.output import comment_block, dump_csv, dump_json
from core.errors import PARSE_ERROR_EXIT, VERIFY_DEVIATION_EXIT, ParseError, SeqRegError, UnexpectedError
from core.extreal import as_float, format_ext, is_finite
from core.growth import growth_indicators, is_class_lc, is_log_convex
from core.loader import load_sequence
from core.regime import classify_regime
from core.sequence import WEIGHT, SequenceSpec
from minorant.construct import log_convex_minorant, reconstruct_from_trace, regularize
from oracle.report import verify_minorant, verify_omega, verify_phireg
from phireg.analysis import compare_regularizations, regularize_with_phi
from phireg.phi import make_phi
from weights.grids import linear_grid, log_grid
from weights.omega import (
    counting_function,
    omega_direct,
    omega_double_tilde,
    omega_integral,
    omega_piecewise,
    omega_tilde,
)

logger = logging.getLogger(__name__)

OMEGA_COLUMNS = ("t", "omega_direct", "omega_piecewise", "omega_integral", "omega_tilde", "omega_double_tilde")


class Output:
    """What one input file produced: a JSON payload or CSV text, and an oracle report when verified."""

    def __init__(self, payload=None, header=None, rows=None, report=None):
        self.payload = payload
        self.header = header
        self.rows = rows
        self.report = report

    @property
    def deviates(self) -> bool:
        return self.report is not None and not self.report.passed

    def render(self, fmt: str) -> str:
        if fmt == "csv" and self.header is not None:
            text = dump_csv(self.header, self.rows)
            if self.report is not None:
                text += comment_block("oracle", self.report.to_dict())
            return text
        payload = dict(self.payload)
        if self.report is not None:
            payload["oracle"] = self.report.to_dict()
        return dump_json(payload)


def _grid(config: RunConfig):
    if config.loggrid:
        return log_grid(config.loggrid)
    return linear_grid(config.grid_spec)


def _guarded(fn, *args):
    """Value of fn, or None where the quantity is undefined for this input."""
    try:
        return fn(*args)
    except SeqRegError as e:
        logger.debug(f"{getattr(fn, '__name__', fn)} undefined: {e}")
        return None


def classify(seq: SequenceSpec, config: RunConfig) -> Output:
    regime = classify_regime(seq, config.window, eps=config.tolerance)
    convexity = is_log_convex(seq, config.window, config.tolerance)
    payload = {
        "regime": regime.to_dict(),
        "description": regime.describe(),
        "log_convex": convexity.log_convex,
        "violating_index": convexity.violating_index,
        "class_lc": asdict(is_class_lc(seq, config.window, config.tolerance)),
    }
    indicators = _guarded(growth_indicators, seq, config.window, config.tolerance)
    if indicators is not None:
        payload["growth_indicators"] = asdict(indicators)
    return Output(payload=payload)


def minorant(seq: SequenceSpec, config: RunConfig) -> Output:
    build = log_convex_minorant if seq.kind == WEIGHT else regularize
    result = build(seq, config.window, eps=config.tolerance)
    report = verify_minorant(result, config.tolerance) if config.verify else None
    return Output(payload=result.to_dict(), report=report)


def _omega_row(seq: SequenceSpec, t: float, config: RunConfig, log_convex: bool) -> list:
    window, eps = config.window, config.tolerance
    direct = _guarded(omega_direct, seq, t, window, eps)
    row = [t, None if direct is None else direct.value]
    if log_convex:
        row.append(_guarded(omega_piecewise, seq, t, window, eps))
        row.append(_guarded(omega_integral, seq, t, window, eps))
    else:
        row.extend([None, None])
    row.append(_guarded(omega_tilde, seq, t, window, eps))
    row.append(_guarded(omega_double_tilde, seq, t, window, eps))
    return row


def assoc(seq: SequenceSpec, config: RunConfig) -> Output:
    ts = [float(t) for t in _grid(config)]
    log_convex = is_log_convex(seq, config.window, config.tolerance).log_convex
    rows = [_omega_row(seq, t, config, log_convex) for t in ts]
    payload = {"columns": {name: [row[i] for row in rows] for i, name in enumerate(OMEGA_COLUMNS)}}
    if log_convex:
        counting = _guarded(counting_function, seq, config.window, config.tolerance)
        if counting is not None:
            payload["counting"] = counting.to_dict()
    report = verify_omega(seq, ts, config.window, config.tolerance) if config.verify else None
    return Output(payload=payload, header=OMEGA_COLUMNS, rows=rows, report=report)


def _plot_points(trace, config: RunConfig) -> List[float]:
    xs = {as_float(bp.x) for bp in trace.breakpoints}
    xs.update(float(t) for t in _grid(config))
    return sorted(x for x in xs if is_finite(x))


def _trace_rows(trace, config: RunConfig, with_counting: bool) -> list:
    counting = trace.counting()
    rows = []
    for t in _plot_points(trace, config):
        if not trace.in_domain(t) and not config.extended:
            continue
        value = trace(t, extended=config.extended)
        level = counting(t) if trace.in_domain(t) else None
        rows.append([t, level, value] if with_counting else [t, value])
    return rows


def trace(seq: SequenceSpec, config: RunConfig) -> Output:
    result = regularize(seq, config.window, eps=config.tolerance)
    payload = {"trace": result.trace.to_dict(), "regime": result.regime.to_dict()}
    if config.reconstruct:
        payload["reconstructed"] = [
            format_ext(reconstruct_from_trace(result.trace, p, result.regime)) for p in range(result.window)
        ]
    report = verify_minorant(result, config.tolerance) if config.verify else None
    rows = _trace_rows(result.trace, config, with_counting=False)
    return Output(payload=payload, header=("t", "A"), rows=rows, report=report)


def phireg(seq: SequenceSpec, config: RunConfig) -> Output:
    phi = make_phi(config.phi)
    result = regularize_with_phi(seq, phi, config.window, eps=config.tolerance)
    report = None
    if config.verify:
        report = verify_minorant(result, config.tolerance) if phi.infinite else verify_phireg(result, phi)
    rows = _trace_rows(result.trace, config, with_counting=True)
    return Output(payload=result.to_dict(), header=("t", "m_phi", "A_phi"), rows=rows, report=report)


def compare(seq: SequenceSpec, config: RunConfig) -> Output:
    if not config.phi1 or not config.phi2:
        raise ParseError("compare needs both --phi1 and --phi2", field="--phi1/--phi2")
    phi1 = make_phi(config.phi1)
    phi2 = make_phi(config.phi2)
    report = compare_regularizations(seq, phi1, phi2, config.window, config.tolerance)
    return Output(payload=report.to_dict())


HANDLERS = {
    "classify": classify,
    "minorant": minorant,
    "assoc": assoc,
    "trace": trace,
    "phireg": phireg,
    "compare": compare,
}


def process_file(file_path: str, config: RunConfig) -> Tuple[Optional[Output], Optional[SeqRegError]]:
    try:
        seq = load_sequence(file_path)
        return HANDLERS[config.command](seq, config), None
    except SeqRegError as e:
        return None, e
    except Exception as e:
        logger.exception(f"unexpected error while processing {file_path}")
        return None, UnexpectedError(f"{type(e).__name__}: {e}")


def run(config: RunConfig, stream=None) -> int:
    """
    Runs the configured command over every input file, concurrently, and
    writes the outputs in input order.

    Returns:
    The exit status: the largest exit code over all files.
    """
    stream = stream or sys.stdout
    fmt = config.output_format
    with ThreadPoolExecutor(max_workers=config.workers) as executor:
        futures = [executor.submit(process_file, path, config) for path in config.inputs]
        results = [
            future.result()
            for future in tqdm(futures, desc=config.command, file=sys.stderr, disable=len(futures) < 2)
        ]

    status = 0
    rendered = []
    for path, (output, error) in zip(config.inputs, results):
        if error is not None:
            print(f"{path}: {error}", file=sys.stderr)
            status = max(status, error.exit_code)
            continue
        if output.deviates:
            status = max(status, VERIFY_DEVIATION_EXIT)
        rendered.append((path, output.render(fmt)))

    if len(config.inputs) == 1:
        for _, text in rendered:
            stream.write(text)
    elif fmt == "csv":
        for path, text in rendered:
            stream.write(f"# input: {os.path.basename(path)}\n{text}")
    else:
        stream.write("[\n" + ",\n".join(text.rstrip("\n") for _, text in rendered) + "\n]\n")
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seqreg", description="Regularization of sequences by convex minorants")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub = subparsers.add_parser(name)
        sub.add_argument("inputs", nargs="+", help="Sequence files (JSON or YAML)")
        sub.add_argument("--window", type=int, help="Number of leading indices (default 64)")
        sub.add_argument("--tolerance", type=float, help="Float comparison tolerance")
        sub.add_argument("--emit", choices=["json", "csv"], help="Output format")
        sub.add_argument("--verify", action="store_true", help="Cross-check against the brute-force oracle")
        sub.add_argument("--extended", action="store_true", help="Report +inf outside the trace domain")
        sub.add_argument("--grid", help="Linear grid start:stop:step")
        sub.add_argument("--loggrid", help="Log-spaced grid start:stop:num")
        sub.add_argument("--phi", help="exp | expaffine:a,b | blowup:T | infinite | piecewise:<file>")
        sub.add_argument("--phi1", help="First regularizing function for compare")
        sub.add_argument("--phi2", help="Second regularizing function for compare")
        sub.add_argument("--reconstruct", action="store_true", help="Emit values recovered from the trace")
        sub.add_argument("--workers", type=int, help="Threads for multi-file runs")
        sub.add_argument("--log-level", dest="log_level", help="Overrides SEQREG_LOG_LEVEL")
    return parser


def main(argv=None, stream=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = build_config(
            command=args.command,
            inputs=args.inputs,
            window=args.window,
            tolerance=args.tolerance,
            emit=args.emit,
            verify=args.verify,
            extended=args.extended,
            grid=args.grid,
            loggrid=args.loggrid,
            phi=args.phi,
            phi1=args.phi1,
            phi2=args.phi2,
            reconstruct=args.reconstruct,
            workers=args.workers,
            log_level=args.log_level,
        )
    except ParseError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return PARSE_ERROR_EXIT
    configure_logging(config.log_level)
    return run(config, stream)
