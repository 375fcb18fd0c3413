"""Command-line driver: figure data as CSV/JSON, sampling, validation, replay.

Every output file starts with the library version and the full run
configuration as sorted JSON. ``phavkit replay FILE`` rebuilds the run from
that line, so regenerating a file reproduces it byte for byte.

Exit codes: 0 success, 1 validation or numerical failure, 2 usage error.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__, nongauss, optics, phasespace, reconstruct, states, validation
from .exceptions import DomainError, NumericalError, PhavkitError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

STATE_CHOICES = ("phav", "2phav", "thermal", "fock")

# argument names that never enter the embedded config
_NOT_CONFIG = {"out", "handler", "check", "file"}


class UsageError(PhavkitError):
    pass


# -- parsing helpers ---------------------------------------------------------


def parse_grid(text):
    """``"a:b:n"`` gives ``n`` evenly spaced points, otherwise a comma list."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1:
                raise ValueError
            return [float(x) for x in np.linspace(lo, hi, n)]
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad grid {text!r}; use 'min:max:points' or a comma list") from None
    if not values or not all(math.isfinite(v) for v in values):
        raise UsageError(f"bad grid {text!r}")
    return values


def _fmt(value):
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def _config_of(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_CONFIG}


def header_lines(config):
    return [f"phavkit {__version__}", "config: " + json.dumps(config, sort_keys=True)]


def render_table(config, columns, rows, notes=(), fmt="csv"):
    """Serialize a table with the version and config echo in front."""
    if fmt == "json":
        doc = {
            "phavkit_version": __version__,
            "config": config,
            "columns": list(columns),
            "rows": [[_json_value(v) for v in row] for row in rows],
        }
        if notes:
            doc["notes"] = list(notes)
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    for line in header_lines(config):
        buf.write(f"# {line}\n")
    for note in notes:
        buf.write(f"# {note}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return int(v)
    return float(v)


# -- state construction ------------------------------------------------------


def _two_phav(args, total=None):
    """2-PHAV from ``--mean1/--mean2/--tau``, or balanced at output mean ``total``."""
    tau = 0.5 if args.tau is None else args.tau
    if total is None and args.mean1 is not None and args.mean2 is not None:
        return states.TwoPhavParams(args.mean1, args.mean2, tau)
    if total is None:
        total = args.mean
    if total is None:
        raise UsageError("2phav needs --mean1 and --mean2, or --mean for a balanced state")
    return states.TwoPhavParams.from_total(total, 0.0, tau)


def _params(args, mean=None):
    family = args.state
    if family == "2phav":
        return _two_phav(args, mean)
    mean = args.mean if mean is None else mean
    if mean is None:
        raise UsageError(f"--state {family} needs --mean")
    if family == "phav":
        return states.PhavParams(mean)
    if family == "thermal":
        return states.ThermalParams(mean)
    raise UsageError(f"--state {family} has no parameter object here")


def _state(args, mean=None):
    if args.state == "fock":
        n = args.mean if mean is None else mean
        if n is None or float(n) != int(n):
            raise UsageError("--state fock needs an integer photon number in --mean")
        return states.make_fock(int(n))
    return states.make_state(_params(args, mean))


def _require(args, allowed):
    if args.state not in allowed:
        raise UsageError(f"this command supports --state {', '.join(allowed)}; got {args.state}")


# -- subcommands -------------------------------------------------------------


def cmd_photon_dist(args):
    if args.purity is not None:
        if args.state not in ("phav", "2phav"):
            raise UsageError("--purity applies to phav and 2phav only")
        family = "phav" if args.state == "phav" else "two_phav"
        means = [states.mean_for_purity(p, family) for p in parse_grid(args.purity)]
    elif args.mean_list is not None:
        means = parse_grid(args.mean_list)
    elif args.state == "2phav" and args.mean1 is not None:
        means = [None]
    else:
        raise UsageError("photon-dist needs --mean (one value or a list) or --purity")
    sampling = args.samples is not None
    seeds = optics.task_seeds(args.seed, len(means)) if sampling else []
    columns = ["mean", "m", "p_exact", "purity"]
    if sampling:
        columns += ["count", "frequency", "fidelity"]
    rows = []
    for i, mean in enumerate(means):
        st = _state(args, mean)
        if args.eta != 1.0:
            st = optics.apply_loss(st, args.eta)
        mu = states.purity(st)
        label = st.mean if mean is None else mean
        if sampling:
            counts = optics.sample_photocounts(st, args.samples, seeds[i])
            freq = counts / counts.sum()
            fid = states.count_fidelity(st.probs, freq)
        for m, p in enumerate(st.probs):
            row = [label, m, p, mu]
            if sampling:
                row += [int(counts[m]), freq[m], fid]
            rows.append(row)
    return render_table(_config_of(args), columns, rows, fmt=args.format), EXIT_OK


def cmd_wigner(args):
    _require(args, ("phav", "2phav"))
    radii = parse_grid(args.grid)
    s = args.s
    if not -1.0 <= s < 1.0:
        raise UsageError("--s must lie in [-1, 1)")
    params = _params(args)
    detected = optics.lossy(params, args.eta)
    with_model = s == 0.0
    columns = ["radius", "s", "w_closed", "w_cf"]
    if with_model:
        columns.append("w_overlap_model")
    rows = []
    for r in radii:
        pt = phasespace.SOrderedPoint(r, s)
        if isinstance(detected, states.TwoPhavParams):
            closed = phasespace.two_phav_quasiprob(detected, pt)
        else:
            closed = phasespace.phav_quasiprob(detected, pt)
        row = [r, s, closed, phasespace.quasiprob_from_cf(detected, pt)]
        if with_model:
            if isinstance(detected, states.TwoPhavParams):
                model = reconstruct.overlap_model_two_phav(detected, r, args.xi_p, args.xi_s)
            else:
                model = reconstruct.overlap_model_phav(detected, r, args.xi)
            row.append(model)
        rows.append(row)
    notes = ["values normalised so that (1/pi) int W d^2z = 1; vacuum W(0; 0) = 2"]
    return render_table(_config_of(args), columns, rows, notes, args.format), EXIT_OK


def _sweep_states(args):
    """(x, state) pairs for sweeps over the mean or over the balancing ``u``."""
    xs = parse_grid(args.grid)
    if args.over == "u":
        _require(args, ("2phav",))
        if args.mean is None:
            raise UsageError("--over u needs the fixed output mean in --mean")
        tau = 0.5 if args.tau is None else args.tau
        out = []
        for u in xs:
            p = states.TwoPhavParams.from_total(args.mean, u, tau)
            out.append((u, states.make_two_phav(p)))
        return out
    return [(x, _state(args, x)) for x in xs]


def cmd_nongauss(args):
    rows = []
    for x, st in _sweep_states(args):
        if args.eta != 1.0:
            st = optics.apply_loss(st, args.eta)
        rep = nongauss.measure_all(st)
        rows.append([x, rep.eps_a, rep.eps_b, rep.eps_c])
    columns = ["u" if args.over == "u" else "mean", "eps_a", "eps_b", "eps_c"]
    return render_table(_config_of(args), columns, rows, fmt=args.format), EXIT_OK


def cmd_mutual_info(args):
    _require(args, ("phav", "2phav"))
    xs = parse_grid(args.grid)
    bs = optics.BeamSplitter(args.split_tau)
    rows = []
    for x in xs:
        if args.over == "ratio":
            _require(args, ("2phav",))
            if args.mean is None:
                raise UsageError("--over ratio needs the fixed energy M_T in --mean")
            p = optics.ratio_state(args.mean, x, args.eta, args.energy_convention)
        else:
            p = _params(args, x)
            if args.energy_convention == "incident":
                p = optics.lossy(p, args.eta)
        mi = optics.mutual_information(p, bs)
        row = [x, mi]
        if args.bits:
            row.append(mi / math.log(2.0))
        rows.append(row)
    columns = ["R" if args.over == "ratio" else "M_T", "mi_nats"]
    if args.bits:
        columns.append("mi_bits")
    return render_table(_config_of(args), columns, rows, fmt=args.format), EXIT_OK


def cmd_gk(args):
    _require(args, ("phav", "2phav"))
    rows = []
    if args.over == "u":
        _require(args, ("2phav",))
        total = 1.0 if args.mean is None else args.mean
        tau = 0.5 if args.tau is None else args.tau
        cases = [(u, states.TwoPhavParams.from_total(total, u, tau)) for u in parse_grid(args.grid)]
    else:
        p = _params(args)
        cases = [(p.u if isinstance(p, states.TwoPhavParams) else 1.0, p)]
    for u, p in cases:
        st = states.make_state(p)
        mean = st.mean
        for k in range(1, args.kmax + 1):
            fock = states.normally_ordered_moment(st, k) / mean**k
            rows.append([u, k, optics.g_k(p, k), fock])
    columns = ["u", "k", "g_closed", "g_fock"]
    return render_table(_config_of(args), columns, rows, fmt=args.format), EXIT_OK


def cmd_reconstruct(args):
    _require(args, ("phav", "2phav"))
    params = _params(args)
    cfg = reconstruct.ReconstructionConfig(
        probe_radii=tuple(parse_grid(args.grid)),
        eta=args.eta,
        xi=args.xi,
        xi_p=args.xi_p,
        xi_s=args.xi_s,
        m_bar=args.m_bar,
    )
    table = reconstruct.reconstruct_section(cfg, params)
    config = _config_of(args)
    if args.format == "json":
        doc = table.to_dict()
        doc["phavkit_version"] = __version__
        doc["run_config"] = config
        return json.dumps(doc, sort_keys=True, indent=2) + "\n", EXIT_OK
    return table.to_csv(header_lines(config)), EXIT_OK


def cmd_sample(args):
    if args.samples is None:
        raise UsageError("sample needs --samples")
    st = _state(args)
    dist = optics.PhotocountDistribution.from_state(st, args.eta)
    counts = optics.sample_photocounts(dist, args.samples, args.seed)
    freq = counts / counts.sum()
    fid = states.count_fidelity(dist.probs, freq)
    rows = [[m, int(c), f, p] for m, (c, f, p) in enumerate(zip(counts, freq, dist.probs))]
    notes = [f"count_fidelity: {_fmt(fid)}"]
    columns = ["m", "count", "frequency", "p_exact"]
    return render_table(_config_of(args), columns, rows, notes, args.format), EXIT_OK


def cmd_validate(args):
    results = validation.run_checks(quick=args.quick, perturb=args.inject_perturbation)
    failed = [r for r in results if not r.passed]
    if args.format == "json":
        doc = {
            "phavkit_version": __version__,
            "config": _config_of(args),
            "checks": [
                {"name": r.name, "error": r.error, "tol": r.tol, "passed": r.passed}
                for r in results
            ],
        }
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    else:
        lines = [r.line() for r in results]
        lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed")
        for r in failed:
            lines.append(f"FAILED: {r.name}")
        text = "\n".join(lines) + "\n"
    return text, EXIT_FAIL if failed else EXIT_OK


# -- replay -------------------------------------------------------------------


def read_embedded_config(text):
    """The run configuration echoed in a CSV header or JSON document."""
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        cfg = doc.get("config") or doc.get("run_config")
        if cfg is None:
            raise UsageError("JSON document carries no config")
        return cfg
    for line in text.splitlines():
        if line.startswith("# config: "):
            return json.loads(line[len("# config: "):])
        if not line.startswith("#"):
            break
    raise UsageError("no '# config:' line found")


def regenerate(config):
    """Re-run a configuration and return ``(text, exit_code)``."""
    command = config.get("command")
    handler = _HANDLERS.get(command)
    if handler is None or command == "replay":
        raise UsageError(f"config names no replayable command: {command!r}")
    defaults = vars(build_parser().parse_args([command]))
    defaults.update(config)
    defaults["out"] = None
    return handler(argparse.Namespace(**defaults))


def cmd_replay(args):
    with open(args.file, encoding="utf-8") as fh:
        original = fh.read()
    text, code = regenerate(read_embedded_config(original))
    if args.check:
        same = text == original
        msg = "identical" if same else "DIFFERS"
        return f"{args.file}: regenerated output {msg}\n", EXIT_OK if same else EXIT_FAIL
    return text, code


_HANDLERS = {
    "photon-dist": cmd_photon_dist,
    "wigner": cmd_wigner,
    "nongauss": cmd_nongauss,
    "mutual-info": cmd_mutual_info,
    "gk": cmd_gk,
    "reconstruct": cmd_reconstruct,
    "sample": cmd_sample,
    "validate": cmd_validate,
    "replay": cmd_replay,
}


# -- argument parser -----------------------------------------------------------


def _add_state(p, mean_list=False):
    p.add_argument("--state", choices=STATE_CHOICES, default="phav")
    if mean_list:
        p.add_argument("--mean", dest="mean_list", metavar="MEANS",
                       help="one mean or a grid ('a:b:n' or comma list)")
        p.set_defaults(mean=None)
    else:
        p.add_argument("--mean", type=float, help="mean photon number (fock: photon number)")
    p.add_argument("--mean1", type=float, help="2phav: first input mean |beta_1|^2")
    p.add_argument("--mean2", type=float, help="2phav: second input mean |beta_2|^2")
    p.add_argument("--tau", type=float, help="2phav: mixing transmissivity (default 0.5)")
    p.add_argument("--eta", type=float, default=1.0, help="detection efficiency")


def _add_output(p):
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_overlaps(p):
    p.add_argument("--xi", type=float, default=1.0, help="PHAV probe mode overlap")
    p.add_argument("--xi-p", type=float, default=1.0, help="2phav probe mode overlap")
    p.add_argument("--xi-s", type=float, default=1.0, help="2phav inter-component overlap")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="phavkit",
        description="Phase-averaged coherent states: figure data, sampling and validation.",
    )
    parser.add_argument("--version", action="version", version=f"phavkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("photon-dist", help="photon-number distributions and purities")
    _add_state(p, mean_list=True)
    p.add_argument("--purity", help="target purities; means are solved for")
    p.add_argument("--samples", type=int, help="draw this many counts per distribution")
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("wigner", help="radial section of W(z; s)")
    _add_state(p)
    _add_overlaps(p)
    p.add_argument("--grid", default="0:3:31", help="radii")
    p.add_argument("--s", type=float, default=0.0, help="ordering parameter in [-1, 1)")
    _add_output(p)

    p = sub.add_parser("nongauss", help="non-Gaussianity sweep")
    _add_state(p)
    p.add_argument("--over", choices=("mean", "u"), default="mean")
    p.add_argument("--grid", default="0:4:41")
    _add_output(p)

    p = sub.add_parser("mutual-info", help="mutual information between splitter outputs")
    _add_state(p)
    p.add_argument("--over", choices=("mean", "ratio"), default="mean")
    p.add_argument("--grid", default="0:10:51")
    p.add_argument("--split-tau", type=float, default=0.5, help="splitter transmissivity")
    p.add_argument("--energy-convention", choices=("detected", "incident"), default="detected")
    p.add_argument("--bits", action="store_true", help="add a column in bits")
    _add_output(p)

    p = sub.add_parser("gk", help="normalised correlations g^(k)(0)")
    _add_state(p)
    p.add_argument("--over", choices=("point", "u"), default="point")
    p.add_argument("--grid", default="0:1:11")
    p.add_argument("--kmax", type=int, default=8)
    _add_output(p)

    p = sub.add_parser("reconstruct", help="simulated photon-counting Wigner reconstruction")
    _add_state(p)
    _add_overlaps(p)
    p.add_argument("--grid", default="0:3:31", help="incident probe amplitudes")
    p.add_argument("--m-bar", type=int, help="last count kept in the alternating sum")
    _add_output(p)

    p = sub.add_parser("sample", help="seeded photocount histogram")
    _add_state(p)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("validate", help="run the multi-route consistency checks")
    p.add_argument("--quick", action="store_true", help="fast subset")
    p.add_argument("--inject-perturbation", type=float, default=0.0, help=argparse.SUPPRESS)
    _add_output(p)

    p = sub.add_parser("replay", help="regenerate a file from its embedded config")
    p.add_argument("file")
    p.add_argument("--check", action="store_true", help="compare with the file, exit 1 on change")
    p.add_argument("--out")

    return parser


def _validate_common(args):
    if getattr(args, "samples", None) is not None and args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if getattr(args, "eta", 1.0) is not None and not 0.0 < getattr(args, "eta", 1.0) <= 1.0:
        raise UsageError("--eta must lie in (0, 1]")
    if getattr(args, "kmax", 1) < 1:
        raise UsageError("--kmax must be >= 1")


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        _validate_common(args)
        text, code = _HANDLERS[args.command](args)
    except (UsageError, DomainError) as exc:
        print(f"phavkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"phavkit: numerical failure: {exc} {exc.diagnostics}", file=sys.stderr)
        return EXIT_FAIL
    except PhavkitError as exc:
        print(f"phavkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
