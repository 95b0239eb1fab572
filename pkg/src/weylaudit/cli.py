"""Command-line front end.

Every run is reproducible from the flag set alone: the exact argv is
echoed into output headers, floats are written with repr() round-trip
precision, and no timestamps enter any payload.  Output files are written
atomically (temp file + rename).

Exit status: 0 success, 1 validation/usage error, 2 completeness
violation (query beyond a spectrum's bound, or an audit that finds
anomalies).
"""

import argparse
import math
import os
import re
import sys
import tempfile

import numpy as np

from . import spectrum as spectrum_io
from .audit import AuditConfig, detect_defects
from .counting import PrefixPowerSums, counting_function, riesz
from .errors import CompletenessError, ValidationError, WeylAuditError
from .mollify import (
    build_nonneg_kernel,
    build_plateau_kernel,
    convolve_counting,
    export_table,
    tauberian_kernel,
)
from .models import FlatTorus, RoundSphere, sphere_spectrum, torus_spectrum
from .wavetrace import GaussianWindow, detect_length_peaks, spectral_wave_trace
from .weyl import load_coefficients, sphere_coefficients, torus_coefficients

__all__ = ["main"]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_COMPLETENESS = 2


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit status 2 on usage errors; we reserve 2
    for completeness violations, so usage errors map to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _parse_grid_spec(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"grid must be start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"non-numeric grid component in {text!r}") from None
    if step <= 0 or stop <= start:
        raise ValidationError(f"degenerate grid {text!r}")
    return start, stop, step


def _parse_grid(text):
    start, stop, step = _parse_grid_spec(text)
    n = int(math.floor((stop - start) / step + 1e-9))
    return start + step * np.arange(n + 1)


def _parse_basis(text, dim):
    rows = text.split(";")
    if len(rows) != dim:
        raise ValidationError(f"basis needs {dim} semicolon-separated rows")
    try:
        mat = np.asarray([[float(x) for x in row.split(",")] for row in rows])
    except ValueError:
        raise ValidationError(f"non-numeric basis entry in {text!r}") from None
    if mat.shape != (dim, dim):
        raise ValidationError(f"basis must be {dim}x{dim}")
    return mat


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".weylaudit-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _header(argv):
    return f"# weylaudit {' '.join(argv)}\n"


def _thread_count():
    raw = os.environ.get("WEYLAUDIT_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"WEYLAUDIT_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ValidationError("WEYLAUDIT_THREADS must be >= 1")
    return n


def _resolve_coefficients(name, spectrum, dim, volume):
    if name == "torus":
        if volume is None:
            m = re.search(r"vol=([0-9.eE+-]+)", spectrum.label)
            if m:
                volume = float(m.group(1))
            else:
                volume = (2.0 * math.pi) ** dim
        side = volume ** (1.0 / dim)
        return torus_coefficients(FlatTorus.square(dim, side))
    if name == "sphere":
        return sphere_coefficients(RoundSphere(dim))
    return load_coefficients(name)


def _cmd_gen(args, argv):
    if args.shape == "torus":
        if args.basis is not None:
            torus = FlatTorus(args.dim, _parse_basis(args.basis, args.dim))
        else:
            torus = FlatTorus.square(args.dim, args.side)
        spec = torus_spectrum(torus, args.lmax)
    else:
        spec = sphere_spectrum(RoundSphere(args.dim), args.lmax)
    lines = [
        _header(argv).rstrip("\n"),
        "# weylaudit spectrum v1",
        f"# lambda_max = {spec.lambda_max!r}",
        f"# label = {spec.label}",
        "# unit = frequency",
    ]
    for f, m in zip(spec.frequencies, spec.multiplicities):
        lines.append(f"{float(f)!r} {int(m)}")
    _atomic_write(args.output, "\n".join(lines) + "\n")
    return EXIT_OK


def _two_column(argv, rows):
    out = [_header(argv).rstrip("\n")]
    out += [f"{x!r} {y!r}" for x, y in rows]
    return "\n".join(out) + "\n"


def _cmd_count(args, argv):
    spec = spectrum_io.load(args.input)
    grid = _parse_grid(args.grid)
    rows = [(float(lam), counting_function(spec, lam)) for lam in grid]
    text = _header(argv).rstrip("\n") + "\n"
    text += "".join(f"{lam!r} {n}\n" for lam, n in rows)
    _atomic_write(args.output, text)
    return EXIT_OK


def _cmd_riesz(args, argv):
    spec = spectrum_io.load(args.input)
    grid = _parse_grid(args.grid)
    ps = PrefixPowerSums.build(spec, k_max=max(args.k, 1))
    rows = [(float(lam), riesz(spec, args.k, lam, ps)) for lam in grid]
    _atomic_write(args.output, _two_column(argv, rows))
    return EXIT_OK


_KERNEL_BUILDERS = {
    "plateau": build_plateau_kernel,
    "nonneg": build_nonneg_kernel,
}


def _build_kernel(kind, spacing=None, t_max=None):
    kwargs = {}
    if spacing is not None:
        kwargs["grid_spacing"] = spacing
    if t_max is not None:
        kwargs["t_max"] = t_max
    if kind == "tauberian":
        return tauberian_kernel(build_nonneg_kernel(tail_threshold=1e-18, **kwargs))
    if kind not in _KERNEL_BUILDERS:
        raise ValidationError(f"unknown kernel kind {kind!r}")
    return _KERNEL_BUILDERS[kind](**kwargs)


def _cmd_mollify(args, argv):
    from .mollify import ScaledKernel

    spec = spectrum_io.load(args.input)
    grid = _parse_grid(args.grid)
    kernel = _build_kernel(args.kernel)
    scaled = ScaledKernel(kernel, args.scale)
    rows = []
    incomplete = False
    for lam in grid:
        res = convolve_counting(spec, scaled, lam)
        incomplete = incomplete or not res.complete
        rows.append((float(lam), res.value))
    _atomic_write(args.output, _two_column(argv, rows))
    return EXIT_COMPLETENESS if incomplete else EXIT_OK


def _cmd_wavetrace(args, argv):
    spec = spectrum_io.load(args.input)
    grid = _parse_grid(args.tgrid)
    window = GaussianWindow(args.center, args.sigma)
    trace = spectral_wave_trace(spec, window, grid)
    lines = [_header(argv).rstrip("\n")]
    if args.peaks:
        for tp, height in detect_length_peaks(trace, args.min_sep, args.peaks):
            lines.append(f"# peak {tp!r} {height!r}")
    lines += [f"{float(t)!r} {float(v)!r}" for t, v in zip(trace.t, trace.values)]
    _atomic_write(args.output, "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_audit(args, argv):
    spec = spectrum_io.load(args.input)
    coeffs = _resolve_coefficients(args.coeffs, spec, args.dim, args.volume)
    config = AuditConfig(
        coefficients=coeffs,
        order=args.k,
        grid=_parse_grid_spec(args.grid),
        candidates=None if args.candidates is None else _parse_grid_spec(args.candidates),
        threshold=args.threshold,
        min_separation=args.min_sep,
    )
    report = detect_defects(spec, config)
    text = _header(argv) + report.to_text()
    if args.output:
        _atomic_write(args.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_COMPLETENESS if report.verdict == "anomalies-found" else EXIT_OK


def _cmd_kernel(args, argv):
    kernel = _build_kernel(args.kind, args.spacing, args.tmax)
    directory = os.path.dirname(os.path.abspath(args.output))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".weylaudit-")
    os.close(fd)
    try:
        export_table(kernel, tmp)
        os.replace(tmp, args.output)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return EXIT_OK


def _build_parser():
    p = _Parser(prog="weylaudit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a model spectrum")
    g.add_argument("shape", choices=["torus", "sphere"])
    g.add_argument("--dim", type=int, default=2)
    g.add_argument("--side", type=float, default=2.0 * math.pi)
    g.add_argument("--basis", help="lattice basis rows 'a,b;c,d' (overrides --side)")
    g.add_argument("--lmax", type=float, required=True)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=_cmd_gen)

    c = sub.add_parser("count", help="counting function on a grid")
    c.add_argument("-i", "--input", required=True)
    c.add_argument("--grid", required=True, help="start:stop:step")
    c.add_argument("-o", "--output", required=True)
    c.set_defaults(func=_cmd_count)

    r = sub.add_parser("riesz", help="Riesz mean on a grid")
    r.add_argument("--k", type=int, default=1)
    r.add_argument("--grid", required=True)
    r.add_argument("-i", "--input", required=True)
    r.add_argument("-o", "--output", required=True)
    r.set_defaults(func=_cmd_riesz)

    m = sub.add_parser("mollify", help="mollified counting function")
    m.add_argument("--kernel", choices=["plateau", "nonneg"], default="plateau")
    m.add_argument("--scale", type=float, default=1.0)
    m.add_argument("--grid", required=True)
    m.add_argument("-i", "--input", required=True)
    m.add_argument("-o", "--output", required=True)
    m.set_defaults(func=_cmd_mollify)

    w = sub.add_parser("wavetrace", help="windowed spectral wave trace")
    w.add_argument("--center", type=float, required=True)
    w.add_argument("--sigma", type=float, required=True)
    w.add_argument("--tgrid", required=True)
    w.add_argument("--peaks", type=int, default=0, help="annotate top-N peaks")
    w.add_argument("--min-sep", type=float, default=1.0)
    w.add_argument("-i", "--input", required=True)
    w.add_argument("-o", "--output", required=True)
    w.set_defaults(func=_cmd_wavetrace)

    a = sub.add_parser("audit", help="completeness audit")
    a.add_argument("--k", type=int, default=1)
    a.add_argument("--coeffs", required=True, help="torus | sphere | coefficient file")
    a.add_argument("--dim", type=int, default=2)
    a.add_argument("--volume", type=float, help="override preset volume")
    a.add_argument("--grid", default="20:100:0.1")
    a.add_argument("--candidates", help="start:stop:step for candidate locations")
    a.add_argument("--threshold", type=float, default=0.5)
    a.add_argument("--min-sep", type=float, default=5.0)
    a.add_argument("-i", "--input", required=True)
    a.add_argument("-o", "--output")
    a.set_defaults(func=_cmd_audit)

    k = sub.add_parser("kernel", help="build and export a kernel table")
    k.add_argument("--kind", choices=["plateau", "nonneg", "tauberian"], required=True)
    k.add_argument("--spacing", type=float)
    k.add_argument("--tmax", type=float)
    k.add_argument("-o", "--output", required=True)
    k.set_defaults(func=_cmd_kernel)

    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        _thread_count()  # validated; computation itself is deterministic
        args = parser.parse_args(argv)
        return args.func(args, argv)
    except CompletenessError as exc:
        print(f"weylaudit: {exc}", file=sys.stderr)
        return EXIT_COMPLETENESS
    except (WeylAuditError, OSError) as exc:
        print(f"weylaudit: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
