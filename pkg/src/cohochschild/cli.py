"""Command line front end.

Exit codes: 0 success, 1 invalid input, 2 axiom failure,
3 certification requested but not attainable at the given truncation,
or the unnormalized oracle disagrees in a certified degree.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .bar import OracleCapError, TruncationError, cohochschild, hochschild, oracle_unnormalized_bar, tor_one_sided
from .complexes import CERTIFIED, Window, WindowError
from .dg import AxiomError, DGAlgebra, DGCoalgebra, DualizationError, dualize_algebra, dualize_coalgebra
from .duality import (
    TransportRefused,
    duality_transport_cohh,
    quasi_properness_report,
    tensor_rank_bound_demo,
    truncated_duality_check,
)
from .linalg import CoefficientRing, RingError
from .registry import RegistryError, example_registry, registry_names
from .resolution import ext_trivial, formality_obstructions
from .schema import SchemaError, format_table, parse_structure_file, structure_to_json, table_to_json

EXIT_OK, EXIT_INPUT, EXIT_AXIOM, EXIT_UNCERTIFIED = 0, 1, 2, 3

COMMANDS = ("hh", "cohh", "tor", "ext", "dualize", "axioms", "check", "transport", "demo")


@dataclass
class JobSpec:
    command: str
    example: str | None = None
    input: str | None = None
    ring: str = "gfp:2"
    p: int = 2
    gen_degree: list = field(default_factory=lambda: [1])
    truncation: int = 2
    levels: int = 4
    window: Window | None = None
    format: str = "table"
    force: bool = False
    oracle_crosscheck: bool = False
    certificate_required: bool = False
    no_check: bool = False
    jobs: int = 1
    by: str = "bar"
    m: int = 3

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.levels < 0:
            raise ValueError("--levels must be non-negative")


class InputError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cohochschild",
        description="Exact Hochschild / coHochschild homology of small DG (co)algebras.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, structure=True):
        if structure:
            src = p.add_mutually_exclusive_group()
            src.add_argument("--example", help=f"registry name: {', '.join(registry_names())}")
            src.add_argument("--input", help="JSON structure-constant file")
            p.add_argument("--ring", default="gfp:2", help="gfp:<p> or z (default gfp:2)")
            p.add_argument("--gen-degree", type=int, nargs="+", default=[1],
                           help="generator degrees for exterior examples")
            p.add_argument("--truncation", type=int, default=2, help="truncation / size parameter")
            p.add_argument("--no-check", action="store_true", help="skip axiom checks on input files")
        p.add_argument("--p", type=int, default=2, help="prime for the Koszul and Ext examples")
        p.add_argument("--levels", type=int, default=4, help="truncation level N")
        p.add_argument("--window", help="degree window lo:hi")
        p.add_argument("--format", choices=["table", "json"], default="table")
        p.add_argument("--jobs", type=int, default=1, help="worker threads for per-degree homology")

    p = sub.add_parser("hh", help="Hochschild homology of an algebra")
    common(p)
    p.add_argument("--oracle-crosscheck", action="store_true")
    p.add_argument("--certificate-required", action="store_true")
    p = sub.add_parser("cohh", help="coHochschild homology of a coalgebra")
    common(p)
    p.add_argument("--certificate-required", action="store_true")
    p = sub.add_parser("tor", help="Tor_A(k, k) from the one-sided bar complex")
    common(p)
    p.add_argument("--by", choices=["bar", "total"], default="bar")
    p = sub.add_parser("ext", help="Ext over Λ(z_-1) from the periodic resolution")
    common(p, structure=False)
    p = sub.add_parser("dualize", help="linear dual of a (co)algebra as JSON")
    common(p)
    p = sub.add_parser("axioms", help="check (co)algebra axioms")
    common(p)
    p = sub.add_parser("check", help="quasi-properness and truncated duality checks")
    common(p)
    p = sub.add_parser("transport", help="coHH via the dual algebra's HH")
    common(p)
    p.add_argument("--force", action="store_true", help="transport even if not quasi-proper")
    p.add_argument("--certificate-required", action="store_true")
    p = sub.add_parser("demo", help="tensor-rank separation demo")
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--format", choices=["table", "json"], default="table")
    return ap


def _fix_window_args(argv):
    """Allow ``--window -1:0`` (argparse would read -1:0 as an option)."""
    out = []
    it = iter(argv)
    for a in it:
        if a == "--window":
            nxt = next(it, None)
            out.append(a if nxt is None else f"--window={nxt}")
        else:
            out.append(a)
    return out


def spec_from_args(ns) -> JobSpec:
    kw = {k: v for k, v in vars(ns).items() if v is not None}
    if "window" in kw:
        try:
            kw["window"] = Window.parse(kw["window"])
        except ValueError:
            raise InputError(f"bad --window {ns.window!r}; expected lo:hi with lo ≤ hi") from None
    kw.pop("gen_degree", None)
    spec = JobSpec(**kw)
    if getattr(ns, "gen_degree", None) is not None:
        spec.gen_degree = ns.gen_degree
    return spec


def load_structure(spec: JobSpec):
    if spec.input:
        X = parse_structure_file(spec.input)
        if not spec.no_check and spec.command != "axioms":
            rep = X.check_axioms()
            if not rep.ok:
                raise AxiomError(rep)
        return X
    if not spec.example:
        raise InputError("one of --example or --input is required")
    try:
        ring = CoefficientRing.parse(spec.ring)
    except (RingError, ValueError) as e:
        raise InputError(f"bad --ring {spec.ring!r}: {e}") from None
    return example_registry(spec.example, ring=ring, p=spec.p, gen_degrees=spec.gen_degree,
                            truncation=spec.truncation)


def _need(X, kind, cmd):
    if not isinstance(X, kind):
        raise InputError(f"{cmd} needs a {'DG algebra' if kind is DGAlgebra else 'DG coalgebra'}")


def _window(spec, default):
    return spec.window if spec.window is not None else Window(*default)


def _emit(out, spec, tab, **meta):
    if spec.format == "json":
        out.write(json.dumps(table_to_json(tab, **meta), indent=2, sort_keys=False) + "\n")
    else:
        out.write(format_table(tab, **meta))


def _uncertified(tab) -> list:
    return [t for t in tab if tab[t].flag != CERTIFIED]


def run(spec: JobSpec, out=None, err=None) -> int:
    """Execute one job; returns the exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        return _run(spec, out, err)
    except AxiomError as e:
        err.write(f"axiom failure: {e}\n")
        return EXIT_AXIOM
    except (InputError, SchemaError, RegistryError, RingError, WindowError, TruncationError,
            DualizationError, OracleCapError, ValueError) as e:
        err.write(f"invalid input: {e}\n")
        return EXIT_INPUT
    except TransportRefused as e:
        err.write(f"{e}\n(use --force to override)\n")
        return EXIT_INPUT


def _run(spec: JobSpec, out, err) -> int:
    cmd = spec.command
    N = spec.levels
    if cmd == "demo":
        demo = tensor_rank_bound_demo(spec.m)
        if spec.format == "json":
            out.write(json.dumps({"m": demo.m, "rank_h": demo.rank_h,
                                  "max_rank_by_terms": {str(k): v for k, v in demo.max_rank_by_terms.items()},
                                  "separated": demo.separated}, indent=2) + "\n")
        else:
            out.write(demo.summary() + "\n")
        return EXIT_OK
    if cmd == "ext":
        tab = ext_trivial(spec.p, N + 1)
        obs = formality_obstructions(spec.p)
        tab.audit.append("formality obstruction groups Hom(Ω^{s+2}Λ, Ω^s(k ⊕ Ωk))_0: "
                         + ", ".join(f"s={s}: rank {r}" for s, r in obs.items()))
        _emit(out, spec, tab, levels=N)
        return EXIT_OK

    X = load_structure(spec)
    if cmd == "axioms":
        rep = X.check_axioms(spec.window)
        out.write(str(rep) + "\n")
        return EXIT_OK if rep.ok else EXIT_AXIOM
    if spec.example and not spec.input:
        X.check_axioms().raise_if_failed()
    if cmd == "dualize":
        D = dualize_algebra(X, spec.window) if isinstance(X, DGAlgebra) else dualize_coalgebra(X, spec.window)
        out.write(json.dumps(structure_to_json(D), indent=2) + "\n")
        return EXIT_OK
    w = _window(spec, (-3, 3))
    meta = {"levels": N, "window": f"{w.lo}:{w.hi}"}
    if cmd == "hh":
        _need(X, DGAlgebra, cmd)
        tab = hochschild(X, N, w, workers=spec.jobs)
        if spec.oracle_crosscheck:
            msg, agreed = _crosscheck(X, N, w, tab)
            tab.audit.append(msg)
            if not agreed:
                _emit(out, spec, tab, **meta)
                err.write(msg + "\n")
                return EXIT_UNCERTIFIED
    elif cmd == "cohh":
        _need(X, DGCoalgebra, cmd)
        tab = cohochschild(X, N, w, workers=spec.jobs)
    elif cmd == "tor":
        _need(X, DGAlgebra, cmd)
        tab = tor_one_sided(X, N, _window(spec, (0, N)), by=spec.by)
        meta["window"] = f"{_window(spec, (0, N)).lo}:{_window(spec, (0, N)).hi}"
    elif cmd == "transport":
        _need(X, DGCoalgebra, cmd)
        tab = duality_transport_cohh(X, N, w, force=spec.force, workers=spec.jobs)
    elif cmd == "check":
        return _check(X, N, w, spec, out)
    else:  # pragma: no cover - argparse restricts commands
        raise InputError(f"unknown command {cmd}")
    _emit(out, spec, tab, **meta)
    if spec.certificate_required:
        missing = _uncertified(tab)
        if missing:
            err.write(f"certification unattainable at N={N} in degrees {missing}\n")
            return EXIT_UNCERTIFIED
    return EXIT_OK


def _crosscheck(A, N, w, tab) -> tuple[str, bool]:
    """Compare with the unnormalized oracle; only certified degrees must agree."""
    oracle = oracle_unnormalized_bar(A, N, w)
    certified = [t for t in tab if tab[t].flag == CERTIFIED]
    bad = [t for t in certified if tab.group(t) != oracle.group(t)]
    if bad:
        return f"unnormalized oracle disagrees in certified degrees {bad}", False
    rest = [t for t in tab if t not in certified]
    same = [t for t in rest if tab.group(t) == oracle.group(t)]
    return (f"unnormalized oracle agrees in {len(certified)} certified degree(s);"
            f" uncertified degrees agreeing: {same or 'none'}"), True


def _check(X, N, w, spec, out) -> int:
    rep = quasi_properness_report(X)
    lines = [rep.summary()]
    if isinstance(X, DGCoalgebra) and X.ring.is_field and X.limit is None:
        chk = truncated_duality_check(X, N, w)
        lines.append(f"truncated duality at N={N} on {w}: {'pass' if chk.ok else 'FAIL ' + str(chk.diff)}")
    if spec.format == "json":
        out.write(json.dumps({"quasi_proper": rep.ok, "report": lines}, indent=2) + "\n")
    else:
        out.write("\n".join(lines) + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    ap = build_parser()
    try:
        ns = ap.parse_args(_fix_window_args(argv))
        spec = spec_from_args(ns)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    except (InputError, ValueError) as e:
        sys.stderr.write(f"invalid input: {e}\n")
        return EXIT_INPUT
    return run(spec)


if __name__ == "__main__":
    sys.exit(main())
