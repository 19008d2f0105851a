"""Command-line front end: witness tables, oracles, nonlinear and entropic tests."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import entropic, nonlinear, oracle, stabilizer, witnesses
from .pauli import HermitianOperator
from .states import (
    DensityMatrix,
    Graph,
    State,
    make_cluster,
    make_ghz,
    make_graph_state,
    make_rho3,
    make_w3,
    mix_with_white_noise,
)

STATE_KINDS = ("ghz", "cluster", "graph", "w3", "rho3", "file")
DETECT_SLACK = 1e-12


class SpecError(ValueError):
    """Malformed state specification."""


# ---------------------------------------------------------------- state specs


@dataclass(frozen=True)
class StateSpec:
    kind: str
    n: Optional[int] = None
    noise_p: float = 0.0
    graph_path: Optional[str] = None
    file_path: Optional[str] = None


def parse_state_spec(text: str) -> StateSpec:
    """Parse ``kind[:n][:p=<noise>][:graph=<file>]``; ``file:<path>`` imports a dense matrix."""
    tokens = text.strip().split(":")
    kind = tokens[0].lower()
    if kind not in STATE_KINDS:
        raise SpecError(f"unknown state kind {kind!r}; expected one of {STATE_KINDS}")
    n = None
    p = 0.0
    graph_path = file_path = None
    for tok in tokens[1:]:
        if not tok:
            raise SpecError(f"empty field in {text!r}")
        if tok.startswith("p="):
            try:
                p = float(tok[2:])
            except ValueError as exc:
                raise SpecError(f"bad noise value {tok!r}") from exc
        elif tok.startswith("graph="):
            graph_path = tok[len("graph="):]
        elif tok.startswith("path="):
            file_path = tok[len("path="):]
        elif tok.isdigit():
            if n is not None:
                raise SpecError(f"qubit count given twice in {text!r}")
            n = int(tok)
        elif kind == "file" and file_path is None:
            file_path = tok
        else:
            raise SpecError(f"unrecognized field {tok!r} in {text!r}")
    if not 0 <= p <= 1:
        raise SpecError(f"noise {p} outside [0, 1]")
    if kind in ("ghz", "cluster") and n is None:
        raise SpecError(f"{kind} needs a qubit count")
    if kind in ("w3", "rho3") and n not in (None, 3):
        raise SpecError(f"{kind} is a three-qubit state")
    if kind == "graph" and graph_path is None:
        raise SpecError("graph needs graph=<file>")
    if kind != "graph" and graph_path is not None:
        raise SpecError("graph= is only valid for graph states")
    if kind == "file" and file_path is None:
        raise SpecError("file needs a path")
    if kind != "file" and file_path is not None:
        raise SpecError("a path is only valid for file states")
    return StateSpec(kind, n, p, graph_path, file_path)


def resolve_graph_path(path: str) -> Path:
    """Existing path, or the name of a bundled graph file."""
    candidate = Path(path)
    if candidate.exists():
        return candidate
    from . import example_graph_path

    bundled = Path(example_graph_path()).parent / candidate.name
    if bundled.exists():
        return bundled
    raise FileNotFoundError(path)


def load_graph(path: str) -> Graph:
    return Graph.load(resolve_graph_path(path))


def load_dense_state(path: str) -> DensityMatrix:
    """Row-major JSON array of ``[re, im]`` pairs (nested rows or flat)."""
    data = json.loads(Path(path).read_text())
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise SpecError("entries must be [re, im] pairs")
    values = arr[..., 0] + 1j * arr[..., 1]
    if values.ndim == 1:
        dim = math.isqrt(values.size)
        if dim * dim != values.size:
            raise SpecError(f"{values.size} entries do not form a square matrix")
        values = values.reshape(dim, dim)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise SpecError(f"matrix shape {values.shape} is not square")
    n = values.shape[0].bit_length() - 1
    if 1 << n != values.shape[0]:
        raise SpecError(f"dimension {values.shape[0]} is not a power of two")
    return DensityMatrix(n, values)


def build_state(spec: StateSpec) -> State:
    if spec.kind == "ghz":
        state: State = make_ghz(spec.n)
    elif spec.kind == "cluster":
        state = make_cluster(spec.n)
    elif spec.kind == "graph":
        graph = load_graph(spec.graph_path)
        if spec.n is not None and spec.n != graph.n_vertices:
            raise SpecError(f"graph has {graph.n_vertices} vertices, spec says {spec.n}")
        state = make_graph_state(graph)
    elif spec.kind == "w3":
        state = make_w3()
    elif spec.kind == "rho3":
        state = make_rho3()
    else:
        state = load_dense_state(spec.file_path)
        if spec.n is not None and spec.n != state.n_qubits:
            raise SpecError(f"file holds {state.n_qubits} qubits, spec says {spec.n}")
    if spec.noise_p > 0:
        state = mix_with_white_noise(state, spec.noise_p)
    return state


def state_from_text(text: str, noise: Optional[float] = None) -> State:
    spec = parse_state_spec(text)
    if noise is not None:
        spec = StateSpec(spec.kind, spec.n, noise, spec.graph_path, spec.file_path)
    return build_state(spec)


# ---------------------------------------------------------------- witnesses


def build_witness(name: str, n=None, m=None, k=None, l=None, graph=None) -> witnesses.Witness:
    if name not in witnesses.REGISTRY:
        raise SpecError(f"unknown witness {name!r}; see `witness list`")
    _, params = witnesses.REGISTRY[name]
    kwargs = {"n": n, "m": m, "k": k, "l": l}
    if "graph" in params:
        if graph is None:
            raise SpecError(f"{name} needs --graph")
        kwargs["graph"] = load_graph(graph) if isinstance(graph, str) else graph
    elif "n" in params and n is None:
        raise SpecError(f"{name} needs --n")
    w = witnesses.build(name, **kwargs)
    if n is not None and w.n_qubits != n:
        raise SpecError(f"{name} acts on {w.n_qubits} qubits, not {n}")
    return w


def operator_json(op: HermitianOperator) -> list[dict]:
    return [{"pauli": letters, "coeff": c} for letters, c in op.terms]


def witness_json(w: witnesses.Witness) -> dict:
    groups = stabilizer.partition_into_settings(w.operator)
    out = {
        "name": w.name,
        "n_qubits": w.n_qubits,
        "params": w.params,
        "detection_class": w.detection_class,
        "analytic_threshold": w.analytic_noise_threshold,
        "claimed_settings": w.claimed_settings,
        "greedy_settings": [{"setting": str(s), "terms": t} for s, t in groups],
        "target_expectation": w.target_expectation,
        "terms": operator_json(w.operator),
    }
    if w.alpha is not None:
        out["dominance_alpha"] = w.alpha
    return out


@dataclass
class WitnessReport:
    witness_name: str
    expectation: float
    detected: bool
    detection_class: str
    analytic_threshold: Optional[float]
    empirical_threshold: Optional[float]
    settings: int
    dominance_alpha: Optional[float]
    dominance_min_eigenvalue: Optional[float]

    def to_json(self) -> dict:
        return dict(self.__dict__)


def witness_report(w: witnesses.Witness, state: State, empirical: bool = False) -> WitnessReport:
    value = w.expectation(state)
    emp = None
    if empirical:
        emp = oracle.noise_threshold_empirical(oracle.witness_criterion(w), w.target)
    alpha = lam = None
    if w.reference is not None:
        cert = oracle.check_dominance(w.operator, w.reference, w.alpha)
        alpha, lam = cert.alpha, cert.min_eigenvalue
    return WitnessReport(
        w.name,
        value,
        value < -DETECT_SLACK,
        w.detection_class,
        oracle.noise_threshold_analytic(w),
        emp,
        w.claimed_settings,
        alpha,
        lam,
    )


def load_operator(source: str, args) -> HermitianOperator:
    """A JSON operator file (``{"n": N, "terms": {"XZ": 1.0}}``) or a witness name."""
    path = Path(source)
    if path.exists():
        data = json.loads(path.read_text())
        terms = data["terms"]
        if isinstance(terms, list):
            terms = {t["pauli"]: t["coeff"] for t in terms}
        return HermitianOperator.from_terms(int(data["n"]), terms)
    return build_witness(source, args.n, args.m, args.k, args.l, args.graph).operator


# ---------------------------------------------------------------- command handlers


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, default=_json_default))


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o)}")


def cmd_witness_list(args) -> int:
    for name, (_, params) in sorted(witnesses.REGISTRY.items()):
        print(f"{name}\t{','.join(params) or '-'}")
    return 0


def cmd_witness_build(args) -> int:
    _emit(witness_json(build_witness(args.name, args.n, args.m, args.k, args.l, args.graph)))
    return 0


def cmd_witness_eval(args) -> int:
    w = build_witness(args.name, args.n, args.m, args.k, args.l, args.graph)
    state = state_from_text(args.state, args.noise)
    _emit(witness_report(w, state, args.empirical).to_json())
    return 0


def _opt_kwargs(args) -> dict:
    return {"restarts": args.restarts, "seed": args.seed, "workers": args.workers, "minimize": args.minimize}


def cmd_oracle_product(args) -> int:
    op = load_operator(args.op, args)
    kw = _opt_kwargs(args)
    kw["restarts"] = kw["restarts"] or oracle.PRODUCT_RESTARTS
    _emit(oracle.max_over_product_states(op, **kw).to_json())
    return 0


def cmd_oracle_bisep(args) -> int:
    op = load_operator(args.op, args)
    kw = _opt_kwargs(args)
    kw["restarts"] = kw["restarts"] or oracle.BISEP_RESTARTS
    _emit(oracle.max_over_biseparable(op, **kw).to_json())
    return 0


def cmd_oracle_dominance(args) -> int:
    w = build_witness(args.w, args.n, args.m, args.k, args.l, args.graph)
    if w.reference is None:
        raise SpecError(f"{w.name} has no reference projector witness")
    alpha = w.alpha if args.alpha is None else args.alpha
    cert = oracle.check_dominance(w.operator, w.reference, alpha)
    _emit({"witness": w.name, **cert.to_json()})
    return 0 if cert.holds else 1


def cmd_oracle_noise(args) -> int:
    w = build_witness(args.name, args.n, args.m, args.k, args.l, args.graph)
    out = {"witness": w.name, "analytic": oracle.noise_threshold_analytic(w)}
    if args.empirical:
        out["empirical"] = oracle.noise_threshold_empirical(oracle.witness_criterion(w), w.target)
    _emit(out)
    return 0


def cmd_lur_eval(args) -> int:
    state = state_from_text(args.state)
    if args.family == "ghz":
        rep = nonlinear.lur_ghz_three(state, args.n, args.k + 1) if args.three else nonlinear.lur_ghz(
            state, args.n, args.k
        )
    else:
        rep = nonlinear.lur_cluster(state, args.n, args.k)
    _emit(rep.to_json())
    return 0


def cmd_eur_eval(args) -> int:
    state = state_from_text(args.state)
    gens = (stabilizer.ghz_generators if args.family == "ghz" else stabilizer.cluster_generators)(args.n)
    ents = entropic.generator_entropies(gens.operators(), state)
    lhs, detected = entropic.eur_criterion(args.family, state, args.n)
    scale = 1 / math.log(2) if args.bits else 1.0
    _emit(
        {
            "family": args.family,
            "unit": "bits" if args.bits else "nats",
            "entropies": {str(g): e * scale for g, e in zip(gens.generators, ents)},
            "lhs": lhs * scale,
            "bound": entropic.LN2 * scale,
            "detected": detected,
        }
    )
    return 0


def cmd_stabilizer_show(args) -> int:
    if args.family != "graph" and args.n is None:
        raise SpecError(f"{args.family} family needs --n")
    if args.family == "ghz":
        group = stabilizer.ghz_generators(args.n)
    elif args.family == "cluster":
        group = stabilizer.cluster_generators(args.n)
    else:
        if args.graph is None:
            raise SpecError("graph family needs --graph")
        group = stabilizer.graph_generators(load_graph(args.graph))
    print("generators:")
    for g in group.generators:
        print(f"  {g}")
    size, subset = stabilizer.max_one_setting_subgroup(group)
    print(f"largest locally commuting subgroup: {size} elements from generators {[i + 1 for i in subset]}")
    op = HermitianOperator.from_terms(group.n_qubits, [(g, 1.0) for g in group.generators])
    print("settings for the sum of generators:")
    for setting, terms in stabilizer.partition_into_settings(op):
        print(f"  {setting}: {' '.join(terms)}")
    return 0


def cmd_reproduce(args) -> int:
    from .reproduce import run_reproduction_suite

    return run_reproduction_suite(
        args.out, seed=args.seed, workers=args.workers, n_min=args.n_min, n_max=args.n_max
    )


# ---------------------------------------------------------------- parser


def _witness_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--graph", help="graph file (JSON or edge list) or a bundled graph name")


def _optimizer_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--op", required=True, help="operator JSON file or witness name")
    _witness_args(p)
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=lambda s: int(s, 0), default=oracle.DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--minimize", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stabwit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    w = sub.add_parser("witness").add_subparsers(dest="action", required=True)
    p = w.add_parser("list")
    p.set_defaults(func=cmd_witness_list)
    p = w.add_parser("build")
    p.add_argument("--name", required=True)
    _witness_args(p)
    p.set_defaults(func=cmd_witness_build)
    p = w.add_parser("eval")
    p.add_argument("--name", required=True)
    _witness_args(p)
    p.add_argument("--state", required=True)
    p.add_argument("--noise", type=float)
    p.add_argument("--empirical", action="store_true")
    p.set_defaults(func=cmd_witness_eval)

    o = sub.add_parser("oracle").add_subparsers(dest="action", required=True)
    p = o.add_parser("max-product")
    _optimizer_args(p)
    p.set_defaults(func=cmd_oracle_product)
    p = o.add_parser("max-bisep")
    _optimizer_args(p)
    p.set_defaults(func=cmd_oracle_bisep)
    p = o.add_parser("dominance")
    p.add_argument("--w", required=True)
    _witness_args(p)
    p.add_argument("--alpha", type=float)
    p.set_defaults(func=cmd_oracle_dominance)
    p = o.add_parser("noise")
    p.add_argument("--name", required=True)
    _witness_args(p)
    p.add_argument("--empirical", action="store_true")
    p.set_defaults(func=cmd_oracle_noise)

    lur = sub.add_parser("lur").add_subparsers(dest="action", required=True)
    p = lur.add_parser("eval")
    p.add_argument("--family", choices=("ghz", "cluster"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--state", required=True)
    p.add_argument("--three", action="store_true", help="three-pair GHZ variant (cut after qubit k)")
    p.set_defaults(func=cmd_lur_eval)

    eur = sub.add_parser("eur").add_subparsers(dest="action", required=True)
    p = eur.add_parser("eval")
    p.add_argument("--family", choices=("ghz", "cluster"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--bits", action="store_true")
    p.set_defaults(func=cmd_eur_eval)

    st = sub.add_parser("stabilizer").add_subparsers(dest="action", required=True)
    p = st.add_parser("show")
    p.add_argument("--family", choices=("ghz", "cluster", "graph"), required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--graph")
    p.set_defaults(func=cmd_stabilizer_show)

    p = sub.add_parser("reproduce")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=lambda s: int(s, 0), default=oracle.DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--n-min", type=int, default=3)
    p.add_argument("--n-max", type=int, default=8)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
