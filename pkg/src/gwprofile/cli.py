"""Command-line entry point tying the modules into reproducible experiments.

Subcommands: sample, decompose, genfun, kernel, verify, maps, stats.
Exit codes: 0 success, 1 verification failure or runtime error, 2 usage
error.  Every run emits a RunManifest (JSON) alongside its results:
next to the output file when --out is given, on standard error
otherwise.  `--workers N` only partitions work; outputs are
deterministic and independent of N because every sampled item gets its
own seed stream (the item index).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from .errors import (
    ConfigurationError,
    DomainError,
    GWProfileError,
    TreeParseError,
)
from .model import builtin_model, resolve_model
from .tree import LabelledPlaneTree, decode, edge_profile, encode
from .sampler import Sampler, SamplerConfig

_BINARY = "builtin:incomplete-binary"
_MAP_MODEL = "builtin:geom-pm01"


@dataclass
class RunManifest:
    """Self-description of a run, sufficient to regenerate its outputs."""

    subcommand: str
    model: Optional[str]
    seed: Optional[int]
    caps: Dict[str, int] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)
    tool_version: str = __version__
    argv: List[str] = field(default_factory=list)

    def emit(self) -> None:
        text = json.dumps(asdict(self), sort_keys=True)
        if self.outputs:
            path = self.outputs[0] + ".manifest.json"
            with open(path, "w") as fh:
                fh.write(text + "\n")
        else:
            print("gwprofile: manifest: " + text, file=sys.stderr)


def _open_out(path: Optional[str]):
    return open(path, "w", newline="") if path else sys.stdout


def _close_out(fh) -> None:
    if fh is not sys.stdout:
        fh.close()


def _config(args, stream: int = 0) -> SamplerConfig:
    kwargs = {"seed": args.seed, "stream": stream}
    if getattr(args, "vertex_cap", None) is not None:
        kwargs["vertex_cap"] = args.vertex_cap
    if getattr(args, "rejection_cap", None) is not None:
        kwargs["rejection_cap"] = args.rejection_cap
    return SamplerConfig(**kwargs)


def _chunks(count: int, workers: int) -> List[Tuple[int, int]]:
    size = -(-count // workers)
    return [(lo, min(lo + size, count)) for lo in range(0, count, size)]


# -- sample -----------------------------------------------------------------


def _cmd_sample(args) -> int:
    model = resolve_model(args.model)
    defaults = SamplerConfig()
    vertex_cap = args.vertex_cap or defaults.vertex_cap
    rejection_cap = args.rejection_cap or defaults.rejection_cap
    if args.kind == "conditioned" and args.edges is None:
        raise ConfigurationError("--edges is required for --kind conditioned")
    sign = {"+": 1, "-": -1}.get(args.sign, 1)

    if args.kind == "quadrangulation":
        from .maps import save_map

        if not args.out:
            raise ConfigurationError(
                "--out prefix is required for --kind quadrangulation"
            )
        outputs = []
        for i in range(args.count):
            cfg = SamplerConfig(
                seed=args.seed,
                stream=i,
                vertex_cap=vertex_cap,
                rejection_cap=rejection_cap,
            )
            q = Sampler(model, cfg).sample_quadrangulation()
            path = f"{args.out}.{i}.csv"
            save_map(q, path)
            outputs.append(path)
        manifest = RunManifest(
            "sample",
            args.model,
            args.seed,
            {"vertex_cap": vertex_cap, "rejection_cap": rejection_cap},
            [args.out],
            argv=sys.argv[1:],
        )
        manifest.emit()
        return 0

    task_base = (
        args.model,
        args.kind,
        args.seed,
        vertex_cap,
        rejection_cap,
        args.edges,
        sign,
    )
    if args.workers > 1 and args.count > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            parts = pool.map(
                _sample_items_worker,
                [task_base + (lo, hi) for lo, hi in _chunks(args.count, args.workers)],
            )
            lines = [line for part in parts for line in part]
    else:
        lines = _sample_items_worker(task_base + (0, args.count))
    fh = _open_out(args.out)
    try:
        for line in lines:
            fh.write(line + "\n")
    finally:
        _close_out(fh)
    RunManifest(
        "sample",
        args.model,
        args.seed,
        {"vertex_cap": vertex_cap, "rejection_cap": rejection_cap},
        [args.out] if args.out else [],
        argv=sys.argv[1:],
    ).emit()
    return 0


def _sample_items_worker(task) -> List[str]:
    (spec, kind, seed, vertex_cap, rejection_cap, edges, sign, lo, hi) = task
    model = resolve_model(spec)
    out = []
    for i in range(lo, hi):
        cfg = SamplerConfig(
            seed=seed, stream=i, vertex_cap=vertex_cap, rejection_cap=rejection_cap
        )
        s = Sampler(model, cfg)
        if kind == "tree":
            out.append(encode(s.sample_tree()))
        elif kind == "excursion":
            out.append(encode(s.sample_excursion(sign).tree))
        else:
            out.append(encode(s.sample_conditioned(edges)))
    return out


# -- decompose ---------------------------------------------------------------


def _cmd_decompose(args) -> int:
    from .excursion import decompose

    if (args.tree is None) == (args.infile is None):
        raise ConfigurationError("provide exactly one of --tree or --in")
    if args.tree is not None:
        texts = [args.tree]
    else:
        with open(args.infile) as fh:
            texts = [line.strip() for line in fh if line.strip()]
    fh = _open_out(args.out)
    try:
        for text in texts:
            d = decompose(decode(text), args.level)

            def nested(v):
                return [nested(c) for c in d.forest.children[v]]

            record = {
                "level": d.level,
                "root_component": encode(d.root_component),
                "forest_shape": [nested(r) for r in d.forest.roots],
                "decorations": [encode(e.tree) for e in d.forest.decorations],
                "attachments": list(d.forest.attachments),
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    finally:
        _close_out(fh)
    RunManifest(
        "decompose", None, None, {}, [args.out] if args.out else [], argv=sys.argv[1:]
    ).emit()
    return 0


# -- genfun -------------------------------------------------------------------


def _cmd_genfun(args) -> int:
    from .genfun import f_table, nu_table

    model = resolve_model(args.model)
    fh = _open_out(args.out)
    try:
        w = csv.writer(fh)
        if args.what == "nu":
            nu = nu_table(model, args.order)
            w.writerow(["k", "nu_k"])
            for k, v in enumerate(nu):
                w.writerow([k, str(v)])
        else:
            nu = nu_table(model, max(args.order, args.qmax + 1))
            table = f_table(nu, args.pmax, args.qmax)
            w.writerow(["p", "q", "f_p_q"])
            for p in range(args.pmax + 1):
                for q in range(args.qmax + 1):
                    w.writerow([p, q, str(table[p][q])])
    finally:
        _close_out(fh)
    RunManifest(
        "genfun", args.model, None, {}, [args.out] if args.out else [], argv=sys.argv[1:]
    ).emit()
    return 0


# -- kernel -------------------------------------------------------------------


def _parse_state(text: str, parts: int) -> Tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ConfigurationError(f"state {text!r} must be comma-separated integers")
    if len(vals) != parts:
        raise ConfigurationError(f"state {text!r} must have {parts} components")
    return vals


def _cmd_kernel(args) -> int:
    from . import kernel as K
    from .genfun import f_table, joint_table, nu_table

    model = builtin_model("incomplete-binary")
    smax = args.smax
    fh = _open_out(args.out)
    try:
        w = csv.writer(fh)
        if args.edges is None:
            p, q = _parse_state(args.from_state, 2)
            nu = nu_table(model, smax + 2)
            f = f_table(nu, p + smax + 1, smax + 1)
            w.writerow(["r", "s", "probability"])
            for s in range(smax + 1):
                for r in range(p + s + 1):
                    state = (r, s) if r > 0 else (0, 0)
                    if r == 0 and s > 0:
                        continue
                    prob = K.transition_prob(f, (p, q), state)
                    if prob != 0:
                        w.writerow([state[0], state[1], str(prob)])
        else:
            p, q, v = _parse_state(args.from_state, 3)
            V = args.edges
            ftilde = joint_table(model, V + 1, V + 1, V)
            w.writerow(["r", "s", "w", "probability"])
            if p == 0:
                w.writerow([0, 0, V, "1"])
            else:
                ww = v + p + q
                for s in range(min(smax, V) + 1):
                    for r in range(p + s + 1):
                        state = (r, s, ww) if r > 0 else (0, 0, V)
                        if r == 0 and (s > 0 or ww != V):
                            continue
                        prob = K.cond_transition_prob(ftilde, V, (p, q, v), state)
                        if prob != 0:
                            w.writerow([state[0], state[1], state[2], str(prob)])
    finally:
        _close_out(fh)
    RunManifest(
        "kernel", _BINARY, None, {}, [args.out] if args.out else [], argv=sys.argv[1:]
    ).emit()
    return 0


# -- verify -------------------------------------------------------------------


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _verify_counting_lemma(args, report) -> bool:
    import math

    from .oracle import enumerate_bicoloured_forests

    ok = True
    cases = 0
    for p in range(1, args.max_pq + 1):
        for q in range(0, args.max_pq - p + 1):
            for n in range(1, p + 1):
                for n_minus in _compositions(p - n, q):
                    for n_plus in _compositions(q, p):
                        got = enumerate_bicoloured_forests(n, n_plus, n_minus)
                        want = math.factorial(q) * math.factorial(p - 1) * n
                        cases += 1
                        if got != want:
                            ok = False
                            report(
                                f"FAIL counting-lemma n={n} n_plus={n_plus} "
                                f"n_minus={n_minus}: {got} != {want}"
                            )
    report(f"{'PASS' if ok else 'FAIL'} counting-lemma: {cases} tuples checked")
    return ok


def _verify_joint_law(args, report) -> bool:
    from .genfun import f_table, nu_table
    from .kernel import binomial
    from .oracle import enumerate_marked_forests

    model = builtin_model("incomplete-binary")
    nu = nu_table(model, args.max_s + 2)
    f = f_table(nu, args.max_p + args.max_s + 1, args.max_s + 1)
    ok = True
    cells = 0
    for p in range(1, args.max_p + 1):
        for s in range(0, args.max_s + 1):
            law = enumerate_marked_forests(nu, p, s)
            for q in range(p + s + 1):
                for r in range(p + s + 1):
                    fr = f[r][s] if r > 0 else (Fraction(1) if s == 0 else Fraction(0))
                    want = (
                        Fraction(p, p + s)
                        * Fraction(1, 4 ** (p + s))
                        * binomial(p + s, q)
                        * binomial(p + s, r)
                        * fr
                    )
                    got = law.get((q, r), Fraction(0))
                    cells += 1
                    if got != want:
                        ok = False
                        report(
                            f"FAIL joint-law p={p} s={s} (q,r)=({q},{r}): "
                            f"{got} != {want}"
                        )
    report(f"{'PASS' if ok else 'FAIL'} joint-law: {cells} cells checked")
    return ok


def _verify_chain_law(args, report) -> bool:
    from .genfun import joint_table
    from .kernel import cond_transition_prob
    from .oracle import exact_chain_law, verify_markov_exact

    V = args.edges
    model = builtin_model("incomplete-binary")
    ftilde = joint_table(model, V + 1, V + 1, V)
    law = exact_chain_law(V)

    def kernel(s, t):
        return cond_transition_prob(ftilde, V, s, t)

    rep = verify_markov_exact(law, V, transition=kernel)
    status = "PASS" if rep.ok else "FAIL"
    report(
        f"{status} chain-law V={V}: {rep.histories_checked} histories, "
        f"{rep.transitions_checked} transitions, "
        f"{len(rep.discrepancies)} discrepancies"
    )
    return rep.ok


def _verify_profile_count(args, report) -> bool:
    from .kernel import count_profile
    from .oracle import enumerate_trees
    from .tree import edge_profile as profile_of

    model = builtin_model("incomplete-binary")
    ok = True
    profiles = 0
    for e in range(0, args.max_edges + 1):
        groups: Dict[tuple, int] = {}
        for t, _ in enumerate_trees(model, e).items:
            prof = profile_of(t)
            mmax = max(list(prof.x_plus) + [0])
            cmax = max(list(prof.check_minus) + [0])
            plus = tuple(
                (prof.x_plus.get(k, 0), prof.x_minus.get(k, 0))
                for k in range(1, mmax + 1)
            )
            check = tuple(
                (prof.check_plus.get(k, 0), prof.check_minus.get(k, 0))
                for k in range(1, cmax + 1)
            )
            groups[(plus, check)] = groups.get((plus, check), 0) + 1
        for (plus, check), want in sorted(groups.items()):
            got = count_profile(plus, check).card
            profiles += 1
            if got != want:
                ok = False
                report(f"FAIL profile-count {plus} {check}: {got} != {want}")
    report(f"{'PASS' if ok else 'FAIL'} profile-count: {profiles} profiles checked")
    return ok


def _verify_decomposition_roundtrip(args, report) -> bool:
    from .excursion import decompose, reconstruct
    from .oracle import enumerate_trees

    models = (
        [resolve_model(args.model)]
        if args.model
        else [
            builtin_model(k)
            for k in ("geom-pm1", "geom-pm01", "incomplete-binary", "complete-binary")
        ]
    )
    ok = True
    cases = 0
    for model in models:
        for e in range(0, args.max_edges + 1):
            for t, _ in enumerate_trees(model, e).items:
                span = max([abs(l) for l in t.labels] + [1])
                for m in list(range(1, span + 1)) + list(range(-span, 0)):
                    cases += 1
                    if reconstruct(decompose(t, m)) != t:
                        ok = False
                        report(f"FAIL decomposition-roundtrip {encode(t)} m={m}")
    report(
        f"{'PASS' if ok else 'FAIL'} decomposition-roundtrip: {cases} cases checked"
    )
    return ok


def _verify_schaeffer_roundtrip(args, report) -> bool:
    from .maps import map_to_tree, tree_to_map, verify_profile_relations
    from .oracle import enumerate_trees

    model = builtin_model("geom-pm01")
    ok = True
    cases = 0
    for e in range(1, args.max_edges + 1):
        for t, _ in enumerate_trees(model, e).items:
            for bit in (0, 1):
                cases += 1
                q = tree_to_map(t, bit)
                if map_to_tree(q) != (t, bit):
                    ok = False
                    report(f"FAIL schaeffer-roundtrip {encode(t)} bit={bit}")
                    continue
                rep = verify_profile_relations(q)
                if not rep.ok:
                    ok = False
                    report(
                        f"FAIL schaeffer-profile {encode(t)} bit={bit}: "
                        f"{rep.mismatches[0]}"
                    )
    report(f"{'PASS' if ok else 'FAIL'} schaeffer-roundtrip: {cases} cases checked")
    return ok


def _verify_kemperman(args, report) -> bool:
    from .genfun import nu_table
    from .oracle import kemperman_check

    model = builtin_model("incomplete-binary")
    nu = nu_table(model, args.s + 2)
    cells = kemperman_check(nu, args.p, args.s)
    bad = [(k, lhs, rhs) for k, (lhs, rhs) in sorted(cells.items()) if lhs != rhs]
    for k, lhs, rhs in bad:
        report(f"FAIL kemperman p={args.p} s={args.s} {k}: {lhs} != {rhs}")
    report(
        f"{'PASS' if not bad else 'FAIL'} kemperman: {len(cells)} cells checked"
    )
    return not bad


_SUITES = {
    "counting-lemma": _verify_counting_lemma,
    "joint-law": _verify_joint_law,
    "chain-law": _verify_chain_law,
    "profile-count": _verify_profile_count,
    "decomposition-roundtrip": _verify_decomposition_roundtrip,
    "schaeffer-roundtrip": _verify_schaeffer_roundtrip,
    "kemperman": _verify_kemperman,
}


def _cmd_verify(args) -> int:
    fh = _open_out(args.out)
    try:
        ok = _SUITES[args.suite](args, lambda line: fh.write(line + "\n"))
    finally:
        _close_out(fh)
    RunManifest(
        "verify", None, None, {}, [args.out] if args.out else [], argv=sys.argv[1:]
    ).emit()
    return 0 if ok else 1


# -- maps ---------------------------------------------------------------------


def _cmd_maps(args) -> int:
    from .maps import (
        ball_profile,
        load_map,
        map_to_tree,
        save_map,
        tree_to_map,
        verify_profile_relations,
    )

    if (args.from_tree is None) == (args.infile is None):
        raise ConfigurationError("provide exactly one of --from-tree or --in")
    exit_code = 0
    outputs = []
    if args.from_tree is not None:
        q = tree_to_map(decode(args.from_tree), args.orientation)
        if args.out:
            save_map(q, args.out)
            outputs.append(args.out)
        else:
            buf = [
                f"root_dart,{q.root_dart}",
                f"pointed_vertex,{q.pointed_vertex}",
                "dart,alpha,sigma",
            ]
            for d in q.darts:
                buf.append(f"{d},{q.alpha[d]},{q.sigma[d]}")
            print("\n".join(buf))
    else:
        q = load_map(args.infile)
        fh = _open_out(args.out)
        try:
            if args.to_tree:
                t, bit = map_to_tree(q)
                fh.write(f"{encode(t)}\t{bit}\n")
            if args.profile:
                summary = ball_profile(q)
                w = csv.writer(fh)
                w.writerow(["k", "C_k", "P_k"])
                for k in range(1, summary.k_max + 1):
                    w.writerow([k, summary.C[k - 1], summary.P[k - 1]])
            if args.check:
                rep = verify_profile_relations(q)
                fh.write(
                    f"{'PASS' if rep.ok else 'FAIL'} profile-relations: "
                    f"{rep.checked} checks, {len(rep.mismatches)} mismatches\n"
                )
                for msg in rep.mismatches:
                    fh.write(f"FAIL {msg}\n")
                if not rep.ok:
                    exit_code = 1
        finally:
            _close_out(fh)
        if args.out:
            outputs.append(args.out)
    RunManifest(
        "maps", _MAP_MODEL, None, {}, outputs, argv=sys.argv[1:]
    ).emit()
    return exit_code


# -- stats --------------------------------------------------------------------


def _census_worker(task):
    (spec, seed, vertex_cap, max_level, lo, hi) = task
    from .sampler import make_rng, sample_incomplete_binary_profile
    from .stats import TransitionCensus, add_profile_transitions

    census = TransitionCensus()
    capped = 0
    model = resolve_model(spec)
    fast = model.key == builtin_model("incomplete-binary").key
    for i in range(lo, hi):
        cfg = SamplerConfig(seed=seed, stream=i, vertex_cap=vertex_cap)
        if fast:
            prof = sample_incomplete_binary_profile(make_rng(cfg), vertex_cap)
            if prof is None:
                capped += 1
                continue
            xp, xm, _, _ = prof
            xpd = {k: v for k, v in enumerate(xp) if k >= 1 and v}
            xmd = {k: v for k, v in enumerate(xm) if k >= 1 and v}
        else:
            from .errors import ResourceLimitError

            try:
                t = Sampler(model, cfg).sample_tree()
            except ResourceLimitError:
                capped += 1
                continue
            prof = edge_profile(t)
            xpd, xmd = prof.x_plus, prof.x_minus
        top = max(list(xpd) + list(xmd) + [1])
        levels = range(1, min(top, max_level) + 1)
        add_profile_transitions(census, xpd, xmd, levels)
    return census.counts, capped


def _cmd_stats(args) -> int:
    from .stats import TransitionCensus, bonferroni, chi_square

    defaults = SamplerConfig()
    vertex_cap = args.vertex_cap or defaults.vertex_cap
    tasks = [
        (args.model, args.seed, vertex_cap, args.max_level, lo, hi)
        for lo, hi in _chunks(args.count, max(args.workers, 1))
    ]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            parts = list(pool.map(_census_worker, tasks))
    else:
        parts = [_census_worker(t) for t in tasks]
    census = TransitionCensus()
    capped = 0
    for counts, c in parts:
        part = TransitionCensus()
        part.counts = counts
        census.merge(part)
        capped += c

    exit_code = 0
    fh = _open_out(args.out)
    try:
        w = csv.writer(fh)
        w.writerow(["kind", "from_p", "from_q", "to_p", "to_q", "count"])
        for from_state in census.rows():
            for to_state, n in sorted(census.row(from_state).items()):
                w.writerow(["census", *from_state, *to_state, n])
        if args.test_kernel:
            if resolve_model(args.model).key != builtin_model("incomplete-binary").key:
                raise ConfigurationError(
                    "--test-kernel requires --model builtin:incomplete-binary"
                )
            from . import kernel as K
            from .genfun import f_table, nu_table

            nu = [float(x) for x in nu_table(builtin_model("incomplete-binary"), 40)]
            smax = 30
            f = f_table(nu, smax + 10, smax + 5)
            w.writerow(["kind", "from_p", "from_q", "statistic", "dof", "p_value"])
            p_values = []
            for from_state in census.rows():
                if from_state == (0, 0):
                    continue
                if census.row_total(from_state) < args.min_visits:
                    continue
                p, q = from_state
                expected = {}
                for s in range(smax + 1):
                    for r in range(p + s + 1):
                        if r == 0 and s > 0:
                            continue
                        state = (r, s) if r > 0 else (0, 0)
                        prob = float(K.transition_prob(f, (p, q), state))
                        if prob > 0:
                            expected[state] = expected.get(state, 0.0) + prob
                res = chi_square(census.row(from_state), expected)
                p_values.append(res.p_value)
                w.writerow(
                    [
                        "test",
                        p,
                        q,
                        f"{res.statistic:.6g}",
                        res.dof,
                        "" if res.p_value is None else f"{res.p_value:.6g}",
                    ]
                )
            if not bonferroni(p_values, args.alpha * max(len(p_values), 1)):
                exit_code = 1
        if capped:
            w.writerow(["capped", "", "", "", "", capped])
    finally:
        _close_out(fh)
    RunManifest(
        "stats",
        args.model,
        args.seed,
        {"vertex_cap": vertex_cap},
        [args.out] if args.out else [],
        argv=sys.argv[1:],
    ).emit()
    return exit_code


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gwprofile",
        description="Labelled Galton-Watson trees, edge-profile chains, and "
        "quadrangulation ball profiles.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("sample", help="sample trees, excursions, quadrangulations")
    p.add_argument("--model", required=True, help="builtin:<id> or file:<path>")
    p.add_argument(
        "--kind",
        choices=["tree", "excursion", "conditioned", "quadrangulation"],
        default="tree",
    )
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--vertex-cap", type=int, dest="vertex_cap")
    p.add_argument("--rejection-cap", type=int, dest="rejection_cap")
    p.add_argument("--edges", type=int, help="edge count for --kind conditioned")
    p.add_argument("--sign", choices=["+", "-"], default="+")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("decompose", help="excursion-forest decomposition of trees")
    p.add_argument("--tree", help="tree in the increment grammar")
    p.add_argument("--in", dest="infile", help="file with one tree per line")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("genfun", help="first-hit offspring law and f tables")
    p.add_argument("--model", required=True)
    p.add_argument("--what", choices=["nu", "f"], default="nu")
    p.add_argument("--order", type=int, default=40)
    p.add_argument("--pmax", type=int, default=5)
    p.add_argument("--qmax", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_genfun)

    p = sub.add_parser(
        "kernel", help="edge-profile chain kernel rows (incomplete-binary model)"
    )
    p.add_argument(
        "--from", dest="from_state", required=True, help="p,q (or p,q,v with --edges)"
    )
    p.add_argument("--smax", type=int, default=10)
    p.add_argument("--edges", type=int, help="condition on total edge count V")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_kernel)

    p = sub.add_parser("verify", help="named exact verification suites")
    p.add_argument("--suite", choices=sorted(_SUITES), required=True)
    p.add_argument("--max-pq", type=int, dest="max_pq", default=7)
    p.add_argument("--max-p", type=int, dest="max_p", default=3)
    p.add_argument("--max-s", type=int, dest="max_s", default=4)
    p.add_argument("--edges", type=int, default=5)
    p.add_argument("--max-edges", type=int, dest="max_edges", default=4)
    p.add_argument("--model")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--s", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("maps", help="tree <-> quadrangulation bijection and profiles")
    p.add_argument("--from-tree", dest="from_tree")
    p.add_argument("--orientation", type=int, choices=[0, 1], default=0)
    p.add_argument("--in", dest="infile", help="map CSV file")
    p.add_argument("--to-tree", dest="to_tree", action="store_true")
    p.add_argument("--profile", action="store_true")
    p.add_argument("--check", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_maps)

    p = sub.add_parser("stats", help="Monte Carlo transition census and tests")
    p.add_argument("--model", required=True)
    p.add_argument("--count", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--vertex-cap", type=int, dest="vertex_cap")
    p.add_argument("--max-level", type=int, dest="max_level", default=10**9)
    p.add_argument("--min-visits", type=int, dest="min_visits", default=500)
    p.add_argument("--alpha", type=float, default=0.001)
    p.add_argument("--test-kernel", dest="test_kernel", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_stats)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, TreeParseError) as exc:
        print(f"gwprofile: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except GWProfileError as exc:
        print(f"gwprofile: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
