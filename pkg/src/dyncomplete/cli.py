"""Command-line interface: JSON in, JSON (or DOT) out.

Exit codes: 0 success, 2 validation or schema failure, 3 an "unknown"
verdict under --strict.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .cauchy import null_test, object_json, window_from_json, window_is_cauchy, window_to_json
from .complete import (completion, enumerate_thick, enumerate_thick_bruteforce, realize_as_completion, supports,
                       thick_hasse_dot, thick_label, transport_check)
from .dercat import DerIndec, DerObject, HomTable, ar_quiver_dot, build_hom_table, serre_failures
from .functor import (FunctorSpec, evaluation_pair, functor_from_json, identity, image_metric, is_compression,
                      preimage_metric)
from .metric import (Metric, cohomology_metric, compare, improvement, intersect_metrics, make_aisle_metric,
                     make_constant_metric, metric_from_json, metric_to_json, slowdown, standard_aisle, validate)
from .quiver import QuiverError, format_dim, parse_dim, parse_quiver, standard_quiver
from .subcat import Subcategory, thick_closure

SCHEMA_VERSION = 1
BUILTIN_METRICS = ("cohomology", "deg47", "aisle", "slowdown", "zero", "trivial")


class CliError(ValueError):
    pass


class Session:
    """Hom tables by quiver hash, loaded once per command."""

    def __init__(self, cache_dir=None, seed: int = 0):
        self.cache_dir = cache_dir
        self.seed = seed
        self.tables: dict[str, HomTable] = {}

    def table(self, spec: str) -> HomTable:
        path = Path(spec)
        if path.is_file():
            q = parse_quiver(_read_json(path))
        else:
            try:
                q = standard_quiver(spec)
            except (QuiverError, ValueError):
                raise CliError(f"quiver {spec!r} is neither a file nor a built-in name") from None
        t = build_hom_table(q, seed=self.seed, cache_dir=self.cache_dir)
        self.tables[t.key] = t
        return t

    def metric(self, t: HomTable, spec: str) -> Metric:
        path = Path(spec)
        if path.is_file():
            return metric_from_json(t, _read_json(path))
        if spec == "cohomology":
            return cohomology_metric(t)
        if spec == "deg47":
            return cohomology_metric(t, [47])
        if spec == "aisle":
            return make_aisle_metric(standard_aisle(t))
        if spec == "slowdown":
            return slowdown(cohomology_metric(t))
        if spec == "zero":
            return make_constant_metric(Subcategory.zero(t))
        if spec == "trivial":
            return make_constant_metric(Subcategory.everything(t))
        raise CliError(f"metric {spec!r} is neither a file nor one of {', '.join(BUILTIN_METRICS)}")

    def functor(self, spec: str, source: HomTable, target: HomTable) -> FunctorSpec:
        path = Path(spec)
        if path.is_file():
            return functor_from_json(_read_json(path), self.tables)
        kind, _, v = spec.partition(":")
        if kind == "identity":
            if source.key != target.key:
                raise CliError("identity needs equal source and target")
            return identity(source)
        if kind == "rhom-projective":
            _, g = evaluation_pair(target, source, v)
            return g
        if kind == "tensor-projective":
            f, _ = evaluation_pair(source, target, v)
            return f
        raise CliError(f"functor {spec!r} is neither a file nor identity, rhom-projective:V, tensor-projective:V")


def _read_json(path: Path):
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON at line {exc.lineno} ({exc.msg})") from None


def _parse_object(t: HomTable, text: str) -> DerObject:
    """'0,1@0 1,1@2' as a direct sum of indecomposables."""
    out = []
    for tok in text.split():
        dim, _, shift = tok.partition("@")
        try:
            out.append(DerIndec(t.registry.index(parse_dim(dim, t.quiver.n)), int(shift or 0)))
        except (KeyError, ValueError) as exc:
            raise CliError(f"object {tok!r}: {exc}") from None
    return DerObject(tuple(out))


def _subcat_json(s: Subcategory, label: bool = True) -> dict:
    out = {"describe": s.describe(), "modules": [s.table.name(r) for r in s.modules], "shifts": s.to_json()}
    if label and s == thick_closure(s):
        out["label"] = thick_label(s)
    return out


# commands; each returns (payload, unknown, failed) or a DOT string

def cmd_quiver_info(ses: Session, a) -> tuple:
    t = ses.table(a.quiver)
    q = t.quiver
    return {"hash": t.key, "type": q.dynkin_type, "vertices": list(q.vertices), "arrows": [list(x) for x in q.arrows],
            "roots": [format_dim(r) for r in t.registry], "root_names": [t.name(r) for r in t.modules],
            "projectives": [t.name(r) for r in t.proj], "injectives": [t.name(r) for r in t.inj]}, False, False


def cmd_dercat_table(ses: Session, a) -> tuple:
    t = ses.table(a.quiver)
    doc = t.to_json()
    doc.pop("v")
    doc["names"] = [t.name(r) for r in t.modules]
    doc["serre_failures"] = len(serre_failures(t))
    return doc, False, False


def cmd_dercat_ar_dot(ses: Session, a) -> str:
    return ar_quiver_dot(ses.table(a.quiver), a.lo, a.hi)


def cmd_metric_check(ses: Session, a) -> tuple:
    t = ses.table(a.quiver)
    v = validate(ses.metric(t, a.metric), a.verify_budget)
    return {"verdict": v.to_json()}, False, not v.is_metric


def cmd_metric_improve(ses: Session, a) -> tuple:
    t = ses.table(a.quiver)
    m = improvement(ses.metric(t, a.metric), a.length)
    doc = {"metric": metric_to_json(m)}
    if m.finite_horizon:
        doc["note"] = f"tail not inferred; balls exact up to n = {m.horizon}"
    return doc, m.finite_horizon, False


def cmd_metric_compare(ses: Session, a) -> tuple:
    t = ses.table(a.quiver)
    res = compare(ses.metric(t, a.metric), ses.metric(t, a.metric2))
    return {"relation": res}, res == "unknown", False


def cmd_metric_intersect(ses: Session, a) -> tuple:
    t = ses.table(a.quiver)
    m = intersect_metrics(ses.metric(t, a.metric), ses.metric(t, a.metric2))
    return {"metric": metric_to_json(m)}, False, False


def cmd_complete_run(ses: Session, a) -> tuple:
    t = ses.table(a.quiver)
    rep = completion(ses.metric(t, a.metric))
    doc = rep.to_json()
    doc["completion_modules"] = [t.name(r) for r in rep.completion.modules]
    return {"report": doc}, False, not all(ok for _, ok in rep.cross_checks)


def cmd_complete_enumerate(ses: Session, a):
    t = ses.table(a.quiver)
    subs = enumerate_thick(t)
    doc = {"count": len(subs), "subcategories": [_subcat_json(s) for s in subs]}
    failed = False
    if a.oracle:
        brute = enumerate_thick_bruteforce(t)
        doc["oracle_agrees"] = brute == subs
        failed = brute != subs
    if a.dot:
        Path(a.dot).write_text(thick_hasse_dot(t, subs))
    return doc, False, failed


def cmd_complete_realize(ses: Session, a) -> tuple:
    t = ses.table(a.quiver)
    gens = _parse_object(t, a.generators)
    s = thick_closure(Subcategory.of_objects(t, gens))
    m = realize_as_completion(t, s)
    return {"subcategory": _subcat_json(s), "metric": metric_to_json(m)}, False, False


def cmd_complete_supports(ses: Session, a) -> tuple:
    t = ses.table(a.quiver)
    compact, weak = supports(ses.metric(t, a.metric))
    return {"compact": _subcat_json(compact, False), "weak": _subcat_json(weak, False),
            "weak_shift_closed": weak.is_shift_closed()}, False, False


def _functor_tables(ses: Session, a) -> tuple[HomTable, HomTable, FunctorSpec]:
    src = ses.table(a.source)
    tgt = ses.table(a.target)
    return src, tgt, ses.functor(a.functor, src, tgt)


def cmd_functor_apply(ses: Session, a) -> tuple:
    src, tgt, f = _functor_tables(ses, a)
    x = _parse_object(src, a.object)
    return {"input": object_json(src, x), "output": object_json(tgt, f.apply(x)), "flags": f.flags}, False, False


def cmd_functor_preimage(ses: Session, a) -> tuple:
    src, tgt, f = _functor_tables(ses, a)
    m = preimage_metric(f, ses.metric(tgt, a.metric))
    return {"metric": metric_to_json(m)}, m.finite_horizon, False


def cmd_functor_image(ses: Session, a) -> tuple:
    src, tgt, f = _functor_tables(ses, a)
    m = image_metric(f, ses.metric(src, a.metric), force=a.force)
    return {"metric": metric_to_json(m)}, m.finite_horizon, False


def cmd_functor_compress(ses: Session, a) -> tuple:
    src, tgt, f = _functor_tables(ses, a)
    res = is_compression(f, ses.metric(src, a.metric), ses.metric(tgt, a.metric2))
    return {"compression": res}, res["verdict"] == "unknown", False


def cmd_functor_transport(ses: Session, a) -> tuple:
    src, tgt, g = _functor_tables(ses, a)
    res = transport_check(g, ses.metric(tgt, a.metric))
    return {"transport": res}, False, not res["bijection"]


def _window(ses: Session, a):
    t = ses.table(a.quiver)
    return t, window_from_json(t, _read_json(Path(a.window)))


def cmd_cauchy_cone(ses: Session, a) -> tuple:
    t, w = _window(ses, a)
    cones = [{"from": i, "to": j, "cone": object_json(t, d)} for (i, j), d in sorted(w.cones().items())]
    return {"cones": cones}, False, False


def cmd_cauchy_window(ses: Session, a) -> tuple:
    t, w = _window(ses, a)
    res = window_is_cauchy(w, ses.metric(t, a.metric), a.i, a.good_bound)
    return {"cauchy": res}, False, False


def cmd_cauchy_null(ses: Session, a) -> tuple:
    t, w = _window(ses, a)
    return {"null": null_test(w, ses.metric(t, a.metric), a.i_max)}, False, False


def cmd_catalog(ses: Session, a) -> tuple:
    """Write example input files for the built-in A1/A2 examples."""
    out = Path(a.dir)
    out.mkdir(parents=True, exist_ok=True)
    a1, a2 = ses.table("A1"), ses.table("A2")
    f, g = evaluation_pair(a1, a2, "2")
    files = {
        "a1.json": a1.quiver.to_json(),
        "a2.json": a2.quiver.to_json(),
        "cohomology.json": metric_to_json(cohomology_metric(a1)),
        "deg47.json": metric_to_json(cohomology_metric(a1, [47])),
        "preimage.json": metric_to_json(preimage_metric(g, cohomology_metric(a1))),
        "rhom_p2.json": g.to_json(),
        "window.json": _example_window(a2),
    }
    for name, doc in files.items():
        (out / name).write_text(json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    return {"written": sorted(files)}, False, False


def _example_window(t: HomTable) -> dict:
    """S(1) -> P(2) -> P(2): the inclusion followed by the identity."""
    from .cauchy import MapWindow, Morphism, identity_morphism
    from .replin import hom_space

    s1 = t.witness(t.registry.index((1, 0)))
    p2 = t.witness(t.registry.index((1, 1)))
    _, basis = hom_space(s1, p2)
    inc = Morphism(s1, 0, p2, 0, hom=basis[0])
    return window_to_json(MapWindow(t, ((s1, 0), (p2, 0), (p2, 0)), (inc, identity_morphism(p2))))


# parser

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report to this file instead of stdout")
    common.add_argument("--dot", help="write a DOT graph to this file (ar-dot, enumerate)")
    common.add_argument("--strict", action="store_true", help="exit 3 on unknown verdicts")
    common.add_argument("--seed", type=int, default=0, help="seed for indecomposable witnesses")
    common.add_argument("--cache-dir", help="Hom table cache directory (default $DYNCOMPLETE_CACHE)")
    common.add_argument("--no-cache", action="store_true", help="do not read or write the table cache")

    p = argparse.ArgumentParser(prog="dyncomplete", description="Completions of derived categories of Dynkin quivers.")
    groups = p.add_subparsers(dest="group", required=True)

    def sub(group, name, func, helptext):
        g = groups.choices.get(group) or groups.add_parser(group)
        if not hasattr(g, "_cmds"):
            g._cmds = g.add_subparsers(dest="cmd", required=True)
        s = g._cmds.add_parser(name, parents=[common], help=helptext)
        s.set_defaults(func=func)
        return s

    def quiver(s, flag="--quiver"):
        s.add_argument(flag, required=True, help="quiver JSON file or built-in name such as A2, D4, E6")

    s = sub("quiver", "info", cmd_quiver_info, "roots, Dynkin type and content hash")
    quiver(s)
    s = sub("dercat", "table", cmd_dercat_table, "Hom/Ext table and AR translate")
    quiver(s)
    s = sub("dercat", "ar-dot", cmd_dercat_ar_dot, "AR quiver of the derived category in DOT")
    quiver(s)
    s.add_argument("--lo", type=int, default=-1)
    s.add_argument("--hi", type=int, default=1)

    for name, func, two in (("check", cmd_metric_check, False), ("improve", cmd_metric_improve, False),
                            ("compare", cmd_metric_compare, True), ("intersect", cmd_metric_intersect, True)):
        s = sub("metric", name, func, f"metric {name}")
        quiver(s)
        s.add_argument("--metric", required=True, help="metric JSON file or built-in name")
        if two:
            s.add_argument("--metric2", required=True)
        if name == "check":
            s.add_argument("--verify-budget", type=int, help="also run the bounded extension-closure search")
        if name == "improve":
            s.add_argument("--length", type=int, help="materialize this many balls when no tail is inferred")

    s = sub("complete", "run", cmd_complete_run, "completion report of a metric")
    quiver(s)
    s.add_argument("--metric", required=True)
    s = sub("complete", "enumerate", cmd_complete_enumerate, "all thick subcategories")
    quiver(s)
    s.add_argument("--oracle", action="store_true", help="cross-check against the brute-force enumeration")
    s = sub("complete", "realize", cmd_complete_realize, "constant metric realizing a thick subcategory")
    quiver(s)
    s.add_argument("--generators", required=True, help="objects such as '0,1@0 1,1@0'")
    s = sub("complete", "supports", cmd_complete_supports, "compactly and weakly supported objects")
    quiver(s)
    s.add_argument("--metric", required=True)

    for name, func in (("apply", cmd_functor_apply), ("preimage", cmd_functor_preimage),
                       ("image", cmd_functor_image), ("compress", cmd_functor_compress),
                       ("transport", cmd_functor_transport)):
        s = sub("functor", name, func, f"functor {name}")
        quiver(s, "--source")
        quiver(s, "--target")
        s.add_argument("--functor", required=True,
                       help="FunctorSpec JSON file, identity, rhom-projective:V or tensor-projective:V")
        if name == "apply":
            s.add_argument("--object", required=True)
        else:
            s.add_argument("--metric", required=True,
                           help="metric on the target (preimage, transport) or source (image, compress)")
        if name == "compress":
            s.add_argument("--metric2", required=True, help="metric on the target")
        if name == "image":
            s.add_argument("--force", action="store_true")

    for name, func in (("cone", cmd_cauchy_cone), ("window", cmd_cauchy_window), ("null", cmd_cauchy_null)):
        s = sub("cauchy", name, func, f"cauchy {name}")
        quiver(s)
        s.add_argument("--window", required=True, help="map window JSON file")
        if name != "cone":
            s.add_argument("--metric", required=True)
        if name == "window":
            s.add_argument("--i", type=int, default=1)
            s.add_argument("--good-bound", type=int)
        if name == "null":
            s.add_argument("--i-max", type=int, default=5)

    s = groups.add_parser("catalog", parents=[common], help="write example input files")
    s.add_argument("--dir", required=True)
    s.set_defaults(func=cmd_catalog)
    return p


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps({"v": SCHEMA_VERSION, **doc}, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cache = False if a.no_cache else a.cache_dir
    ses = Session(cache, a.seed)
    try:
        res = a.func(ses, a)
    except (CliError, QuiverError, ValueError, FileNotFoundError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2
    if isinstance(res, str):
        if a.dot:
            Path(a.dot).write_text(res)
            _emit({"dot": a.dot}, a.out)
        elif a.out:
            Path(a.out).write_text(res)
        else:
            sys.stdout.write(res)
        return 0
    doc, unknown, failed = res
    _emit(doc, a.out)
    if failed:
        return 2
    if unknown and a.strict:
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
