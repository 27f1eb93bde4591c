"""Command-line driver: scenario files in, JSON verification reports out.

Scenario files are INI documents.  A ``[scenario]`` section names the kind and
shared settings; the other sections depend on the kind::

    [scenario]
    kind = qpb            ; hopf-check | fodc | envelope | qpb | gauge | dunkl
    max_degree = 2
    seed = 0

    [bundle]
    type = regular        ; regular | multi-orbit | action | u1-example | dunkl
    group = S3
    copies = 2

    [dunkl]
    root_system = A2
    kappa = 1             ; one rational per root orbit
    degree_cap = 6
    corep = std2
    real = true

Exit codes: 0 all checks pass, 1 some check failed, 2 bad scenario, 3 internal error.
"""
from __future__ import annotations

import argparse
import configparser
import json
import sys
import time
from fractions import Fraction
from typing import Callable

from . import catalogue, dunkl, fodc, gauge, hopf, qpb
from .checks import Check, exhaustive
from .envelope import Envelope, verify_envelope

EXIT_OK, EXIT_FAILED, EXIT_SCENARIO, EXIT_INTERNAL = 0, 1, 2, 3


class ScenarioError(ValueError):
    pass


# --- scenario parsing -------------------------------------------------------------

class Scenario:
    def __init__(self, parser: configparser.ConfigParser, source: str = "<scenario>"):
        self.parser = parser
        self.source = source
        if not parser.has_section("scenario"):
            raise ScenarioError("missing [scenario] section")
        self.kind = self.get("scenario", "kind")
        self.seed = int(self.get("scenario", "seed", "0"))
        self.max_degree = int(self.get("scenario", "max_degree", "2"))
        if self.max_degree < 1:
            raise ScenarioError("max_degree must be positive")

    @classmethod
    def from_text(cls, text: str, source: str = "<scenario>") -> "Scenario":
        p = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        p.optionxform = str
        p.read_string(text, source=source)
        return cls(p, source)

    @classmethod
    def from_file(cls, path: str) -> "Scenario":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read(), path)

    def get(self, section: str, key: str, default: str | None = None) -> str:
        if self.parser.has_option(section, key):
            return self.parser.get(section, key).strip()
        if default is None:
            raise ScenarioError(f"missing [{section}] {key}")
        return default

    def words(self, section: str, key: str, default: str | None = None) -> list:
        return self.get(section, key, default).replace(",", " ").split()

    def flag(self, section: str, key: str, default: bool) -> bool:
        if not self.parser.has_option(section, key):
            return default
        return self.parser.getboolean(section, key)

    def echo(self) -> dict:
        return {s: dict(sorted(self.parser.items(s))) for s in sorted(self.parser.sections())}


# --- reports ----------------------------------------------------------------------

class Report:
    def __init__(self, scenario: Scenario | None, verb: str):
        self.scenario = scenario
        self.verb = verb
        self.records: list = []
        self.tables: dict = {}
        self.notes: dict = {}
        self.error: dict | None = None
        self.started = time.perf_counter()

    def add(self, group: str, checks):
        for c in getattr(checks, "checks", checks):
            self.records.append((group, c))

    @property
    def passed(self) -> bool:
        return all(c.passed for _, c in self.records)

    def document(self, timing: bool = False) -> dict:
        records = sorted(self.records, key=lambda gc: (gc[0], gc[1].name))
        doc = {
            "verb": self.verb,
            "scenario": self.scenario.echo() if self.scenario else None,
            "checks": [_record(g, c) for g, c in records],
            "lines": [f"{g}/{c.line()}" for g, c in records],
            "totals": {"checks": len(records), "passed": sum(c.passed for _, c in records),
                       "failed": sum(not c.passed for _, c in records)},
            "tables": self.tables,
            "notes": self.notes,
        }
        if self.error:
            doc["error"] = self.error
        if timing:
            doc["wall_clock_seconds"] = round(time.perf_counter() - self.started, 3)
        return doc

    def dumps(self, timing: bool = False) -> str:
        return json.dumps(self.document(timing), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _record(group: str, c: Check) -> dict:
    return {"group": group, "name": c.name, "anchor": c.anchor, "status": c.status,
            "witness": c.witness, "cases": c.cases}


# --- builders -----------------------------------------------------------------------

def _group(sc: Scenario, section: str = "bundle"):
    return catalogue.catalogue_group(sc.get(section, "group", "Z2"))


def _structure_calculus(sc: Scenario, G, H):
    """[calculus] type = universal | reflection | ker2; reflections = labels."""
    kind = sc.get("calculus", "type", "universal")
    if kind == "universal":
        return fodc.Fodc(fodc.close_right_ideal(H, []))
    if kind == "ker2":
        return fodc.Fodc(fodc.ker2_ideal(H))
    if kind == "reflection":
        refl = sc.words("calculus", "reflections", "")
        if not refl:
            raise ScenarioError("reflection calculus needs [calculus] reflections")
        return fodc.reflection_fodc(G, refl, H)
    raise ScenarioError(f"unknown calculus type {kind!r}")


def _hopf_algebra(sc: Scenario):
    name = sc.get("hopf", "algebra", "Z2")
    if name.lower() == "laurent":
        w = int(sc.get("hopf", "window", "5"))
        return None, hopf.LaurentAlgebra((-w, w))
    G = catalogue.catalogue_group(name)
    return G, hopf.FunctionAlgebra(G)


def _fodc_for(sc: Scenario):
    G, H = _hopf_algebra(sc)
    if G is None:
        kind = sc.get("calculus", "type", "ker2")
        if kind != "ker2":
            raise ScenarioError("the Laurent algebra only carries the classical (ker2) calculus here")
        return fodc.Fodc(fodc.ker2_ideal(H))
    return _structure_calculus(sc, G, H)


def _action_bundle(sc: Scenario, G, H):
    """[action] lines ``x = y1 y2 ...`` give x·g for g in the group's element order."""
    if not sc.parser.has_section("action"):
        raise ScenarioError("type = action needs an [action] section")
    points = list(sc.parser.options("action"))
    action = {}
    for x in points:
        images = sc.words("action", x)
        if len(images) != len(G.elements):
            raise ScenarioError(f"point {x!r} lists {len(images)} images, expected {len(G.elements)}")
        for g, y in zip(G.elements, images):
            action[(x, g)] = y
    return qpb.build_finite_bundle(points, G, action, H, name=sc.get("bundle", "name", "P"))


class Bundle:
    """Everything a qpb or gauge scenario needs: P, Ω(P), qtrs and sampling windows."""

    def __init__(self, sc: Scenario, max_degree: int):
        kind = sc.get("bundle", "type")
        self.kind = kind
        self.dims_top = max_degree
        if kind == "u1-example":
            window = int(sc.get("bundle", "window", "6"))
            sample = int(sc.get("bundle", "sample", str(window // 2)))
            self.Q, self.C = qpb.build_u1_example(window, max_degree)
            self.inner = lambda x, h: abs(x[0]) <= sample and abs(h) <= sample
            self.keys = {k: [key for key in self.C.basis(k) if abs(key[0][0]) <= sample]
                         for k in range(max_degree + 1)}
            self.hkeys = list(range(-sample, sample + 1))
            self.wkeys = [key for j in self.keys for key in self.keys[j] if abs(key[0][0]) < sample]
            self.ekeys = gauge.envelope_keys(self.C, max_degree, lambda k: abs(k[0]) <= sample)
            self.ckeys = gauge.form_keys(self.C, max_degree, lambda k: abs(k[0][0]) <= sample)
            self.T = qpb.TranslationMap(self.C)
            return
        if kind not in ("regular", "multi-orbit", "action"):
            raise ScenarioError(f"unknown bundle type {kind!r}")
        G = _group(sc)
        H = hopf.FunctionAlgebra(G)
        if kind == "regular":
            self.Q = qpb.regular_bundle(G, H)
        elif kind == "multi-orbit":
            self.Q = qpb.multi_orbit_bundle(G, int(sc.get("bundle", "copies", "2")), H)
        else:
            self.Q = _action_bundle(sc, G, H)
        self.C = qpb.BundleCalculus(self.Q, Envelope(_structure_calculus(sc, G, H), max(max_degree, 2)))
        self.inner = None
        self.keys = None
        self.hkeys = None
        self.wkeys = None
        self.ekeys = gauge.envelope_keys(self.C, max_degree)
        self.ckeys = gauge.form_keys(self.C, max_degree)
        self.T = qpb.TranslationMap(self.C)

    def tables(self) -> dict:
        C = self.C
        return {
            "envelope": list(C.germs.dims()),
            "base_forms": [len(C.base_forms(k)) for k in range(self.dims_top + 1)],
            "horizontal_forms": [len(C.horizontal_forms(k)) for k in range(self.dims_top + 1)],
        }


def _dunkl_setup(sc: Scenario, max_degree: int):
    name = sc.get("dunkl", "root_system", "B1")
    kind, rank = name[0].upper(), int(name[1:])
    RS = dunkl.build_root_system(kind, rank)
    values = [Fraction(v) for v in sc.words("dunkl", "kappa", "1")]
    kappa = dunkl.Multiplicity(RS, values if len(values) > 1 else values[0])
    cap = int(sc.get("dunkl", "degree_cap", "4"))
    if not 0 <= cap <= 8:
        raise ScenarioError("degree_cap must lie in 0..8")
    return RS, kappa, cap


def _select_corep(coreps: list, name: str):
    for V in coreps:
        if V.name == name or V.name.split(":")[-1] == name:
            return V
    raise ScenarioError(f"no corepresentation named {name!r}; have {[V.name for V in coreps]}")


# --- pipelines ------------------------------------------------------------------------

def run_hopf(sc: Scenario, rep: Report, max_degree: int):
    G, H = _hopf_algebra(sc)
    rep.add("hopf", hopf.hopf_axiom_checks(H))
    if G is not None:
        for V in catalogue.decompose_regular(G, H):
            rep.add(f"corep/{V.name}", hopf.check_corepresentation(H, V))


def run_fodc(sc: Scenario, rep: Report, max_degree: int):
    F = _fodc_for(sc)
    rep.add("germs", fodc.verify_germ_identities(F))
    rep.tables["germs"] = [len(F.germs.basis)]


def run_envelope(sc: Scenario, rep: Report, max_degree: int):
    F = _fodc_for(sc)
    E = Envelope(F, max(max_degree, 2))
    rep.add("envelope", verify_envelope(E))
    rep.tables["envelope"] = list(E.dims())


def run_qpb(sc: Scenario, rep: Report, max_degree: int):
    if sc.get("bundle", "type") == "dunkl":
        run_dunkl_bundle(sc, rep, max_degree)
        return
    B = Bundle(sc, max_degree)
    rep.tables.update(B.tables())
    rep.add("qpb", qpb.verify_qpb(B.Q, B.inner))
    rep.add("calculus", qpb.verify_calculus(B.C, B.keys))
    rep.add("connection", qpb.connection_checks(B.C, qpb.trivial_connection(B.C)))
    if B.kind == "u1-example":
        rep.add("base", qpb.u1_base_checks(B.C))
        bal = qpb.BalancedTensor(B.C, max_degree)
    else:
        for V in B.Q.coreps:
            rep.add(f"intertwiners/{V.name}", qpb.intertwiner_checks(qpb.build_intertwiners(B.Q, V)))
        bal = None
    rep.add("qtrs", qpb.verify_qtrs_properties(B.C, B.T, max_degree, bal=bal, hkeys=B.hkeys,
                                               wkeys=B.wkeys))


def run_gauge(sc: Scenario, rep: Report, max_degree: int, samples: int | None = None, seed: int | None = None):
    B = Bundle(sc, max_degree)
    samples = samples if samples is not None else int(sc.get("gauge", "samples", "20"))
    seed = seed if seed is not None else sc.seed
    rep.notes["composition"] = "F1∘F2 applies F1 first; f_{F1∘F2} = f_{F1} ∗ f_{F2}"
    rep.notes["samples"] = samples
    rep.notes["seed"] = seed
    rep.add("gauge", gauge.roundtrip_checks(B.T, B.ekeys, B.ckeys, samples, seed))


def run_dunkl_commute(sc: Scenario, rep: Report, max_degree: int):
    RS, kappa, cap = _dunkl_setup(sc, max_degree)
    W = dunkl.coxeter_group(RS)
    rep.tables["group_order"] = [len(W.elements)]
    rep.add("roots", dunkl.root_system_checks(RS))
    rep.add("kappa", [dunkl.multiplicity_checks(kappa, W)])
    rep.add("commute", dunkl.commutator_suite(RS, kappa, cap))
    rep.add("operator", dunkl.dunkl_property_checks(RS, kappa, W, min(cap, 4)))


def run_dunkl_hermitian(sc: Scenario, rep: Report, max_degree: int):
    RS, kappa, cap = _dunkl_setup(sc, max_degree)
    real = sc.flag("dunkl", "real", True)
    bundle, _, _ = dunkl.build_dunkl_bundle(RS, kappa, poly_cap=max(cap, 1), max_degree=max(max_degree, 2))
    V = _select_corep(bundle.qpb.coreps, sc.get("dunkl", "corep", "sign"))
    family = [T for d in range(cap + 1) for T in dunkl.dunkl_intertwiners(bundle, V, d)]
    rep.notes["corep"] = V.name
    rep.notes["intertwiners"] = len(family)
    rep.notes["real"] = real
    rep.add("intertwiners", [exhaustive("intertwiner-mor", "T(e_i)∘w = Σ_j g_ji(w) T(e_j)", family,
                                              lambda T: dunkl.intertwiner_mor_check(bundle, V, T), repr)])
    for a, T1 in enumerate(family):
        for b, T2 in enumerate(family):
            rep.add(f"hermitian/{a}-{b}", dunkl.hermitian_compatibility(RS, kappa, T1, T2, real))


def run_dunkl_gauge(sc: Scenario, rep: Report, max_degree: int):
    RS, kappa, cap = _dunkl_setup(sc, max_degree)
    if RS.dim != 1:
        raise ScenarioError("the canonical gauge map needs a rank-1 root system (λ lives in Ω(P) only there)")
    real = sc.flag("dunkl", "real", False)
    bundle, canonical, conn = dunkl.build_dunkl_bundle(RS, kappa, poly_cap=max(cap, 4), max_degree=2, real=real)
    C = bundle.calc
    keys = dunkl.weight_window(C, 2)
    rep.notes["gauge_action"] = "𝔉 acts on connections by ω ↦ 𝔉∘ω"
    rep.add("canonical-gauge", dunkl.canonical_gauge_checks(bundle, conn, keys))
    T = dunkl.dunkl_translation_map(bundle, canonical.omega, 2)
    rep.add("canonical-gauge", dunkl.canonical_gauge_roundtrip(bundle, conn, T, gauge.envelope_keys(C, 2),
                                                                keys))


def run_dunkl_bundle(sc: Scenario, rep: Report, max_degree: int):
    """Bundle-level checks; at rank 1 also connection reality and qtrs choice-independence."""
    RS, kappa, cap = _dunkl_setup(sc, max_degree)
    bundle, canonical, conn = dunkl.build_dunkl_bundle(RS, kappa, poly_cap=max(cap, 4), max_degree=2,
                                                       real=True)
    C = bundle.calc
    rep.notes["flags"] = {"real": conn.real, "regular": conn.regular}
    rep.add("bundle", dunkl.bundle_checks(bundle))
    rep.add("displacement", [dunkl.displacement_covariance(RS, kappa, bundle.W, C.fodc)])
    if RS.dim != 1:
        return
    rep.add("connection", qpb.connection_checks(C, conn.omega, "ω"))
    T1 = dunkl.dunkl_translation_map(bundle, canonical.omega, 2)
    T2 = dunkl.dunkl_translation_map(bundle, conn.omega, 2)
    bal = qpb.BalancedTensor(C, 2)
    keys = [(h, w) for h in bundle.W.elements for d in range(3) for w in C.germs.basis[d]]
    rep.add("qtrs-choice", dunkl.choice_independence(bundle, T1, T2, keys, bal))


def run_dunkl(sc: Scenario, rep: Report, max_degree: int):
    run_dunkl_commute(sc, rep, max_degree)
    run_dunkl_bundle(sc, rep, max_degree)
    if sc.parser.has_option("dunkl", "corep"):
        run_dunkl_hermitian(sc, rep, max_degree)
    if _dunkl_setup(sc, max_degree)[0].dim == 1:
        run_dunkl_gauge(sc, rep, max_degree)


PIPELINES: dict = {
    "hopf-check": run_hopf,
    "fodc": run_fodc,
    "envelope": run_envelope,
    "qpb": run_qpb,
    "gauge": run_gauge,
    "dunkl": run_dunkl,
}


# --- driver ------------------------------------------------------------------------------

SCENARIO_ERRORS = (ScenarioError, configparser.Error, OSError, catalogue.UnsupportedGroup,
                   dunkl.UnsupportedRootSystem, hopf.InvalidGroup, fodc.NotConjugationClosed,
                   fodc.GeneratorNotInKerEps, fodc.NotAdInvariant, fodc.IllDefined, qpb.NotFree,
                   qpb.MissingCorepresentation)


def execute(load: Callable[[], Scenario], verb: str, pipeline: Callable | None, out: str | None,
            max_degree: int | None, timing: bool = False, **kwargs) -> int:
    """Load, run and write the report; returns the exit code."""
    rep = Report(None, verb)
    code = EXIT_OK
    try:
        sc = load()
        rep.scenario = sc
        pipe = pipeline or PIPELINES.get(sc.kind)
        if pipe is None:
            raise ScenarioError(f"unknown scenario kind {sc.kind!r}; expected one of {sorted(PIPELINES)}")
        pipe(sc, rep, max_degree if max_degree is not None else sc.max_degree, **kwargs)
        code = EXIT_OK if rep.passed else EXIT_FAILED
    except SCENARIO_ERRORS as e:
        rep.error = {"type": type(e).__name__, "message": str(e)}
        code = EXIT_SCENARIO
    except Exception as e:  # noqa: BLE001 - any other failure is an internal inconsistency
        rep.error = {"type": type(e).__name__, "message": str(e)}
        code = EXIT_INTERNAL
    text = rep.dumps(timing)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if rep.error:
        print(f"error: {rep.error['type']}: {rep.error['message']}", file=sys.stderr)
    for g, c in rep.records:
        if not c.passed:
            print(f"FAIL {g}/{c.name} [{c.anchor}] witness: {c.witness}", file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qbundle", description="Exact verification of quantum principal bundle identities.")
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, samples=False):
        sp.add_argument("--scenario", required=True, help="INI scenario file")
        sp.add_argument("--out", help="write the JSON report here instead of stdout")
        sp.add_argument("--max-degree", type=int, help="override the scenario's max_degree")
        sp.add_argument("--timing", action="store_true", help="add wall-clock seconds (breaks byte determinism)")
        if samples:
            sp.add_argument("--samples", type=int, help="random gauge maps per bundle")
            sp.add_argument("--seed", type=int, help="override the scenario seed")

    common(sub.add_parser("run", help="run the pipeline named by the scenario kind"))
    sub.add_parser("list", help="list built-in groups, corepresentations and root systems")
    g = sub.add_parser("gauge", help="gauge map correspondence")
    gsub = g.add_subparsers(dest="action", required=True)
    common(gsub.add_parser("roundtrip", help="f ↔ F roundtrips on seeded random gauge maps"), samples=True)
    d = sub.add_parser("dunkl", help="Dunkl operator and bundle checks")
    dsub = d.add_subparsers(dest="action", required=True)
    for name in ("commute", "hermitian", "gauge"):
        common(dsub.add_parser(name))
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verb == "list":
        for line in catalogue.list_catalogue():
            print(line)
        return EXIT_OK
    load = lambda: Scenario.from_file(args.scenario)
    if args.verb == "run":
        return execute(load, "run", None, args.out, args.max_degree, args.timing)
    if args.verb == "gauge":
        return execute(load, "gauge roundtrip", run_gauge, args.out, args.max_degree, args.timing,
                       samples=args.samples, seed=args.seed)
    pipe = {"commute": run_dunkl_commute, "hermitian": run_dunkl_hermitian, "gauge": run_dunkl_gauge}[args.action]
    return execute(load, f"dunkl {args.action}", pipe, args.out, args.max_degree, args.timing)


if __name__ == "__main__":
    sys.exit(main())
