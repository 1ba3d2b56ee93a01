"""Command-line entry point: ``qbraid <subcommand>``.

Exit codes: 0 verified, 1 a check was refuted (or no triangulation exists),
2 bad input, I/O or schema error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .braid_group import Word, braid_is_trivial, verify_iso_G_Br4
from .errors import QBraidError, SchemaError
from .fan_analysis import NotCompactError, SmoothnessError, classify_surface, star_fan
from .fan_io import FanDocument
from .lattice_core import Fan, check_fan_3d, normalized_volume
from .quotient_fan import (
    QuotientData,
    build_lattice,
    enumerate_unimodular_triangulations,
    fixture_names,
    load_fixture,
    resolution_fan,
)
from .sheaf_calculus import (
    ConfigData,
    configuration,
    euler_matrix,
    graded_hom,
    orthogonality_check,
    twist_matrix,
    twisted_class_checks,
    verify_twist_relations,
)

EXIT_OK, EXIT_REFUTED, EXIT_ERROR = 0, 1, 2

NOT_APPLICABLE_NOTE = "cyclic 3-surface checks: not applicable"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# verification pipeline


@dataclass
class VerifyReport:
    checks: dict[str, dict] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    elapsed: float | None = None

    def add(self, name: str, status: str, **details):
        self.checks[name] = {"status": status, **details}

    @property
    def verified(self) -> bool:
        return all(c["status"] in ("pass", "not_applicable") for c in self.checks.values())

    @property
    def failed(self) -> list[str]:
        return [k for k, c in self.checks.items() if c["status"] not in ("pass", "not_applicable")]

    def to_dict(self) -> dict:
        out = {"verified": self.verified, "failed": self.failed, "checks": self.checks, "notes": self.notes}
        if self.elapsed is not None:
            out["elapsed_seconds"] = round(self.elapsed, 4)
        return out


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def is_cyclic_configuration(config: ConfigData) -> bool:
    """Three compact surfaces meeting pairwise in curves and all together in a point."""
    return len(config) == 3 and len(config.curves) == 3 and config.triple_point


def verify_fan(fan: Fan, with_iso: bool = True) -> VerifyReport:
    """Run every applicable check on a resolution fan."""
    rep = VerifyReport()

    off_plane = [i for i, p in enumerate(fan.rays) if p.coordinate_sum() != 1]
    rep.add("crepancy", _status(not off_plane), rays_off_junior_plane=off_plane)

    volumes = {}
    for c in fan.maximal_cones:
        try:
            volumes[str(list(c.ray_indices))] = normalized_volume(fan.points(c), fan.lattice)
        except QBraidError:
            volumes[str(list(c.ray_indices))] = 0
    nonprimitive = [i for i, p in enumerate(fan.rays) if p not in fan.lattice or not fan.lattice.is_primitive(p)]
    smooth = all(v == 1 for v in volumes.values()) and not nonprimitive
    rep.add("smoothness", _status(smooth), cone_volumes=volumes, nonprimitive_rays=nonprimitive)

    problems = check_fan_3d(fan) if fan.dim == 3 else ["fan is not three-dimensional"]
    rep.add("fan_condition", _status(not problems), problems=problems)

    if not rep.verified:
        rep.notes.append("downstream checks skipped: the fan is not a crepant smooth 3D fan")
        return rep

    try:
        config = configuration(fan)
    except (SmoothnessError, NotCompactError) as exc:
        rep.add("surfaces", "fail", error=str(exc))
        return rep
    rep.add("surfaces", "pass", surfaces=[s.to_dict() for s in config.surfaces])

    # a compact curve in a Calabi-Yau 3-fold has normal bundle O(a) + O(b) with a + b = -2
    bad = [list(k) for k, c in config.curves.items() if sum(c.self_intersection.values()) != -2]
    rep.add("intersections", _status(not bad), curves=config.to_dict()["curves"],
            triple_point=config.triple_point, normal_degree_failures=bad)

    n = len(config)
    chi = euler_matrix(config)
    homs = {f"{k},{l}": graded_hom(config, k, l).to_dict() for k in range(n) for l in range(n)}
    serre = all(graded_hom(config, k, l) == graded_hom(config, l, k).serre_dual() for k in range(n) for l in range(n))
    rep.add("homs", _status(serre and chi.antisymmetric and chi.zero_diagonal), table=homs,
            euler_matrix=[list(r) for r in chi.chi], serre_duality=serre)

    twists = [twist_matrix(k, chi) for k in range(n)]
    twist_ok = all(t.det == 1 and t.is_transvection() for t in twists)
    rep.add("twists", _status(twist_ok), matrices={f"T{k + 1}": [list(r) for r in t.m] for k, t in enumerate(twists)})

    if not is_cyclic_configuration(config):
        rep.notes.append(NOT_APPLICABLE_NOTE)
        for name in ("relations", "twisted_classes", "orthogonality", "iso"):
            rep.add(name, "not_applicable")
        return rep

    rel = verify_twist_relations(*twists)
    rep.add("relations", _status(rel.all_pass), **rel.to_dict())
    tc = twisted_class_checks(chi)
    rep.add("twisted_classes", _status(tc["all_pass"]), **tc)
    orth = orthogonality_check(config)
    rep.add("orthogonality", _status(orth.holds), **orth.to_dict())
    if with_iso:
        cert = verify_iso_G_Br4(twists=[t.m for t in twists])
        rep.add("iso", cert.status, failing_parts=cert.failing,
                parts={k: v["status"] for k, v in cert.parts.items()})
    return rep


# ---------------------------------------------------------------------------
# helpers


def _parse_weights(text: str) -> tuple[int, int, int]:
    try:
        w = tuple(int(x) for x in text.replace(" ", "").split(","))
    except ValueError as exc:
        raise UsageError(f"weights must be comma-separated integers, got {text!r}") from exc
    if len(w) != 3:
        raise UsageError("expected three weights")
    return w


def _read_fan(path: str) -> Fan:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    return FanDocument.from_json(text).to_fan()


def _emit(payload, out: str | None, stable: bool = True) -> None:
    text = json.dumps(payload, indent=2, sort_keys=stable, default=_json_default) + "\n"
    if out:
        try:
            with open(out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _json_default(x):
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_resolve(args) -> int:
    q = QuotientData(args.r, _parse_weights(args.weights))
    if args.fixture:
        if args.fixture not in fixture_names():
            raise UsageError(f"unknown fixture {args.fixture!r}; have {fixture_names()}")
        fan = load_fixture(args.fixture)
        if (fan.metadata.get("order"), tuple(fan.metadata.get("weights", ()))) != (q.order, q.weights):
            raise UsageError(f"fixture {args.fixture} does not resolve 1/{q.order}{q.weights}")
        _emit(FanDocument.from_fan(fan).to_dict(), args.out)
        return EXIT_OK
    tris = enumerate_unimodular_triangulations(q)
    if not tris:
        print("no crepant unimodular triangulation", file=sys.stderr)
        return EXIT_REFUTED
    lattice = build_lattice(q)
    if args.index is not None:
        if not 0 <= args.index < len(tris):
            raise UsageError(f"index {args.index} out of range: {len(tris)} triangulation(s)")
        doc = FanDocument.from_fan(resolution_fan(tris[args.index], lattice))
        _emit(doc.to_dict(), args.out)
    else:
        docs = [FanDocument.from_fan(resolution_fan(t, lattice)).to_dict() for t in tris]
        _emit({"count": len(docs), "fans": docs}, args.out)
    return EXIT_OK


def cmd_surfaces(args) -> int:
    config = configuration(_read_fan(args.fan))
    _emit({"surfaces": [s.to_dict() for s in config.surfaces]}, args.out)
    return EXIT_OK


def cmd_intersections(args) -> int:
    d = configuration(_read_fan(args.fan)).to_dict()
    _emit({"rays": d["rays"], "curves": d["curves"], "triple_point": d["triple_point"]}, args.out)
    return EXIT_OK


def cmd_homs(args) -> int:
    config = configuration(_read_fan(args.fan))
    n = len(config)
    chi = euler_matrix(config)
    table = [{"from": k, "to": l, "dims": graded_hom(config, k, l).to_dict()} for k in range(n) for l in range(n)]
    _emit({"rays": list(config.rays), "homs": table, "euler_matrix": [list(r) for r in chi.chi]}, args.out)
    return EXIT_OK


def cmd_twists(args) -> int:
    config = configuration(_read_fan(args.fan))
    chi = euler_matrix(config)
    twists = [twist_matrix(k, chi) for k in range(len(config))]
    if len(twists) != 3:
        _emit({"matrices": {f"T{k + 1}": [list(r) for r in t.m] for k, t in enumerate(twists)},
               "note": NOT_APPLICABLE_NOTE}, args.out)
        return EXIT_OK
    rel = verify_twist_relations(*twists)
    _emit(rel.to_dict(), args.out)
    return EXIT_OK if rel.all_pass else EXIT_REFUTED


def cmd_verify(args) -> int:
    fan = _read_fan(args.fan)
    start = time.perf_counter()
    rep = verify_fan(fan, with_iso=not args.no_iso)
    if not args.stable_output:
        rep.elapsed = time.perf_counter() - start
    payload = rep.to_dict()
    _emit(payload, args.out)
    for note in rep.notes:
        print(note, file=sys.stderr)
    if args.out:
        print("verified" if rep.verified else f"refuted: {', '.join(rep.failed)}")
    return EXIT_OK if rep.verified else EXIT_REFUTED


def cmd_word(args) -> int:
    w = Word.parse(args.word)
    print("trivial" if braid_is_trivial(args.n, w) else "nontrivial")
    return EXIT_OK


def cmd_iso(args) -> int:
    cert = verify_iso_G_Br4()
    passed = sum(1 for p in cert.parts.values() if p["status"] == "pass")
    if args.out:
        _emit(cert.to_dict(), args.out)
        print(f"{passed}/{len(cert.parts)} parts pass")
    else:
        _emit(cert.to_dict(), None)
    return EXIT_OK if cert.passed else EXIT_REFUTED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qbraid", description="Toric resolutions, spherical twists and braid words.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("resolve", help="crepant resolution fans of C^3 / mu_r")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--weights", required=True, help="e.g. 1,2,4")
    sel = p.add_mutually_exclusive_group()
    sel.add_argument("--all", action="store_true", help="every triangulation (default)")
    sel.add_argument("--index", type=int)
    sel.add_argument("--fixture")
    p.add_argument("--out")
    p.set_defaults(func=cmd_resolve)

    for name, func, hlp in (
        ("surfaces", cmd_surfaces, "classify the compact exceptional surfaces"),
        ("intersections", cmd_intersections, "pairwise intersection curves"),
        ("homs", cmd_homs, "graded Hom table and Euler matrix"),
        ("twists", cmd_twists, "twist matrices and their relations"),
    ):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("fan")
        p.add_argument("--out")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="end-to-end verification of a fan file")
    p.add_argument("fan")
    p.add_argument("--out")
    p.add_argument("--stable-output", action="store_true", help="omit timings for byte-stable output")
    p.add_argument("--no-iso", action="store_true", help="skip the G = Br4 certificate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("word", help="decide whether a braid word is trivial")
    p.add_argument("--n", type=int, required=True, help="number of strands")
    p.add_argument("--word", required=True, help='signed generators, e.g. "1 2 -1"')
    p.set_defaults(func=cmd_word)

    p = sub.add_parser("iso", help="certificate for G = Br4")
    p.add_argument("--out")
    p.set_defaults(func=cmd_iso)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args)
    except (UsageError, SchemaError, ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except QBraidError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
