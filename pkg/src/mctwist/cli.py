"""Command line interface: one subcommand per computation, JSON on stdout.

Exit codes: 0 = computed, 1 = invalid input (schema or precondition),
2 = internal invariant violation (always a bug).  All randomized
subcommands take an explicit --seed, so byte-identical inputs and seeds
give byte-identical output.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import interval, io, mc, perturbation
from .dgcore import DgError, check_dga
from .exactlinalg import ChainComplexSpec, ExactLinalgError, Ring, cohomology
from .io import InputError, dumps
from .simplicial import SimplicialError, cochain_algebra, local_system_cohomology


class InternalError(RuntimeError):
    pass


def _out(payload: dict) -> int:
    sys.stdout.write(dumps(payload))
    return 0


def cmd_check_dga(args) -> int:
    a = io.dga_from_json(io.load_json_file(args.algebra))
    if args.ring:
        a = a.change_ring(Ring.parse(args.ring))
    rep = check_dga(a)
    return _out({"ok": rep["ok"],
                 "failures": [{"axiom": f["axiom"],
                               "witness": [io.encode_label(w) for w in f["witness"]]}
                              for f in rep["failures"]],
                 "checks": ["unit", "d-squared", "leibniz", "associativity"]})


def cmd_cohomology(args) -> int:
    obj = io.load_json_file(args.complex)
    try:
        ring = Ring.parse(obj["ring"])
        dims = {int(k): int(v) for k, v in obj["dims"].items()}
        maps = {int(k): io.matrix_from_json(m, ring) for k, m in obj["maps"].items()}
        spec = ChainComplexSpec(ring, dims, maps)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("bad complex JSON: %s" % exc) from exc
    rep = cohomology(spec)
    return _out({"H": io.report_to_json(rep), "checks": ["d-squared", "im-in-ker"]})


def cmd_local_system(args) -> int:
    complex_obj = io.load_json_file(args.complex)
    system_obj = io.load_json_file(args.system)
    if args.ring:
        system_obj = dict(system_obj)
        system_obj["ring"] = args.ring
    ls = io.local_system_from_json(system_obj, complex_obj)
    bad = ls.functor_condition_failures()
    if bad:
        raise InputError("functor condition fails on 2-simplices: %r" % (bad,))
    rep = local_system_cohomology(ls)
    out = []
    for entry in io.report_to_json(rep):
        e = {"rank": entry["rank"]}
        if "torsion" in entry:
            e["torsion"] = entry["torsion"]
        out.append(e)
    return _out({"H": out, "checks": ["invertible-monodromy", "functor-condition",
                                      "mc", "d-squared"]})


def cmd_mc_check(args) -> int:
    obj = io.load_json_file(args.element)
    alg_obj = obj.get("algebra")
    if isinstance(alg_obj, str):
        alg_obj = io.load_json_file(alg_obj)
    a = io.dga_from_json(alg_obj)
    value = io.element_from_json(a, obj["value"])
    try:
        ok, res = mc.is_mc(a, a.element(value))
    except mc.MCError as exc:
        raise InputError(str(exc)) from exc
    payload = {"mc": bool(ok), "checks": ["degree", "mc-residual"]}
    if not ok:
        payload["residual"] = io.element_to_json(res.coeffs)
    return _out(payload)


def cmd_gauge_search(args) -> int:
    a = io.dga_from_json(io.load_json_file(args.algebra))
    x_obj = io.load_json_file(args.x)
    y_obj = io.load_json_file(args.y)
    try:
        x = mc.MCElement(a, a.element(io.element_from_json(a, x_obj["value"])))
        y = mc.MCElement(a, a.element(io.element_from_json(a, y_obj["value"])))
    except mc.MCError as exc:
        raise InputError(str(exc)) from exc
    res = mc.search_homotopy_gauge(a, x, y, budget=args.budget, seed=args.seed)
    payload = {"result": res.kind, "report": _jsonable(res.report),
               "invariants": {
                   side: {key: io.report_to_json(rep)
                          for key, rep in inv.items()}
                   for side, inv in res.invariants.items()},
               "checks": ["invariants", "certificate-verification"]}
    if res.certificate is not None:
        payload["certificate"] = {
            "g": io.element_to_json(res.certificate.g.coeffs),
            "h": io.element_to_json(res.certificate.h.coeffs),
            "wx": io.element_to_json(res.certificate.wx.coeffs),
            "wy": io.element_to_json(res.certificate.wy.coeffs),
        }
    return _out(payload)


def cmd_k2_dict(args) -> int:
    a = io.dga_from_json(io.load_json_file(args.algebra))
    k2 = interval.build_interval_algebra(2, a.ring)
    name_to_label = {"e": k2.e, "f": k2.f, "s": k2.word_label("s", 1),
                     "t": k2.word_label("t", 1), "st": k2.word_label("s", 2),
                     "ts": k2.word_label("t", 2)}
    obj = io.load_json_file(args.input)
    try:
        if args.direction == "to-certificate":
            x_dict = {}
            for name, coeffs in obj["homotopy"]:
                if name not in name_to_label:
                    raise InputError("unknown K_2 word %r" % (name,))
                x_dict[name_to_label[name]] = a.element(io.element_from_json(a, coeffs))
            x, x1, cert = interval.certificate_from_k2_homotopy(a, k2, x_dict)
            return _out({"x": io.element_to_json(x.value.coeffs),
                         "x1": io.element_to_json(x1.value.coeffs),
                         "certificate": {
                             "g": io.element_to_json(cert.g.coeffs),
                             "h": io.element_to_json(cert.h.coeffs),
                             "wx": io.element_to_json(cert.wx.coeffs),
                             "wy": io.element_to_json(cert.wy.coeffs)},
                         "checks": ["mc", "certificate-verification"]})
        x = mc.MCElement(a, a.element(io.element_from_json(a, obj["x"])))
        x1 = mc.MCElement(a, a.element(io.element_from_json(a, obj["x1"])))
        cert = mc.HomotopyGaugeCertificate(
            a.element(io.element_from_json(a, obj["certificate"]["g"])),
            a.element(io.element_from_json(a, obj["certificate"]["h"])),
            a.element(io.element_from_json(a, obj["certificate"]["wx"])),
            a.element(io.element_from_json(a, obj["certificate"]["wy"])))
        x_dict = interval.k2_homotopy_from_certificate(a, k2, x, x1, cert)
        label_to_name = {v: k for k, v in name_to_label.items()}
        return _out({"homotopy": sorted(
            [[label_to_name[l], io.element_to_json(a.as_element(v).coeffs)]
             for l, v in x_dict.items()]),
            "checks": ["certificate-verification", "mc"]})
    except (mc.MCError, KeyError) as exc:
        raise InputError(str(exc)) from exc


def cmd_kinfty(args) -> int:
    kc = interval.k_infty_category(args.n)
    return _out({"truncation": args.n, "presentation": kc.presentation,
                 "relabel": kc.relabel,
                 "checks": ["d-squared-on-generators", "anchor-match"]})


def cmd_kn(args) -> int:
    k = interval.build_interval_algebra(args.n, Ring.parse(args.ring))
    pres = k.presentation()
    rep = check_dga(k.dga)
    if not rep["ok"]:
        raise InternalError("derived interval algebra fails its axioms")
    table = ["K_%d* over %s: ranks %r" % (args.n, args.ring, list(k.ranks()))]
    for l, deg in sorted(k.dga.gm.basis(), key=str):
        table.append("  basis %-18s degree %d" % (interval._label_str(l), deg))
    pres["table"] = table
    pres["checks"] = ["check-dga"]
    return _out(pres)


def cmd_minimal_model(args) -> int:
    obj = io.load_json_file(args.module)
    a = io.dga_from_json(obj["algebra"] if isinstance(obj["algebra"], dict)
                         else io.load_json_file(obj["algebra"]))
    from .dgcore import GradedModule, endomorphism_dga
    try:
        v = GradedModule(a.ring, [(io.decode_label(l), int(d)) for l, d in obj["v"]])
        end = endomorphism_dga(a, v)
        coeffs = {}
        for (u, w, al), c in ((tuple(k), c) for k, c in obj["mc"]):
            coeffs[("E", io.decode_label(u), io.decode_label(w),
                    io.decode_label(al))] = io.decode_scalar(a.ring, c)
        tw = mc.TwistedModule(v, a, mc.MCElement(end, end.element(coeffs)), end_dga=end)
        comp = perturbation.reduced_component(tw)
        if comp is None:
            raise InputError("module is not reduced")
        rtm = perturbation.ReducedTwistedModule(tw, comp)
        mm = perturbation.minimal_model(rtm)
    except (mc.MCError, perturbation.PerturbationError) as exc:
        raise InputError(str(exc)) from exc
    return _out({
        "minimal_rank": mm.minimal.v.dim,
        "minimal_basis": [[io.encode_label(l), d] for l, d in mm.minimal.v.basis()],
        "is_minimal": perturbation.is_minimal(mm.minimal),
        "H": io.report_to_json(mm.minimal.cohomology()),
        "checks": ["mc", "reduced", "hodge", "chain-maps", "p-i-identity",
                   "homotopy-identity", "cohomology-equality"],
    })


def cmd_resolve(args) -> int:
    obj = io.load_json_file(args.input)
    try:
        ring = Ring.parse(obj.get("ring", "Z"))
        base = io.complex_from_json(obj["complex"])
        a = cochain_algebra(base, ring)
        from .dgcore import GradedModule
        w_gm = GradedModule(ring, [(io.decode_label(l), int(d))
                                   for l, d in obj["resolution"]["basis"]])
        d_w = {(io.decode_label(u), io.decode_label(w)): io.decode_scalar(ring, c)
               for u, w, c in obj["resolution"]["d"]}
        w1_coeffs = {}
        for edge, mat in obj["edge_action"]:
            e = io.decode_label(edge)
            m = io.matrix_from_json(mat, ring)
            labels = list(w_gm.labels)
            for i, u in enumerate(labels):
                for j, w in enumerate(labels):
                    c = m.get(j, i)
                    if w_gm.degree[u] == w_gm.degree[w]:
                        if u == w:
                            c = ring.sub(c, ring.one())
                        if c != 0:
                            w1_coeffs[(u, w, e)] = c
        w1 = perturbation.ConvOp(a, w_gm, w_gm, w1_coeffs)
        tw = perturbation.lift_to_free_resolution(a, w_gm, d_w, w1)
    except (perturbation.PerturbationError, mc.MCError, KeyError) as exc:
        raise InputError(str(exc)) from exc
    return _out({"H": io.report_to_json(tw.cohomology()),
                 "checks": ["d-squared", "chain-map", "obstruction-stages", "mc"]})


def cmd_truncate(args) -> int:
    obj = io.load_json_file(args.module)
    a = io.dga_from_json(obj["algebra"] if isinstance(obj["algebra"], dict)
                         else io.load_json_file(obj["algebra"]))
    from .dgcore import GradedModule, endomorphism_dga
    try:
        v = GradedModule(a.ring, [(io.decode_label(l), int(d)) for l, d in obj["v"]])
        end = endomorphism_dga(a, v)
        coeffs = {}
        for (u, w, al), c in ((tuple(k), c) for k, c in obj["mc"]):
            coeffs[("E", io.decode_label(u), io.decode_label(w),
                    io.decode_label(al))] = io.decode_scalar(a.ring, c)
        tw = mc.TwistedModule(v, a, mc.MCElement(end, end.element(coeffs)), end_dga=end)
        comp = perturbation.reduced_component(tw)
        if comp is None:
            raise InputError("module is not reduced")
        rtm = perturbation.ReducedTwistedModule(tw, comp)
        out, inc = perturbation.truncate_twisted(rtm, args.i)
    except (mc.MCError, perturbation.PerturbationError) as exc:
        raise InputError(str(exc)) from exc
    return _out({"rank": out.v.dim,
                 "basis": [[io.encode_label(l), d] for l, d in out.v.basis()],
                 "H": io.report_to_json(out.cohomology()),
                 "checks": ["reduced", "kernel-truncation", "inclusion-closed", "mc"]})


def _read_csv_matrices(path) -> np.ndarray:
    try:
        rows = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    rows.append([float(tok) for tok in line.split(",")])
        import math
        n = int(math.isqrt(len(rows[0])))
        if n * n != len(rows[0]):
            raise InputError("rows of %s are not square matrices" % path)
        return np.array([[r[i * n:(i + 1) * n] for i in range(n)] for r in rows])
    except (OSError, ValueError) as exc:
        raise InputError("cannot parse CSV %s: %s" % (path, exc)) from exc


def cmd_holonomy(args) -> int:
    from . import holonomy as hol
    if args.mode == "pexp":
        samples = _read_csv_matrices(args.path[0])
        sp = hol.SampledMatrixPath(samples)
        path, report = hol.solve_transport(sp)
        # order estimate by step halving on the coarsened grid
        coarse = hol.SampledMatrixPath(samples[::2]) if (len(samples) - 1) % 4 == 0 \
            else None
        order = None
        if coarse is not None:
            g_fine = path.values[-1]
            g_coarse = hol.solve_transport(coarse)[0].values[-1]
            diff = float(np.max(np.abs(g_fine - g_coarse)))
            order = {"halving_difference": diff}
        payload = {"result": [[round(v, 12) for v in row] for row in
                              path.values[-1].tolist()],
                   "residuals": {"interior": report["interior_residual"],
                                 "condition_number": report["endpoint_condition_number"]},
                   "checks": ["finite", "residual"]}
        if order:
            payload["order_estimate"] = order
        return _out(payload)
    if args.mode == "backward":
        if len(args.path) != 2:
            raise InputError("backward mode needs two CSV paths (x samples, y samples)")
        xs = _read_csv_matrices(args.path[0])
        ys = _read_csv_matrices(args.path[1])
        p = args.grid
        if xs.shape[0] % p != 0 or ys.shape != xs.shape:
            raise InputError("sample counts do not match the --grid size")
        mz = xs.shape[0] // p - 1
        xs = xs.reshape(mz + 1, p, xs.shape[1], xs.shape[2])
        ys = ys.reshape(mz + 1, p, ys.shape[1], ys.shape[2])
        g, report = hol.gauge_from_homotopy(xs, ys, endpoint_tol=args.tolerance)
        if not report["consistent"]:
            raise InputError("inputs do not satisfy the homotopy system: "
                             "endpoint error %g" % report["endpoint_error"])
        return _out({"endpoint_error": report["endpoint_error"],
                     "condition_number": report["gauge_condition_number"],
                     "checks": ["endpoint-identity"]})
    raise InputError("unknown holonomy mode %r" % (args.mode,))


def cmd_emit_fixtures(args) -> int:
    import os

    from . import fixtures
    from .simplicial import circle, torus7
    os.makedirs(args.dir, exist_ok=True)
    written = []

    def write(name, payload):
        path = os.path.join(args.dir, name)
        with open(path, "w") as fh:
            fh.write(dumps(payload))
        written.append(name)

    kx = fixtures.universal_mc_dga(Ring.Z(), 4)
    write("kx-fixture.json", {"algebra": io.dga_to_json(kx),
                              "value": io.element_to_json({("x", 1): 1})})
    write("circle3-algebra.json", io.dga_to_json(cochain_algebra(circle(3), Ring.Z())))
    write("torus7-algebra.json", io.dga_to_json(cochain_algebra(torus7(), Ring.Z())))
    for n in range(0, 4):
        k = interval.build_interval_algebra(n, Ring.Z())
        write("kn-%d.json" % n, k.presentation())
    write("circle3.json", io.complex_to_json(circle(3)))
    write("circle4.json", io.complex_to_json(circle(4)))
    write("torus7.json", io.complex_to_json(torus7()))
    write("sign.json", {"ring": "Z", "rank": 1,
                        "complex": io.complex_to_json(circle(3)),
                        "monodromy": [[[0, 1], {"ring": "Z", "rows": 1, "cols": 1,
                                                "entries": [["-1"]]}]]})
    ua = fixtures.homotopy_gauge_universal_dga(Ring.Q())
    write("example23.json", {
        "generators": [[g, d] for g, d in sorted(ua.generator_degrees.items())],
        "differential": {g: sorted([["".join(w), io.encode_scalar(c)]
                                    for w, c in expr.items()])
                         for g, expr in sorted(ua.diff_table.items())},
        "note": "universal homotopy gauge pair; no finite-dimensional dg "
                "quotient exists, so elements are computed lazily",
    })
    write("example51-convention.json", fixtures_example51())
    return _out({"written": sorted(written), "dir": args.dir})


def fixtures_example51() -> dict:
    """The pinned twisting convention reproducing H^1 = Z/2 on K_0*."""
    from .interval import build_interval_algebra
    from .exactlinalg import cohomology as h_of
    k0 = build_interval_algebra(0, Ring.Z())
    a = k0.dga
    s = mc.MCElement(a, a.element(k0.word_label("s", 1)))
    outcomes = {}
    module = mc.twist_module(a, s)
    outcomes["module_left"] = io.report_to_json(h_of(module.complex()))
    hom = mc.hom_twist(a, s, mc.zero_mc(a))
    outcomes["module_right"] = io.report_to_json(h_of(hom.complex()))
    alg = mc.twist_algebra(a, s)
    outcomes["algebra"] = io.report_to_json(h_of(alg.complex()))
    hom2 = mc.hom_twist(a, s, s)
    outcomes["two_sided"] = io.report_to_json(h_of(hom2.complex()))
    return {"conventions": outcomes, "pinned": "algebra",
            "reason": "the algebra twisting (= the two-sided twist by s on "
                      "both sides) reproduces H^1 = Z/2 over Z; both "
                      "one-sided module twistings give torsion-free H"}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mctwist",
                                description="exact Maurer-Cartan computations")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-dga", help="verify dg algebra axioms")
    s.add_argument("algebra")
    s.add_argument("--ring", default=None)
    s.set_defaults(func=cmd_check_dga)

    s = sub.add_parser("cohomology", help="cohomology of a finite complex")
    s.add_argument("complex")
    s.set_defaults(func=cmd_cohomology)

    s = sub.add_parser("local-system", help="twisted cohomology of a local system")
    s.add_argument("complex")
    s.add_argument("system")
    s.add_argument("--ring", default=None)
    s.set_defaults(func=cmd_local_system)

    s = sub.add_parser("mc-check", help="verify the Maurer-Cartan equation")
    s.add_argument("element")
    s.set_defaults(func=cmd_mc_check)

    s = sub.add_parser("gauge-search", help="decide (homotopy) gauge equivalence")
    s.add_argument("algebra")
    s.add_argument("x")
    s.add_argument("y")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--budget", type=int, default=40)
    s.set_defaults(func=cmd_gauge_search)

    s = sub.add_parser("k2-dict", help="K_2 homotopy <-> certificate dictionary")
    s.add_argument("algebra")
    s.add_argument("input")
    s.add_argument("--direction", choices=["to-certificate", "to-homotopy"],
                   required=True)
    s.set_defaults(func=cmd_k2_dict)

    s = sub.add_parser("kinfty", help="derived resolution-category table")
    s.add_argument("--n", type=int, default=4)
    s.set_defaults(func=cmd_kinfty)

    s = sub.add_parser("kn", help="derived presentation of K_n*")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--ring", required=True)
    s.set_defaults(func=cmd_kn)

    s = sub.add_parser("minimal-model", help="perturbation to a minimal module")
    s.add_argument("module")
    s.set_defaults(func=cmd_minimal_model)

    s = sub.add_parser("resolve", help="free resolution lift over Z")
    s.add_argument("input")
    s.set_defaults(func=cmd_resolve)

    s = sub.add_parser("truncate", help="canonical truncation of a twisted module")
    s.add_argument("module")
    s.add_argument("--i", type=int, required=True)
    s.set_defaults(func=cmd_truncate)

    s = sub.add_parser("holonomy", help="numerical parallel transport")
    s.add_argument("--mode", choices=["pexp", "backward"], required=True)
    s.add_argument("path", nargs="+")
    s.add_argument("--grid", type=int, default=64)
    s.add_argument("--tolerance", type=float, default=1e-5)
    s.set_defaults(func=cmd_holonomy)

    s = sub.add_parser("emit-fixtures", help="write the built-in paper fixtures")
    s.add_argument("--dir", required=True)
    s.set_defaults(func=cmd_emit_fixtures)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ExactLinalgError, DgError, SimplicialError,
            mc.MCError) as exc:
        sys.stderr.write("input error: %s\n" % exc)
        return 1
    except InternalError as exc:
        sys.stderr.write("internal invariant violation: %s\n" % exc)
        return 2
    except Exception as exc:  # noqa: BLE001 - any surprise is a bug, exit 2
        sys.stderr.write("internal error: %s: %s\n" % (type(exc).__name__, exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
