"""Command-line driver: verification suites, table emission, family sweeps.

Reports are line-delimited JSON with one record per check (name, status,
measured value, threshold, citation), preceded by a header record and
followed by a summary record.  Serialized reports are byte-deterministic
for a fixed seed and configuration; wall-clock timing is kept on the
in-memory report and printed in the human summary only, never written to
the report file.  Exit codes: 0 all checks pass, 1 at least one check
failed, 2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import pi
from pathlib import Path

import numpy as np

from . import geometry as geo
from . import moment as mo
from . import rootsys
from . import stability as st
from . import sympair as sp
from .errors import ConfigurationError, VerificationError

GEOM_DEFAULTS = {
    "curvature_spread": 1e-7,
    "angle_gap": 1e-7,
    "kahler": 1e-9,
    "palmer_spread": 1e-9,
    "bv_identity": 1e-8,
    "bv_spectrum": 1e-7,
}
MOMENT_DEFAULTS = {
    "gauss_moment": 1e-9,
    "equivariance": 1e-9,
    "sec_identity": 1e-9,
    "center_defect": 1e-9,
}


@dataclass
class VerifyConfig:
    pair: str | None = None
    suite: str | None = None
    samples: int = 100
    seed: int = 42
    tol_geom: float | None = None
    out: str | None = None

    def __post_init__(self):
        if self.samples < 1:
            raise ConfigurationError("sample count must be >= 1")
        if self.tol_geom is not None and self.tol_geom <= 0:
            raise ConfigurationError("tolerances must be positive")


@dataclass
class CheckRecord:
    name: str
    status: str          # "pass" | "fail" | "unsupported"
    value: str
    threshold: str
    citation: str
    relation: str = "lt"  # "lt" for tolerance checks, "eq" for exact ones


@dataclass
class Report:
    suite: str
    records: list[CheckRecord] = field(default_factory=list)
    timing: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.records)

    def add(self, name: str, value: float, threshold: float, citation: str,
            ok: bool | None = None) -> None:
        if ok is None:
            ok = value < threshold
        self.records.append(CheckRecord(
            name, "pass" if ok else "fail",
            _fmt_value(value), _fmt_value(threshold), citation,
        ))

    def add_exact(self, name: str, got, expected, citation: str) -> None:
        ok = got == expected
        self.records.append(CheckRecord(
            name, "pass" if ok else "fail",
            f"{got}", f"{expected}", citation, relation="eq",
        ))

    def add_unsupported(self, name: str, citation: str) -> None:
        self.records.append(CheckRecord(name, "unsupported", "", "", citation))

    def to_lines(self, config: VerifyConfig) -> list[str]:
        lines = [json.dumps({
            "record": "header", "suite": self.suite,
            "pair": config.pair, "samples": config.samples,
            "seed": config.seed,
        }, sort_keys=True)]
        for r in self.records:
            lines.append(json.dumps({
                "record": "check", "name": r.name, "status": r.status,
                "value": r.value, "threshold": r.threshold,
                "relation": r.relation, "citation": r.citation,
            }, sort_keys=True))
        lines.append(json.dumps({
            "record": "summary", "passed": self.passed,
            "checks": len(self.records),
            "failed": sum(1 for r in self.records if r.status == "fail"),
        }, sort_keys=True))
        return lines


def _fmt_value(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return format(float(x), ".12e")


# ---------------------------------------------------------------------------
# geometry suite
# ---------------------------------------------------------------------------

def _geometry_pair_checks(report: Report, desc: sp.PairDescriptor,
                          config: VerifyConfig, tols: dict) -> None:
    pid = desc.pair_id
    if not desc.matrix_realizable:
        report.add_unsupported(f"{pid}.geometry", "no matrix model shipped")
        return
    pair = sp.build_pair(desc)
    h = sp.regular_element(pair, 0.37)
    profile = geo.principal_curvatures(pair, h)
    samples = geo.orbit_samples(pair, h, config.samples, seed=config.seed)

    closed = np.sort(np.repeat(profile.curvatures, profile.multiplicities))
    kappas = []
    kmax = 0.0
    homs = None
    for k, s in enumerate(samples):
        weingarten, s_homs = geo.sample_measurements(pair, h, s)
        kappas.append(np.sort(np.linalg.eigvalsh(weingarten)))
        kmax = max(kmax, float(np.max(np.abs(geo.kahler_matrix(s_homs)))))
        if k == min(2, len(samples) - 1):
            homs = s_homs
    kappas = np.array(kappas)
    spread = float(np.max(np.abs(kappas - closed[None, :])))
    report.add(f"{pid}.curvature_spread", spread, tols["curvature_spread"],
               "isoparametric orbits have constant principal curvatures")

    report.add_exact(f"{pid}.distinct_count", profile.g, desc.g,
                     "distinct curvature count per the rank-2 orbit catalog")
    expected_mults = sorted(set(desc.multiplicities))
    got_mults = sorted(set(profile.multiplicities))
    report.add_exact(f"{pid}.multiplicities", got_mults, expected_mults,
                     "curvature multiplicities per the rank-2 orbit catalog")

    if profile.g > 1:
        gap_err = float(np.max(np.abs(np.diff(profile.angles) - pi / profile.g)))
    else:
        gap_err = 0.0
    report.add(f"{pid}.angle_gaps", gap_err, tols["angle_gap"],
               "Muenzner: arccot of the curvatures are pi/g-equally spaced")

    report.add(f"{pid}.kahler_pullback", kmax, tols["kahler"],
               "Gauss maps of sphere hypersurfaces are Lagrangian")

    phases = [geo.palmer_phase_of_values(k) for k in kappas]
    report.add(f"{pid}.palmer_spread", float(np.ptp(phases)),
               tols["palmer_spread"],
               "Palmer: constant curvature phase means minimal Gauss image")

    rng = np.random.default_rng(config.seed + 1)
    worst_lagr = worst_isom = 0.0
    for phi in rng.uniform(0.0, pi, 20):
        lagr, isom = geo.bv_identity_residuals(homs, phi)
        worst_lagr, worst_isom = max(worst_lagr, lagr), max(worst_isom, isom)
    report.add(f"{pid}.bv_transpose_identity", worst_lagr, tols["bv_identity"],
               "transpose symmetry of the frame operators on Lagrangian images")
    report.add(f"{pid}.bv_isometry_identity", worst_isom, tols["bv_identity"],
               "frame operators of an isometric Lagrangian immersion sum to Id")

    worst_spec = 0.0
    for k in range(360):
        phi = k * pi / 360.0
        worst_spec = max(worst_spec, float(np.max(np.abs(
            geo.bv_eigenvalues(homs, phi) - geo.bv_closed_form(profile, phi)
        ))))
    report.add(f"{pid}.bv_spectrum", worst_spec, tols["bv_spectrum"],
               "squared frame operator has curvature-angle eigenvalues")


def run_geometry(report: Report, config: VerifyConfig) -> None:
    tols = dict(GEOM_DEFAULTS)
    if config.tol_geom is not None:
        tols = {k: config.tol_geom for k in tols}
    if config.pair:
        descs = [sp.parse_pair_id(config.pair)]
    else:
        descs = sp.load_catalog()
    for desc in descs:
        _geometry_pair_checks(report, desc, config, tols)


# ---------------------------------------------------------------------------
# moment suite
# ---------------------------------------------------------------------------

def run_moment(report: Report, config: VerifyConfig) -> None:
    tols = MOMENT_DEFAULTS
    pair_ids = [config.pair] if config.pair else ["AI2", "BDI2(3)", "AIII2(3)"]
    for pid in pair_ids:
        desc = sp.parse_pair_id(pid)
        if not desc.matrix_realizable:
            report.add_unsupported(f"{pid}.moment", "no matrix model shipped")
            continue
        pair = sp.build_pair(desc)
        h = sp.regular_element(pair, 0.31)
        samples = geo.orbit_samples(pair, h, min(config.samples, 50),
                                    seed=config.seed)
        worst = max(mo.moment_map(pair, geo.gauss_map(s)).norm for s in samples)
        report.add(f"{pid}.moment_on_gauss_image", worst, tols["gauss_moment"],
                   "the Gauss image is the zero level of the moment map")

        rng = np.random.default_rng(config.seed)
        worst_eq = worst_sec = 0.0
        for _ in range(20):
            a = rng.standard_normal(pair.dim_p)
            a /= np.linalg.norm(a)
            b = rng.standard_normal(pair.dim_p)
            b -= (b @ a) * a
            b /= np.linalg.norm(b)
            q = geo.QuadricPoint(np.vstack([a, b]))
            mv = mo.moment_map(pair, q)
            worst_sec = max(worst_sec,
                            abs(mv.norm_sq - mo.sectional_curvature(pair, q)))
            g = pair.k_exp(rng.standard_normal(pair.dim_k))
            lhs = mo.moment_map(pair, mo.rotate_plane(pair, g, q)).k_coords
            rhs = pair.ad_rotation_k(g) @ mv.k_coords
            worst_eq = max(worst_eq, float(np.max(np.abs(lhs - rhs))))
        report.add(f"{pid}.moment_equivariance", worst_eq, tols["equivariance"],
                   "moment maps intertwine the group action")
        report.add(f"{pid}.norm_equals_sectional_curvature", worst_sec,
                   tols["sec_identity"],
                   "squared moment norm is the plane's sectional curvature")

    for pid, half_dim in (("BDI2(3)", 2), ("BDI2(4)", 3), ("BDIIxBDII(1,3)", 0)):
        if config.pair and pid != config.pair:
            continue
        pair = sp.build_pair(pid)
        sweep = mo.moment_sweep(pair, 720)
        norms = np.array([s[1] for s in sweep])
        defect = max(s[3] for s in sweep)
        report.add(f"{pid}.wlambda_central", defect, tols["center_defect"],
                   "the deformation circle has central moment values")
        imax = int(np.argmax(norms))
        at_quarter = imax in (180, 540)
        report.add_exact(f"{pid}.wlambda_max_at_quarter", at_quarter, True,
                         "moment norm peaks at the quarter turns of the family")
        dims = {s[2] for k, s in enumerate(sweep) if k not in (0, 180, 360, 540)}
        report.add_exact(f"{pid}.wlambda_generic_dim", dims, {pair.n},
                         "generic family members are Lagrangian orbits")
        report.add_exact(
            f"{pid}.wlambda_quarter_dim",
            mo.orbit_dimension(pair, mo.w_lambda_plane(pair, pi / 2).plane),
            half_dim,
            "quarter-turn members collapse to lower-dimensional isotropic orbits")


# ---------------------------------------------------------------------------
# stability suite
# ---------------------------------------------------------------------------

def run_stability(report: Report, config: VerifyConfig) -> None:
    golden = {
        "AI2": (3, 5, 3, Fraction(6), Fraction(1, 3), Fraction(6), 7),
        "a2": (6, 8, 8, Fraction(2), Fraction(1, 6), Fraction(2), 20),
        "AII2": (12, 14, 21, Fraction(3, 2), Fraction(1, 12), Fraction(3, 2), 70),
        "EIV": (24, 26, 52, Fraction(4, 3), Fraction(1, 24), Fraction(4, 3), 273),
    }
    for case, (n, dp, dk, binv, g1sq, cn, nullity) in golden.items():
        row = st.casimir_constants(case)
        report.add_exact(f"{case}.constants",
                         (row.n, row.dim_p, row.dim_k, row.b_inv,
                          row.gamma1_norm_sq, row.cn),
                         (n, dp, dk, binv, g1sq, cn),
                         "closed-form metric constants of the Gauss image")
        verdict = st.stability_verdict(case)
        report.add_exact(f"{case}.verdict", verdict.verdict, "H-stable",
                         "first eigenvalue meets the Einstein threshold")
        report.add_exact(f"{case}.nullity", verdict.nullity, nullity,
                         "null space is exactly the ambient rotation fields")
        report.add_exact(f"{case}.strict", verdict.strict, True,
                         "nullity matches dim so(n+2) minus dim K")

    ok = st.stability_verdict("g1").stable
    report.add_exact("g1.verdict", ok, True,
                     "geodesic-sphere Gauss images are stable")
    rule_ok = True
    for m1 in range(1, 12):
        for m2 in range(m1, 13 - m1):
            v = st.stability_verdict("g2", m1, m2)
            rule_ok &= v.stable == (m2 - m1 < 3)
    report.add_exact("g2.rule", rule_ok, True,
                     "Clifford-type images are stable iff |m2 - m1| < 3")

    ok = True
    for m, sub, expect in ((4, "Ka_tilde", 0), (6, "Ka_tilde", 1),
                           (4, "K0_tilde", 2), (2, "K0_tilde", 0)):
        ok &= st.su2_fixed_dimension(m, sub) == expect
    for m in range(1, 20, 2):
        ok &= st.su2_fixed_dimension(m, "K0_tilde") == 0
    report.add_exact("su2.fixed_dims", ok, True,
                     "finite-subgroup averaging on the degree-m modules")


def run_verify(config: VerifyConfig) -> Report:
    """Execute the configured suite; see module docstring for the contract."""
    suite = config.suite or ("pair" if config.pair else "all")
    if config.pair:
        sp.parse_pair_id(config.pair)  # validate early; raises ConfigurationError
    report = Report(suite)
    started = time.perf_counter()
    if suite in ("geometry", "pair", "all"):
        run_geometry(report, config)
    if suite in ("moment", "pair", "all"):
        run_moment(report, config)
    if suite in ("stability", "all"):
        run_stability(report, config)
    if not report.records:
        raise ConfigurationError(f"unknown suite {suite!r}")
    report.timing = time.perf_counter() - started
    if config.out:
        Path(config.out).write_text("\n".join(report.to_lines(config)) + "\n")
    return report


# ---------------------------------------------------------------------------
# table emission
# ---------------------------------------------------------------------------

def emit_tables(which: str, outdir: str) -> Path:
    """Write the requested table as CSV; computed tables come from code."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / f"{which}.csv"
    if which == "constants":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["case", "n", "dim_p", "dim_k", "b_inv",
                        "gamma1_norm_sq", "Cn"])
            for case in st.g3_cases():
                row = st.casimir_constants(case)
                w.writerow([case, row.n, row.dim_p, row.dim_k, row.b_inv,
                            row.gamma1_norm_sq, row.cn])
    elif which == "candidates":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["case", "m_coords", "p_coords", "eigenvalue",
                        "fixed_dim"])
            for case in st.g3_cases():
                rs = st.case_root_system(case)
                cap = st.casimir_constants(case).cn
                for wt in rootsys.dominant_weights_below(rs, cap):
                    eig = rootsys.casimir_eigenvalue(rs, wt)
                    if all(c == 0 for c in wt.m_coords):
                        fixed = 1
                    else:
                        fixed = st.fixed_dimension(case, wt.m_coords)
                    w.writerow([
                        case,
                        " ".join(str(c) for c in wt.m_coords),
                        " ".join(str(c) for c in wt.p_coords),
                        eig, fixed,
                    ])
    elif which == "table2":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["g", "type", "pair", "dim_N", "multiplicities",
                        "orbit", "matrix_realizable"])
            for row in sp.catalog_rows():
                w.writerow([row.g, row.type_label, row.pair_name, row.dim_n,
                            row.mult, row.orbit,
                            "yes" if row.matrix_realizable else "no"])
    elif which == "table1":
        rows = st._read_csv("table1.csv")
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            w.writeheader()
            w.writerows(rows)
    else:
        raise ConfigurationError(f"unknown table {which!r}")
    return path


def write_sweep(pair_id: str, points: int, out: str) -> Path:
    """theta / moment-norm / orbit-dimension sweep over the family circle."""
    pair = sp.build_pair(pair_id)
    rows = mo.moment_sweep(pair, points)
    path = Path(out)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta", "moment_norm_sq", "orbit_dim", "central_defect"])
        for theta, nsq, dim, defect in rows:
            w.writerow([format(theta, ".12e"), format(nsq, ".12e"), dim,
                        format(defect, ".3e")])
    return path


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperquadric",
        description="verification suites for Gauss-image Lagrangian geometry",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="run a verification suite")
    pv.add_argument("--pair", help="catalog pair id, e.g. BDI2(4)")
    pv.add_argument("--suite", choices=["geometry", "moment", "stability", "all"])
    pv.add_argument("--samples", type=int, default=100)
    pv.add_argument("--seed", type=int, default=42)
    pv.add_argument("--tol-geom", type=float, default=None)
    pv.add_argument("--out", help="write the line-delimited report here")

    pt = sub.add_parser("tables", help="emit a data table as CSV")
    pt.add_argument("which", choices=["constants", "candidates", "table2", "table1"])
    pt.add_argument("--out", default=".", help="output directory")

    ps = sub.add_parser("sweep", help="deformation-family sweep CSV")
    ps.add_argument("--pair", default="BDI2(3)")
    ps.add_argument("--points", type=int, default=720)
    ps.add_argument("--out", default="sweep.csv")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            config = VerifyConfig(pair=args.pair, suite=args.suite,
                                  samples=args.samples, seed=args.seed,
                                  tol_geom=args.tol_geom, out=args.out)
            report = run_verify(config)
            for r in report.records:
                if r.status == "unsupported" or not r.threshold:
                    suffix = ""
                elif r.relation == "eq":
                    suffix = f" (expected {r.threshold})"
                else:
                    suffix = f" (< {r.threshold})"
                print(f"[{r.status:11s}] {r.name}: {r.value}{suffix}")
            print(f"suite {report.suite}: "
                  f"{'PASS' if report.passed else 'FAIL'} "
                  f"({len(report.records)} checks, {report.timing:.2f}s)")
            return 0 if report.passed else 1
        if args.command == "tables":
            path = emit_tables(args.which, args.out)
            print(f"wrote {path}")
            return 0
        if args.command == "sweep":
            path = write_sweep(args.pair, args.points, args.out)
            print(f"wrote {path}")
            return 0
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except VerificationError as exc:
        print(f"verification error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
