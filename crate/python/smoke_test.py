#!/usr/bin/env python3
"""Smoke test for the folcalc Python extension module.

Builds nothing itself: expects `cargo build -p folcalc-py` (or --release)
to have produced target/<profile>/libfolcalc.so, which is copied next to a
temporary directory as folcalc.so and imported.
"""

import shutil
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def locate_extension() -> Path:
    candidates = [
        REPO / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libfolcalc.so", "folcalc.so", "libfolcalc.dylib")
    ]
    for c in candidates:
        if c.exists():
            return c
    sys.exit(
        "extension not found; run `cargo build -p folcalc-py` first "
        f"(searched {[str(c) for c in candidates]})"
    )


def main() -> None:
    ext = locate_extension()
    workdir = Path(tempfile.mkdtemp(prefix="folcalc-smoke-"))
    shutil.copy(ext, workdir / "folcalc.so")
    sys.path.insert(0, str(workdir))
    import folcalc

    checks = 0

    def ok(cond, what):
        nonlocal checks
        checks += 1
        if not cond:
            sys.exit(f"FAIL: {what}")
        print(f"  ok: {what}")

    # ring, parsing, arithmetic
    ring = folcalc.Ring(5, ["x", "y"])
    f = ring.poly("x^2*y + 4*y^3")
    ok(str(f) == "x^2*y + 4*y^3 (mod 5)", "canonical polynomial printing")
    g = ring.poly("x + y")
    ok((g * g).total_degree() == 2, "polynomial multiplication")

    two = folcalc.Ring(2, ["x", "y"])
    s = two.poly("x + y")
    ok(str(s * s) == "x^2 + y^2 (mod 2)", "freshman's dream at p = 2")

    # derivation classification
    diag = ring.derivation("x*dx + y*dy")
    info = diag.classify()
    ok(info["status"] == "p_closed", "diagonal field is p-closed")
    ok(info["multiplier"] == ("1", "1"), "diagonal multiplier is 1")
    ok(diag.is_multiplicative_at([0, 0]), "diagonal field multiplicative at 0")

    additive = two.derivation("x^2*dx + y^2*dy")
    ok(additive.p_power().is_zero(), "quadratic field is additive at p = 2")

    swap = two.derivation("y*dx + x*dy")
    ok(swap.classify()["status"] == "not_p_closed", "swap field not p-closed")

    # constants
    basis = folcalc.kernel_basis([two.derivation("x*dx + y*dy")], 2)
    ok(len(basis) == 4, "diagonal constants at degree 2 have dimension 4")
    gens = folcalc.toric_generators([1, 1], 2)
    ok(sorted(gens) == [[0, 2], [1, 1], [2, 0]], "toric monoid generators")

    cert = folcalc.certify_generators(
        [two.derivation("x^2*dx + y^2*dy")],
        [two.poly("x^2"), two.poly("y^2"), two.poly("x^2*y + x*y^2")],
        6,
    )
    ok(cert["pass"], "constants generators certify at degree 6")

    # blow-ups and discrepancies
    lifted = folcalc.blowup_pullback(ring, ring.derivation("x*dx + 3*y*dy"),
                                     ["x", "y"], "x")
    ok(str(lifted) == "x*dx + 2*y*dy (mod 5)", "weights shift by the chart rule")

    rec = folcalc.discrepancy(two, two.derivation("x*dx + y*dy"), ["x", "y"], "x")
    ok(rec["a_F"] == -1 and rec["epsilon"] == 1, "equal-weight discrepancy record")

    # log canonicity and certificates
    verdict = folcalc.lc_check(two.derivation("x^2*dx + y^2*dy"), [0, 0])
    ok(verdict["status"] == "not_lc", "quadratic field not lc")
    cert = folcalc.nonlc_certificate(two.derivation("x^2*dx + y^2*dy"), [0, 0])
    ok(cert["a_F"] < -cert["epsilon"], "certificate violates the lc bound")

    verdict = folcalc.lc_check(ring.derivation("x*dx + 4*y*dy"), [0, 0])
    ok(verdict["status"] == "lc_multiplicative", "diagonal (1,-1) strictly lc")

    # Fedder
    three = folcalc.Ring(3, ["u", "v", "s"])
    ok(folcalc.fedder_f_pure(three.poly("s^2 - u*v")), "cone is F-pure at p = 3")
    quartic = folcalc.Ring(2, ["u", "v", "s"])
    ok(
        not folcalc.fedder_f_pure(quartic.poly("s^2 - (u^2*v - u*v^2)")),
        "quartic quotient is not F-pure at p = 2",
    )

    # annihilators
    gens = folcalc.ann_generators(ring.poly("x*y"))
    ok(str(gens[0]) == "x*dx + 4*y*dy (mod 5)", "annihilator of xy")
    surf = folcalc.ann_surface(ring.poly("x*y"), [0, 0])
    ok(surf["class"] == "strictly_lc" and surf["agrees"], "surface classifier")

    # transfer
    ok(folcalc.transfer_class("terminal", "canonical") == "terminal",
       "canonical foliations preserve terminal")
    ok(folcalc.transfer_class("lc", "klt") == "klt", "klt foliations give klt")
    num, den = folcalc.transfer_discrepancy((1, 1), (-1, 1), False, 2)
    ok(Fraction(num, den) == 0, "transferred discrepancy of the toric example")

    # families
    fam_ring = folcalc.Ring(2, ["x", "y", "z", "t"])
    fam = fam_ring.derivation("x^2*dx + y^2*dy + t*dz")
    report = folcalc.family_compare(fam_ring, fam, "t", 0, 3)
    ok(not report["equal"], "additive family quotient does not commute with fibers")
    ok("z (mod 2)" in report["missing"], "z is the unliftable fiber constant")

    # corpus spot check
    outcomes = folcalc.run_corpus("parse")
    ok(outcomes and all(o["passed"] for o in outcomes), "parse corpus cases pass")

    print(f"smoke test passed ({checks} checks)")


if __name__ == "__main__":
    main()
