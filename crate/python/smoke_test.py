"""Smoke test for the Python bindings.

Build and run from the repository root:

    cargo build --release -p warpgeom-py --features extension-module
    cp target/release/libwarpgeom_py.so python/warpgeom.so
    python3 python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import warpgeom as wg


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def main():
    assert "gaussian" in wg.presets() and len(wg.presets()) == 6

    e = wg.Expr("sqrt(a^2 - t^2)")
    assert e.params() == ["a"]
    v, d1, d2 = e.jet(0.6, {"a": 1.0})
    assert close(v, 0.8) and close(d1, -0.75) and close(d2, -1.0 / 0.512)
    assert str(wg.Expr(str(e))) == str(e)

    g = wg.Spacetime.preset("gaussian")
    assert g.n == 3
    for t in (-2.0, 0.0, 1.5):
        assert close(g.criterion(t), 6 + 4 * t * t)
        assert close(g.criterion_fluid_form(t), g.criterion(t))
        assert close(g.log_f_second(t), -2.0)

    dust = wg.Spacetime("t^(2/3)", interval="(0,inf)", n=3, region="[0.1,10]")
    rho, p = dust.fluid(2.0)
    assert abs(p) < 1e-12 and rho > 0

    r = g.classify()
    assert r["verdict"] == "unique-slices" and r["slices"] == [0.0], r
    assert wg.Spacetime.preset("steady-state").classify()["verdict"] == "non-existence"
    m = wg.Spacetime.preset("minkowski").classify()
    assert m["verdict"] == "inconclusive" and m["failure_mode"] == "simultaneous-vanishing"

    g2 = wg.Spacetime.preset("gaussian", n=2)
    box = [(-1.0, 1.0), (-1.0, 1.0)]
    s = wg.Graph(g2, "0.5", box, res=33)
    assert close(s.max_mean_curvature(), abs(g2.hubble(0.5)), 1e-12)

    wavy = wg.Graph(g2, "0.3 + 0.2*sin(x_1)*cos(0.7*x_2)", box, res=33)
    assert wavy.hessian_residual() < 1e-3 and wavy.ricci_kt_n_residual() < 1e-3
    try:
        wavy.lemma1()
    except ValueError as exc:
        assert "not maximal" in str(exc)
    else:
        raise AssertionError("non-maximal graph accepted")

    patch = wg.Graph.radial(g2, [(0.6, 1.2), (-0.3, 0.3)], 0.2, res=65, r0=0.5, slope=0.3)
    slack, max_h = patch.lemma1(maximality_tol=1e-3)
    assert slack > 0 and max_h < 1e-3

    for bad in ("exp(t", "frob(t)"):
        try:
            wg.Expr(bad)
        except ValueError:
            pass
        else:
            raise AssertionError(bad)
    assert math.isfinite(g.hubble(0.3))
    print("python smoke test passed")


if __name__ == "__main__":
    main()
