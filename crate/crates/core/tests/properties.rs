use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use warpgeom::expr::{parse, BinOp, Bindings, Func, Jet2, Node, WarpExpr};
use proptest::test_runner::TestCaseError;
use warpgeom::hypersurface::{make_graph, parse_node_array, write_node_array, GraphSource, HypersurfaceError};
use warpgeom::warp::{check_ncc, classify, ConditionStatus, Interval, SamplerConfig, Spacetime, Verdict};

fn bindings() -> Bindings {
    Bindings::from([("a".to_string(), 0.7)])
}

fn arb_node() -> impl Strategy<Value = Node> {
    let leaf = prop_oneof![
        (10u32..300).prop_map(|k| Node::Lit(k as f64 / 100.0)),
        Just(Node::Var(0)),
        Just(Node::Param("a".into())),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        let unary = prop::sample::select(vec![Func::Exp, Func::Log, Func::Sqrt, Func::Sin, Func::Cos, Func::Sinh, Func::Cosh]);
        let op = prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div]);
        prop_oneof![
            inner.clone().prop_map(|a| Node::Neg(Box::new(a))),
            (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| Node::Binary(o, Box::new(a), Box::new(b))),
            (inner.clone(), 0u8..4).prop_map(|(a, k)| Node::Binary(BinOp::Pow, Box::new(a), Box::new(Node::Lit(k as f64)))),
            (unary, inner.clone()).prop_map(|(f, a)| Node::Call(f, vec![a])),
            (inner.clone(), inner).prop_map(|(a, b)| Node::Call(Func::Pow, vec![a, b])),
        ]
    })
}

fn arb_expr() -> impl Strategy<Value = WarpExpr> {
    arb_node().prop_map(|n| WarpExpr::from_node(n, vec!["t".into()]))
}

/// Jets on a fine mesh over `[t - r, t + r]` integrate consistently, so no kink
/// or domain edge sits inside the widest stencil.
fn smooth_near(e: &WarpExpr, t: f64, r: f64) -> bool {
    let b = bindings();
    let m = 81;
    let Ok(js) = (0..m)
        .map(|i| e.eval_jet2(t - r + 2.0 * r * i as f64 / (m - 1) as f64, &b))
        .collect::<Result<Vec<Jet2>, _>>()
    else {
        return false;
    };
    let dx = 2.0 * r / (m - 1) as f64;
    let s0 = js.iter().map(|j| j.v.abs()).fold(1.0, f64::max);
    let s1 = js.iter().map(|j| j.d1.abs()).fold(1.0, f64::max);
    let s2 = js.iter().map(|j| j.d2.abs()).fold(1.0, f64::max);
    js.windows(3).all(|w| {
        let trap = |a: f64, b: f64, da: f64, db: f64, s: f64| (b - a - 0.5 * dx * (da + db)).abs() <= 1e-6 * dx * s;
        trap(w[0].v, w[1].v, w[0].d1, w[1].d1, s1)
            && trap(w[0].d1, w[1].d1, w[0].d2, w[1].d2, s2)
            && (w[0].d2 - 2.0 * w[1].d2 + w[2].d2).abs() <= 1e-4 * dx * s2
            && s0.is_finite()
    })
}

/// Central differences at `h` and `h/2` reproduce the jet with second-order
/// error decay, or agree to roundoff, at one of a few step sizes.
fn fd_second_order(e: &WarpExpr, t: f64, j: Jet2) -> Result<(), String> {
    let b = bindings();
    let f = |x: f64| e.eval(&[x], &b).ok();
    let scale = 1.0 + j.v.abs() + j.d1.abs() + j.d2.abs();
    let mut last = String::new();
    for h in [1e-2, 2.5e-3, 6.25e-4] {
        let fd = |h: f64| -> Option<(f64, f64)> {
            let (p, m, c) = (f(t + h)?, f(t - h)?, j.v);
            Some(((p - m) / (2.0 * h), (p - 2.0 * c + m) / (h * h)))
        };
        let (Some((a1, a2)), Some((b1, b2))) = (fd(h), fd(h / 2.0)) else {
            continue;
        };
        let ok = |e1: f64, e2: f64, floor: f64| e2 <= floor || (3.0..=5.0).contains(&(e1 / e2));
        let (e11, e12) = ((a1 - j.d1).abs(), (b1 - j.d1).abs());
        let (e21, e22) = ((a2 - j.d2).abs(), (b2 - j.d2).abs());
        let floor2 = 64.0 * f64::EPSILON * j.v.abs().max(1.0) / (h * h / 4.0) + 1e-9 * scale;
        if ok(e11, e12, 1e-9 * scale) && ok(e21, e22, floor2) {
            return Ok(());
        }
        last = format!("h={h}: d1 errors {e11:e} {e12:e}, d2 errors {e21:e} {e22:e}");
    }
    Err(last)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn expression_round_trip(e in arb_expr()) {
        let text = e.to_string();
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &e, "{}", text);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn jets_match_finite_differences(e in arb_expr(), t in -1.0f64..1.0) {
        let j = match e.eval_jet2(t, &bindings()) {
            Ok(j) => j,
            Err(_) => return Ok(()),
        };
        prop_assume!(j.v.abs() < 1e6 && j.d1.abs() < 1e6 && j.d2.abs() < 1e6);
        prop_assume!(smooth_near(&e, t, 1.05e-2));
        if let Err(msg) = fd_second_order(&e, t, j) {
            prop_assert!(false, "{}: {}", e, msg);
        }
    }

    #[test]
    fn parser_never_panics(s in "[-+*/^(),.0-9a-z_ eE]{0,48}") {
        if let Ok(e) = WarpExpr::parse(&s) {
            let _ = e.eval_jet2(0.3, &bindings());
            prop_assert_eq!(parse(&e.to_string()).unwrap(), e);
        }
    }

    #[test]
    fn evaluation_is_total(e in arb_expr(), t in -50.0f64..50.0) {
        if let Ok(j) = e.eval_jet2(t, &bindings()) {
            prop_assert!(j.v.is_finite() && j.d1.is_finite() && j.d2.is_finite());
        }
    }
}

/// Positive warping functions, their interval, and a sampling window inside it.
fn family(k: usize, p: f64, q: f64) -> (String, Interval, (f64, f64)) {
    match k {
        0 => (format!("{p}*exp({q}*t)"), Interval::real_line(), (-3.0, 3.0)),
        1 => (format!("exp(-{p}*t^2)"), Interval::real_line(), (-3.0, 3.0)),
        2 => (format!("cosh({q}*t) + {p}"), Interval::real_line(), (-3.0, 3.0)),
        3 => (format!("(t + {p})^{q}"), Interval::open(-p, f64::INFINITY), (0.1 - p, 5.0)),
        4 => (format!("sqrt({p} - t^2)"), Interval::open(-p.sqrt(), p.sqrt()), (-0.9 * p.sqrt(), 0.9 * p.sqrt())),
        _ => (format!("1 + {}*sin({q}*t)^2", p / 4.0), Interval::real_line(), (-3.0, 3.0)),
    }
}

fn arb_spacetime() -> impl Strategy<Value = (Spacetime, (f64, f64))> {
    (0usize..6, 0.2f64..2.5, 0.2f64..2.0, 2usize..6).prop_map(|(k, p, q, n)| {
        let (src, iv, win) = family(k, p, q);
        (Spacetime::new(n, iv, parse(&src).unwrap(), Bindings::new()).unwrap(), win)
    })
}

fn samples(win: (f64, f64), m: usize) -> impl Iterator<Item = f64> {
    (0..m).map(move |i| win.0 + (win.1 - win.0) * i as f64 / (m - 1) as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fluid_form_equals_criterion((st, win) in arb_spacetime()) {
        let n = st.n() as f64;
        for t in samples(win, 97) {
            let j = st.jet(t).unwrap();
            let scale = (n + 1.0) * (n + 1.0) * ((j.d1 / j.v).powi(2) + (j.d2 / j.v).abs()) + f64::MIN_POSITIVE;
            let (c, cf) = (st.criterion_value(t).unwrap(), st.criterion_fluid_form(t).unwrap());
            prop_assert!((c - cf).abs() <= 1e-12 * scale, "t={} {} {}", t, c, cf);
        }
    }

    #[test]
    fn null_ricci_is_log_concavity((st, win) in arb_spacetime()) {
        let n = st.n();
        for t in samples(win, 33) {
            let f = st.jet(t).unwrap().v;
            let mut z = vec![0.0; n + 1];
            z[0] = 1.0;
            z[1] = 1.0 / f;
            let ric = st.ambient_ricci(t, &z, &z).unwrap();
            let want = -((n - 1) as f64) * st.log_f_second(t).unwrap();
            prop_assert!((ric - want).abs() <= 1e-10 * (1.0 + want.abs() + st.criterion_value(t).unwrap().abs()));
        }
    }

    #[test]
    fn log_second_derivative_matches_differences((st, win) in arb_spacetime()) {
        let lf = |t: f64| st.jet(t).unwrap().v.ln();
        let h = 1e-4;
        for t in samples((win.0 + 2.0 * h, win.1 - 2.0 * h), 17) {
            let fd = (lf(t + h) - 2.0 * lf(t) + lf(t - h)) / (h * h);
            let got = st.log_f_second(t).unwrap();
            prop_assert!((fd - got).abs() <= 1e-4 * (1.0 + got.abs()), "t={} {} {}", t, fd, got);
        }
    }

    #[test]
    fn ncc_verdict_is_sound((st, win) in arb_spacetime()) {
        let region = Interval::closed(win.0, win.1);
        let cfg = SamplerConfig::default();
        let v = check_ncc(&st, &region, &cfg).unwrap();
        let worst = samples(win, 2001).map(|t| st.log_f_second(t).unwrap()).fold(f64::NEG_INFINITY, f64::max);
        match v.status {
            ConditionStatus::Holds => prop_assert!(worst <= 1e-6, "{}", worst),
            ConditionStatus::Fails => {
                let w = v.witness.expect("failure witness");
                prop_assert!(st.log_f_second(w).unwrap() > 0.0);
            }
            ConditionStatus::Unknown => {}
        }
    }

    #[test]
    fn classification_is_sound((st, win) in arb_spacetime()) {
        let region = Interval::closed(win.0, win.1);
        let r = classify(&st, &region, &SamplerConfig::default()).unwrap();
        let dense: Vec<f64> = samples(win, 2001).collect();
        let crit_min = dense.iter().map(|&t| st.criterion_value(t).unwrap()).fold(f64::INFINITY, f64::min);
        let div_min = dense.iter().map(|&t| st.div_dt(t).unwrap().abs()).fold(f64::INFINITY, f64::min);
        prop_assert!(crit_min >= r.criterion_inf.lower - 1e-6 * (1.0 + crit_min.abs()));
        prop_assert!(div_min >= r.div_abs_inf.lower - 1e-6 * (1.0 + div_min));
        match r.verdict {
            Verdict::NonExistence => {
                prop_assert!(r.ncc.holds());
                prop_assert!(div_min > 0.0 && r.div_abs_inf.lower > 0.0);
                prop_assert!(r.maximal_slices.is_empty());
            }
            Verdict::UniqueSlices => {
                prop_assert!(!r.maximal_slices.is_empty());
                prop_assert!(crit_min > 0.0);
                for s in &r.maximal_slices {
                    prop_assert!(st.hubble(s.t0).unwrap().abs() <= 1e-8, "{}", s.t0);
                }
            }
            Verdict::Inconclusive => prop_assert!(r.failure_mode.is_some() || r.criterion_inf.lower > 0.0 || !r.ncc.holds()),
        }
    }

    #[test]
    fn interval_display_round_trip(a in -1e3f64..1e3, w in 1e-3f64..1e3, lc: bool, hc: bool, inf_lo: bool) {
        let lo = if inf_lo { f64::NEG_INFINITY } else { a };
        let iv = Interval::new(lo, lc && !inf_lo, a + w, hc).unwrap();
        prop_assert_eq!(iv.to_string().parse::<Interval>().unwrap(), iv);
    }
}

fn ambient_gram(f: f64, n: usize) -> DMatrix<f64> {
    let mut g = DMatrix::identity(n + 1, n + 1) * (f * f);
    g[(0, 0)] = -1.0;
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frame_invariants(
        k in 0usize..3,
        n in 2usize..4,
        amp in prop::collection::vec(-0.15f64..0.15, 3),
        freq in prop::collection::vec(0.2f64..2.0, 3),
        phase in 0.0f64..3.0,
        c0 in -0.4f64..0.4,
    ) {
        let src = ["exp(-t^2)", "1", "exp(t)"][k];
        let st = Spacetime::new(n, Interval::real_line(), parse(src).unwrap(), Bindings::new()).unwrap();
        let mut g = format!("{c0}");
        for (i, (a, w)) in amp.iter().zip(&freq).enumerate() {
            let axis = i % n + 1;
            g.push_str(&format!(" + {a}*sin({w}*x_{axis} + {phase}*x_{})", (i + 1) % n + 1));
        }
        let gh = match make_graph(&st, &vec![(-1.0, 1.0); n], &vec![9; n], &GraphSource::parse(&g, n).unwrap()) {
            Ok(gh) => gh,
            Err(HypersurfaceError::NotSpacelike { margin, .. }) => {
                prop_assert!(margin <= 0.0);
                return Err(TestCaseError::reject("not spacelike"));
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(gh.spacelike_margin() > 0.0);
        for idx in 0..gh.grid().len() {
            let Some(fr) = gh.frame(idx) else { continue };
            let nrm = &fr.normal;
            prop_assert!((fr.ambient_dot(nrm, nrm) + 1.0).abs() < 1e-12);
            prop_assert!((fr.ambient_dot(nrm, &DVector::from_fn(n + 1, |i, _| f64::from(u8::from(i == 0)))) + fr.cosh_phi).abs() < 1e-12);
            prop_assert!(fr.cosh_phi >= 1.0);
            for i in 0..n {
                prop_assert!(fr.ambient_dot(nrm, &fr.tangents.column(i).into_owned()).abs() < 1e-12);
            }
            let induced = fr.tangents.transpose() * ambient_gram(fr.warp.v, n) * &fr.tangents;
            prop_assert!((&induced - &fr.metric).abs().max() < 1e-12 * (1.0 + fr.metric.abs().max()));
            prop_assert!((&fr.metric * &fr.metric_inv - DMatrix::identity(n, n)).abs().max() < 1e-12);
            prop_assert!((fr.sinh2_phi - (fr.cosh_phi.powi(2) - 1.0)).abs() < 1e-12 * fr.cosh_phi.powi(2));
            prop_assert!((fr.sqrt_det.powi(2) - fr.metric.determinant()).abs() < 1e-10 * fr.sqrt_det.powi(2));
        }
    }

    #[test]
    fn node_array_round_trip(r1 in 1usize..6, r2 in 1usize..6, seed in prop::collection::vec(-1e3f64..1e3, 36)) {
        let values: Vec<f64> = seed[..r1 * r2].to_vec();
        let (res, back) = parse_node_array(&write_node_array(&[r1, r2], &values)).unwrap();
        prop_assert_eq!(res, vec![r1, r2]);
        prop_assert_eq!(back, values);
    }
}
