//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use plcurv::flows::{
    curvature_evolution_residual, exponential_rate_probe, run_flow, step, FlowConfig, FlowKind,
    FlowState, RunOutcome,
};
use plcurv::geometry::{
    curvature, flip_in_place, jacobian_l, make_delaunay, scale_metric, triangle_angles, C_JAC,
};
use plcurv::numeric::adaptive_gl;
use plcurv::solver::{
    lobachevsky, newton_solve, rigidity_check, triangle_energy, Admissibility, NewtonConfig,
    RigidityVerdict, Target,
};
use plcurv::{fixtures, PLMetric, Triangulation};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_u(rng: &mut ChaCha8Rng, n: usize, amp: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-amp..amp)).collect()
}

fn inf_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn centered(u: &[f64]) -> Vec<f64> {
    let mean = u.iter().sum::<f64>() / u.len() as f64;
    u.iter().map(|x| x - mean).collect()
}

fn meshes() -> Vec<(&'static str, Triangulation)> {
    vec![
        ("tetrahedron", fixtures::tetrahedron()),
        ("torus", fixtures::torus9()),
        ("cube", fixtures::cube().0),
        ("genus2", fixtures::genus2()),
    ]
}

fn gauss_bonnet() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (_, t) in meshes() {
        let chi = t.euler_characteristic() as f64;
        for seed in 0..50 {
            let m = fixtures::random_metric(&t, seed);
            let s: f64 = curvature(&t, &m).iter().sum();
            worst = worst.max((s - 2.0 * PI * chi).abs() / t.face_count() as f64);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < 1e-9 && secs < 1.0,
        format!("max |sum K - 2 pi chi|/|F| = {worst:.3e} (< 1e-9), {secs:.3} s (< 1 s)"),
    )
}

fn jacobian_oracle() -> Outcome {
    let start = Instant::now();
    let h = 1e-5;
    let mut worst = 0.0f64;
    for (_, t) in meshes() {
        let n = t.vertex_count();
        for seed in 0..20 {
            let m0 = fixtures::random_metric(&t, 100 + seed);
            let (t, m, _) = make_delaunay(&t, &m0).expect("delaunay");
            let l = jacobian_l(&t, &m).expect("nondegenerate");
            let scale = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| l.get(i, j).abs())
                .fold(1.0f64, f64::max);
            for j in 0..n {
                let mut up = vec![0.0; n];
                let mut dn = vec![0.0; n];
                up[j] = h;
                dn[j] = -h;
                let kp = curvature(&t, &scale_metric(&t, &m, &up).unwrap());
                let km = curvature(&t, &scale_metric(&t, &m, &dn).unwrap());
                for i in 0..n {
                    let fd = (kp[i] - km[i]) / (2.0 * h);
                    worst = worst.max((C_JAC * l.get(i, j) - fd).abs() / scale);
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < 1e-6 && secs < 10.0,
        format!(
            "C_JAC = {C_JAC}, max relative FD error {worst:.3e} (< 1e-6), {secs:.3} s (< 10 s)"
        ),
    )
}

fn flip_isometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut flips = 0;
    let (mut worst_k, mut worst_len) = (0.0f64, 0.0f64);
    let mut attempts = 0;
    while flips < 100 && attempts < 10_000 {
        attempts += 1;
        let all = meshes();
        let (_, t0) = &all[flips % all.len()];
        let m0 = fixtures::random_metric(t0, rng.random_range(0..1_000_000));
        let (mut t, mut m) = (t0.clone(), m0.clone());
        let ids = t.edge_ids();
        let e = ids[rng.random_range(0..ids.len())];
        let k0 = curvature(&t, &m);
        let old = m.length(e);
        let Ok((rec, _)) = flip_in_place(&mut t, &mut m, e) else {
            continue;
        };
        if m.first_degenerate_face(&t).is_some() {
            continue;
        }
        let k1 = curvature(&t, &m);
        worst_k = worst_k.max(inf_dist(&k0, &k1));
        let (back, _) = flip_in_place(&mut t, &mut m, rec.created).expect("flip back");
        worst_len = worst_len.max((back.new_length - old).abs());
        flips += 1;
    }
    outcome(
        flips == 100 && worst_k < 1e-9 && worst_len < 1e-9,
        format!("{flips} flips: max K change {worst_k:.3e}, max flip-back length error {worst_len:.3e} (< 1e-9)"),
    )
}

/// (mesh, alpha, seed) for the conservation runs; all have α·χ ≤ 0.
fn conservation_cases() -> Vec<(&'static str, f64, u64)> {
    let mut v: Vec<_> = [-2.0, -1.0, 0.0, 1.0, 2.0]
        .iter()
        .map(|&a| ("torus", a, 1))
        .collect();
    v.extend([-2.0, -1.0, 0.0].iter().map(|&a| ("tetrahedron", a, 1)));
    v.push(("torus", 1.0, 2));
    v.push(("torus", -1.0, 2));
    v
}

fn start_for(mesh: &str, seed: u64) -> (Triangulation, PLMetric, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match mesh {
        "surgery torus" => {
            let (t, m) = fixtures::surgery_demo_torus();
            (t, m, vec![0.0; 9])
        }
        "torus" => {
            let (t, m) = fixtures::equilateral_torus();
            let u = random_u(&mut rng, 9, 0.3);
            (t, m, u)
        }
        _ => {
            let t = fixtures::tetrahedron();
            let m = PLMetric::uniform(&t, 1.0).unwrap();
            let u = random_u(&mut rng, 4, 0.2);
            (t, m, u)
        }
    }
}

fn conservation_and_descent() -> (Outcome, f64) {
    let mut drift = 0.0f64;
    let mut rise = f64::NEG_INFINITY;
    let mut runs = 0;
    let mut converged = 0;
    for kind in [FlowKind::Yamabe, FlowKind::Calabi] {
        for (mesh, alpha, seed) in conservation_cases() {
            let (t, m, u0) = start_for(mesh, seed);
            let cfg = FlowConfig::new(kind);
            let r = run_flow(&t, &m, &u0, alpha, &cfg).expect("flow runs");
            runs += 1;
            converged += (r.outcome == RunOutcome::Converged) as usize;
            let c0 = r.history.rows[0].conserved;
            for w in r.history.rows.windows(2) {
                drift = drift.max((w[1].conserved - c0).abs());
                rise = rise.max(w[1].energy - w[0].energy);
            }
        }
    }
    (
        outcome(
            drift < 1e-9 && runs == 20,
            format!(
                "{runs} runs ({converged} converged): max conserved-sum drift {drift:.3e} (< 1e-9)"
            ),
        ),
        rise,
    )
}

fn rate_identities(max_rise: f64) -> Outcome {
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for kind in [FlowKind::Yamabe, FlowKind::Calabi] {
        for alpha in [-1.0, 0.0, 1.0] {
            let (t, m) = fixtures::equilateral_torus();
            let u0 = random_u(&mut rng, 9, 0.3);
            let mut s = FlowState::new(t, m, u0, alpha).unwrap();
            s.make_delaunay().unwrap();
            let mut cfg = FlowConfig::new(kind);
            cfg.dt = 1e-4;
            for _ in 0..5 {
                let rep = s.report().unwrap();
                let d: Vec<f64> = rep.r_alpha.iter().map(|r| r - rep.r_av).collect();
                let want = match kind {
                    FlowKind::Yamabe => -d
                        .iter()
                        .zip(&s.u)
                        .map(|(d, u)| d * d * (alpha * u).exp())
                        .sum::<f64>(),
                    FlowKind::Calabi => -jacobian_l(&s.tri, &s.metric().unwrap())
                        .unwrap()
                        .quad_form(&d),
                };
                let r = step(&mut s, &cfg).unwrap();
                let got = r.energy_change / r.dt;
                worst = worst.max(((got - want) / want).abs());
            }
        }
    }
    outcome(
        worst < 1e-2 && max_rise <= 1e-12,
        format!(
            "max relative error of dW/dt {worst:.3e} (< 1e-2); largest energy increase over accepted steps {max_rise:.3e}"
        ),
    )
}

fn convergence_and_uniqueness() -> Outcome {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut pass = true;
    // The last two reach their solutions only through flips.
    let cases = [
        ("torus", -2.0),
        ("torus", 0.0),
        ("torus", 3.0),
        ("tetrahedron", -1.0),
        ("tetrahedron", -2.0),
        ("surgery torus", 0.0),
        ("surgery torus", 3.0),
    ];
    for (mesh, alpha) in cases {
        let (t, m, u0) = start_for(mesh, 7);
        let singular = alpha * t.euler_characteristic() as f64 == 0.0;
        let mut sols = Vec::new();
        let mut flips = Vec::new();
        for kind in [FlowKind::Yamabe, FlowKind::Calabi] {
            let r = run_flow(&t, &m, &u0, alpha, &FlowConfig::new(kind)).expect("flow runs");
            pass &= r.outcome == RunOutcome::Converged && r.final_report.max_dev < 1e-8;
            flips.push(r.state.flips.len());
            sols.push(r.state.u);
        }
        let n = newton_solve(
            &t,
            &m,
            &u0,
            alpha,
            &Target::Constant,
            &NewtonConfig::default(),
        )
        .expect("newton converges");
        pass &= n.report.max_dev < 1e-8;
        flips.push(n.flips.len());
        sols.push(n.u);
        if singular {
            sols = sols.iter().map(|s| centered(s)).collect();
        }
        let d = (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .map(|(i, j)| inf_dist(&sols[i], &sols[j]))
            .fold(0.0, f64::max);
        pass &= d < 1e-6;
        notes.push(format!("{mesh} a={alpha}: {d:.1e} flips {flips:?}"));
    }
    let (tt, tm) = fixtures::equilateral_torus();
    let r1 = rigidity_check(&tt, &tm, 3.0, &Target::Constant, 5, 0).unwrap();
    let tet = fixtures::tetrahedron();
    let r2 = rigidity_check(
        &tet,
        &PLMetric::uniform(&tet, 1.0).unwrap(),
        -1.0,
        &Target::Constant,
        5,
        0,
    )
    .unwrap();
    pass &= r1.admissibility == Admissibility::Singular && r1.verdict == RigidityVerdict::Pass;
    pass &= r2.admissibility == Admissibility::Definite && r2.verdict == RigidityVerdict::Pass;
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    outcome(
        pass,
        format!(
            "pairwise max distance [{}] (< 1e-6); rigidity singular {:?} ({:.1e}), definite {:?} ({:.1e}); {secs:.2} s (< 60 s)",
            notes.join(", "),
            r1.verdict,
            r1.max_discrepancy,
            r2.verdict,
            r2.max_discrepancy
        ),
    )
}

fn exponential_rate() -> Outcome {
    let start = Instant::now();
    let t = fixtures::tetrahedron();
    let m = PLMetric::uniform(&t, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u0 = random_u(&mut rng, 4, 0.2);
    let alpha = -1.0;
    let k = curvature(&t, &scale_metric(&t, &m, &u0).unwrap());
    let pre = k
        .iter()
        .zip(&u0)
        .all(|(k, u)| alpha * k * (-alpha * u).exp() < 0.0);
    let mut cfg = FlowConfig::yamabe();
    cfg.dt = 0.01;
    let r = run_flow(&t, &m, &u0, alpha, &cfg).unwrap();
    let fit = exponential_rate_probe(&r.history, alpha, r.final_report.r_av).unwrap();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        pre && fit.satisfied && secs < 10.0,
        format!(
            "alpha R(0) < 0 everywhere: {pre}; tail slope {:.4} <= bound {:.4} over {} points; {secs:.2} s (< 10 s)",
            fit.slope, fit.bound, fit.points
        ),
    )
}

fn evolution_residual() -> Outcome {
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for kind in [FlowKind::Yamabe, FlowKind::Calabi] {
        for (mesh, alpha) in [
            ("torus", -1.0),
            ("torus", 0.0),
            ("torus", 2.0),
            ("tetrahedron", -1.5),
            ("tetrahedron", 0.5),
        ] {
            let (t, m, _) = start_for(mesh, 0);
            let u = random_u(&mut rng, t.vertex_count(), 0.2);
            let s = FlowState::new(t, m, u, alpha).unwrap();
            let mut cfg = FlowConfig::new(kind);
            cfg.dt = 1e-6;
            let r = curvature_evolution_residual(&s, &cfg).unwrap();
            worst = worst.max(r.iter().fold(0.0, |m: f64, x| m.max(x.abs())));
        }
    }
    outcome(worst < 1e-4, format!("max residual {worst:.3e} (< 1e-4)"))
}

fn surgery_necessity() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_plcurv");
    let input = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/torus_surgery.json");
    let code = |surgery: &str| {
        Command::new(exe)
            .arg("flow")
            .arg(&input)
            .args(["--flow", "yamabe", "--alpha", "0", "--surgery", surgery])
            .env("PLCURV_LOG", "quiet")
            .output()
            .expect("binary runs")
            .status
            .code()
    };
    let off = code("off");
    let on = code("on");
    outcome(
        matches!(off, Some(4) | Some(5)) && on == Some(0),
        format!("surgery off exits {off:?} (4 or 5), surgery on exits {on:?} (0)"),
    )
}

fn lobachevsky_values() -> Outcome {
    let zeros = [0.0, PI / 2.0, PI].map(lobachevsky);
    let zero_err = zeros.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    // -∫ ln(2 sin t) on [0, x], with ln(2t) integrated exactly.
    let x = PI / 6.0;
    let smooth = adaptive_gl(
        |t: f64| if t == 0.0 { 0.0 } else { (t.sin() / t).ln() },
        0.0,
        x,
        32,
        1e-15,
    );
    let oracle = -(x * (2.0 * x).ln() - x + smooth);
    let l6 = (lobachevsky(x) - oracle).abs();

    let h = 1e-4;
    let mut grad_err = 0.0f64;
    let triangles: [([f64; 3], [f64; 3]); 4] = [
        ([1.0, 1.0, 1.0], [0.1, -0.2, 0.05]),
        ([1.3, 0.9, 1.1], [0.0, 0.3, -0.1]),
        ([0.7, 1.6, 1.2], [-0.2, 0.1, 0.2]),
        // Degenerate: the extended angles are (π, 0, 0).
        ([3.0, 1.0, 1.0], [0.0, 0.0, 0.0]),
    ];
    for (l, u) in triangles {
        let scaled: Vec<f64> = (0..3)
            .map(|c| l[c] * (u[(c + 1) % 3] + u[(c + 2) % 3]).exp())
            .collect();
        let th = triangle_angles(scaled[0], scaled[1], scaled[2]).unwrap();
        for c in 0..3 {
            let at = |s: f64| {
                let mut p = u;
                p[c] += s;
                triangle_energy(l, p, [0.0; 3])
            };
            let fd = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
            grad_err = grad_err.max((fd - th[c]).abs());
        }
    }
    outcome(
        zero_err < 1e-10 && l6 < 1e-10 && grad_err < 1e-6,
        format!(
            "|L(0|pi/2|pi)| <= {zero_err:.1e}; L(pi/6) = {:.15} vs oracle {oracle:.15} ({l6:.1e}); energy gradient vs angles {grad_err:.1e}",
            lobachevsky(x)
        ),
    )
}

fn main() {
    let (c4, rise) = conservation_and_descent();
    let results = vec![
        ("1 Gauss-Bonnet", gauss_bonnet()),
        ("2 Jacobian oracle", jacobian_oracle()),
        ("3 Flip isometry", flip_isometry()),
        ("4 Conservation", c4),
        ("5 Descent and rate identities", rate_identities(rise)),
        ("6 Convergence and uniqueness", convergence_and_uniqueness()),
        ("7 Exponential rate", exponential_rate()),
        ("8 Curvature-evolution residual", evolution_residual()),
        ("9 Surgery necessity", surgery_necessity()),
        ("10 Lobachevsky values", lobachevsky_values()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        failed += (!o.pass) as usize;
        println!("{tag} criterion {name}: {}", o.detail);
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
