//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tridot::cli::config::DEFAULT_HALF_WIDTH;
use tridot::cli::{self, figure, figure_ids, Curve};
use tridot::closedform::{analytic_zeros, tau_chain, tau_ring};
use tridot::model::{build_chain, build_ring, check_pt_symmetry, DotSystem, LeadAttachment};
use tridot::negf;
use tridot::spectra::{self, detect_phase_jumps, find_zeros, phase_zero_coincidence, Spectrum};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// Transmission by direct cofactor inversion and the full trace, on plain arrays.
fn oracle_transmission(h: &[[C; 3]; 3], vl: [f64; 3], vr: [f64; 3], t0: f64, w: f64) -> f64 {
    let rho = (4.0 * t0 * t0 - w * w).sqrt() / (2.0 * t0 * t0);
    let g0 = C::new(w / (2.0 * t0 * t0), -rho);
    let mut m = [[C::new(0.0, 0.0); 3]; 3];
    for j in 0..3 {
        for l in 0..3 {
            let diag = if j == l { c(w) } else { c(0.0) };
            m[j][l] = diag - h[j][l] - g0 * (vl[j] * vl[l] + vr[j] * vr[l]);
        }
    }
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    let det = m[0][0] * adj[0][0] + m[0][1] * adj[1][0] + m[0][2] * adj[2][0];
    let g: Vec<Vec<C>> = adj.iter().map(|r| r.iter().map(|x| x / det).collect()).collect();
    let gl = |j: usize, l: usize| c(2.0 * rho * vl[j] * vl[l]);
    let gr = |j: usize, l: usize| c(2.0 * rho * vr[j] * vr[l]);
    let mut t = C::new(0.0, 0.0);
    for a in 0..3 {
        for b in 0..3 {
            for d in 0..3 {
                for e in 0..3 {
                    t += gl(a, b) * g[d][b].conj() * gr(d, e) * g[e][a];
                }
            }
        }
    }
    t.re
}

fn hamiltonian_array(sys: &DotSystem) -> [[C; 3]; 3] {
    sys.hamiltonian().0
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn criterion_1_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for pattern in 0..4 {
        for _ in 0..300 {
            let ring = rng.gen_bool(0.5);
            let gamma = if pattern == 3 { 0.0 } else { rng.gen_range(0.0..1.2) };
            let (e0, e2) = (rng.gen_range(-0.5..0.5), rng.gen_range(-0.8..0.8));
            let tc = rng.gen_range(0.2..0.9);
            let t3 = if ring { rng.gen_range(0.1..0.9) } else { 0.0 };
            let (v1, v2) = match pattern {
                0 => (0.0, rng.gen_range(0.1..1.0)),
                1 => (rng.gen_range(0.1..1.0), 0.0),
                _ => (rng.gen_range(0.1..1.0), rng.gen_range(0.1..1.0)),
            };
            let t0 = rng.gen_range(0.8..1.5);
            let sys = if ring {
                build_ring(e0, gamma, e2, tc, t3)
            } else {
                build_chain(e0, gamma, e2, tc)
            };
            let leads = LeadAttachment::symmetric(t0, v1, v2).unwrap();
            let w = rng.gen_range(-1.999..1.999) * t0;
            let Ok(g) = negf::green_retarded(&sys, &leads, w) else {
                continue;
            };
            let t_trace = negf::trace_transmission(&g);
            let tau = if ring { tau_ring(&sys, &leads, w) } else { tau_chain(&sys, &leads, w) }
                .map_err(|e| e.to_string())?;
            let t_closed = tau.norm_sqr();
            let t_oracle = oracle_transmission(&hamiltonian_array(&sys), [v1, v2, v1], [v1, v2, v1], t0, w);
            let d = rel_diff(t_closed, t_trace).max(rel_diff(t_oracle, t_trace));
            ensure!(
                d <= 1e-9,
                "pattern {pattern}, ring={ring}, omega={w}: closed {t_closed}, trace {t_trace}, oracle {t_oracle}"
            );
            worst = worst.max(d);
            points += 1;
        }
    }
    ensure!(points >= 1000, "only {points} regular points");
    Ok(format!("{points} points, worst relative deviation {worst:.1e}"))
}

/// Middle-dot chain at any in-band ω, reduced by hand to a scalar continued fraction.
fn middle_dot_chain_oracle(e0: f64, gamma: f64, e2: f64, tc: f64, v2: f64, w: f64) -> f64 {
    let rho = (4.0 - w * w).sqrt() / 2.0;
    let g0 = C::new(w / 2.0, -rho);
    let side = |e: C| c(tc * tc) / (c(w) - e);
    let denom = c(w - e2) - g0 * (2.0 * v2 * v2) - side(C::new(e0, -gamma)) - side(C::new(e0, gamma));
    (c(2.0 * rho * v2 * v2) / denom).norm_sqr()
}

fn criterion_2_exact_values() -> Outcome {
    let mut worst: f64 = 0.0;
    for gamma in [0.05, 0.1, 0.3, 0.5, 0.8, 1.5] {
        for (e2, expect) in [(0.0, 1.0), (0.5, 0.5)] {
            let sys = build_chain(0.0, gamma, e2, 0.5);
            let leads = LeadAttachment::symmetric(1.0, 0.0, 0.5).unwrap();
            let t = negf::transmission(&sys, &leads, 0.0).map_err(|e| e.to_string())?;
            let oracle = middle_dot_chain_oracle(0.0, gamma, e2, 0.5, 0.5, 0.0);
            ensure!((t - expect).abs() <= 1e-9, "E2={e2} gamma={gamma}: T(0) = {t}, expected {expect}");
            ensure!((oracle - expect).abs() <= 1e-12, "oracle disagrees: {oracle}");
            worst = worst.max((t - expect).abs());
            for w in [-1.3, -0.4, 0.25, 0.9] {
                let t = negf::transmission(&sys, &leads, w).unwrap();
                let o = middle_dot_chain_oracle(0.0, gamma, e2, 0.5, 0.5, w);
                ensure!(rel_diff(t, o) <= 1e-12, "omega={w}: {t} vs oracle {o}");
            }
        }
    }
    Ok(format!("T(0) = 1 and 0.5, worst deviation {worst:.1e}"))
}

fn full_sweep(sys: &DotSystem, leads: &LeadAttachment) -> Spectrum {
    spectra::sweep(sys, leads, -DEFAULT_HALF_WIDTH, DEFAULT_HALF_WIDTH, 2001).unwrap()
}

fn check_zero_set(label: &str, sys: DotSystem, v1: f64, v2: f64, expect: &[f64]) -> Result<f64, String> {
    let leads = LeadAttachment::symmetric(1.0, v1, v2).unwrap();
    let report = find_zeros(&full_sweep(&sys, &leads));
    let mut numeric: Vec<f64> = report.numeric_zeros.iter().map(|z| z.omega).collect();
    numeric.sort_by(f64::total_cmp);
    let analytic = analytic_zeros(&sys, &leads).map(|z| z.antiresonances()).unwrap_or_default();
    ensure!(
        numeric.len() == expect.len() && analytic.len() == expect.len(),
        "{label}: numeric {numeric:?}, analytic {analytic:?}, expected {expect:?}"
    );
    let mut worst: f64 = 0.0;
    for ((n, a), e) in numeric.iter().zip(&analytic).zip(expect) {
        ensure!((n - e).abs() <= 1e-9 && (a - e).abs() <= 1e-9, "{label}: numeric {n}, analytic {a}, expected {e}");
        worst = worst.max((n - a).abs());
    }
    for z in &report.numeric_zeros {
        ensure!(z.transmission < 1e-12, "{label}: T = {} at {}", z.transmission, z.omega);
    }
    Ok(worst)
}

fn criterion_3_antiresonances() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for gamma in [0.1, 0.2, 0.3, 0.5] {
        worst = worst.max(check_zero_set("chain v2=0", build_chain(0.0, gamma, 0.5, 0.5), 0.5, 0.0, &[0.0, 0.5])?);
        cases += 1;
    }
    worst = worst.max(check_zero_set("chain v2=0 hermitian", build_chain(0.0, 0.0, 0.5, 0.5), 0.5, 0.0, &[0.5])?);
    for (gamma, expect) in [(0.3, vec![-0.4, 0.4]), (0.5, vec![0.0]), (0.6, vec![])] {
        let sys = build_ring(0.0, gamma, 0.5, 0.5, 0.5);
        worst = worst.max(check_zero_set("ring v1=0", sys, 0.0, 0.5, &expect)?);
        cases += 1;
    }
    for gamma in [0.1, 0.3, 0.5, 0.8, 1.2] {
        let sys = build_ring(0.0, gamma, 0.5, 0.5, 0.5);
        worst = worst.max(check_zero_set("ring v2=0", sys, 0.5, 0.0, &[-0.5, 0.5])?);
        cases += 1;
    }
    Ok(format!("{} configurations, worst numeric/analytic distance {worst:.1e}", cases + 1))
}

fn criterion_4_disappearance() -> Outcome {
    let delta: f64 = 0.5;
    let critical = delta / 3f64.sqrt();
    let grid = [0.05, 0.1, 0.2, 0.25, 0.28, 0.288, 0.2886, 0.2888, 0.289, 0.29, 0.3, 0.35, 0.5];
    let mut with = 0;
    for gamma in grid {
        let sys = build_ring(0.0, gamma, delta, 0.5, 0.5);
        let leads = LeadAttachment::symmetric(1.0, 0.5, 0.5).unwrap();
        let analytic = analytic_zeros(&sys, &leads).unwrap().antiresonances();
        let numeric = find_zeros(&full_sweep(&sys, &leads)).numeric_zeros;
        let expect = gamma <= critical;
        ensure!(
            !analytic.is_empty() == expect && !numeric.is_empty() == expect,
            "gamma={gamma}: analytic {analytic:?}, numeric {numeric:?}, critical {critical}"
        );
        with += usize::from(expect);
    }
    // exactly at the threshold the two zeros merge into one
    let at = analytic_zeros(&build_ring(0.0, critical, delta, 0.5, 0.5), &LeadAttachment::symmetric(1.0, 0.5, 0.5).unwrap())
        .unwrap();
    ensure!(!at.roots.is_empty(), "no root at the threshold: {at:?}");
    Ok(format!("{} gammas, zeros for {with} below {critical:.6}, none above", grid.len()))
}

fn criterion_5_unitarity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..200 {
        let (e0, e2) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let tc = rng.gen_range(0.05..1.2);
        let sys = if rng.gen_bool(0.5) {
            build_ring(e0, 0.0, e2, tc, rng.gen_range(-1.0..1.0))
        } else {
            build_chain(e0, 0.0, e2, tc)
        };
        let t0 = rng.gen_range(0.5..2.0);
        let mut v = || [(); 3].map(|_| rng.gen_range(-1.0..1.0));
        let leads = LeadAttachment::new(t0, v(), v()).unwrap();
        for _ in 0..500 {
            let w = rng.gen_range(-0.9999..0.9999) * 2.0 * t0;
            let t = negf::transmission(&sys, &leads, w).map_err(|e| e.to_string())?;
            ensure!((0.0..=1.0 + 1e-9).contains(&t), "T = {t} at omega={w} for {sys:?} {leads:?}");
            lo = lo.min(t);
            hi = hi.max(t);
        }
    }
    Ok(format!("100000 samples, T in [{lo:.1e}, {hi:.12}]"))
}

fn preset_curves() -> Vec<Curve> {
    figure_ids()
        .into_iter()
        .flat_map(|id| figure(id).unwrap().curves)
        .filter(|c| c.kind != cli::OutputKind::Phase)
        .collect()
}

fn criterion_6_phase_zero() -> Outcome {
    let mut pairs = 0;
    let mut flagship = false;
    for curve in preset_curves() {
        let s = cli::compute(&curve.config).map_err(|e| e.to_string())?;
        let report = find_zeros(&s);
        let jumps = detect_phase_jumps(&s);
        let co = phase_zero_coincidence(&jumps, &report, 2.0 * s.spacing());
        ensure!(
            co.is_exact(),
            "{}: unpaired jumps {:?}, unpaired zeros {:?}",
            curve.file,
            co.unpaired_jumps,
            co.unpaired_zeros
        );
        for z in report.numeric_zeros.iter().filter(|z| !z.simple) {
            let degenerate = report
                .analytic
                .as_ref()
                .is_some_and(|a| a.degenerate && a.roots.iter().any(|r| (r - z.omega).abs() < 2.0 * s.spacing()));
            ensure!(degenerate, "{}: zero at {} has no π jump but is not a double root", curve.file, z.omega);
        }
        for (j, z) in &co.pairs {
            ensure!((j.jump.abs() - PI).abs() < 0.2, "{}: jump {}", curve.file, j.jump);
            if curve.config.t3 == 0.5 && curve.config.v2 == 0.0 && curve.config.gamma > 0.0 && (z.omega + 0.5).abs() < 1e-9 {
                flagship = true;
            }
        }
        pairs += co.pairs.len();
    }
    ensure!(flagship, "no jump found at omega = -0.5 for the ring with v2 = 0");
    Ok(format!("{} curves, {pairs} jump/zero pairs, flagship -0.5 present", preset_curves().len()))
}

fn criterion_7_path_sum() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    let mut curves = 0;
    for curve in preset_curves() {
        let s = cli::compute(&curve.config).map_err(|e| e.to_string())?;
        for x in &s.samples {
            let sum = (0..3).flat_map(|j| (0..3).map(move |l| (j, l))).map(|ij| x.tau_paths[ij]).sum::<C>();
            let d = (sum - x.tau).norm();
            ensure!(d <= 1e-12, "{} at {}: |sum - tau| = {d:e}", curve.file, x.omega);
            worst = worst.max(d);
            if !x.singular {
                let sys = curve.config.system();
                let closed = tau_ring(&sys, &s.leads, x.omega).map_err(|e| e.to_string())?;
                let dc = (sum - closed).norm() / closed.norm().max(1.0);
                ensure!(dc <= 1e-9, "{} at {}: path sum {sum} vs closed form {closed}", curve.file, x.omega);
                worst_closed = worst_closed.max(dc);
            }
            if curve.config.v2 == 0.0 {
                let nonzero = (0..9).filter(|k| x.tau_paths[(k / 3, k % 3)] != C::new(0.0, 0.0)).count();
                let corners_nonzero = [(0, 0), (0, 2), (2, 0), (2, 2)].iter().all(|&ij| x.tau_paths[ij].norm() > 0.0);
                ensure!(
                    nonzero == 4 && corners_nonzero,
                    "{} at {}: {nonzero} nonzero paths",
                    curve.file,
                    x.omega
                );
            }
        }
        curves += 1;
    }
    Ok(format!(
        "{curves} curves, worst |sum - tau| {worst:.1e}, worst deviation from closed form {worst_closed:.1e}"
    ))
}

fn criterion_8_pt() -> Outcome {
    let mut checked = 0;
    for curve in preset_curves() {
        let cfg = &curve.config;
        let sys = cfg.system();
        let leads = cfg.leads().unwrap();
        ensure!(check_pt_symmetry(&sys, &leads), "{} is not PT symmetric", curve.file);

        let h = *sys.hamiltonian();
        let mut hop = h;
        hop[(0, 1)] += c(1e-6);
        hop[(1, 0)] += c(1e-6);
        let mut onsite = h;
        onsite[(0, 0)] += c(1e-6);
        for perturbed in [hop, onsite] {
            let p = DotSystem::from_hamiltonian(perturbed).map_err(|e| e.to_string())?;
            ensure!(!check_pt_symmetry(&p, &leads), "{}: perturbed Hamiltonian passes", curve.file);
        }
        let (v1, v2) = (cfg.v1, cfg.v2);
        let skewed = LeadAttachment::new(cfg.t0, [v1 + 1e-6, v2, v1], [v1 + 1e-6, v2, v1]).unwrap();
        ensure!(!check_pt_symmetry(&sys, &skewed), "{}: unmirrored leads pass", curve.file);
        checked += 1;
    }
    Ok(format!("{checked} presets symmetric, every single perturbation detected"))
}

fn criterion_9_determinism() -> Outcome {
    let mut files = 0;
    for id in figure_ids() {
        let a = tempfile::tempdir().map_err(|e| e.to_string())?;
        let b = tempfile::tempdir().map_err(|e| e.to_string())?;
        let wa = cli::run_reproduce(id, a.path()).map_err(|e| e.to_string())?;
        let wb = cli::run_reproduce(id, b.path()).map_err(|e| e.to_string())?;
        ensure!(wa.len() == wb.len(), "{id}: file count differs");
        for (pa, pb) in wa.iter().zip(&wb) {
            ensure!(pa.file_name() == pb.file_name(), "{id}: file names differ");
            let (x, y) = (std::fs::read(pa).unwrap(), std::fs::read(pb).unwrap());
            ensure!(!x.is_empty() && x == y, "{id}: {} differs between runs", pa.display());
            files += 1;
        }
    }
    Ok(format!("{files} files byte-identical across two runs"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 oracle equivalence", criterion_1_oracle_equivalence),
        ("2 exact point values", criterion_2_exact_values),
        ("3 antiresonance catalogue", criterion_3_antiresonances),
        ("4 disappearance criterion", criterion_4_disappearance),
        ("5 hermitian unitarity", criterion_5_unitarity),
        ("6 phase/zero coincidence", criterion_6_phase_zero),
        ("7 path-sum identity", criterion_7_path_sum),
        ("8 PT check", criterion_8_pt),
        ("9 determinism", criterion_9_determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name:<28} ({secs:.2}s) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name:<28} ({secs:.2}s) {detail}");
            }
        }
    }
    println!("acceptance: {}/9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
