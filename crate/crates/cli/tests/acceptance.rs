//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zswkb::action::{action_integral, check_schwarz_symmetry};
use zswkb::direct::{direct_spectrum_complex, direct_spectrum_real};
use zswkb::quantize::wkb_spectrum;
use zswkb::stokes::{build_graph, level_set_drift, measured_emanation_angles};
use zswkb::turning::find_turning_points;
use zswkb::{PotentialSpec64, Problem64};
use zswkb_cli::{run_compare, run_pt_sweep, ExperimentConfig};

fn config(potential: PotentialSpec64, lambda0: f64, delta: f64, h_list: &[f64], eps_list: &[f64]) -> ExperimentConfig {
    ExperimentConfig {
        potential,
        lambda0,
        delta,
        h_list: h_list.to_vec(),
        eps_list: eps_list.to_vec(),
        cutoff: 8.0,
        tolerances: Default::default(),
        output_dir: PathBuf::from("."),
        seed_metadata: "acceptance".into(),
    }
}

fn well(h: &[f64], eps: &[f64]) -> ExperimentConfig {
    config(PotentialSpec64::well_even(2.0, 1.0), 1.5, 0.2, h, eps)
}

fn mono(h: &[f64], eps: &[f64]) -> ExperimentConfig {
    config(PotentialSpec64::monotone_odd(2.0), 1.0, 0.3, h, eps)
}

fn control(h: &[f64], eps: &[f64]) -> ExperimentConfig {
    use zswkb::potential::{Component, Term, TermKind};
    let spec = PotentialSpec64::custom(
        &[
            Term::new(Component::A, TermKind::Const, 2.0, 0.0),
            Term::new(Component::A, TermKind::Gauss, -1.0, 1.0),
            Term::new(Component::B, TermKind::Gauss, 1.0, 1.0),
        ],
        10.0,
    );
    config(spec, 1.5, 0.2, h, eps)
}

fn families(h: &[f64], eps: &[f64]) -> [(&'static str, ExperimentConfig); 2] {
    [("well-even", well(h, eps)), ("monotone-odd", mono(h, eps))]
}

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_1() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, cfg) in families(&[0.1, 0.05, 0.025], &[0.0]) {
        let c = run_compare(&cfg).map_err(|e| format!("{name}: {e:#}"))?;
        let slope = c.slope.unwrap_or(f64::NAN);
        let last = c.max_diff_by_h.iter().find(|(h, _)| *h == 0.025).map_or(f64::INFINITY, |p| p.1);
        let fam_ok = (1.6..=2.4).contains(&slope) && last < 5e-3 * 0.025 && c.failed_cells == 0;
        ok &= fam_ok;
        let diffs: Vec<String> = c.max_diff_by_h.iter().map(|(h, d)| format!("{h}:{d:.2e}")).collect();
        notes.push(format!("{name} slope={slope:.3} max_diff[{}]", diffs.join(" ")));
    }
    check(ok, notes.join("; "))
}

fn criterion_2() -> Outcome {
    let h = 0.025;
    let mut notes = Vec::new();
    let mut ok = true;
    for ((name, cfg), target) in families(&[h], &[0.0]).into_iter().zip([0.5, 0.0]) {
        let p = cfg.problem(h, 0.0).map_err(|e| e.to_string())?;
        let recs = direct_spectrum_real(&p).map_err(|e| e.to_string())?;
        let mut worst = 0.0f64;
        for r in &recs {
            let i = action_integral(&p, r.lambda).map_err(|e| e.to_string())?.value.re;
            let frac = (i / (PI * h)).rem_euclid(1.0);
            let d = (frac - target).abs();
            worst = worst.max(d.min(1.0 - d));
        }
        ok &= worst < 0.1 && !recs.is_empty();
        notes.push(format!("{name}: {} eigenvalues, max |frac - {target}| = {worst:.2e}", recs.len()));
    }
    check(ok, notes.join("; "))
}

fn criterion_3() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, cfg) in families(&[0.05, 0.025], &[0.05, 0.01]) {
        let (rows, _) = run_pt_sweep(&cfg).map_err(|e| format!("{e:#}"))?;
        for r in rows {
            let max_im = r.max_im.unwrap_or(0.0);
            let cell_ok = r.error.is_empty() && r.complete && max_im < 1e-8;
            ok &= cell_ok;
            notes.push(format!(
                "{name} eps={} h={}: {} roots, winding {:?}, max|Im|={max_im:.1e}{}",
                r.eps,
                r.h,
                r.found,
                r.winding,
                if r.error.is_empty() { String::new() } else { format!(" error {}", r.error) }
            ));
        }
    }
    check(ok, notes.join("; "))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_261_016);
    let mut worst = 0.0f64;
    for (_, cfg) in families(&[0.05], &[0.0]) {
        for eps in [0.0, 0.05] {
            let p = cfg.problem(0.05, eps).map_err(|e| e.to_string())?;
            for _ in 0..20 {
                let r = p.delta * rng.gen::<f64>().sqrt();
                let z = Complex64::new(p.lambda0, 0.0) + Complex64::from_polar(r, rng.gen_range(0.0..2.0 * PI));
                let d = check_schwarz_symmetry(&p, z).map_err(|e| format!("lambda {z}: {e}"))?;
                worst = worst.max(d);
            }
        }
    }
    check(worst < 1e-10, format!("80 samples, max |conj I(conj lambda) - I(lambda)| = {worst:.2e}"))
}

fn circ(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn criterion_5() -> Outcome {
    let mut worst_angle = 0.0f64;
    let mut worst_drift = 0.0f64;
    let mut curves = 0;
    for (_, cfg) in families(&[0.05], &[0.0]) {
        let p = cfg.problem(0.05, 0.0).map_err(|e| e.to_string())?;
        let lambda = Complex64::new(p.lambda0, 0.0);
        let pair = find_turning_points(&p, lambda).map_err(|e| e.to_string())?;
        let expected = [(pair.alpha, [0.0, 2.0, 4.0]), (pair.beta, [1.0, 3.0, 5.0])];
        for (tp, thirds) in expected {
            let m = measured_emanation_angles(&p, lambda, tp).map_err(|e| e.to_string())?;
            for t in thirds {
                let want = t * PI / 3.0;
                let d = m.iter().map(|a| circ(*a, want)).fold(f64::INFINITY, f64::min);
                worst_angle = worst_angle.max(d);
            }
        }
        let g = build_graph(&p, lambda).map_err(|e| e.to_string())?;
        for c in &g.curves {
            worst_drift = worst_drift.max(level_set_drift(&p, lambda, c));
            curves += 1;
        }
    }
    check(
        worst_angle < 1e-3 && worst_drift < 1e-6,
        format!("max angle error {worst_angle:.2e} rad, max |Re Phi| on {curves} curves {worst_drift:.2e}"),
    )
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, cfg) in families(&[0.05, 0.025], &[0.0]) {
        for h in [0.05, 0.025] {
            let p = cfg.problem(h, 0.0).map_err(|e| e.to_string())?;
            let s = direct_spectrum_complex(&p).map_err(|e| e.to_string())?;
            let (lo, hi) = p.window();
            let i = |x: f64| action_integral(&p, Complex64::new(x, 0.0)).map(|a| a.value.re);
            let di = i(hi).map_err(|e| e.to_string())? - i(lo).map_err(|e| e.to_string())?;
            let expected = (di / (PI * h)).round() as i64;
            let count = s.records.len() as i64;
            let max_im = s.records.iter().map(|r| r.lambda.im.abs()).fold(0.0, f64::max);
            ok &= max_im < 1e-10 && (count - expected).abs() <= 1 && s.is_complete();
            notes.push(format!(
                "{name} h={h}: {count} zeros (winding {}), expected {expected}, max|Im|={max_im:.1e}",
                s.zero_count.winding
            ));
        }
    }
    check(ok, notes.join("; "))
}

fn max_shift(a: &[zswkb::EigenvalueRecord64], b: &[zswkb::EigenvalueRecord64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x.lambda - y.lambda).norm()).fold(0.0, f64::max)
}

fn criterion_7() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, cfg) in families(&[0.05], &[0.0]) {
        let p: Problem64 = cfg.problem(0.05, 0.0).map_err(|e| e.to_string())?;
        let base = direct_spectrum_real(&p).map_err(|e| e.to_string())?;
        let mut worst = 0.0f64;
        for dm in [-0.2, 0.2] {
            let q = p.with_match_point(p.match_point + dm);
            worst = worst.max(max_shift(&base, &direct_spectrum_real(&q).map_err(|e| e.to_string())?));
        }
        let q = p.with_cutoffs(p.left_cut * 1.25, p.right_cut * 1.25);
        worst = worst.max(max_shift(&base, &direct_spectrum_real(&q).map_err(|e| e.to_string())?));
        let w0 = wkb_spectrum(&p).map_err(|e| e.to_string())?.records;
        let mut tol = p.tol;
        tol.quad_oversample *= 2;
        let w1 = wkb_spectrum(&p.with_tolerances(tol)).map_err(|e| e.to_string())?.records;
        let wq = max_shift(&w0, &w1);
        ok &= worst < 1e-9 && wq < 1e-9;
        notes.push(format!("{name}: match/cutoff shift {worst:.1e}, node doubling {wq:.1e}"));
    }
    check(ok, notes.join("; "))
}

fn criterion_8() -> Outcome {
    let cfg = control(&[0.05], &[0.05]);
    let (rows, _) = run_pt_sweep(&cfg).map_err(|e| format!("{e:#}"))?;
    let r = &rows[0];
    let max_im = r.max_im.unwrap_or(0.0);
    check(
        max_im > 1e-6 && r.exploratory(),
        format!("exploratory control (A even, B even): {} roots, max|Im| = {max_im:.3e}", r.found),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("quantization accuracy", criterion_1),
        ("branch parity", criterion_2),
        ("spectral reality under parity pairing", criterion_3),
        ("action conjugation symmetry", criterion_4),
        ("Stokes directions and level-set fidelity", criterion_5),
        ("self-adjoint baseline", criterion_6),
        ("oracle robustness", criterion_7),
        ("symmetry-broken control", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(d) => println!("PASS {}. {name} ({secs:.1}s): {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {}. {name} ({secs:.1}s): {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
