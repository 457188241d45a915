//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.

mod common;

use std::time::Instant;

use common::*;
use num_complex::Complex64;
use orbichar::builtin;
use orbichar::characters::{classify, Classification};
use orbichar::lattice::{new_lattice, DualVector};
use orbichar::linalg::{is_integral, rat};
use orbichar::modular::PI;
use orbichar::transforms::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

type Outcome = Result<String, String>;

fn classified(name: &str) -> Classification {
    let (l, s) = builtin::by_name(name, 3, 1).unwrap();
    classify(&l, &s).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut got = Vec::new();
    for (name, want) in [("a2bar", 20), ("a3", 9), ("d4", 10), ("perm", 20)] {
        let n = classified(name).len();
        ensure(n == want, || format!("{name}: {n} modules, expected {want}"))?;
        got.push(format!("{name}={n}"));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("classification took {secs:.2}s"))?;
    Ok(format!("{} in {:.0} ms", got.join(" "), secs * 1e3))
}

fn criterion_2() -> Outcome {
    let c = classified("a3");
    let order = builtin::a3_reference_order(&c);
    let s = s_coefficients(&c).map_err(|e| e.to_string())?;
    // 4·S as a + b√2
    #[rustfmt::skip]
    let want: [[(i32, i32); 9]; 9] = {
        const R: (i32, i32) = (0, 1);
        const M: (i32, i32) = (0, -1);
        [
            [(1, 0), (1, 0), (2, 0), (1, 0), (1, 0), R, R, R, R],
            [(1, 0), (1, 0), (2, 0), (1, 0), (1, 0), M, M, M, M],
            [(2, 0), (2, 0), (0, 0), (-2, 0), (-2, 0), (0, 0), (0, 0), (0, 0), (0, 0)],
            [(1, 0), (1, 0), (-2, 0), (1, 0), (1, 0), R, R, M, M],
            [(1, 0), (1, 0), (-2, 0), (1, 0), (1, 0), M, M, R, R],
            [R, M, (0, 0), R, M, (0, 0), (0, 0), (2, 0), (-2, 0)],
            [R, M, (0, 0), R, M, (0, 0), (0, 0), (-2, 0), (2, 0)],
            [R, M, (0, 0), M, R, (2, 0), (-2, 0), (0, 0), (0, 0)],
            [R, M, (0, 0), M, R, (-2, 0), (2, 0), (0, 0), (0, 0)],
        ]
    };
    let mut worst_s: f64 = 0.0;
    for a in 0..9 {
        for b in 0..9 {
            let (x, y) = want[a][b];
            let exact = (x as f64 + y as f64 * 2f64.sqrt()) / 4.0;
            let got = s.entries[order[a]][order[b]];
            // Snap 4S to the lattice ℤ + ℤ√2 and require an exact match.
            let y_fit = ((4.0 * got.re - x as f64) / 2f64.sqrt()).round() as i32;
            ensure(y_fit == y, || format!("S[{a}][{b}] = {got}, expected {exact}"))?;
            worst_s = worst_s.max((got - exact).norm());
        }
    }
    ensure(worst_s < 1e-12, || format!("S deviates by {worst_s:e}"))?;
    let t = t_matrix(&c);
    let e8 = Complex64::from_polar(1.0, PI / 8.0);
    let i = Complex64::i();
    let diag = [
        Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::from_polar(1.0, 3.0 * PI / 4.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        e8,
        -e8,
        i * e8,
        -i * e8,
    ];
    let pre = Complex64::from_polar(1.0, -PI / 4.0);
    let mut worst_t: f64 = 0.0;
    for a in 0..9 {
        worst_t = worst_t.max((t.entries[order[a]][order[a]] - pre * diag[a]).norm());
    }
    ensure(worst_t < 1e-12, || format!("T deviates by {worst_t:e}"))?;
    Ok(format!("S exact in (1/4)Z[√2] (max dev {worst_s:.1e}), T max dev {worst_t:.1e}"))
}

/// (asymptotic, quantum) dimension expected for each label type.
fn dims_match(name: &str, c: &Classification, want: [(f64, f64); 3]) -> Result<(), String> {
    let d = dimensions(c);
    for (i, l) in c.labels.iter().enumerate() {
        let (a, q) = want[l.kind() - 1];
        ensure((d.asymptotic[i] - a).abs() < 1e-12 && (d.quantum[i] - q).abs() < 1e-12, || {
            format!("{name} {l}: ({}, {}) vs ({a}, {q})", d.asymptotic[i], d.quantum[i])
        })?;
    }
    let total: f64 = d.asymptotic.iter().map(|a| a * a).sum();
    ensure((total - 1.0).abs() < 1e-10, || format!("{name}: Σ asdim² = {total}"))?;
    let s = s_coefficients(c).map_err(|e| e.to_string())?;
    let v = c.vacuum();
    let row: f64 = s.entries[v].iter().map(|x| x.norm_sqr()).sum();
    ensure((row - 1.0).abs() < 1e-10, || format!("{name}: Σ|S₀ⱼ|² = {row}"))?;
    if !s.degenerate {
        for j in 0..c.len() {
            let q = (s.entries[v][j] / s.entries[v][v]).re;
            ensure((q - d.quantum[j]).abs() < 1e-10, || format!("{name}: S₀ⱼ/S₀₀ = {q} for {}", c.labels[j]))?;
        }
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    let s12 = 12f64.sqrt();
    let s2 = 2f64.sqrt();
    dims_match("a2bar", &classified("a2bar"), [(1.0 / (2.0 * s12), 1.0), (1.0 / s12, 2.0), (0.25, 3f64.sqrt())])?;
    dims_match("a3", &classified("a3"), [(0.25, 1.0), (0.5, 2.0), (1.0 / (2.0 * s2), s2)])?;
    dims_match("d4", &classified("d4"), [(1.0 / 6.0, 1.0), (0.5, 3.0), (1.0 / 3.0, 2.0)])?;
    for (p, t) in [(3u32, 1i64), (3, 2), (5, 1), (2, 3)] {
        let (l, s) = builtin::perm(p, t).unwrap();
        let c = classify(&l, &s).unwrap();
        let n0 = (2 * t) as f64;
        let pf = p as f64;
        dims_match(
            &format!("perm p={p} t={t}"),
            &c,
            [
                (n0.powf(-pf / 2.0) / pf, 1.0),
                (n0.powf(-pf / 2.0), pf),
                (n0.powf(-0.5) / pf, n0.powf((pf - 1.0) / 2.0)),
            ],
        )?;
    }
    Ok("tables for a2bar, a3, d4 and permutation orbifolds; sum rules hold".into())
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    let i = Complex64::i();
    for (t, want) in [
        (1, Complex64::new(1.0, -1.0)),
        (2, 2.0 * Complex64::from_polar(1.0, 3.0 * PI / 4.0)),
        (3, Complex64::new(3.0, 3.0)),
    ] {
        let (l, s) = builtin::perm(3, t).unwrap();
        let c = classify(&l, &s).unwrap();
        let got = v_constants(&c).map_err(|e| e.to_string())?.c_beta0;
        ensure((got - want).norm() < 1e-12, || format!("c₀(t={t}) = {got}, expected {want}"))?;
    }
    notes.push("c₀ t=1,2,3".to_string());
    let v = v_constants(&classified("a2bar")).map_err(|e| e.to_string())?;
    ensure((v.values[&1] - (1.0 - i) / 2.0).norm() < 1e-12, || format!("a2bar v₁ = {}", v.values[&1]))?;
    let v = v_constants(&classified("d4")).map_err(|e| e.to_string())?;
    ensure((v.values[&1] - 1.0).norm() < 1e-12 && (v.values[&2] + 1.0).norm() < 1e-12, || {
        format!("d4 v₁ = {}, v₋₁ = {}", v.values[&1], v.values[&2])
    })?;
    notes.push("v₁(a2bar), v±1(d4)".into());
    // β₀ for A₃ lives in L = √2·π₀(Q); √2·(α₂/2) = α₂/√2 has L-coordinates
    // equal to the π₀(Q)-coordinates of α₂/2. β₀ is unique modulo L.
    let c = classified("a3");
    let b = v_constants(&c).map_err(|e| e.to_string())?.beta0;
    let half_alpha2 = vec![rat(0, 1), rat(1, 2), rat(0, 1)];
    let target = c.data.pi_q.coords_of(&half_alpha2).ok_or("α₂/2 is not in the span of π₀(Q)")?;
    let diff: Vec<_> = b.0.iter().zip(&target).map(|(x, y)| x - y).collect();
    ensure(is_integral(&diff), || format!("β₀ = {:?} is not α₂/√2 modulo L", b.0))?;
    let a1 = new_lattice(vec![vec![2]]).unwrap();
    let b1 = beta0_vector(&a1, 2).map_err(|e| e.to_string())?;
    ensure(b1 == DualVector(vec![rat(1, 2)]), || format!("β₀(A₁, c=2) = {:?}", b1.0))?;
    notes.push("β₀(A₃) ≡ α₂/√2, β₀(A₁) = α/2".into());
    Ok(notes.join(", "))
}

fn criterion_5() -> Outcome {
    let mut parts = Vec::new();
    for name in builtin::NAMES {
        let c = classified(name);
        let s = s_coefficients(&c).map_err(|e| e.to_string())?;
        let t = t_matrix(&c);
        let rep = verify_transforms(&c, &s, &t, &default_taus(), 1e-12, 1e-8).map_err(|e| e.to_string())?;
        ensure(rep.pass, || {
            format!("{name}: S residual {:e}, T residual {:e}", rep.max_s_residual, rep.max_t_residual)
        })?;
        parts.push(format!("{name} {:.0e}", rep.max_s_residual.max(rep.max_t_residual)));
    }
    Ok(format!("max residuals: {}", parts.join(", ")))
}

fn criterion_6() -> Outcome {
    let c = classified("a3");
    let order = builtin::a3_reference_order(&c);
    let s = s_coefficients(&c).map_err(|e| e.to_string())?;
    let f = verlinde_fusion(&s, c.vacuum()).map_err(|e| e.to_string())?;
    const NAMES: [&str; 9] = ["V+", "V-", "l1", "a/2+", "a/2-", "T1+", "T1-", "T2+", "T2-"];
    let idx = |n: &str| order[NAMES.iter().position(|x| *x == n).unwrap()];
    let product = |a: &str, b: &str| -> Vec<(usize, i64)> {
        let mut v = f.product(idx(a), idx(b));
        v.sort();
        v
    };
    let sum = |terms: &[&str]| -> Vec<(usize, i64)> {
        let mut v: Vec<(usize, i64)> = Vec::new();
        for t in terms {
            let k = idx(t);
            match v.iter_mut().find(|(i, _)| *i == k) {
                Some(e) => e.1 += 1,
                None => v.push((k, 1)),
            }
        }
        v.sort();
        v
    };
    let table: [(&str, &str, &[&str]); 10] = [
        ("T1+", "T1+", &["V+", "a/2-"]),
        ("T1+", "T1-", &["V-", "a/2+"]),
        ("T2+", "T2+", &["V+", "a/2+"]),
        ("T2+", "T2-", &["V-", "a/2-"]),
        ("l1", "l1", &["V+", "a/2+", "V-", "a/2-"]),
        ("l1", "T1+", &["T2+", "T2-"]),
        ("T1+", "T2+", &["l1"]),
        ("a/2+", "T1+", &["T1-"]),
        ("a/2-", "T2+", &["T2-"]),
        ("V-", "a/2+", &["a/2-"]),
    ];
    for (a, b, rhs) in table {
        let got = product(a, b);
        ensure(got == sum(rhs), || format!("{a} x {b} = {got:?}, expected {}", rhs.join(" + ")))?;
    }
    let n = c.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                ensure(f.get(i, j, k) >= 0, || format!("negative N[{i}][{j}][{k}]"))?;
            }
        }
    }
    Ok("integral nonnegative; 10 named products match".into())
}

fn criterion_7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let l = random_even_lattice(&mut rng, 64);
        let tau = random_tau(&mut rng);
        let z: Vec<Complex64> = (0..l.rank()).map(|i| c(0.17 * (i + 1) as f64, 0.03)).collect();
        worst = worst.max(theta_law_residual(&l, tau, &z));
        for k in 0..5 {
            let shift: Vec<_> = (0..l.rank()).map(|i| rat((i + k) as i64 - 2, 3)).collect();
            if let Some(e) = enumeration_mismatch(l.form(), &shift, &rat(9, 1)) {
                return Err(format!("{:?}: {e}", l.gram()));
            }
        }
    }
    ensure(worst < 1e-8, || format!("theta laws residual {worst:e}"))?;
    let taus = [c(0.0, 1.0), c(0.3, 0.8), c(-0.41, 1.2), c(0.2, 0.9)];
    let eta_res = taus.iter().map(|t| eta_law_residual(*t)).fold(0.0, f64::max);
    ensure(eta_res < 1e-10, || format!("η laws residual {eta_res:e}"))?;
    let mut k_res: f64 = 0.0;
    for m in [2, 4, 6] {
        for tau in taus {
            k_res = k_res.max(k_law_residuals(m, tau, c(0.23, 0.05)).into_iter().fold(0.0, f64::max));
        }
    }
    ensure(k_res < 1e-8, || format!("K_l laws residual {k_res:e}"))?;
    let jtp = taus.iter().map(|t| triple_product_residual(*t, c(0.37, -0.1))).fold(0.0, f64::max);
    ensure(jtp < 1e-10, || format!("triple product residual {jtp:e}"))?;
    for (name, l, s) in identity_cases() {
        let bad = exact_identity_failures(&l, &s);
        ensure(bad.is_empty(), || format!("{name}: {}", bad.join("; ")))?;
    }
    Ok(format!("theta {worst:.0e}, η {eta_res:.0e}, K_l {k_res:.0e}, triple product {jtp:.0e}; enumeration and exact identities agree"))
}

fn criterion_8() -> Outcome {
    let a2 = new_lattice(vec![vec![2, -1], vec![-1, 2]]).unwrap();
    let (a3, a3s) = builtin::a3().unwrap();
    for (name, l) in [("A2", &a2), ("A3", &a3)] {
        if let Some(e) = theta_oracle_mismatch(l, 15) {
            return Err(format!("{name} theta: {e}"));
        }
    }
    let (a2bar, a2s) = builtin::a2bar().unwrap();
    for (name, l, s) in [("a2bar", &a2bar, &a2s), ("A3", &a3, &a3s)] {
        let c = classify(l, s).unwrap();
        if let Some(e) = vacuum_oracle_mismatch(&c, l, s, 15) {
            return Err(format!("{name} vacuum: {e}"));
        }
    }
    Ok("θ (A2, A3 all cosets) and vacuum characters (a2bar, A3) agree to 15 terms".into())
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 8] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        let start = Instant::now();
        match f() {
            Ok(msg) => println!("criterion {n}: PASS ({msg}) [{:.2}s]", start.elapsed().as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("criterion {n}: FAIL ({msg})");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
