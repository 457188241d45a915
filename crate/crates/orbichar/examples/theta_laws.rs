//! Numerical check of the θ and η transformation laws on a few lattices:
//! θ_{λ+L}(−1/τ) = (−iτ)^{r/2}|L*/L|^{−1/2} Σ_μ e^{−2πi(λ|μ)} θ_{μ+L}(τ).
//!
//!     cargo run --example theta_laws

use num_complex::Complex64;
use orbichar::lattice::{discriminant_group, new_lattice};
use orbichar::modular::{e2pi, eta, theta, ModularPoint, SeriesTolerance, I};

fn main() -> orbichar::Result<()> {
    let tol = SeriesTolerance::new(1e-14);
    let tau = Complex64::new(0.21, 0.83);
    let e = eta(tau, &tol)?.value;
    let e_s = eta(-1.0 / tau, &tol)?.value;
    println!("eta S-law residual {:.2e}", (e_s - (-I * tau).sqrt() * e).norm());

    for gram in [vec![vec![2]], vec![vec![2, -1], vec![-1, 2]], vec![vec![4, 1, 0], vec![1, 2, 0], vec![0, 0, 6]]] {
        let l = new_lattice(gram.clone())?;
        let disc = discriminant_group(&l);
        let reps = disc.representatives();
        let at = |t: Complex64, v| theta(&l, v, &ModularPoint::new(t), &tol).map(|a| a.value);
        let mut worst = 0.0f64;
        for lam in &reps {
            let lhs = at(-1.0 / tau, lam)?;
            let mut rhs = Complex64::new(0.0, 0.0);
            for mu in &reps {
                rhs += e2pi(&-l.form().pair(&lam.0, &mu.0)) * at(tau, mu)?;
            }
            rhs *= (-I * tau).sqrt().powi(l.rank() as i32) / (disc.cardinality as f64).sqrt();
            worst = worst.max((lhs - rhs).norm());
        }
        println!("gram {gram:?}: |L*/L| = {}, theta S-law residual {worst:.2e}", disc.cardinality);
    }
    Ok(())
}
