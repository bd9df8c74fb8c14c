//! Small deterministic Nelder-Mead simplex minimizer.
//!
//! Used for the local refinement stage of parameter searches and for the
//! CHSH grid-search verifier. Standard reflection/expansion/contraction
//! coefficients; the initial simplex is built from per-coordinate steps, so
//! identical inputs always produce identical traces.

/// Outcome of a simplex minimization.
#[derive(Debug, Clone)]
pub struct NmResult {
    pub xmin: Vec<f64>,
    pub fmin: f64,
    pub evals: usize,
    pub converged: bool,
}

pub fn nelder_mead<F>(
    mut f: F,
    x0: &[f64],
    step: &[f64],
    max_iter: usize,
    ftol: f64,
) -> NmResult
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(x0.len(), step.len(), "step vector length mismatch");
    let n = x0.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let fx0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), fx0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step[i];
        let fx = eval(&x, &mut evals);
        simplex.push((x, fx));
    }

    let mut converged = false;
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        if spread.abs() <= ftol * (1.0 + simplex[0].1.abs()) {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|(x, _)| x[d]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let combine = |t: f64| -> Vec<f64> {
            (0..n).map(|d| centroid[d] + t * (centroid[d] - worst.0[d])).collect()
        };

        let reflected = combine(1.0);
        let fr = eval(&reflected, &mut evals);
        if fr < simplex[0].1 {
            let expanded = combine(2.0);
            let fe = eval(&expanded, &mut evals);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let contracted = if fr < worst.1 { combine(0.5) } else { combine(-0.5) };
            let fc = eval(&contracted, &mut evals);
            if fc < worst.1.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    for d in 0..n {
                        v.0[d] = best[d] + 0.5 * (v.0[d] - best[d]);
                    }
                    v.1 = eval(&v.0, &mut evals);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    NmResult {
        xmin: simplex[0].0.clone(),
        fmin: simplex[0].1,
        evals,
        converged,
    }
}
