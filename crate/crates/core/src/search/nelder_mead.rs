//! Derivative-free simplex minimization with a finite-difference gradient
//! polish.

#[derive(Clone, Copy, Debug)]
pub struct MinimizeOptions {
    pub max_iters: usize,
    /// Stop once the simplex's objective spread falls below this.
    pub f_tol: f64,
    pub initial_step: f64,
    pub polish_iters: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { max_iters: 2000, f_tol: 1e-12, initial_step: 0.5, polish_iters: 200 }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
}

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction ½,
/// shrink ½).
pub fn nelder_mead(f: &impl Fn(&[f64]) -> f64, x0: &[f64], opts: &MinimizeOptions) -> Minimum {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let mut iterations = 0;
    while iterations < opts.max_iters {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if values[n] - values[0] <= opts.f_tol {
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|v| v[j]).sum::<f64>() / n as f64).collect();
        let toward = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (w - c)).collect() };

        let reflected = toward(-1.0);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = toward(-2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[n] {
            let p = toward(-0.5);
            let fp = f(&p);
            (p, fp)
        } else {
            let p = toward(0.5);
            let fp = f(&p);
            (p, fp)
        };
        if fc < values[n].min(fr) {
            simplex[n] = contracted;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            simplex[i] = best.iter().zip(&simplex[i]).map(|(b, v)| b + 0.5 * (v - b)).collect();
            values[i] = f(&simplex[i]);
        }
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    Minimum { x: simplex[best].clone(), f: values[best], iterations }
}

/// Steepest descent with central-difference gradients and Armijo
/// backtracking. Never returns a worse point than it was given.
pub fn gradient_polish(f: &impl Fn(&[f64]) -> f64, start: Minimum, iters: usize) -> Minimum {
    const H: f64 = 1e-7;
    let Minimum { mut x, f: mut fx, iterations } = start;
    let mut step = 1.0;
    for _ in 0..iters {
        let grad: Vec<f64> = (0..x.len())
            .map(|i| {
                let mut p = x.clone();
                let mut m = x.clone();
                p[i] += H;
                m[i] -= H;
                (f(&p) - f(&m)) / (2.0 * H)
            })
            .collect();
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        if g2 == 0.0 || !g2.is_finite() {
            break;
        }
        let mut improved = false;
        let mut t = step;
        while t > 1e-12 {
            let trial: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - t * gi).collect();
            let ft = f(&trial);
            if ft <= fx - 1e-4 * t * g2 {
                x = trial;
                fx = ft;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
        step = (t * 2.0).min(1e3);
    }
    Minimum { x, f: fx, iterations }
}
