//! Nelder-Mead downhill simplex with a hard evaluation budget.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_evals: usize,
    /// Initial simplex edge along each coordinate.
    pub step: f64,
    /// Stop when the spread of simplex values drops below this.
    pub f_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { max_evals: 1000, step: 0.1, f_tol: 1e-14 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `f` from `x0`. Non-finite objective values are treated as +∞.
pub fn minimize(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], opts: SimplexOptions) -> SimplexResult {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut best = SimplexResult { x: x0.to_vec(), f: eval(x0, &mut evals), evals: 0 };
    if n == 0 || opts.max_evals <= 1 {
        best.evals = evals;
        return best;
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), best.f)];
    for i in 0..n {
        if evals >= opts.max_evals {
            break;
        }
        let mut x = x0.to_vec();
        x[i] += opts.step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    if simplex.len() < n + 1 {
        return finish(simplex, evals);
    }

    while evals < opts.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (lo, hi) = (simplex[0].1, simplex[n].1);
        if (hi - lo).abs() <= opts.f_tol && hi.is_finite() {
            break;
        }
        let centroid: Vec<f64> =
            (0..n).map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / n as f64).collect();
        let toward =
            |t: f64, worst: &[f64]| -> Vec<f64> { centroid.iter().zip(worst).map(|(c, w)| c + t * (w - c)).collect() };

        let worst = simplex[n].0.clone();
        let xr = toward(-REFLECT, &worst);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            if evals >= opts.max_evals {
                simplex[n] = (xr, fr);
                break;
            }
            let xe = toward(-EXPAND, &worst);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        if evals >= opts.max_evals {
            break;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = toward(-CONTRACT, &worst);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = toward(CONTRACT, &worst);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < fr.min(simplex[n].1) {
            simplex[n] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            if evals >= opts.max_evals {
                break;
            }
            let x: Vec<f64> = anchor.iter().zip(&vertex.0).map(|(a, v)| a + SHRINK * (v - a)).collect();
            let v = eval(&x, &mut evals);
            *vertex = (x, v);
        }
    }
    finish(simplex, evals)
}

fn finish(simplex: Vec<(Vec<f64>, f64)>, evals: usize) -> SimplexResult {
    let (x, f) = simplex.into_iter().min_by(|a, b| a.1.total_cmp(&b.1)).expect("simplex is non-empty");
    SimplexResult { x, f, evals }
}
