//! Nelder-Mead downhill simplex for small, smooth, unconstrained problems.

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Converged when every vertex is within `xtol` (max-norm) of the best.
    pub xtol: f64,
    /// ... and every vertex value is within `ftol` of the best.
    pub ftol: f64,
    pub max_iter: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            xtol: 1e-4,
            ftol: 1e-12,
            max_iter: 5000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult<const N: usize> {
    pub x: [f64; N],
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn lerp<const N: usize>(from: &[f64; N], to: &[f64; N], t: f64) -> [f64; N] {
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = from[i] + t * (to[i] - from[i]);
    }
    out
}

/// Minimize `objective` from `x0` with an axis-aligned initial simplex of
/// edge `step`. The returned point is never worse than `x0`.
pub fn minimize<const N: usize, F>(
    objective: F,
    x0: [f64; N],
    step: f64,
    opts: SimplexOptions,
) -> SimplexResult<N>
where
    F: Fn(&[f64; N]) -> f64,
{
    let mut simplex: Vec<([f64; N], f64)> = Vec::with_capacity(N + 1);
    simplex.push((x0, objective(&x0)));
    for i in 0..N {
        let mut x = x0;
        x[i] += step;
        simplex.push((x, objective(&x)));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best_x, best_f) = simplex[0];
        let spread_x = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(best_x.iter()).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let spread_f = simplex[1..]
            .iter()
            .map(|(_, v)| (v - best_f).abs())
            .fold(0.0, f64::max);
        if spread_x <= opts.xtol && spread_f <= opts.ftol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = [0.0; N];
        for (x, _) in &simplex[..N] {
            for i in 0..N {
                centroid[i] += x[i] / N as f64;
            }
        }
        let (worst_x, worst_f) = simplex[N];
        let second_worst = simplex[N - 1].1;

        let reflected = lerp(&centroid, &worst_x, -REFLECT);
        let fr = objective(&reflected);
        if fr < best_f {
            let expanded = lerp(&centroid, &worst_x, -EXPAND);
            let fe = objective(&expanded);
            simplex[N] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < second_worst {
            simplex[N] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < worst_f {
            let c = lerp(&centroid, &reflected, CONTRACT);
            (c, objective(&c))
        } else {
            let c = lerp(&centroid, &worst_x, CONTRACT);
            (c, objective(&c))
        };
        if fc < worst_f.min(fr) {
            simplex[N] = (contracted, fc);
            continue;
        }
        for vertex in simplex.iter_mut().skip(1) {
            let x = lerp(&best_x, &vertex.0, SHRINK);
            *vertex = (x, objective(&x));
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    SimplexResult {
        x: simplex[0].0,
        value: simplex[0].1,
        iterations,
        converged,
    }
}
