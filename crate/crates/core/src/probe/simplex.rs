//! Nelder–Mead maximization on the unit box with a hard evaluation budget.

pub const REFLECTION: f64 = 1.0;
pub const EXPANSION: f64 = 2.0;
pub const CONTRACTION: f64 = 0.5;
pub const SHRINK: f64 = 0.5;
/// Edge length of the initial simplex in normalized coordinates.
pub const INITIAL_STEP: f64 = 0.1;

fn clamp_unit(x: &mut [f64]) {
    for v in x {
        *v = v.clamp(0.0, 1.0);
    }
}

fn affine(base: &[f64], toward: &[f64], t: f64) -> Vec<f64> {
    let mut out: Vec<f64> = base.iter().zip(toward).map(|(b, w)| b + t * (w - b)).collect();
    clamp_unit(&mut out);
    out
}

struct Budgeted<F> {
    objective: F,
    remaining: usize,
}

impl<F: FnMut(&[f64]) -> f64> Budgeted<F> {
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let value = (self.objective)(x);
        Some(if value.is_nan() { f64::NEG_INFINITY } else { value })
    }
}

/// Maximizes `objective` over `[0, 1]^d` starting from `start`, using at most
/// `budget` evaluations (the start included). Proposals are clamped to the
/// box. Returns the best point and value seen.
pub fn maximize(
    objective: impl FnMut(&[f64]) -> f64,
    start: &[f64],
    budget: usize,
) -> Option<(Vec<f64>, f64)> {
    let mut f = Budgeted {
        objective,
        remaining: budget,
    };
    let mut start = start.to_vec();
    clamp_unit(&mut start);
    let f0 = f.eval(&start)?;
    let mut simplex = vec![(start.clone(), f0)];
    let mut best = (start.clone(), f0);
    let dim = start.len();
    for i in 0..dim {
        let mut x = start.clone();
        x[i] += if x[i] + INITIAL_STEP <= 1.0 {
            INITIAL_STEP
        } else {
            -INITIAL_STEP
        };
        match f.eval(&x) {
            Some(v) => simplex.push((x, v)),
            None => return Some(best_of(&simplex, best)),
        }
    }
    best = best_of(&simplex, best);
    if dim == 0 {
        return Some(best);
    }

    loop {
        // Descending by value: best first, worst last.
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        best = best_of(&simplex, best);
        let worst = simplex[dim].clone();
        let second_worst = simplex[dim - 1].1;
        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64)
            .collect();

        let reflected = affine(&centroid, &worst.0, -REFLECTION);
        let Some(fr) = f.eval(&reflected) else { break };
        if fr > simplex[0].1 {
            let expanded = affine(&centroid, &worst.0, -EXPANSION);
            let Some(fe) = f.eval(&expanded) else {
                simplex[dim] = (reflected, fr);
                break;
            };
            simplex[dim] = if fe > fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr > second_worst {
            simplex[dim] = (reflected, fr);
            continue;
        }
        let (contracted, threshold) = if fr > worst.1 {
            (affine(&centroid, &reflected, CONTRACTION), fr)
        } else {
            (affine(&centroid, &worst.0, CONTRACTION), worst.1)
        };
        let Some(fc) = f.eval(&contracted) else { break };
        if fc > threshold || (fr > worst.1 && fc >= threshold) {
            simplex[dim] = (contracted, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = affine(&anchor, &vertex.0, SHRINK);
            match f.eval(&x) {
                Some(v) => *vertex = (x, v),
                None => return Some(best_of(&simplex, best)),
            }
        }
    }
    Some(best_of(&simplex, best))
}

fn best_of(simplex: &[(Vec<f64>, f64)], current: (Vec<f64>, f64)) -> (Vec<f64>, f64) {
    simplex
        .iter()
        .fold(current, |acc, v| if v.1 > acc.1 { v.clone() } else { acc })
}
