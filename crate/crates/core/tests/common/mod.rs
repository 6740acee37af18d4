//! Closed-form oracles written independently of the library evaluators.
#![allow(dead_code)]

pub fn worst_case(x: &[f64]) -> f64 {
    -x.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn neg_expectation(w: &[f64], x: &[f64]) -> f64 {
    -w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>()
}

/// Log-sum-exp shifted by the smallest position.
pub fn entropic(beta: f64, w: &[f64], x: &[f64]) -> f64 {
    let m = x.iter().copied().fold(f64::INFINITY, f64::min);
    let s: f64 = w
        .iter()
        .zip(x)
        .map(|(w, x)| w * (-beta * (x - m)).exp())
        .sum();
    s.ln() / beta - m
}

pub fn loss_based(w: &[f64], x: &[f64]) -> f64 {
    -w.iter().zip(x).map(|(w, x)| w * x.min(0.0)).sum::<f64>()
}

pub fn discounted_worst_case(d: &[f64], x: &[f64]) -> f64 {
    let dx: Vec<f64> = d.iter().zip(x).map(|(d, x)| d * x).collect();
    worst_case(&dx)
}

/// `Σ P_i (-X_i)`.
pub fn pairing(p: &[f64], x: &[f64]) -> f64 {
    -p.iter().zip(x).map(|(p, x)| p * x).sum::<f64>()
}

/// `(k + N choose N)` points of the step lattice in `{P ≥ 0, Σ P ≤ 1}`, by
/// filtering the full cube.
pub fn lattice(dim: usize, k: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let total = (k + 1).pow(dim as u32);
    for mut code in 0..total {
        let mut c = vec![0; dim];
        for slot in c.iter_mut().rev() {
            *slot = code % (k + 1);
            code /= k + 1;
        }
        if c.iter().sum::<usize>() <= k {
            out.push(c.iter().map(|&n| n as f64 / k as f64).collect());
        }
    }
    out
}

pub fn l1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}
