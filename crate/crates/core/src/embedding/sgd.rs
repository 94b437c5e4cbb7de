//! The CBOW negative-sampling objective for a single training example and
//! its SGD update.
//!
//! For context rows `c_1..c_k`, hidden vector `h = mean(c_i)`, and targets
//! `(u_j, label_j)` the loss is
//! `-Σ_j log σ(s_j · h·u_j)` with `s_j = +1` for the observed word and `-1`
//! for noise words.

use std::ops::AddAssign;

use num_traits::Float;

/// Float types the SGD kernels run on.
pub trait Real: Float + AddAssign {}

impl<T: Float + AddAssign> Real for T {}

/// One CBOW example: context word rows and `(target row, is_positive)` pairs.
#[derive(Debug, Clone, Copy)]
pub struct Example<'a> {
    pub context: &'a [usize],
    pub targets: &'a [(usize, bool)],
}

fn sigmoid<F: Real>(x: F) -> F {
    F::one() / (F::one() + (-x).exp())
}

/// `-log σ(x)`, stable for large `|x|`.
fn neg_log_sigmoid<F: Real>(x: F) -> F {
    let z = -x;
    z.max(F::zero()) + (F::one() + (-z.abs()).exp()).ln()
}

fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

fn row<F>(m: &[F], dim: usize, r: usize) -> &[F] {
    &m[r * dim..(r + 1) * dim]
}

fn row_mut<F>(m: &mut [F], dim: usize, r: usize) -> &mut [F] {
    &mut m[r * dim..(r + 1) * dim]
}

fn hidden<F: Real>(input: &[F], dim: usize, context: &[usize], out: &mut [F]) {
    out.iter_mut().for_each(|v| *v = F::zero());
    for &c in context {
        for (h, &x) in out.iter_mut().zip(row(input, dim, c)) {
            *h += x;
        }
    }
    let scale = F::one() / F::from(context.len()).expect("context length");
    out.iter_mut().for_each(|v| *v = *v * scale);
}

pub fn ns_loss<F: Real>(input: &[F], output: &[F], dim: usize, ex: Example<'_>) -> F {
    let mut h = vec![F::zero(); dim];
    hidden(input, dim, ex.context, &mut h);
    ex.targets.iter().fold(F::zero(), |acc, &(t, positive)| {
        let f = dot(&h, row(output, dim, t));
        acc + neg_log_sigmoid(if positive { f } else { -f })
    })
}

/// Reusable buffers for [`cbow_step`].
#[derive(Debug, Clone)]
pub struct Scratch<F> {
    hidden: Vec<F>,
    grad_hidden: Vec<F>,
}

impl<F: Real> Scratch<F> {
    pub fn new(dim: usize) -> Self {
        Self {
            hidden: vec![F::zero(); dim],
            grad_hidden: vec![F::zero(); dim],
        }
    }
}

/// Applies one SGD step of size `lr` to the output rows of every target and
/// the input rows of every context word.
///
/// With distinct targets the parameter change equals `-lr` times the exact
/// gradient of [`ns_loss`]; output rows are read before they are written.
pub fn cbow_step<F: Real>(
    input: &mut [F],
    output: &mut [F],
    dim: usize,
    ex: Example<'_>,
    lr: F,
    scratch: &mut Scratch<F>,
) {
    if ex.context.is_empty() {
        return;
    }
    let Scratch { hidden: h, grad_hidden: gh } = scratch;
    hidden(input, dim, ex.context, h);
    gh.iter_mut().for_each(|v| *v = F::zero());

    for &(t, positive) in ex.targets {
        let out = row_mut(output, dim, t);
        let label = if positive { F::one() } else { F::zero() };
        let g = (label - sigmoid(dot(h, out))) * lr;
        for ((acc, o), &hv) in gh.iter_mut().zip(out.iter_mut()).zip(h.iter()) {
            *acc += g * *o;
            *o += g * hv;
        }
    }

    let share = F::one() / F::from(ex.context.len()).expect("context length");
    for &c in ex.context {
        for (x, &g) in row_mut(input, dim, c).iter_mut().zip(gh.iter()) {
            *x += g * share;
        }
    }
}
