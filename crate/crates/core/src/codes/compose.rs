//! Compiling a sequence of sparse operators on labelled factors into one
//! operator between fixed input and output layouts.

use crate::error::{Error, Result};
use crate::hilbert::{Placement, SystemLayout};
use crate::sparse::SparseOp;

/// One operator acting on `targets` (input dims `op_in`), producing `op_out`.
pub(crate) struct Step<'a> {
    pub op: &'a SparseOp,
    pub targets: Vec<String>,
    pub op_in: Vec<usize>,
    pub op_out: SystemLayout,
}

/// Lift `op` to the whole of `layout`, acting as identity elsewhere.
fn embed(op: &SparseOp, layout: &SystemLayout, step: &Step) -> Result<(SystemLayout, SparseOp)> {
    let place = Placement::new(layout, &step.targets, &step.op_in, &step.op_out)?;
    let out = place.output_layout().clone();
    let mut t = Vec::with_capacity(op.nnz() * place.rest_dim());
    for &(c, r, v) in op.entries() {
        for rest in 0..place.rest_dim() {
            t.push((place.join(r, rest), place.join_input(c, rest), v));
        }
    }
    Ok((out.clone(), SparseOp::from_triplets(out.total_dim(), layout.total_dim(), t)))
}

/// Product of the steps (first step applied first), with output factors
/// reordered to `output_order`.
pub(crate) fn compile(input: &SystemLayout, steps: &[Step], output_order: &[String]) -> Result<SparseOp> {
    let mut layout = input.clone();
    let mut acc: Option<SparseOp> = None;
    for step in steps {
        let (next, lifted) = embed(step.op, &layout, step)?;
        acc = Some(match acc {
            None => lifted,
            Some(prev) => lifted.matmul(&prev)?,
        });
        layout = next;
    }
    let acc = acc.unwrap_or_else(|| SparseOp::identity(input.total_dim()));
    let pos = layout.positions(output_order)?;
    if pos.len() != layout.len() {
        return Err(Error::Layout(format!(
            "output order {output_order:?} does not cover {:?}",
            layout.labels()
        )));
    }
    let target = layout.select(&pos);
    let remap = |g: usize| {
        let d = layout.digits(g);
        target.index(&pos.iter().map(|&p| d[p]).collect::<Vec<_>>())
    };
    Ok(SparseOp::from_triplets(
        acc.rows(),
        acc.cols(),
        acc.entries().iter().map(|&(c, r, v)| (remap(r), c, v)).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{random_unitary, C64};
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_dense_kronecker_and_swap() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_unitary(2, &mut rng);
        let b = random_unitary(3, &mut rng);
        let (sa, sb) = (SparseOp::from_dense(&a), SparseOp::from_dense(&b));
        let input = SystemLayout::new([("P", 2), ("Q", 3)]).unwrap();
        let steps = [
            Step {
                op: &sb,
                targets: vec!["Q".into()],
                op_in: vec![3],
                op_out: SystemLayout::single("Q2", 3).unwrap(),
            },
            Step {
                op: &sa,
                targets: vec!["P".into()],
                op_in: vec![2],
                op_out: SystemLayout::single("P2", 2).unwrap(),
            },
        ];
        let same = compile(&input, &steps, &["P2".into(), "Q2".into()]).unwrap();
        assert!((same.to_dense() - a.kronecker(&b)).camax() < 1e-14);
        let swapped = compile(&input, &steps, &["Q2".into(), "P2".into()]).unwrap();
        let mut swap = DMatrix::<C64>::zeros(6, 6);
        for p in 0..2 {
            for q in 0..3 {
                swap[(q * 2 + p, p * 3 + q)] = C64::new(1.0, 0.0);
            }
        }
        assert!((swapped.to_dense() - swap * a.kronecker(&b)).camax() < 1e-14);
    }
}
