use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::layout::SystemLayout;
use super::state::{partial_trace, DensityMatrix};
use super::C64;
use crate::error::Result;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector (normalized standard complex Gaussian).
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<C64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| gaussian(rng));
        let n = v.norm();
        if n > 1e-300 {
            return v / C64::new(n, 0.0);
        }
    }
}

/// Rank-one projector onto a Haar-random vector.
pub fn random_pure<R: Rng + ?Sized>(layout: &SystemLayout, rng: &mut R) -> DensityMatrix {
    let v = random_unit_vector(layout.total_dim(), rng);
    DensityMatrix::pure(layout.clone(), &v).expect("unit vector fits layout")
}

/// Random mixed state: marginal of a Haar-random pure state with an ancilla of
/// dimension `ancilla_dim` (rank at most `ancilla_dim`).
pub fn random_mixed<R: Rng + ?Sized>(
    layout: &SystemLayout,
    ancilla_dim: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let anc = "__ancilla";
    let full = layout.concat(&SystemLayout::single(anc, ancilla_dim)?)?;
    let pure = random_pure(&full, rng);
    partial_trace(&pure, &layout.labels())
}

/// Haar-random unitary via QR of a Ginibre matrix with the phase correction.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / C64::new(d.norm(), 0.0) } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `U ρ U†` on the full space.
pub fn conjugate(s: &DensityMatrix, u: &DMatrix<C64>) -> DensityMatrix {
    DensityMatrix::from_raw(s.layout().clone(), u * s.matrix() * u.adjoint())
}
