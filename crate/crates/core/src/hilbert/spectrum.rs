use nalgebra::DMatrix;

use super::C64;

/// Entries below this magnitude do not connect two basis indices when the
/// matrix is split into independent diagonal blocks.
const BLOCK_CUTOFF: f64 = 1e-15;

/// Connected components of the nonzero pattern of a square matrix.
pub(crate) fn blocks(m: &DMatrix<C64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for j in 0..n {
        for i in 0..j {
            if m[(i, j)].norm() > BLOCK_CUTOFF || m[(j, i)].norm() > BLOCK_CUTOFF {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Eigenvalues of a Hermitian matrix, computed block by block.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows());
    for block in blocks(m) {
        if block.len() == 1 {
            out.push(m[(block[0], block[0])].re);
            continue;
        }
        let sub = DMatrix::from_fn(block.len(), block.len(), |i, j| m[(block[i], block[j])]);
        let sub = (&sub + sub.adjoint()) * C64::new(0.5, 0.0);
        out.extend(sub.symmetric_eigenvalues().iter().copied());
    }
    out
}

/// Shannon entropy (bits) of a list of eigenvalues that are already clipped to [0, 1].
pub fn shannon_bits(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .filter(|&p| p > 0.0)
        .fold(0.0, |acc, p| acc - p * p.log2())
}
