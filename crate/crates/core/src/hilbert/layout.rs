use serde::{Deserialize, Serialize};

use crate::error::{layout_err, Result};

/// Ordered list of labelled tensor factors. Basis indices are row-major: the
/// first factor is the most significant digit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(String, usize)>", into = "Vec<(String, usize)>")]
pub struct SystemLayout {
    parts: Vec<(String, usize)>,
}

impl TryFrom<Vec<(String, usize)>> for SystemLayout {
    type Error = crate::Error;

    fn try_from(parts: Vec<(String, usize)>) -> Result<Self> {
        SystemLayout::new(parts)
    }
}

impl From<SystemLayout> for Vec<(String, usize)> {
    fn from(l: SystemLayout) -> Self {
        l.parts
    }
}

impl SystemLayout {
    pub fn new<S: Into<String>>(parts: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let parts: Vec<(String, usize)> = parts.into_iter().map(|(l, d)| (l.into(), d)).collect();
        for (i, (label, dim)) in parts.iter().enumerate() {
            if *dim == 0 {
                return layout_err(format!("factor '{label}' has dimension 0"));
            }
            if parts[..i].iter().any(|(l, _)| l == label) {
                return layout_err(format!("duplicate label '{label}'"));
            }
        }
        Ok(SystemLayout { parts })
    }

    /// Layout with no factors (total dimension 1).
    pub fn empty() -> Self {
        SystemLayout { parts: Vec::new() }
    }

    /// `n` factors `prefix1..prefixn`, each of dimension `dim`.
    pub fn numbered(prefix: &str, n: usize, dim: usize) -> Self {
        SystemLayout::new((1..=n).map(|i| (format!("{prefix}{i}"), dim)))
            .expect("numbered labels are distinct")
    }

    pub fn single(label: &str, dim: usize) -> Result<Self> {
        SystemLayout::new([(label, dim)])
    }

    pub fn parts(&self) -> &[(String, usize)] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.parts.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(|(_, d)| *d).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.parts.iter().map(|(_, d)| *d).product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.parts.iter().position(|(l, _)| l == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn dim_of(&self, label: &str) -> Option<usize> {
        self.position(label).map(|p| self.parts[p].1)
    }

    /// Positions of `labels`, in the order given. Unknown or repeated labels fail.
    pub fn positions<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let l = l.as_ref();
            let Some(p) = self.position(l) else {
                return layout_err(format!("unknown label '{l}' (layout has {:?})", self.labels()));
            };
            if out.contains(&p) {
                return layout_err(format!("label '{l}' listed twice"));
            }
            out.push(p);
        }
        Ok(out)
    }

    /// Sub-layout made of the given positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> SystemLayout {
        SystemLayout {
            parts: positions.iter().map(|&p| self.parts[p].clone()).collect(),
        }
    }

    pub fn concat(&self, other: &SystemLayout) -> Result<SystemLayout> {
        SystemLayout::new(self.parts.iter().cloned().chain(other.parts.iter().cloned()))
    }

    /// Same dimensions, new labels.
    pub fn relabel<S: AsRef<str>>(&self, labels: &[S]) -> Result<SystemLayout> {
        if labels.len() != self.len() {
            return layout_err(format!(
                "relabel expects {} labels, got {}",
                self.len(),
                labels.len()
            ));
        }
        SystemLayout::new(
            labels
                .iter()
                .zip(&self.parts)
                .map(|(l, (_, d))| (l.as_ref().to_string(), *d)),
        )
    }

    /// Labels prefixed with `prefix`.
    pub fn prefixed(&self, prefix: &str) -> SystemLayout {
        SystemLayout {
            parts: self
                .parts
                .iter()
                .map(|(l, d)| (format!("{prefix}{l}"), *d))
                .collect(),
        }
    }

    /// True when both layouts have the same dimension sequence.
    pub fn same_shape(&self, other: &SystemLayout) -> bool {
        self.dims() == other.dims()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.parts.len()];
        for i in (0..self.parts.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.parts[i + 1].1;
        }
        strides
    }

    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.parts.len()];
        for (i, (_, d)) in self.parts.iter().enumerate().rev() {
            out[i] = index % d;
            index /= d;
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.parts)
            .fold(0, |acc, (&x, (_, d))| acc * d + x)
    }
}

/// Index bookkeeping for an operator acting on some factors of a layout.
///
/// The acted-on factors are removed and the operator's output factors are
/// inserted at the position of the first of them.
#[derive(Clone, Debug)]
pub struct Placement {
    input: SystemLayout,
    output: SystemLayout,
    targets: Vec<usize>,
    target_dim: usize,
    out_dim: usize,
    pre: Vec<usize>,
    post: Vec<usize>,
    post_dim: usize,
    rest_dim: usize,
}

impl Placement {
    /// `targets` are labels of `layout`, in the order the operator expects its
    /// input; `op_out` is the operator's output layout.
    pub fn new<S: AsRef<str>>(
        layout: &SystemLayout,
        targets: &[S],
        op_in_dims: &[usize],
        op_out: &SystemLayout,
    ) -> Result<Placement> {
        let pos = layout.positions(targets)?;
        let dims: Vec<usize> = pos.iter().map(|&p| layout.parts[p].1).collect();
        if dims != op_in_dims {
            return layout_err(format!(
                "operator expects input dims {op_in_dims:?}, factors {:?} have {dims:?}",
                targets.iter().map(|t| t.as_ref()).collect::<Vec<_>>()
            ));
        }
        let insert_at = pos.iter().copied().min().unwrap_or(layout.len());
        let pre: Vec<usize> = (0..insert_at).filter(|p| !pos.contains(p)).collect();
        let post: Vec<usize> = (insert_at..layout.len()).filter(|p| !pos.contains(p)).collect();
        let mut parts: Vec<(String, usize)> = pre.iter().map(|&p| layout.parts[p].clone()).collect();
        parts.extend(op_out.parts.iter().cloned());
        parts.extend(post.iter().map(|&p| layout.parts[p].clone()));
        let output = SystemLayout::new(parts)?;
        let post_dim = post.iter().map(|&p| layout.parts[p].1).product();
        let rest_dim = pre.iter().map(|&p| layout.parts[p].1).product::<usize>() * post_dim;
        Ok(Placement {
            input: layout.clone(),
            output,
            target_dim: dims.iter().product(),
            out_dim: op_out.total_dim(),
            targets: pos,
            pre,
            post,
            post_dim,
            rest_dim,
        })
    }

    pub fn output_layout(&self) -> &SystemLayout {
        &self.output
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn rest_dim(&self) -> usize {
        self.rest_dim
    }

    /// Split an input basis index into (operator input index, rest index).
    pub fn split(&self, index: usize) -> (usize, usize) {
        let digits = self.input.digits(index);
        let t = self
            .targets
            .iter()
            .fold(0, |acc, &p| acc * self.input.parts[p].1 + digits[p]);
        let pre = self
            .pre
            .iter()
            .fold(0, |acc, &p| acc * self.input.parts[p].1 + digits[p]);
        let post = self
            .post
            .iter()
            .fold(0, |acc, &p| acc * self.input.parts[p].1 + digits[p]);
        (t, pre * self.post_dim + post)
    }

    /// Output basis index for operator output index `o` and rest index `rest`.
    pub fn join(&self, o: usize, rest: usize) -> usize {
        let pre = rest / self.post_dim;
        let post = rest % self.post_dim;
        (pre * self.out_dim + o) * self.post_dim + post
    }

    /// Input basis index for operator input index `t` and rest index `rest`.
    pub fn join_input(&self, t: usize, rest: usize) -> usize {
        let mut digits = vec![0; self.input.len()];
        let mut t = t;
        for &p in self.targets.iter().rev() {
            let d = self.input.parts[p].1;
            digits[p] = t % d;
            t /= d;
        }
        let mut pre = rest / self.post_dim;
        let mut post = rest % self.post_dim;
        for &p in self.post.iter().rev() {
            let d = self.input.parts[p].1;
            digits[p] = post % d;
            post /= d;
        }
        for &p in self.pre.iter().rev() {
            let d = self.input.parts[p].1;
            digits[p] = pre % d;
            pre /= d;
        }
        self.input.index(&digits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_zero_dims() {
        assert!(SystemLayout::new([("A", 2), ("A", 3)]).is_err());
        assert!(SystemLayout::new([("A", 0)]).is_err());
        assert_eq!(SystemLayout::new([("A", 2), ("B", 3)]).unwrap().total_dim(), 6);
        assert_eq!(SystemLayout::empty().total_dim(), 1);
    }

    #[test]
    fn digits_roundtrip() {
        let l = SystemLayout::new([("A", 2), ("B", 3), ("C", 4)]).unwrap();
        for i in 0..l.total_dim() {
            assert_eq!(l.index(&l.digits(i)), i);
        }
        assert_eq!(l.digits(23), vec![1, 2, 3]);
    }

    #[test]
    fn placement_split_join() {
        let l = SystemLayout::new([("A", 2), ("B", 3), ("C", 2), ("D", 3)]).unwrap();
        let out = SystemLayout::new([("X", 5)]).unwrap();
        let p = Placement::new(&l, &["D", "B"], &[3, 3], &out).unwrap();
        assert_eq!(p.output_layout().labels(), vec!["A", "X", "C"]);
        for g in 0..l.total_dim() {
            let (t, r) = p.split(g);
            assert_eq!(p.join_input(t, r), g);
            let d = l.digits(g);
            assert_eq!(t, d[3] * 3 + d[1]);
            let o = p.join(4, r);
            let od = p.output_layout().digits(o);
            assert_eq!(od, vec![d[0], 4, d[2]]);
        }
    }
}
