//! Symmetric m-tensors on R³ stored by sorted multi-index, their grid fields,
//! contraction with directions, the scalar product, divergence and the
//! partial contraction ("convolution") of two tensors.
//!
//! A sorted multi-index i1 ≤ … ≤ im over {0,1,2} is identified with its
//! occupation counts (n0, n1, n2); the component count is C(m+2, 2) and the
//! multiplicity of a sorted index is m!/(n0! n1! n2!).

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{ArtError, Result};
use crate::geometry::{Direction, Grid3};

/// Highest rank with a cached index table.
pub const MAX_RANK: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Number of independent components of a symmetric rank-m tensor in 3-D.
pub fn component_count(rank: usize) -> usize {
    (rank + 1) * (rank + 2) / 2
}

/// Position of the sorted index with counts `c` inside a rank-`m` table.
pub fn position(counts: [usize; 3]) -> usize {
    let m = counts[0] + counts[1] + counts[2];
    let r = m - counts[0];
    r * (r + 1) / 2 + (r - counts[1])
}

/// Sorted multi-indices of one rank with their multiplicities.
#[derive(Debug, Clone)]
pub struct IndexTable {
    pub rank: usize,
    pub counts: Vec<[usize; 3]>,
    pub multiplicity: Vec<f64>,
}

impl IndexTable {
    fn build(rank: usize) -> Self {
        let mut counts = Vec::with_capacity(component_count(rank));
        for n0 in (0..=rank).rev() {
            for n1 in (0..=rank - n0).rev() {
                counts.push([n0, n1, rank - n0 - n1]);
            }
        }
        let fact = |n: usize| (1..=n).map(|v| v as f64).product::<f64>();
        let multiplicity = counts
            .iter()
            .map(|c| fact(rank) / (fact(c[0]) * fact(c[1]) * fact(c[2])))
            .collect();
        IndexTable {
            rank,
            counts,
            multiplicity,
        }
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// The sorted index tuple (values in 0..3) of component `c`.
    pub fn indices(&self, c: usize) -> Vec<usize> {
        let n = self.counts[c];
        let mut v = Vec::with_capacity(self.rank);
        for (axis, &cnt) in n.iter().enumerate() {
            v.extend(std::iter::repeat_n(axis, cnt));
        }
        v
    }
}

/// Cached index table of the given rank.
pub fn index_table(rank: usize) -> &'static IndexTable {
    static TABLES: OnceLock<Vec<IndexTable>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| (0..=MAX_RANK).map(IndexTable::build).collect());
    assert!(
        rank <= MAX_RANK,
        "tensor rank {rank} exceeds supported maximum {MAX_RANK}"
    );
    &tables[rank]
}

/// Monomial ξ^{n0}_1 ξ^{n1}_2 ξ^{n2}_3 for every sorted index of `rank`.
pub fn direction_monomials(xi: &Direction, rank: usize) -> Vec<f64> {
    let c = xi.components();
    index_table(rank)
        .counts
        .iter()
        .map(|n| c[0].powi(n[0] as i32) * c[1].powi(n[1] as i32) * c[2].powi(n[2] as i32))
        .collect()
}

/// A symmetric tensor of rank m with complex components.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor {
    rank: usize,
    components: Vec<Complex64>,
}

impl SymTensor {
    pub fn zeros(rank: usize) -> Self {
        SymTensor {
            rank,
            components: vec![ZERO; component_count(rank)],
        }
    }

    pub fn scalar(v: Complex64) -> Self {
        SymTensor {
            rank: 0,
            components: vec![v],
        }
    }

    pub fn from_components(rank: usize, components: Vec<Complex64>) -> Result<Self> {
        if components.len() != component_count(rank) {
            return Err(ArtError::arg(format!(
                "rank {rank} tensor needs {} components, got {}",
                component_count(rank),
                components.len()
            )));
        }
        Ok(SymTensor { rank, components })
    }

    pub fn from_real(rank: usize, components: &[f64]) -> Result<Self> {
        SymTensor::from_components(
            rank,
            components.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// Kronecker δ_ij.
    pub fn kronecker() -> Self {
        let mut t = SymTensor::zeros(2);
        for a in 0..3 {
            let mut c = [0; 3];
            c[a] = 2;
            t.components[position(c)] = Complex64::new(1.0, 0.0);
        }
        t
    }

    /// Rank-1 tensor with the given components.
    pub fn vector(v: [Complex64; 3]) -> Self {
        // position([1,0,0]) = 0, position([0,1,0]) = 1, position([0,0,1]) = 2
        SymTensor {
            rank: 1,
            components: v.to_vec(),
        }
    }

    /// The symmetric power ξ⊗…⊗ξ.
    pub fn direction_power(xi: &Direction, rank: usize) -> Self {
        SymTensor {
            rank,
            components: direction_monomials(xi, rank)
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [Complex64] {
        &mut self.components
    }

    /// Component at an arbitrary (unsorted) index tuple.
    pub fn get(&self, idx: &[usize]) -> Complex64 {
        assert_eq!(idx.len(), self.rank, "index length must match the rank");
        let mut c = [0; 3];
        for &i in idx {
            c[i] += 1;
        }
        self.components[position(c)]
    }

    pub fn get_counts(&self, counts: [usize; 3]) -> Complex64 {
        self.components[position(counts)]
    }

    pub fn scale(&self, a: Complex64) -> SymTensor {
        SymTensor {
            rank: self.rank,
            components: self.components.iter().map(|v| v * a).collect(),
        }
    }

    pub fn add(&self, other: &SymTensor) -> Result<SymTensor> {
        if self.rank != other.rank {
            return Err(ArtError::arg(format!(
                "cannot add tensors of rank {} and {}",
                self.rank, other.rank
            )));
        }
        Ok(SymTensor {
            rank: self.rank,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// w_{i1…im} ξ^{i1}…ξ^{im}.
pub fn contract_direction(w: &SymTensor, xi: &Direction) -> Complex64 {
    let table = index_table(w.rank);
    let mono = direction_monomials(xi, w.rank);
    w.components
        .iter()
        .zip(&mono)
        .zip(&table.multiplicity)
        .fold(ZERO, |acc, ((c, m), k)| acc + c * (m * k))
}

/// u_{i1…im} v^{i1…im} summed over all 3^m index tuples.
pub fn sym_inner(u: &SymTensor, v: &SymTensor) -> Result<Complex64> {
    if u.rank != v.rank {
        return Err(ArtError::arg(format!(
            "scalar product needs equal ranks, got {} and {}",
            u.rank, v.rank
        )));
    }
    let table = index_table(u.rank);
    Ok(u.components
        .iter()
        .zip(&v.components)
        .zip(&table.multiplicity)
        .fold(ZERO, |acc, ((a, b), k)| acc + a * b * *k))
}

/// (Q ∗ E)^{j1…j(p−1)} = Q_{l1…lr} E^{l1…lr j1…j(p−1)}.
pub fn convolve_tensor(q: &SymTensor, e: &SymTensor) -> Result<SymTensor> {
    if e.rank < q.rank {
        return Err(ArtError::arg(format!(
            "cannot contract rank {} against rank {}",
            q.rank, e.rank
        )));
    }
    let out_rank = e.rank - q.rank;
    let qt = index_table(q.rank);
    let ot = index_table(out_rank);
    let mut out = SymTensor::zeros(out_rank);
    for (o, oc) in ot.counts.iter().enumerate() {
        let mut acc = ZERO;
        for (l, lc) in qt.counts.iter().enumerate() {
            let ec = [oc[0] + lc[0], oc[1] + lc[1], oc[2] + lc[2]];
            acc += q.components[l] * e.components[position(ec)] * qt.multiplicity[l];
        }
        out.components[o] = acc;
    }
    Ok(out)
}

/// A symmetric tensor field sampled on a [`Grid3`], stored component-major
/// with x the fastest node index.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensorGridField {
    pub rank: usize,
    pub grid: Grid3,
    pub data: Vec<Complex64>,
}

impl SymTensorGridField {
    pub fn zeros(rank: usize, grid: Grid3) -> Self {
        SymTensorGridField {
            rank,
            grid,
            data: vec![ZERO; component_count(rank) * grid.len()],
        }
    }

    pub fn from_data(rank: usize, grid: Grid3, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != component_count(rank) * grid.len() {
            return Err(ArtError::arg(format!(
                "rank {rank} field on {:?} needs {} values, got {}",
                grid.dims,
                component_count(rank) * grid.len(),
                data.len()
            )));
        }
        Ok(SymTensorGridField { rank, grid, data })
    }

    /// Field whose node values come from `f` (called once per node, in index order).
    pub fn from_fn<F>(rank: usize, grid: Grid3, mut f: F) -> Self
    where
        F: FnMut(usize) -> SymTensor,
    {
        let n = grid.len();
        let mut out = SymTensorGridField::zeros(rank, grid);
        for idx in 0..n {
            let t = f(idx);
            debug_assert_eq!(t.rank, rank);
            out.set(idx, &t);
        }
        out
    }

    pub fn ncomp(&self) -> usize {
        component_count(self.rank)
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn at(&self, idx: usize) -> SymTensor {
        let n = self.grid.len();
        SymTensor {
            rank: self.rank,
            components: (0..self.ncomp()).map(|c| self.data[c * n + idx]).collect(),
        }
    }

    pub fn set(&mut self, idx: usize, t: &SymTensor) {
        let n = self.grid.len();
        for (c, v) in t.components.iter().enumerate() {
            self.data[c * n + idx] = *v;
        }
    }

    pub fn value(&self, c: usize, idx: usize) -> Complex64 {
        self.data[c * self.grid.len() + idx]
    }

    pub fn scale(&self, a: Complex64) -> Self {
        SymTensorGridField {
            rank: self.rank,
            grid: self.grid,
            data: self.data.iter().map(|v| v * a).collect(),
        }
    }

    /// `self + a·other`
    pub fn axpy(&self, a: Complex64, other: &SymTensorGridField) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(SymTensorGridField {
            rank: self.rank,
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| x + a * y)
                .collect(),
        })
    }

    pub fn check_compatible(&self, other: &SymTensorGridField) -> Result<()> {
        if self.rank != other.rank || self.grid != other.grid {
            return Err(ArtError::arg(format!(
                "incompatible fields: rank {} on {:?} vs rank {} on {:?}",
                self.rank, self.grid.dims, other.rank, other.grid.dims
            )));
        }
        Ok(())
    }

    /// Pointwise convolution with a constant tensor, see [`convolve_tensor`].
    pub fn convolve_with(&self, q: &SymTensor) -> Result<Self> {
        if self.rank < q.rank {
            return Err(ArtError::arg(format!(
                "convolution of rank {} with field of rank {}",
                q.rank, self.rank
            )));
        }
        let out_rank = self.rank - q.rank;
        let mut out = SymTensorGridField::zeros(out_rank, self.grid);
        for idx in 0..self.grid.len() {
            out.set(idx, &convolve_tensor(q, &self.at(idx))?);
        }
        Ok(out)
    }
}

/// ∂/∂x^axis of a scalar grid column: central differences inside,
/// second-order one-sided stencils on the two faces.
fn axis_derivative(values: &[Complex64], grid: &Grid3, axis: usize, idx: usize) -> Complex64 {
    let ijk = grid.ijk(idx);
    let h = grid.spacing()[axis];
    let n = grid.dims[axis];
    let at = |off: isize| {
        let mut q = ijk;
        q[axis] = (q[axis] as isize + off) as usize;
        values[grid.index(q[0], q[1], q[2])]
    };
    let i = ijk[axis];
    if i == 0 {
        (at(0) * -3.0 + at(1) * 4.0 - at(2)) / (2.0 * h)
    } else if i + 1 == n {
        (at(0) * 3.0 - at(-1) * 4.0 + at(-2)) / (2.0 * h)
    } else {
        (at(1) - at(-1)) / (2.0 * h)
    }
}

/// (δw)_{j1…j(m−1)} = ∂w_{j1…j(m−1)p}/∂x^p.
pub fn divergence(field: &SymTensorGridField) -> Result<SymTensorGridField> {
    if field.rank == 0 {
        return Err(ArtError::arg("divergence of a rank-0 field is undefined"));
    }
    if field.grid.dims.iter().any(|&d| d < 3) {
        return Err(ArtError::arg(format!(
            "divergence needs at least 3 nodes per axis, got {:?}",
            field.grid.dims
        )));
    }
    let out_rank = field.rank - 1;
    let grid = field.grid;
    let mut out = SymTensorGridField::zeros(out_rank, grid);
    let n = grid.len();
    for (o, oc) in index_table(out_rank).counts.iter().enumerate() {
        for axis in 0..3 {
            let mut c = *oc;
            c[axis] += 1;
            let src = field.component(position(c));
            for idx in 0..n {
                out.data[o * n + idx] += axis_derivative(src, &grid, axis, idx);
            }
        }
    }
    Ok(out)
}

/// `n` nested applications of [`divergence`].
pub fn divergence_power(field: &SymTensorGridField, n: usize) -> Result<SymTensorGridField> {
    let mut f = field.clone();
    for _ in 0..n {
        f = divergence(&f)?;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_tensor(rng: &mut ChaCha8Rng, rank: usize) -> SymTensor {
        let comps = (0..component_count(rank))
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        SymTensor::from_components(rank, comps).unwrap()
    }

    /// Visits every index tuple in {0,1,2}^m.
    fn all_tuples(m: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..m {
            out = out
                .into_iter()
                .flat_map(|t| {
                    (0..3).map(move |i| {
                        let mut u = t.clone();
                        u.push(i);
                        u
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn index_table_layout() {
        for m in 0..=6 {
            let t = index_table(m);
            assert_eq!(t.len(), component_count(m));
            for (i, cnt) in t.counts.iter().enumerate() {
                assert_eq!(position(*cnt), i);
            }
            let total: f64 = t.multiplicity.iter().sum();
            assert_eq!(total, 3f64.powi(m as i32));
        }
        assert_eq!(index_table(3).indices(0), vec![0, 0, 0]);
        assert_eq!(index_table(2).indices(4), vec![1, 2]);
    }

    #[test]
    fn contraction_examples() {
        let w = SymTensor::vector([c(1.0), c(0.0), c(0.0)]);
        assert_eq!(contract_direction(&w, &Direction::e2()), c(0.0));
        let d = SymTensor::kronecker();
        for xi in [Direction::e1(), Direction::new(0.3, -0.5, 0.8).unwrap()] {
            assert!((contract_direction(&d, &xi) - 1.0).norm() < 1e-15);
        }
        let s = SymTensor::scalar(Complex64::new(2.0, -1.0));
        assert_eq!(
            contract_direction(&s, &Direction::e3()),
            Complex64::new(2.0, -1.0)
        );
    }

    #[test]
    fn contraction_matches_full_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let w = random_tensor(&mut rng, 3);
            let xi =
                Direction::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.4).unwrap();
            let x = xi.components();
            let naive = all_tuples(3)
                .iter()
                .fold(Complex64::new(0.0, 0.0), |acc, t| {
                    acc + w.get(t) * (x[t[0]] * x[t[1]] * x[t[2]])
                });
            assert!((contract_direction(&w, &xi) - naive).norm() < 1e-13);
        }
    }

    #[test]
    fn inner_product_examples() {
        let d = SymTensor::kronecker();
        assert!((sym_inner(&d, &d).unwrap() - 3.0).norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_tensor(&mut rng, 2);
        assert_eq!(sym_inner(&u, &SymTensor::zeros(2)).unwrap(), c(0.0));
        for _ in 0..10 {
            let u = random_tensor(&mut rng, 2);
            let v = random_tensor(&mut rng, 2);
            let naive = all_tuples(2)
                .iter()
                .fold(Complex64::new(0.0, 0.0), |acc, t| acc + u.get(t) * v.get(t));
            assert!((sym_inner(&u, &v).unwrap() - naive).norm() < 1e-13);
        }
        assert!(sym_inner(&u, &SymTensor::zeros(3)).is_err());
    }

    #[test]
    fn convolution_examples() {
        let q = SymTensor::vector([c(1.0), c(0.0), c(0.0)]);
        let e = SymTensor::vector([c(2.0), c(3.0), c(4.0)]);
        let out = convolve_tensor(&q, &e).unwrap();
        assert_eq!(out.rank(), 0);
        assert_eq!(out.components()[0], c(2.0));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e3 = random_tensor(&mut rng, 3);
        let z = convolve_tensor(&SymTensor::zeros(2), &e3).unwrap();
        assert_eq!(z.max_abs(), 0.0);

        for _ in 0..10 {
            let q = random_tensor(&mut rng, 2);
            let e = random_tensor(&mut rng, 3);
            let out = convolve_tensor(&q, &e).unwrap();
            for j in 0..3 {
                let naive = all_tuples(2)
                    .iter()
                    .fold(Complex64::new(0.0, 0.0), |acc, l| {
                        acc + q.get(l) * e.get(&[l[0], l[1], j])
                    });
                assert!((out.get(&[j]) - naive).norm() < 1e-13);
            }
        }
        assert!(convolve_tensor(&random_tensor(&mut rng, 2), &random_tensor(&mut rng, 1)).is_err());
    }

    fn cube(n: usize) -> Grid3 {
        Grid3::new(
            [n, n + 1, n + 2],
            Point3::new(-0.5, -0.7, -0.3),
            Point3::new(0.9, 0.4, 0.8),
        )
        .unwrap()
    }

    #[test]
    fn divergence_of_constant_and_linear_fields() {
        let g = cube(6);
        let k = SymTensor::kronecker().scale(Complex64::new(0.5, 2.0));
        let f = SymTensorGridField::from_fn(2, g, |_| k.clone());
        let d = divergence(&f).unwrap();
        assert!(d.data.iter().all(|v| v.norm() < 1e-12));

        let lin = SymTensorGridField::from_fn(1, g, |idx| {
            let p = g.node_at(idx);
            SymTensor::vector([c(p.0[0]), c(p.0[1]), c(p.0[2])])
        });
        let d = divergence(&lin).unwrap();
        // one-sided stencils are also exact on linear data
        for v in &d.data {
            assert!((v - 3.0).norm() < 1e-12);
        }
    }

    #[test]
    fn divergence_of_quadratic_rank_two_field() {
        let g = cube(7);
        let f = SymTensorGridField::from_fn(2, g, |idx| {
            let p = g.node_at(idx).0;
            let mut t = SymTensor::zeros(2);
            for a in 0..3 {
                for b in a..3 {
                    let mut cnt = [0; 3];
                    cnt[a] += 1;
                    cnt[b] += 1;
                    t.components_mut()[position(cnt)] = c(p[a] * p[b]);
                }
            }
            t
        });
        let d = divergence(&f).unwrap();
        for idx in 0..g.len() {
            let p = g.node_at(idx).0;
            for (a, pa) in p.iter().enumerate() {
                assert!((d.value(a, idx) - 4.0 * pa).norm() < 1e-12);
            }
        }
        assert!(divergence(&SymTensorGridField::zeros(0, g)).is_err());
    }
}
