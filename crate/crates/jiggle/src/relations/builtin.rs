use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::distribution::{complement, Distribution};
use super::jet::Jet1;
use super::oracle::{elementary_directions, floor, generic_directions, RelationOracle};
use crate::complex::SimplicialComplex;
use crate::subdivision::ModelCatalog;
use crate::{Error, Result};

/// Singular values in decreasing order.
pub(crate) fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

fn smallest_singular_value(a: &DMatrix<f64>) -> f64 {
    singular_values(a).last().copied().unwrap_or(f64::INFINITY)
}

/// `U Vᵀ` from a thin SVD of `a`: adding `c U Vᵀ` raises every singular
/// value of `a` by `c`.
fn polar_direction(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return None;
    }
    let svd = a.clone().svd(true, true);
    Some(svd.u? * svd.v_t?)
}

/// Slopes of maximal rank `min(m, n)`.
#[derive(Clone, Debug)]
pub struct MaxRank {
    pub m: usize,
    pub n: usize,
}

pub fn maxrank_relation(m: usize, n: usize) -> MaxRank {
    MaxRank { m, n }
}

impl RelationOracle for MaxRank {
    fn name(&self) -> &str {
        "maxrank"
    }

    fn margin(&self, j: &Jet1) -> f64 {
        floor(smallest_singular_value(&j.slope))
    }

    fn check_domain(&self, j: &Jet1) -> Result<()> {
        check_dims(j, self.m, self.n)
    }

    fn directions(&self, j: &Jet1) -> Vec<DMatrix<f64>> {
        let mut d = elementary_directions(self.n, self.m);
        d.extend(polar_direction(&j.slope));
        d
    }
}

fn check_dims(j: &Jet1, m: usize, n: usize) -> Result<()> {
    if j.domain_dim() != m || j.target_dim() != n {
        return Err(Error::Invalid(format!(
            "jet has dimensions {}→{}, relation expects {m}→{n}",
            j.domain_dim(),
            j.target_dim()
        )));
    }
    Ok(())
}

/// Slopes whose image together with `ξ` at the value has dimension
/// `min(n, m + r)`.
#[derive(Clone, Debug)]
pub struct Transverse {
    pub xi: Distribution,
    pub m: usize,
}

pub fn transversality_relation(xi: Distribution, m: usize) -> Transverse {
    Transverse { xi, m }
}

impl RelationOracle for Transverse {
    fn name(&self) -> &str {
        "transverse"
    }

    fn margin(&self, j: &Jet1) -> f64 {
        let frame = self.xi.frame_at(&j.value);
        let stacked = stack(&j.slope, &frame);
        floor(smallest_singular_value(&stacked))
    }

    fn check_domain(&self, j: &Jet1) -> Result<()> {
        check_dims(j, self.m, self.xi.dim())
    }

    fn directions(&self, j: &Jet1) -> Vec<DMatrix<f64>> {
        let mut d = elementary_directions(self.xi.dim(), self.m);
        d.extend(transverse_direction(&self.xi, j));
        d
    }

    fn value_lipschitz(&self, _j: &Jet1) -> f64 {
        self.xi.lipschitz()
    }
}

fn stack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

/// `W Uᵂ Vᵀ` where `Wᵀ A = Uᵂ Σ Vᵀ` and `W` spans the complement of `ξ`:
/// raises the singular values of the complement part of the slope.
fn transverse_direction(xi: &Distribution, j: &Jet1) -> Option<DMatrix<f64>> {
    let w = xi.complement_at(&j.value);
    let b = w.transpose() * &j.slope;
    polar_direction(&b).map(|p| w * p)
}

/// Contact condition `α ∧ dα ≠ 0` for a 1-form `α = Σ s_i dx_i` on `R³`,
/// read from the jet of `s : R³ → R³ \ 0`.
#[derive(Clone, Debug, Default)]
pub struct Contact3d;

pub fn contact3d_relation() -> Contact3d {
    Contact3d
}

/// `(A₃₂ − A₂₃, A₁₃ − A₃₁, A₂₁ − A₁₂)`.
pub fn curl(a: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_vec(vec![
        a[(2, 1)] - a[(1, 2)],
        a[(0, 2)] - a[(2, 0)],
        a[(1, 0)] - a[(0, 1)],
    ])
}

/// The skew matrix with curl `u`.
pub fn rotation_generator(u: &DVector<f64>) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(3, 3);
    k[(2, 1)] = u[0] / 2.0;
    k[(1, 2)] = -u[0] / 2.0;
    k[(0, 2)] = u[1] / 2.0;
    k[(2, 0)] = -u[1] / 2.0;
    k[(1, 0)] = u[2] / 2.0;
    k[(0, 1)] = -u[2] / 2.0;
    k
}

impl RelationOracle for Contact3d {
    fn name(&self) -> &str {
        "contact3d"
    }

    fn margin(&self, j: &Jet1) -> f64 {
        if j.domain_dim() != 3 || j.target_dim() != 3 {
            return 0.0;
        }
        let s = &j.value;
        floor(s.dot(&curl(&j.slope)).abs() / (1.0 + s.norm()))
    }

    fn check_domain(&self, j: &Jet1) -> Result<()> {
        check_dims(j, 3, 3)?;
        if j.value.iter().all(|&x| x == 0.0) {
            return Err(Error::ZeroValue);
        }
        Ok(())
    }

    fn directions(&self, j: &Jet1) -> Vec<DMatrix<f64>> {
        let mut d = elementary_directions(3, 3);
        for i in 0..3 {
            let mut e = DVector::zeros(3);
            e[i] = 1.0;
            d.push(rotation_generator(&e));
            d.push(-rotation_generator(&e));
        }
        let s = &j.value;
        if s.norm() > 0.0 {
            let sign = if s.dot(&curl(&j.slope)) < 0.0 { -1.0 } else { 1.0 };
            let g = rotation_generator(&(s / s.norm() * sign));
            d.push(g.clone());
            d.push(-g);
        }
        d
    }

    fn value_lipschitz(&self, j: &Jet1) -> f64 {
        2.0 * (1.0 + curl(&j.slope).norm())
    }
}

/// Very general position of an `m`-simplex with respect to `ξ`: for every
/// face direction space `F` of the model simplices of its root, `F` is
/// transverse to the preimage plane `W = A⁻¹(ξ_value)`. Requires `m = N`
/// so that jets are taken in ambient coordinates.
#[derive(Clone, Debug)]
pub struct VeryGenPos {
    pub xi: Distribution,
    pub m: usize,
    /// Orthonormal `m × d` bases of the face direction spaces.
    pub faces: Vec<DMatrix<f64>>,
}

impl VeryGenPos {
    pub fn new(xi: Distribution, m: usize, faces: Vec<DMatrix<f64>>) -> Result<Self> {
        if faces.iter().any(|f| f.nrows() != m) {
            return Err(Error::Invalid("face directions must live in the domain".into()));
        }
        Ok(Self { xi, m, faces })
    }

    /// Transversality margin of the slope itself and a basis of `W`.
    fn preimage(&self, j: &Jet1) -> (f64, DMatrix<f64>) {
        let c = self.xi.complement_at(&j.value);
        let b = c.transpose() * &j.slope;
        if b.nrows() == 0 {
            return (f64::INFINITY, DMatrix::identity(self.m, self.m));
        }
        let svd = b.clone().svd(false, true);
        let tau = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
        let rows = svd.v_t.expect("requested").transpose();
        (tau, complement(&rows))
    }

    /// Angle margins of each face against `W`, in the order of `faces`.
    pub fn face_margins(&self, j: &Jet1) -> (f64, Vec<f64>) {
        let (tau, w) = self.preimage(j);
        let margins = self
            .faces
            .iter()
            .map(|f| smallest_singular_value(&stack(f, &w)))
            .collect();
        (tau, margins)
    }
}

/// One very-general-position relation per top simplex of `k`, with faces
/// taken from the model catalog of `k`.
pub fn verygenpos_relation(k: &SimplicialComplex, xi: &Distribution) -> Result<Vec<VeryGenPos>> {
    let m = k.dim().unwrap_or(0);
    if m != k.ambient_dim() || xi.dim() != m {
        return Err(Error::Invalid("very general position needs m = N = n".into()));
    }
    let catalog = ModelCatalog::build(k)?;
    (0..k.top().len())
        .map(|r| VeryGenPos::new(xi.clone(), m, catalog.face_directions(r)))
        .collect()
}

impl RelationOracle for VeryGenPos {
    fn name(&self) -> &str {
        "verygenpos"
    }

    fn margin(&self, j: &Jet1) -> f64 {
        let (tau, faces) = self.face_margins(j);
        floor(faces.into_iter().fold(tau.min(1.0), f64::min))
    }

    fn check_domain(&self, j: &Jet1) -> Result<()> {
        check_dims(j, self.m, self.xi.dim())
    }

    fn directions(&self, j: &Jet1) -> Vec<DMatrix<f64>> {
        let n = self.xi.dim();
        let mut d = elementary_directions(n, self.m);
        d.extend(transverse_direction(&self.xi, j));
        d.extend(generic_directions(n, self.m, 16));
        d
    }

    fn value_lipschitz(&self, _j: &Jet1) -> f64 {
        self.xi.lipschitz()
    }

    fn probe_openness(&self) -> bool {
        false
    }
}

/// Intersection of relations: the margin is the smallest margin.
#[derive(Clone)]
pub struct AllOf {
    pub parts: Vec<Arc<dyn RelationOracle>>,
}

impl RelationOracle for AllOf {
    fn name(&self) -> &str {
        "all_of"
    }

    fn margin(&self, j: &Jet1) -> f64 {
        self.parts.iter().map(|p| p.margin(j)).fold(f64::INFINITY, f64::min)
    }

    fn check_domain(&self, j: &Jet1) -> Result<()> {
        self.parts.iter().try_for_each(|p| p.check_domain(j))
    }

    fn directions(&self, j: &Jet1) -> Vec<DMatrix<f64>> {
        self.parts.iter().flat_map(|p| p.directions(j)).collect()
    }

    fn value_lipschitz(&self, j: &Jet1) -> f64 {
        self.parts.iter().map(|p| p.value_lipschitz(j)).fold(0.0, f64::max)
    }

    fn probe_openness(&self) -> bool {
        self.parts.iter().all(|p| p.probe_openness())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet(base: &[f64], value: &[f64], slope: DMatrix<f64>) -> Jet1 {
        Jet1::new(DVector::from_column_slice(base), DVector::from_column_slice(value), slope).unwrap()
    }

    #[test]
    fn transverse_to_horizontal_lines() {
        let rel = transversality_relation(Distribution::horizontal(2), 1);
        let flat = jet(&[0.0], &[0.0, 0.0], DMatrix::from_column_slice(2, 1, &[1.0, 0.0]));
        assert!(!rel.contains(&flat));
        assert_eq!(rel.margin(&flat), 0.0);
        let up = jet(&[0.0], &[0.0, 0.0], DMatrix::from_column_slice(2, 1, &[0.0, 1.0]));
        assert!((rel.margin(&up) - 1.0).abs() < 1e-15);
        let p = rel.fiber_perturb(&flat, 0.1).unwrap();
        assert!(rel.margin(&p) > 0.0);
        assert!((&p.slope - &flat.slope).norm() < 0.1);
        assert_eq!((p.base, p.value), (flat.base, flat.value));
    }

    #[test]
    fn maxrank_examples() {
        let rel = maxrank_relation(2, 2);
        assert_eq!(rel.margin(&jet(&[0.0, 0.0], &[0.0, 0.0], DMatrix::zeros(2, 2))), 0.0);
        assert!((rel.margin(&jet(&[0.0, 0.0], &[0.0, 0.0], DMatrix::identity(2, 2))) - 1.0).abs() < 1e-15);
        let p = rel.fiber_perturb(&jet(&[0.0, 0.0], &[0.0, 0.0], DMatrix::zeros(2, 2)), 0.1).unwrap();
        assert!(rel.margin(&p) >= 0.1 / 16.0);
    }

    #[test]
    fn contact_examples() {
        let rel = contact3d_relation();
        let dz = jet(&[0.0; 3], &[0.0, 0.0, 1.0], DMatrix::zeros(3, 3));
        assert!(!rel.contains(&dz));
        let eps = 0.1;
        let mut a = DMatrix::zeros(3, 3);
        a[(1, 0)] = eps / 2.0;
        a[(0, 1)] = -eps / 2.0;
        let j = jet(&[0.0; 3], &[0.0, 0.0, 1.0], a.clone());
        assert!((j.value.dot(&curl(&j.slope)) - eps).abs() < 1e-15);
        assert!(rel.contains(&j));
        let j2 = jet(&[0.0; 3], &[0.0, 0.0, 2.0], a);
        assert!((j2.value.dot(&curl(&j2.slope)) - 2.0 * eps).abs() < 1e-15);
        let zero = jet(&[0.0; 3], &[0.0; 3], DMatrix::zeros(3, 3));
        assert!(matches!(rel.fiber_perturb(&zero, 0.1), Err(Error::ZeroValue)));
    }

    #[test]
    fn verygenpos_on_square_models() {
        let k = crate::complex::square_grid(1, 1.0);
        let rels = verygenpos_relation(&k, &Distribution::horizontal(2)).unwrap();
        let id = jet(&[0.0, 0.0], &[0.0, 0.0], DMatrix::identity(2, 2));
        // the Kuhn triangles have horizontal edges
        assert!(!rels[0].contains(&id));
        let c = 0.3f64.cos();
        let s = 0.3f64.sin();
        let rot = jet(&[0.0, 0.0], &[0.0, 0.0], DMatrix::from_row_slice(2, 2, &[c, -s, s, c]));
        let expect = rels[0].faces.iter().all(|f| {
            let dir = rot.slope.clone() * f;
            dir[(1, 0)].abs() > 1e-9
        });
        assert_eq!(rels[0].contains(&rot), expect);
        assert!(rels[0].contains(&rels[0].fiber_perturb(&id, 0.1).unwrap()));
    }
}
