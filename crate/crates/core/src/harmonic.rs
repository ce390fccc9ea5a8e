//! Class functions and central elements: the center of the convolution
//! algebra, the scalar diagonal Fourier transform and its inverse, the
//! spectral measure, the conjugacy-groupoid isometry and the diagonal
//! Plancherel theorem.

use thiserror::Error;

use crate::fourier::{convolve, FunctionBundle};
use crate::groupoid::{Arrow, ConjugacyGroupoid, FiniteGroupoid, Unit};
use crate::linalg::{czero, C64};
use crate::rep::{IrrepTable, RepBundle};

#[derive(Debug, Error)]
pub enum HarmonicError {
    #[error("function is not a class function (violation {0})")]
    NotClassFunction(f64),
    #[error("unknown irrep id {0}")]
    UnknownIrrep(String),
}

/// A complex function on the dual of one component, with the spectral-measure
/// inner product `⟨g, h⟩ = Σ_π (d^π)² conj(g(π)) h(π)`.
#[derive(Debug, Clone)]
pub struct SpectralFunction {
    pub component: usize,
    /// `(irrep id, dimension, value)` in table order.
    pub values: Vec<(String, usize, C64)>,
}

impl SpectralFunction {
    pub fn zeros(table: &IrrepTable, component: usize) -> Self {
        SpectralFunction {
            component,
            values: table
                .component_entries(component)
                .into_iter()
                .map(|e| (e.id.clone(), e.rep.orbit_dim(), czero()))
                .collect(),
        }
    }

    /// Basis element `δ_π`.
    pub fn delta(table: &IrrepTable, component: usize, id: &str) -> Self {
        let mut s = Self::zeros(table, component);
        for (i, d, v) in &mut s.values {
            if i == id {
                *v = C64::new(1.0, 0.0);
            }
            let _ = d;
        }
        s
    }

    pub fn value(&self, id: &str) -> C64 {
        self.values
            .iter()
            .find(|(i, _, _)| i == id)
            .map(|(_, _, v)| *v)
            .unwrap_or_else(czero)
    }

    /// Pointwise product.
    pub fn product(&self, other: &Self) -> Self {
        SpectralFunction {
            component: self.component,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|((i, d, a), (_, _, b))| (i.clone(), *d, a * b))
                .collect(),
        }
    }

    /// Pointwise conjugate (the involution of the function algebra on Ĝ).
    pub fn star(&self) -> Self {
        SpectralFunction {
            component: self.component,
            values: self
                .values
                .iter()
                .map(|(i, d, a)| (i.clone(), *d, a.conj()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        SpectralFunction {
            component: self.component,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|((i, d, a), (_, _, b))| (i.clone(), *d, a - b))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }
}

/// `⟨g, h⟩ = Σ_π (d^π)² conj(g(π)) h(π)` — the spectral-measure inner
/// product on functions on Ĝ (the measure of `{π}` is `(d^π)²`).
pub fn spectral_inner(g: &SpectralFunction, h: &SpectralFunction) -> C64 {
    g.values
        .iter()
        .zip(&h.values)
        .map(|((_, d, a), (_, _, b))| a.conj() * b * C64::new((d * d) as f64, 0.0))
        .sum()
}

/// Max violation of the class-function law `f(x⁻¹ ∘ y ∘ x) = f(y)` over all
/// `u ∈ X`, `y ∈ G_u^u`, `x ∈ G^u`.
pub fn class_function_violation(g: &FiniteGroupoid, f: &FunctionBundle) -> f64 {
    let mut dev: f64 = 0.0;
    for u in g.units() {
        for &y in g.fiber(u, u) {
            for &x in g.arrows_into(u) {
                let conj = g
                    .compose(g.inverse(x), g.compose(y, x).expect("composable"))
                    .expect("composable");
                dev = dev.max((f.value(conj) - f.value(y)).norm());
            }
        }
    }
    dev
}

pub fn is_class_function(g: &FiniteGroupoid, f: &FunctionBundle, tol: f64) -> (bool, f64) {
    let dev = class_function_violation(g, f);
    (dev <= tol, dev)
}

/// Max absolute value of `f` off the isotropy bundle.
pub fn off_isotropy_mass(g: &FiniteGroupoid, f: &FunctionBundle) -> f64 {
    g.arrows()
        .filter(|&x| g.src(x) != g.dst(x))
        .map(|x| f.value(x).norm())
        .fold(0.0, f64::max)
}

/// Decides membership in the center of the convolution algebra by testing
/// `f ∗ δ_x = δ_x ∗ f` against every indicator function (sufficient by
/// bilinearity). Returns a witness arrow on failure.
pub fn center_test(g: &FiniteGroupoid, f: &FunctionBundle, tol: f64) -> (bool, Option<Arrow>) {
    for x in g.arrows() {
        let delta = FunctionBundle::indicator(g, x);
        let lhs = convolve(g, f, &delta);
        let rhs = convolve(g, &delta, f);
        if lhs.sub(&rhs).max_abs() > tol {
            return (false, Some(x));
        }
    }
    (true, None)
}

/// Conjugation-averaging projection onto class functions:
/// `(Pf)(y) = Σ_{x∈G^u} f(x⁻¹ ∘ y ∘ x) λ^u(x)` for `y ∈ G_u^u`, zero off
/// the isotropy bundle. Weights are exact class-size rationals.
pub fn central_projection(g: &FiniteGroupoid, f: &FunctionBundle) -> FunctionBundle {
    let mut out = FunctionBundle::zeros(g);
    for u in g.units() {
        let into = g.arrows_into(u);
        let w = C64::new(1.0 / into.len() as f64, 0.0);
        for &y in g.fiber(u, u) {
            let mut acc = czero();
            for &x in into {
                let conj = g
                    .compose(g.inverse(x), g.compose(y, x).expect("composable"))
                    .expect("composable");
                acc += f.value(conj) * w;
            }
            out.set(y, acc);
        }
    }
    out
}

/// Character bundle of an irrep: `Tr π(x)` on the isotropy arrows of its
/// supporting orbit, zero elsewhere. Always a class function.
pub fn character_bundle(g: &FiniteGroupoid, rep: &RepBundle) -> FunctionBundle {
    let mut out = FunctionBundle::zeros(g);
    for u in g.units() {
        if rep.dim(u) == 0 {
            continue;
        }
        for &x in g.fiber(u, u) {
            out.set(x, rep.matrix(x).diagonal().sum());
        }
    }
    out
}

/// Scalar diagonal Fourier transform at one unit:
/// `f̂_u(π) = (1/d^π) Σ_{x∈G_u^u} f(x) χ_u^π(x⁻¹) λ_u^u(x)`.
pub fn hat_diag(g: &FiniteGroupoid, rep: &RepBundle, f: &FunctionBundle, u: Unit) -> C64 {
    let d = rep.dim(u);
    if d == 0 {
        return czero();
    }
    let w = C64::new(g.fiber_weight(u, u) / d as f64, 0.0);
    g.fiber(u, u)
        .iter()
        .map(|&x| f.value(x) * rep.matrix(g.inverse(x)).diagonal().sum() * w)
        .sum()
}

/// Diagonal transform of a class function as a spectral function on one
/// component's dual. Returns the per-unit constancy deviation alongside the
/// values (zero only for genuine class functions).
pub fn diag_transform(
    g: &FiniteGroupoid,
    table: &IrrepTable,
    f: &FunctionBundle,
    component: usize,
) -> (SpectralFunction, f64) {
    let comp = &g.components()[component];
    let mut dev: f64 = 0.0;
    let values = table
        .component_entries(component)
        .into_iter()
        .map(|entry| {
            let vals: Vec<C64> = comp
                .units
                .iter()
                .map(|&u| hat_diag(g, &entry.rep, f, u))
                .collect();
            let first = vals[0];
            for v in &vals {
                dev = dev.max((v - first).norm());
            }
            (entry.id.clone(), entry.rep.orbit_dim(), first)
        })
        .collect();
    (
        SpectralFunction {
            component,
            values,
        },
        dev,
    )
}

/// Inverse diagonal Fourier transform:
/// `ǧ(x) = Σ_π d^π g(π) χ_u^π(x)` for `x ∈ G_u^u` with `u` in the
/// component, zero elsewhere. The output is central. The orientation is
/// the one that makes `(ǧ)ˆ = g` hold exactly against [`hat_diag`]'s
/// `χ(x⁻¹)` kernel; using `conj(χ(x))` instead would relabel every irrep
/// by its conjugate in the round trip.
pub fn inverse_diag(
    g: &FiniteGroupoid,
    table: &IrrepTable,
    spec: &SpectralFunction,
) -> FunctionBundle {
    let mut out = FunctionBundle::zeros(g);
    let comp = &g.components()[spec.component];
    for &u in &comp.units {
        for &x in g.fiber(u, u) {
            let mut acc = czero();
            for (id, d, val) in &spec.values {
                let entry = table.by_id(id).expect("spectral id in table");
                let chi: C64 = entry.rep.matrix(x).diagonal().sum();
                acc += C64::new(*d as f64, 0.0) * val * chi;
            }
            out.set(x, acc);
        }
    }
    out
}

/// `L²(G_u^u, λ_u^u)` norm of the restriction of `f` to the isotropy group
/// at `u`.
pub fn norm_at_unit(g: &FiniteGroupoid, f: &FunctionBundle, u: Unit) -> f64 {
    crate::fourier::norm_fiber(g, f, u, u)
}

/// Per-block scalar-form report of `DF(f)(π) = f̂(π)·id` (Prop-4.5 shape):
/// max deviation of `F_{u,u}(f)(π)` from the scalar matrix, plus the
/// per-unit constancy deviation of `f̂_u(π)`.
pub struct ScalarCheckReport {
    /// Max over π, u of `‖F_{u,u}(f)(π) − f̂_u(π)·id‖`.
    pub max_scalar_dev: f64,
    /// Max over π of the spread of `f̂_u(π)` across units of each orbit.
    pub max_constancy_dev: f64,
}

pub fn scalar_check(g: &FiniteGroupoid, table: &IrrepTable, f: &FunctionBundle) -> ScalarCheckReport {
    let mut max_scalar_dev: f64 = 0.0;
    let mut max_constancy_dev: f64 = 0.0;
    for (ci, comp) in g.components().iter().enumerate() {
        for entry in table.component_entries(ci) {
            let mut vals = Vec::new();
            for &u in &comp.units {
                let coeff = crate::fourier::fourier_fiber(g, table, f, u, u);
                let block = coeff
                    .blocks
                    .iter()
                    .find(|b| b.id == entry.id)
                    .expect("block present");
                let scalar = hat_diag(g, &entry.rep, f, u);
                let d = entry.rep.dim(u);
                let target = crate::linalg::identity(d).map(|z| z * scalar);
                max_scalar_dev = max_scalar_dev.max(crate::linalg::max_norm(&(&block.mat - target)));
                vals.push(scalar);
            }
            for v in &vals {
                max_constancy_dev = max_constancy_dev.max((v - vals[0]).norm());
            }
        }
    }
    ScalarCheckReport {
        max_scalar_dev,
        max_constancy_dev,
    }
}

/// Pushes a class function down to the conjugacy groupoid (one value per
/// class). Errs if `f` has off-isotropy support or breaks class constancy.
pub fn to_conjugacy(
    g: &FiniteGroupoid,
    cq: &ConjugacyGroupoid,
    f: &FunctionBundle,
) -> Result<Vec<C64>, HarmonicError> {
    let violation = class_function_violation(g, f).max(off_isotropy_mass(g, f));
    if violation > 1e-9 {
        return Err(HarmonicError::NotClassFunction(violation));
    }
    Ok(cq
        .classes()
        .iter()
        .map(|c| f.value(c.arrows[0]))
        .collect())
}

/// Lifts class values back to a function on the isotropy bundle.
pub fn from_conjugacy(
    g: &FiniteGroupoid,
    cq: &ConjugacyGroupoid,
    values: &[C64],
) -> FunctionBundle {
    let mut out = FunctionBundle::zeros(g);
    for (ci, class) in cq.classes().iter().enumerate() {
        for &x in &class.arrows {
            out.set(x, values[ci]);
        }
    }
    out
}

/// `L²(λ̇_u)` inner product of class-value vectors at one unit.
pub fn conjugacy_inner_at(
    g: &FiniteGroupoid,
    cq: &ConjugacyGroupoid,
    a: &[C64],
    b: &[C64],
    u: Unit,
) -> C64 {
    (0..cq.classes().len())
        .map(|c| a[c].conj() * b[c] * C64::new(cq.weight_at(g, c, u), 0.0))
        .sum()
}

/// `L²(G′^G)` inner product over one component: per-unit inner products
/// averaged uniformly over the orbit.
pub fn conjugacy_inner_component(
    g: &FiniteGroupoid,
    cq: &ConjugacyGroupoid,
    a: &[C64],
    b: &[C64],
    component: usize,
) -> C64 {
    let units = &g.components()[component].units;
    let sum: C64 = units
        .iter()
        .map(|&u| conjugacy_inner_at(g, cq, a, b, u))
        .sum();
    sum / C64::new(units.len() as f64, 0.0)
}

/// Diagonal Plancherel data for one component: the Gram matrix of the
/// inverse transforms of the dual basis `{δ_π}` in `L²(G′^G)`, which the
/// diagonal Plancherel theorem identifies with `diag((d^π)²)`, and the
/// class/irrep counts witnessing bijectivity.
pub struct DiagPlancherelReport {
    pub gram: Vec<Vec<C64>>,
    pub irrep_count: usize,
    pub class_count: usize,
    /// Max deviation of the Gram matrix from `diag((d^π)²)`.
    pub max_dev: f64,
}

pub fn diag_plancherel_check(
    g: &FiniteGroupoid,
    table: &IrrepTable,
    cq: &ConjugacyGroupoid,
    component: usize,
) -> Result<DiagPlancherelReport, HarmonicError> {
    let entries = table.component_entries(component);
    let transformed: Vec<Vec<C64>> = entries
        .iter()
        .map(|e| {
            let delta = SpectralFunction::delta(table, component, &e.id);
            to_conjugacy(g, cq, &inverse_diag(g, table, &delta))
        })
        .collect::<Result<_, _>>()?;
    let n = entries.len();
    let mut gram = vec![vec![czero(); n]; n];
    let mut max_dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            gram[i][j] =
                conjugacy_inner_component(g, cq, &transformed[i], &transformed[j], component);
            let expected = if i == j {
                let d = entries[i].rep.orbit_dim() as f64;
                C64::new(d * d, 0.0)
            } else {
                czero()
            };
            max_dev = max_dev.max((gram[i][j] - expected).norm());
        }
    }
    Ok(DiagPlancherelReport {
        gram,
        irrep_count: n,
        class_count: cq.classes_of_component(component).len(),
        max_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{group_groupoid, pair_groupoid, product, GroupTable};
    use crate::linalg::cone;
    use crate::rep::dual_object;
    use crate::DEFAULT_SEED;

    fn s3() -> (FiniteGroupoid, crate::rep::IrrepTable) {
        let g = group_groupoid(&GroupTable::symmetric3()).unwrap();
        let t = dual_object(&g, DEFAULT_SEED, 1e-9).unwrap();
        (g, t)
    }

    #[test]
    fn characters_are_class_functions() {
        let (g, t) = s3();
        for entry in &t.entries {
            let chi = character_bundle(&g, &entry.rep);
            let (ok, dev) = is_class_function(&g, &chi, 1e-9);
            assert!(ok, "character of {} deviates by {dev}", entry.id);
        }
    }

    #[test]
    fn non_central_indicator_is_not_class_function() {
        let (g, _) = s3();
        // A transposition has a conjugate partner, so its indicator is not
        // a class function (and not central).
        let x = g.arrow_by_name("u.t01").unwrap();
        let f = FunctionBundle::indicator(&g, x);
        let (ok, dev) = is_class_function(&g, &f, 1e-9);
        assert!(!ok);
        assert!(dev > 0.5);
        let (central, witness) = center_test(&g, &f, 1e-9);
        assert!(!central);
        assert!(witness.is_some());
    }

    #[test]
    fn constant_one_on_isotropy_is_class_function() {
        let s3g = group_groupoid(&GroupTable::symmetric3()).unwrap();
        let p2 = pair_groupoid(2).unwrap();
        let g = product(&s3g, &p2).unwrap();
        let mut f = FunctionBundle::zeros(&g);
        for x in g.isotropy_arrows() {
            f.set(x, cone());
        }
        let (ok, _) = is_class_function(&g, &f, 1e-12);
        assert!(ok);
    }

    #[test]
    fn hat_diag_of_character_is_kronecker_over_dim() {
        let (g, t) = s3();
        let u = Unit(0);
        for tau in &t.entries {
            let chi = character_bundle(&g, &tau.rep);
            for rho in &t.entries {
                let v = hat_diag(&g, &rho.rep, &chi, u);
                let expected = if tau.id == rho.id {
                    1.0 / tau.rep.orbit_dim() as f64
                } else {
                    0.0
                };
                assert!(
                    (v - C64::new(expected, 0.0)).norm() < 1e-10,
                    "hat_diag(χ_{}, {}) = {v}",
                    tau.id,
                    rho.id
                );
            }
        }
    }

    #[test]
    fn hat_diag_of_constant_one() {
        let (g, t) = s3();
        let u = Unit(0);
        let one = FunctionBundle::from_fn(&g, |_| cone());
        for entry in &t.entries {
            let v = hat_diag(&g, &entry.rep, &one, u);
            let trivial = entry
                .rep
                .character(&g, u)
                .unwrap()
                .iter()
                .all(|z| (z - cone()).norm() < 1e-9);
            let expected = if trivial { 1.0 } else { 0.0 };
            assert!((v - C64::new(expected, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn hat_diag_of_scaled_identity_indicator_is_one_everywhere() {
        let (g, t) = s3();
        let u = Unit(0);
        let f = FunctionBundle::indicator(&g, g.unit_arrow(u)).scale(C64::new(6.0, 0.0));
        for entry in &t.entries {
            let v = hat_diag(&g, &entry.rep, &f, u);
            assert!((v - cone()).norm() < 1e-10);
        }
    }

    #[test]
    fn inverse_diag_of_delta_is_scaled_character() {
        let (g, t) = s3();
        for entry in &t.entries {
            let delta = SpectralFunction::delta(&t, 0, &entry.id);
            let inv = inverse_diag(&g, &t, &delta);
            let d = entry.rep.orbit_dim() as f64;
            for x in g.isotropy_arrows() {
                let chi: C64 = entry.rep.matrix(x).diagonal().sum();
                assert!((inv.value(x) - C64::new(d, 0.0) * chi).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn s3_two_dim_character_class_values() {
        let (g, t) = s3();
        let cq = g.conjugacy_groupoid();
        assert_eq!(cq.classes().len(), 3);
        let two = t
            .entries
            .iter()
            .find(|e| e.rep.orbit_dim() == 2)
            .expect("2-dim irrep");
        let chi = character_bundle(&g, &two.rep);
        let values = to_conjugacy(&g, &cq, &chi).unwrap();
        // Identify classes by size: {e}, {c3, c3²}, {three transpositions}.
        for (ci, class) in cq.classes().iter().enumerate() {
            let expected = match class.arrows.len() {
                1 => 2.0,
                2 => -1.0,
                3 => 0.0,
                n => panic!("unexpected class size {n}"),
            };
            assert!((values[ci] - C64::new(expected, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn diag_plancherel_gram_s3() {
        let (g, t) = s3();
        let cq = g.conjugacy_groupoid();
        let report = diag_plancherel_check(&g, &t, &cq, 0).unwrap();
        assert_eq!(report.irrep_count, 3);
        assert_eq!(report.class_count, 3);
        assert!(report.max_dev < 1e-10, "gram deviation {}", report.max_dev);
        // Diagonal reads (d^π)²: {1, 1, 4} in table order.
        let diag: Vec<f64> = (0..3).map(|i| report.gram[i][i].re).collect();
        let mut sorted = diag.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((sorted[0] - 1.0).abs() < 1e-10);
        assert!((sorted[1] - 1.0).abs() < 1e-10);
        assert!((sorted[2] - 4.0).abs() < 1e-10);
    }

    #[test]
    fn diag_plancherel_gram_z3_and_pair() {
        let g = group_groupoid(&GroupTable::cyclic(3)).unwrap();
        let t = dual_object(&g, DEFAULT_SEED, 1e-9).unwrap();
        let cq = g.conjugacy_groupoid();
        let report = diag_plancherel_check(&g, &t, &cq, 0).unwrap();
        assert_eq!((report.irrep_count, report.class_count), (3, 3));
        assert!(report.max_dev < 1e-10);

        let p = pair_groupoid(3).unwrap();
        let tp = dual_object(&p, DEFAULT_SEED, 1e-9).unwrap();
        let cqp = p.conjugacy_groupoid();
        let rp = diag_plancherel_check(&p, &tp, &cqp, 0).unwrap();
        assert_eq!((rp.irrep_count, rp.class_count), (1, 1));
        assert!((rp.gram[0][0] - cone()).norm() < 1e-10);
    }

    #[test]
    fn central_projection_fixes_class_functions() {
        let (g, t) = s3();
        let chi = character_bundle(&g, &t.entries[2].rep);
        assert!(central_projection(&g, &chi).sub(&chi).max_abs() < 1e-12);
    }

    #[test]
    fn to_conjugacy_rejects_non_class_functions() {
        let (g, _) = s3();
        let cq = g.conjugacy_groupoid();
        let f = FunctionBundle::indicator(&g, g.arrow_by_name("u.t01").unwrap());
        assert!(matches!(
            to_conjugacy(&g, &cq, &f),
            Err(HarmonicError::NotClassFunction(_))
        ));
    }
}
