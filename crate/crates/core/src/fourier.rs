//! The fiberwise Fourier transform calculus: transform, inverse transform,
//! convolution, involution, translations, Plancherel inner products,
//! isotypic projections and Peter-Weyl coefficients.
//!
//! Conventions, fixed once and verified by the check suites:
//!
//! * `F_{u,v}(f)(π) = Σ_{x∈G_u^v} f(x) π(x⁻¹) λ_u^v(x)`, an operator in
//!   `B(H_v^π, H_u^π)` (a `d_u × d_v` matrix).
//! * `F⁻¹(h)(x) = Σ_π d^π Tr(h(π) π(x))`. This is the inversion formula of
//!   the Fourier expansion; it typechecks on every fiber, unlike the
//!   `π(x⁻¹)` variant which is only meaningful on diagonal fibers.
//! * Under the global composition convention (`x∘y` means "apply `y`
//!   first") the convolution theorem reads
//!   `F(f∗g)(π) = F(g)(π) · F(f)(π)` — the operator order is forced by the
//!   fiber types `B(H_w, H_u) ∘ B(H_v, H_w)`.
//! * The global convolution integrates against `λ_{s(x)}` (probability on
//!   all of `G_{s(x)}`); [`convolve_fiber`] normalizes per intermediate
//!   fiber (`λ_u^w`). Within a transitive component with `m` units,
//!   `convolve = convolve_fiber / m`.

use thiserror::Error;

use crate::groupoid::{Arrow, FiniteGroupoid, Unit};
use crate::linalg::{czero, CMat, C64};
use crate::rep::{IrrepTable, RepBundle};

#[derive(Debug, Error)]
pub enum FourierError {
    #[error("arrow {0} is not composable in this position")]
    NotComposable(String),
    #[error("unknown unit {0}")]
    UnknownUnit(String),
}

/// A complex-valued function on the arrow set.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionBundle {
    values: Vec<C64>,
}

impl FunctionBundle {
    pub fn zeros(g: &FiniteGroupoid) -> Self {
        FunctionBundle {
            values: vec![czero(); g.n_arrows()],
        }
    }

    pub fn from_fn(g: &FiniteGroupoid, f: impl Fn(Arrow) -> C64) -> Self {
        FunctionBundle {
            values: g.arrows().map(f).collect(),
        }
    }

    /// Indicator of a single arrow.
    pub fn indicator(g: &FiniteGroupoid, x: Arrow) -> Self {
        let mut f = Self::zeros(g);
        f.values[x.0] = C64::new(1.0, 0.0);
        f
    }

    pub fn value(&self, x: Arrow) -> C64 {
        self.values[x.0]
    }

    pub fn set(&mut self, x: Arrow, z: C64) {
        self.values[x.0] = z;
    }

    /// Restriction to the fiber `G_u^v`, zero elsewhere.
    pub fn restrict_fiber(&self, g: &FiniteGroupoid, u: Unit, v: Unit) -> Self {
        let mut out = Self::zeros(g);
        for &x in g.fiber(u, v) {
            out.values[x.0] = self.values[x.0];
        }
        out
    }

    pub fn scale(&self, c: C64) -> Self {
        FunctionBundle {
            values: self.values.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        FunctionBundle {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        FunctionBundle {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max deviation restricted to one fiber.
    pub fn max_abs_fiber(&self, g: &FiniteGroupoid, u: Unit, v: Unit) -> f64 {
        g.fiber(u, v)
            .iter()
            .map(|&x| self.values[x.0].norm())
            .fold(0.0, f64::max)
    }
}

/// `⟨f, g⟩ = Σ_{x∈G_u^v} conj(f(x)) g(x) λ_u^v(x)` — the `L²(G_u^v, λ_u^v)`
/// inner product.
pub fn inner_fiber(g: &FiniteGroupoid, f: &FunctionBundle, h: &FunctionBundle, u: Unit, v: Unit) -> C64 {
    let fiber = g.fiber(u, v);
    if fiber.is_empty() {
        return czero();
    }
    let w = g.fiber_weight(u, v);
    fiber
        .iter()
        .map(|&x| f.value(x).conj() * h.value(x) * C64::new(w, 0.0))
        .sum()
}

pub fn norm_fiber(g: &FiniteGroupoid, f: &FunctionBundle, u: Unit, v: Unit) -> f64 {
    inner_fiber(g, f, f, u, v).re.max(0.0).sqrt()
}

/// One operator block of a Fourier coefficient.
#[derive(Debug, Clone)]
pub struct CoeffBlock {
    pub id: String,
    pub dim: usize,
    pub mat: CMat,
}

/// A finitely-supported element of `Σ_π B(H_v^π, H_u^π)` for a fixed fiber
/// `(u, v)`, with one block per irrep of the component. Empty when `u` and
/// `v` lie in distinct orbits.
#[derive(Debug, Clone)]
pub struct FourierCoefficient {
    pub u: Unit,
    pub v: Unit,
    pub blocks: Vec<CoeffBlock>,
}

impl FourierCoefficient {
    pub fn zeros_like(&self) -> Self {
        FourierCoefficient {
            u: self.u,
            v: self.v,
            blocks: self
                .blocks
                .iter()
                .map(|b| CoeffBlock {
                    id: b.id.clone(),
                    dim: b.dim,
                    mat: CMat::zeros(b.mat.nrows(), b.mat.ncols()),
                })
                .collect(),
        }
    }

    /// Blockwise operator product `h(π) k(π)`.
    pub fn product(&self, other: &Self) -> Self {
        FourierCoefficient {
            u: self.u,
            v: self.v,
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| CoeffBlock {
                    id: a.id.clone(),
                    dim: a.dim,
                    mat: &a.mat * &b.mat,
                })
                .collect(),
        }
    }

    /// Blockwise adjoint `h(π)*` (lives on the reversed fiber).
    pub fn adjoint(&self) -> Self {
        FourierCoefficient {
            u: self.v,
            v: self.u,
            blocks: self
                .blocks
                .iter()
                .map(|b| CoeffBlock {
                    id: b.id.clone(),
                    dim: b.dim,
                    mat: b.mat.adjoint(),
                })
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        FourierCoefficient {
            u: self.u,
            v: self.v,
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| CoeffBlock {
                    id: a.id.clone(),
                    dim: a.dim,
                    mat: &a.mat - &b.mat,
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        FourierCoefficient {
            u: self.u,
            v: self.v,
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| CoeffBlock {
                    id: a.id.clone(),
                    dim: a.dim,
                    mat: &a.mat + &b.mat,
                })
                .collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        FourierCoefficient {
            u: self.u,
            v: self.v,
            blocks: self
                .blocks
                .iter()
                .map(|b| CoeffBlock {
                    id: b.id.clone(),
                    dim: b.dim,
                    mat: b.mat.map(|z| z * c),
                })
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| crate::linalg::max_norm(&b.mat))
            .fold(0.0, f64::max)
    }
}

/// `⟨h, k⟩ = Σ_π d^π Tr(h(π)* k(π))` on coefficient space.
pub fn coeff_inner(h: &FourierCoefficient, k: &FourierCoefficient) -> C64 {
    h.blocks
        .iter()
        .zip(&k.blocks)
        .map(|(a, b)| (a.mat.adjoint() * &b.mat).diagonal().sum() * C64::new(a.dim as f64, 0.0))
        .sum()
}

/// `‖h‖₂ = ⟨h,h⟩^{1/2}` — the Plancherel norm on coefficient space.
pub fn plancherel_norm(h: &FourierCoefficient) -> f64 {
    coeff_inner(h, h).re.max(0.0).sqrt()
}

/// Fourier transform of the `(u, v)`-fiber of `f`:
/// `F_{u,v}(f)(π) = Σ_{x∈G_u^v} f(x) π(x⁻¹) λ_u^v(x)`.
pub fn fourier_fiber(
    g: &FiniteGroupoid,
    table: &IrrepTable,
    f: &FunctionBundle,
    u: Unit,
    v: Unit,
) -> FourierCoefficient {
    if !g.same_orbit(u, v) {
        return FourierCoefficient { u, v, blocks: Vec::new() };
    }
    let fiber = g.fiber(u, v);
    let w = C64::new(g.fiber_weight(u, v), 0.0);
    let blocks = table
        .component_entries(g.component_of(u))
        .into_iter()
        .map(|entry| {
            let d = entry.rep.orbit_dim();
            let mut m = CMat::zeros(d, d);
            for &x in fiber {
                m += entry.rep.matrix(g.inverse(x)).map(|z| z * f.value(x) * w);
            }
            CoeffBlock {
                id: entry.id.clone(),
                dim: d,
                mat: m,
            }
        })
        .collect();
    FourierCoefficient { u, v, blocks }
}

/// Inverse Fourier transform onto the `(u, v)` fiber:
/// `F⁻¹(h)(x) = Σ_π d^π Tr(h(π) π(x))`.
pub fn inverse_fourier(
    g: &FiniteGroupoid,
    table: &IrrepTable,
    h: &FourierCoefficient,
) -> FunctionBundle {
    let mut out = FunctionBundle::zeros(g);
    for &x in g.fiber(h.u, h.v) {
        let mut val = czero();
        for block in &h.blocks {
            let entry = table.by_id(&block.id).expect("coefficient block id in table");
            let tr: C64 = (&block.mat * entry.rep.matrix(x)).diagonal().sum();
            val += tr * C64::new(block.dim as f64, 0.0);
        }
        out.set(x, val);
    }
    out
}

/// Global convolution against `λ_{s(x)}`:
/// `(f∗g)(x) = Σ_{y∈G_{s(x)}} f(x∘y⁻¹) g(y) / |G_{s(x)}|`.
pub fn convolve(g: &FiniteGroupoid, f1: &FunctionBundle, f2: &FunctionBundle) -> FunctionBundle {
    let mut out = FunctionBundle::zeros(g);
    for x in g.arrows() {
        let u = g.src(x);
        let w = C64::new(g.source_weight(u), 0.0);
        let mut acc = czero();
        for &y in g.arrows_from(u) {
            let xy_inv = g.compose(x, g.inverse(y)).expect("composable by construction");
            acc += f1.value(xy_inv) * f2.value(y) * w;
        }
        out.set(x, acc);
    }
    out
}

/// Fiberwise convolution: each intermediate fiber is normalized on its own
/// (`λ_u^w` in place of `λ_u`). For functions supported on single fibers
/// this is the measure under which the character identities hold.
pub fn convolve_fiber(g: &FiniteGroupoid, f1: &FunctionBundle, f2: &FunctionBundle) -> FunctionBundle {
    let mut out = FunctionBundle::zeros(g);
    for x in g.arrows() {
        let u = g.src(x);
        let mut acc = czero();
        for wv in g.units() {
            let fiber = g.fiber(u, wv);
            if fiber.is_empty() {
                continue;
            }
            let w = C64::new(g.fiber_weight(u, wv), 0.0);
            for &y in fiber {
                let xy_inv = g.compose(x, g.inverse(y)).expect("composable by construction");
                acc += f1.value(xy_inv) * f2.value(y) * w;
            }
        }
        out.set(x, acc);
    }
    out
}

/// Involution `f*(x) = conj(f(x⁻¹))`.
pub fn involution(g: &FiniteGroupoid, f: &FunctionBundle) -> FunctionBundle {
    FunctionBundle::from_fn(g, |x| f.value(g.inverse(x)).conj())
}

/// Left translation by `x ∈ G_v^v`: `(x.f)(y) = f(x⁻¹ ∘ y)` on arrows with
/// range `v`, zero elsewhere.
pub fn translate_left(
    g: &FiniteGroupoid,
    x: Arrow,
    f: &FunctionBundle,
) -> Result<FunctionBundle, FourierError> {
    if g.src(x) != g.dst(x) {
        return Err(FourierError::NotComposable(g.arrow_name(x).to_string()));
    }
    let xi = g.inverse(x);
    let mut out = FunctionBundle::zeros(g);
    for &y in g.arrows_into(g.dst(x)) {
        let z = g.compose(xi, y).expect("r(y) = s(x⁻¹)");
        out.set(y, f.value(z));
    }
    Ok(out)
}

/// Right translation by `x ∈ G_u^u`: `(f.x)(y) = f(y ∘ x)` on arrows with
/// source `u`, zero elsewhere.
pub fn translate_right(
    g: &FiniteGroupoid,
    x: Arrow,
    f: &FunctionBundle,
) -> Result<FunctionBundle, FourierError> {
    if g.src(x) != g.dst(x) {
        return Err(FourierError::NotComposable(g.arrow_name(x).to_string()));
    }
    let mut out = FunctionBundle::zeros(g);
    for &y in g.arrows_from(g.src(x)) {
        let z = g.compose(y, x).expect("s(y) = r(x)");
        out.set(y, f.value(z));
    }
    Ok(out)
}

/// Character of an irrep at `u`, extended by zero off `G_u^u`.
pub fn character_function(g: &FiniteGroupoid, rep: &RepBundle, u: Unit) -> FunctionBundle {
    let mut out = FunctionBundle::zeros(g);
    for &x in g.fiber(u, u) {
        out.set(x, rep.matrix(x).diagonal().sum());
    }
    out
}

/// Isotypic projection `P_{u,v}^π f = d^π · (f ∗ χ_u^π)` on the `(u, v)`
/// fiber (convolution against `λ_u^u`).
pub fn isotypic_project(
    g: &FiniteGroupoid,
    rep: &RepBundle,
    f: &FunctionBundle,
    u: Unit,
    v: Unit,
) -> FunctionBundle {
    let mut out = FunctionBundle::zeros(g);
    let iso = g.fiber(u, u);
    let w = C64::new(g.fiber_weight(u, u) * rep.dim(u) as f64, 0.0);
    for &x in g.fiber(u, v) {
        let mut acc = czero();
        for &y in iso {
            let xy_inv = g.compose(x, g.inverse(y)).expect("composable");
            acc += f.value(xy_inv) * rep.matrix(y).diagonal().sum() * w;
        }
        out.set(x, acc);
    }
    out
}

/// Peter-Weyl coefficients of a fiber function:
/// `c_π^{ij} = d^π Σ_x f(x) conj(π(x)_{ij}) λ_u^v(x)`.
pub fn peter_weyl_coeffs(
    g: &FiniteGroupoid,
    table: &IrrepTable,
    f: &FunctionBundle,
    u: Unit,
    v: Unit,
) -> Vec<(String, CMat)> {
    if !g.same_orbit(u, v) {
        return Vec::new();
    }
    let fiber = g.fiber(u, v);
    let w = g.fiber_weight(u, v);
    table
        .component_entries(g.component_of(u))
        .into_iter()
        .map(|entry| {
            let d = entry.rep.orbit_dim();
            let mut c = CMat::zeros(d, d);
            for &x in fiber {
                let m = entry.rep.matrix(x);
                for i in 0..d {
                    for j in 0..d {
                        c[(i, j)] += f.value(x) * m[(i, j)].conj() * C64::new(d as f64 * w, 0.0);
                    }
                }
            }
            (entry.id.clone(), c)
        })
        .collect()
}

/// Reconstructs a fiber function from its Peter-Weyl coefficients:
/// `f(x) = Σ_{π,ij} c_π^{ij} π(x)_{ij}`.
pub fn reconstruct(
    g: &FiniteGroupoid,
    table: &IrrepTable,
    coeffs: &[(String, CMat)],
    u: Unit,
    v: Unit,
) -> FunctionBundle {
    let mut out = FunctionBundle::zeros(g);
    for &x in g.fiber(u, v) {
        let mut val = czero();
        for (id, c) in coeffs {
            let entry = table.by_id(id).expect("coefficient id in table");
            let m = entry.rep.matrix(x);
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    val += c[(i, j)] * m[(i, j)];
                }
            }
        }
        out.set(x, val);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{group_groupoid, pair_groupoid, product, GroupTable};
    use crate::linalg::{cone, identity, max_norm};
    use crate::rep::dual_object;
    use crate::DEFAULT_SEED;

    fn z3() -> (FiniteGroupoid, IrrepTable) {
        let g = group_groupoid(&GroupTable::cyclic(3)).unwrap();
        let t = dual_object(&g, DEFAULT_SEED, 1e-9).unwrap();
        (g, t)
    }

    fn s3() -> (FiniteGroupoid, IrrepTable) {
        let g = group_groupoid(&GroupTable::symmetric3()).unwrap();
        let t = dual_object(&g, DEFAULT_SEED, 1e-9).unwrap();
        (g, t)
    }

    #[test]
    fn z3_scaled_unit_indicator_transforms_to_identity() {
        let (g, t) = z3();
        let u = Unit(0);
        let f = FunctionBundle::indicator(&g, g.unit_arrow(u)).scale(C64::new(3.0, 0.0));
        let h = fourier_fiber(&g, &t, &f, u, u);
        for block in &h.blocks {
            assert!(max_norm(&(&block.mat - identity(block.dim))) < 1e-12);
        }
    }

    #[test]
    fn z3_constant_function_transform() {
        let (g, t) = z3();
        let u = Unit(0);
        let f = FunctionBundle::from_fn(&g, |_| cone());
        let h = fourier_fiber(&g, &t, &f, u, u);
        for block in &h.blocks {
            let entry = t.by_id(&block.id).unwrap();
            let trivial = entry
                .rep
                .character(&g, u)
                .unwrap()
                .iter()
                .all(|z| (z - cone()).norm() < 1e-9);
            let expected = if trivial { 1.0 } else { 0.0 };
            assert!((block.mat[(0, 0)] - C64::new(expected, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn s3_character_transform_is_scaled_identity_block() {
        let (g, t) = s3();
        let u = Unit(0);
        let two = t
            .entries
            .iter()
            .find(|e| e.rep.orbit_dim() == 2)
            .expect("2-dim irrep");
        let chi = character_function(&g, &two.rep, u);
        let h = fourier_fiber(&g, &t, &chi, u, u);
        for block in &h.blocks {
            if block.id == two.id {
                assert!(
                    max_norm(&(&block.mat - identity(2).map(|z| z * C64::new(0.5, 0.0)))) < 1e-10
                );
            } else {
                assert!(max_norm(&block.mat) < 1e-10);
            }
        }
    }

    #[test]
    fn global_convolution_identity_element() {
        let (g, _) = s3();
        // e = Σ_u |G_u| · indicator(unit arrow at u).
        let mut e = FunctionBundle::zeros(&g);
        for u in g.units() {
            e.set(g.unit_arrow(u), C64::new(g.arrows_from(u).len() as f64, 0.0));
        }
        let f = FunctionBundle::from_fn(&g, |x| C64::new(0.3 + x.0 as f64, 0.1 * x.0 as f64));
        assert!(convolve(&g, &f, &e).sub(&f).max_abs() < 1e-12);
        assert!(convolve(&g, &e, &f).sub(&f).max_abs() < 1e-12);
    }

    #[test]
    fn constants_convolve_to_constants_on_a_group() {
        let (g, _) = z3();
        let one = FunctionBundle::from_fn(&g, |_| cone());
        assert!(convolve(&g, &one, &one).sub(&one).max_abs() < 1e-12);
    }

    #[test]
    fn involution_is_an_involution() {
        let (g, _) = s3();
        let f = FunctionBundle::from_fn(&g, |x| C64::new(x.0 as f64, -0.5 * x.0 as f64));
        assert!(involution(&g, &involution(&g, &f)).sub(&f).max_abs() < 1e-15);
    }

    #[test]
    fn translation_by_unit_arrow_is_identity() {
        let (g, _) = s3();
        let u = Unit(0);
        let f = FunctionBundle::from_fn(&g, |x| C64::new(1.0 + x.0 as f64, 0.0));
        let e = g.unit_arrow(u);
        assert!(translate_left(&g, e, &f).unwrap().sub(&f).max_abs() < 1e-15);
        assert!(translate_right(&g, e, &f).unwrap().sub(&f).max_abs() < 1e-15);
    }

    #[test]
    fn translation_preserves_fiber_norm() {
        let (g, _) = s3();
        let u = Unit(0);
        let f = FunctionBundle::from_fn(&g, |x| C64::new((x.0 as f64).sin(), (x.0 as f64).cos()));
        for &x in g.fiber(u, u) {
            let tf = translate_left(&g, x, &f).unwrap();
            assert!((norm_fiber(&g, &tf, u, u) - norm_fiber(&g, &f, u, u)).abs() < 1e-12);
        }
    }

    #[test]
    fn translation_by_non_isotropy_arrow_errors() {
        let g = pair_groupoid(2).unwrap();
        let x = g.arrow_by_name("1>2").unwrap();
        let f = FunctionBundle::zeros(&g);
        assert!(matches!(
            translate_left(&g, x, &f),
            Err(FourierError::NotComposable(_))
        ));
    }

    #[test]
    fn peter_weyl_round_trip_on_product_fiber() {
        let s3g = group_groupoid(&GroupTable::symmetric3()).unwrap();
        let p2 = pair_groupoid(2).unwrap();
        let g = product(&s3g, &p2).unwrap();
        let t = dual_object(&g, DEFAULT_SEED, 1e-9).unwrap();
        let (u, v) = (Unit(0), Unit(1));
        let f = FunctionBundle::from_fn(&g, |x| {
            C64::new((x.0 as f64 * 0.7).sin(), (x.0 as f64 * 1.3).cos())
        })
        .restrict_fiber(&g, u, v);
        let coeffs = peter_weyl_coeffs(&g, &t, &f, u, v);
        let back = reconstruct(&g, &t, &coeffs, u, v);
        assert!(back.sub(&f).max_abs_fiber(&g, u, v) < 1e-10);
    }

    #[test]
    fn single_matrix_coefficient_has_single_peter_weyl_coeff() {
        let (g, t) = s3();
        let u = Unit(0);
        let two = t
            .entries
            .iter()
            .find(|e| e.rep.orbit_dim() == 2)
            .expect("2-dim irrep");
        let f = FunctionBundle::from_fn(&g, |x| two.rep.matrix(x)[(0, 1)]);
        for (id, c) in peter_weyl_coeffs(&g, &t, &f, u, u) {
            for i in 0..c.nrows() {
                for j in 0..c.ncols() {
                    let expected = if id == two.id && (i, j) == (0, 1) { 1.0 } else { 0.0 };
                    assert!(
                        (c[(i, j)] - C64::new(expected, 0.0)).norm() < 1e-10,
                        "coefficient ({id}, {i}, {j}) = {}",
                        c[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn cross_orbit_transform_is_empty() {
        let g = crate::builders::group_bundle(&[
            ("a".into(), GroupTable::cyclic(2)),
            ("b".into(), GroupTable::cyclic(3)),
        ])
        .unwrap();
        let t = dual_object(&g, DEFAULT_SEED, 1e-9).unwrap();
        let f = FunctionBundle::from_fn(&g, |_| cone());
        let h = fourier_fiber(&g, &t, &f, Unit(0), Unit(1));
        assert!(h.blocks.is_empty());
    }
}
