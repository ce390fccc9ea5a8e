//! Fast convolution powers through the Fourier transform, with a cached
//! transform pair per fiber and a timing harness comparing the spectral
//! route against direct iterated convolution.

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::fourier::{CoeffBlock, FourierCoefficient, FunctionBundle};
use crate::groupoid::{Arrow, FiniteGroupoid, Unit};
use crate::linalg::{czero, identity, C64, CMat};
use crate::rep::IrrepTable;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("convolution power requires k ≥ 1, got {0}")]
    ZeroPower(usize),
    #[error("fiber G_{0}^{1} is empty")]
    EmptyFiber(String, String),
}

/// Precomputed transform pair for one fiber `(u, v)`: for every irrep of the
/// component, the matrices `π(x⁻¹)` (forward) and `π(x)` (inverse) aligned
/// with the fiber's arrow order.
pub struct TransformCache {
    pub u: Unit,
    pub v: Unit,
    fiber: Vec<Arrow>,
    weight: f64,
    /// `(id, dim, forward mats, inverse mats)` per irrep.
    irreps: Vec<(String, usize, Vec<CMat>, Vec<CMat>)>,
}

impl TransformCache {
    pub fn new(g: &FiniteGroupoid, table: &IrrepTable, u: Unit, v: Unit) -> Self {
        let fiber: Vec<Arrow> = g.fiber(u, v).to_vec();
        let irreps = if g.same_orbit(u, v) {
            table
                .component_entries(g.component_of(u))
                .into_iter()
                .map(|entry| {
                    let fwd = fiber
                        .iter()
                        .map(|&x| entry.rep.matrix(g.inverse(x)).clone())
                        .collect();
                    let inv = fiber.iter().map(|&x| entry.rep.matrix(x).clone()).collect();
                    (entry.id.clone(), entry.rep.orbit_dim(), fwd, inv)
                })
                .collect()
        } else {
            Vec::new()
        };
        let weight = if fiber.is_empty() { 0.0 } else { g.fiber_weight(u, v) };
        TransformCache {
            u,
            v,
            fiber,
            weight,
            irreps,
        }
    }

    pub fn fiber(&self) -> &[Arrow] {
        &self.fiber
    }

    /// Forward transform of fiber values (aligned with `self.fiber()`).
    pub fn forward(&self, values: &[C64]) -> FourierCoefficient {
        let w = C64::new(self.weight, 0.0);
        let blocks = self
            .irreps
            .iter()
            .map(|(id, d, fwd, _)| {
                let mut m = CMat::zeros(*d, *d);
                for (k, mat) in fwd.iter().enumerate() {
                    m += mat.map(|z| z * values[k] * w);
                }
                CoeffBlock {
                    id: id.clone(),
                    dim: *d,
                    mat: m,
                }
            })
            .collect();
        FourierCoefficient {
            u: self.u,
            v: self.v,
            blocks,
        }
    }

    /// Inverse transform back to fiber values.
    pub fn inverse(&self, h: &FourierCoefficient) -> Vec<C64> {
        self.fiber
            .iter()
            .enumerate()
            .map(|(k, _)| {
                let mut val = czero();
                for (bi, (_, d, _, inv)) in self.irreps.iter().enumerate() {
                    let tr: C64 = (&h.blocks[bi].mat * &inv[k]).diagonal().sum();
                    val += tr * C64::new(*d as f64, 0.0);
                }
                val
            })
            .collect()
    }
}

/// Binary exponentiation of a square matrix, `k ≥ 1`.
fn matrix_power(m: &CMat, k: usize) -> CMat {
    let mut result = identity(m.nrows());
    let mut base = m.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

pub struct ConvPowerResult {
    pub function: FunctionBundle,
    /// Set when some `‖F(f)(π)‖ > 1 + 1e-6` and `k > 64`, where repeated
    /// powering can amplify rounding error.
    pub overflow_risk: bool,
}

/// `k`-fold convolution power of the restriction of `f` to `G_u^u`,
/// computed as `F⁻¹(F(f)^k)` with binary exponentiation in coefficient
/// space.
pub fn conv_power(
    g: &FiniteGroupoid,
    table: &IrrepTable,
    f: &FunctionBundle,
    u: Unit,
    k: usize,
) -> Result<ConvPowerResult, SpectralError> {
    if k == 0 {
        return Err(SpectralError::ZeroPower(k));
    }
    let cache = TransformCache::new(g, table, u, u);
    if cache.fiber().is_empty() {
        return Err(SpectralError::EmptyFiber(
            g.unit_name(u).to_string(),
            g.unit_name(u).to_string(),
        ));
    }
    let values: Vec<C64> = cache.fiber().iter().map(|&x| f.value(x)).collect();
    let mut h = cache.forward(&values);
    let mut max_block_norm: f64 = 0.0;
    for block in &mut h.blocks {
        let svd = block.mat.clone().svd(false, false);
        let norm = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        max_block_norm = max_block_norm.max(norm);
        block.mat = matrix_power(&block.mat, k);
    }
    let out_vals = cache.inverse(&h);
    let mut function = FunctionBundle::zeros(g);
    for (i, &x) in cache.fiber().iter().enumerate() {
        function.set(x, out_vals[i]);
    }
    Ok(ConvPowerResult {
        function,
        overflow_risk: max_block_norm > 1.0 + 1e-6 && k > 64,
    })
}

/// Direct `k`-fold convolution power on `G_u^u`, restricted to the isotropy
/// group's multiplication table (the reference implementation the spectral
/// path must agree with). Uses the fiberwise measure `λ_u^u`.
pub fn direct_power(
    g: &FiniteGroupoid,
    f: &FunctionBundle,
    u: Unit,
    k: usize,
) -> Result<FunctionBundle, SpectralError> {
    if k == 0 {
        return Err(SpectralError::ZeroPower(k));
    }
    let fiber: Vec<Arrow> = g.fiber(u, u).to_vec();
    if fiber.is_empty() {
        return Err(SpectralError::EmptyFiber(
            g.unit_name(u).to_string(),
            g.unit_name(u).to_string(),
        ));
    }
    let n = fiber.len();
    let mut index_of = std::collections::HashMap::new();
    for (i, &x) in fiber.iter().enumerate() {
        index_of.insert(x, i);
    }
    // comb[x][y] = index of x ∘ y⁻¹ within the fiber.
    let mut comb = vec![0usize; n * n];
    for (xi, &x) in fiber.iter().enumerate() {
        for (yi, &y) in fiber.iter().enumerate() {
            let z = g.compose(x, g.inverse(y)).expect("isotropy closed");
            comb[xi * n + yi] = index_of[&z];
        }
    }
    let w = C64::new(1.0 / n as f64, 0.0);
    let base: Vec<C64> = fiber.iter().map(|&x| f.value(x)).collect();
    let mut acc = base.clone();
    for _ in 1..k {
        let mut next = vec![czero(); n];
        for xi in 0..n {
            let mut s = czero();
            for yi in 0..n {
                s += acc[comb[xi * n + yi]] * base[yi];
            }
            next[xi] = s * w;
        }
        acc = next;
    }
    let mut out = FunctionBundle::zeros(g);
    for (i, &x) in fiber.iter().enumerate() {
        out.set(x, acc[i]);
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
pub struct BenchConfig {
    pub unit: String,
    pub fiber_size: usize,
    pub k: usize,
    pub reps: usize,
}

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub direct_ms: f64,
    pub spectral_ms: f64,
    pub speedup: f64,
    pub max_abs_err: f64,
    pub config: BenchConfig,
}

/// Times direct vs. spectral `k`-fold convolution power on `G_u^u` over
/// `reps` repetitions (mean wall time), and reports the max pointwise
/// disagreement between the two results.
pub fn bench(
    g: &FiniteGroupoid,
    table: &IrrepTable,
    f: &FunctionBundle,
    u: Unit,
    k: usize,
    reps: usize,
) -> Result<BenchReport, SpectralError> {
    let reps = reps.max(1);

    let start = Instant::now();
    let mut direct = None;
    for _ in 0..reps {
        direct = Some(direct_power(g, f, u, k)?);
    }
    let direct_ms = start.elapsed().as_secs_f64() * 1000.0 / reps as f64;
    let direct = direct.expect("reps ≥ 1");

    let start = Instant::now();
    let mut spectral = None;
    for _ in 0..reps {
        spectral = Some(conv_power(g, table, f, u, k)?);
    }
    let spectral_ms = start.elapsed().as_secs_f64() * 1000.0 / reps as f64;
    let spectral = spectral.expect("reps ≥ 1");

    let max_abs_err = spectral.function.sub(&direct).max_abs();
    Ok(BenchReport {
        direct_ms,
        spectral_ms,
        speedup: direct_ms / spectral_ms.max(1e-12),
        max_abs_err,
        config: BenchConfig {
            unit: g.unit_name(u).to_string(),
            fiber_size: g.fiber(u, u).len(),
            k,
            reps,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{group_groupoid, pair_groupoid, product, GroupTable};
    use crate::fourier::{convolve_fiber, fourier_fiber};
    use crate::rep::dual_object;
    use crate::DEFAULT_SEED;

    #[test]
    fn transform_cache_matches_fourier_fiber() {
        let g = group_groupoid(&GroupTable::symmetric3()).unwrap();
        let t = dual_object(&g, DEFAULT_SEED, 1e-9).unwrap();
        let u = Unit(0);
        let cache = TransformCache::new(&g, &t, u, u);
        let f = FunctionBundle::from_fn(&g, |x| C64::new((x.0 as f64).sin(), 0.25 * x.0 as f64));
        let values: Vec<C64> = cache.fiber().iter().map(|&x| f.value(x)).collect();
        let via_cache = cache.forward(&values);
        let direct = fourier_fiber(&g, &t, &f, u, u);
        assert!(via_cache.sub(&direct).max_abs() < 1e-12);
        let back = cache.inverse(&via_cache);
        for (i, &x) in cache.fiber().iter().enumerate() {
            assert!((back[i] - f.value(x)).norm() < 1e-10);
        }
    }

    #[test]
    fn conv_power_k1_is_identity() {
        let g = group_groupoid(&GroupTable::symmetric3()).unwrap();
        let t = dual_object(&g, DEFAULT_SEED, 1e-9).unwrap();
        let u = Unit(0);
        let f = FunctionBundle::from_fn(&g, |x| C64::new(0.2 * x.0 as f64, -0.1));
        let out = conv_power(&g, &t, &f, u, 1).unwrap();
        assert!(out.function.sub(&f).max_abs_fiber(&g, u, u) < 1e-12);
    }

    #[test]
    fn uniform_probability_density_is_convolution_idempotent() {
        let g = group_groupoid(&GroupTable::cyclic(4)).unwrap();
        let t = dual_object(&g, DEFAULT_SEED, 1e-9).unwrap();
        let u = Unit(0);
        // Density 1 against λ_u^u is the uniform probability.
        let f = FunctionBundle::from_fn(&g, |_| C64::new(1.0, 0.0));
        for k in [2usize, 5, 32] {
            let out = conv_power(&g, &t, &f, u, k).unwrap();
            assert!(out.function.sub(&f).max_abs_fiber(&g, u, u) < 1e-10);
        }
    }

    #[test]
    fn z2_walk_closed_form() {
        let g = group_groupoid(&GroupTable::cyclic(2)).unwrap();
        let t = dual_object(&g, DEFAULT_SEED, 1e-9).unwrap();
        let u = Unit(0);
        let p = 0.3_f64;
        // Probability weights (p, 1−p) have density (2p, 2(1−p)) against
        // λ_u^u = 1/2; the k-step weights are (1 ± (2p−1)^k)/2.
        let mut f = FunctionBundle::zeros(&g);
        let e = g.unit_arrow(u);
        let a = g.arrows().find(|&x| x != e).unwrap();
        f.set(e, C64::new(2.0 * p, 0.0));
        f.set(a, C64::new(2.0 * (1.0 - p), 0.0));
        let q = 2.0 * p - 1.0;
        for k in 1..=10 {
            let out = conv_power(&g, &t, &f, u, k).unwrap().function;
            let we = (1.0 + q.powi(k as i32)) / 2.0;
            let wa = (1.0 - q.powi(k as i32)) / 2.0;
            assert!((out.value(e) - C64::new(2.0 * we, 0.0)).norm() < 1e-12);
            assert!((out.value(a) - C64::new(2.0 * wa, 0.0)).norm() < 1e-12);
            // Cross-check against iterated direct convolution.
            let direct = direct_power(&g, &f, u, k).unwrap();
            assert!(out.sub(&direct).max_abs_fiber(&g, u, u) < 1e-12);
        }
    }

    #[test]
    fn conv_power_matches_iterated_convolve_fiber() {
        let g = group_groupoid(&GroupTable::symmetric3()).unwrap();
        let t = dual_object(&g, DEFAULT_SEED, 1e-9).unwrap();
        let u = Unit(0);
        let f = FunctionBundle::from_fn(&g, |x| {
            C64::new(0.4 * (x.0 as f64).cos(), 0.3 * (x.0 as f64).sin())
        });
        let mut acc = f.clone();
        for k in 2..=8 {
            acc = convolve_fiber(&g, &acc, &f);
            let spec = conv_power(&g, &t, &f, u, k).unwrap().function;
            assert!(
                spec.sub(&acc).max_abs_fiber(&g, u, u) < 1e-10,
                "k = {k} disagrees"
            );
            let direct = direct_power(&g, &f, u, k).unwrap();
            assert!(spec.sub(&direct).max_abs_fiber(&g, u, u) < 1e-10);
        }
    }

    #[test]
    fn product_isotropy_fiber_agreement_at_large_k() {
        let s3 = group_groupoid(&GroupTable::symmetric3()).unwrap();
        let p4 = pair_groupoid(4).unwrap();
        let g = product(&s3, &p4).unwrap();
        let t = dual_object(&g, DEFAULT_SEED, 1e-9).unwrap();
        let u = Unit(0);
        // Keep the transform contractive so 512 powers stay bounded.
        let f = FunctionBundle::from_fn(&g, |x| C64::new(0.5 + 0.05 * (x.0 % 3) as f64, 0.0))
            .restrict_fiber(&g, u, u);
        let report = bench(&g, &t, &f, u, 512, 1).unwrap();
        assert!(report.max_abs_err < 1e-8, "err {}", report.max_abs_err);
    }

    #[test]
    fn zero_power_is_rejected() {
        let g = group_groupoid(&GroupTable::cyclic(2)).unwrap();
        let t = dual_object(&g, DEFAULT_SEED, 1e-9).unwrap();
        let f = FunctionBundle::zeros(&g);
        assert!(matches!(
            conv_power(&g, &t, &f, Unit(0), 0),
            Err(SpectralError::ZeroPower(0))
        ));
    }

    #[test]
    fn overflow_risk_flagged_for_expanding_transforms() {
        let g = group_groupoid(&GroupTable::cyclic(2)).unwrap();
        let t = dual_object(&g, DEFAULT_SEED, 1e-9).unwrap();
        let u = Unit(0);
        let f = FunctionBundle::from_fn(&g, |_| C64::new(3.0, 0.0));
        let out = conv_power(&g, &t, &f, u, 128).unwrap();
        assert!(out.overflow_risk);
        let tame = FunctionBundle::from_fn(&g, |_| C64::new(1.0, 0.0));
        assert!(!conv_power(&g, &t, &tame, u, 128).unwrap().overflow_risk);
    }
}
