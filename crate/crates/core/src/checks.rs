//! Named property suites: Peter-Weyl completeness, Schur orthogonality,
//! inversion, Plancherel, homomorphism laws, character identities, the
//! center characterization and the diagonal (§4) suite. Each suite reports
//! per-identity max deviations against pinned tolerances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fourier::{
    character_function, coeff_inner, convolve_fiber, fourier_fiber, inner_fiber, inverse_fourier,
    involution, isotypic_project, translate_left, translate_right, CoeffBlock, FourierCoefficient,
    FunctionBundle,
};
use crate::groupoid::{FiniteGroupoid, Unit};
use crate::harmonic::{
    center_test, central_projection, character_bundle, class_function_violation,
    conjugacy_inner_at, conjugacy_inner_component, diag_plancherel_check, diag_transform,
    from_conjugacy, hat_diag, inverse_diag, is_class_function, norm_at_unit, scalar_check,
    spectral_inner, to_conjugacy, SpectralFunction,
};
use crate::linalg::{czero, identity, max_norm, random_matrix, random_vector, C64, CMat};
use crate::rep::IrrepTable;

/// Check-suite selector. `All` runs every suite below.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    PeterWeyl,
    Orthogonality,
    Plancherel,
    Inversion,
    Homomorphism,
    Characters,
    Center,
    Diagonal,
}

impl Suite {
    pub fn parse(name: &str) -> Option<Suite> {
        Some(match name {
            "all" => Suite::All,
            "peterweyl" => Suite::PeterWeyl,
            "orthogonality" => Suite::Orthogonality,
            "plancherel" => Suite::Plancherel,
            "inversion" => Suite::Inversion,
            "homomorphism" => Suite::Homomorphism,
            "characters" => Suite::Characters,
            "center" => Suite::Center,
            "diagonal" => Suite::Diagonal,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::PeterWeyl => "peterweyl",
            Suite::Orthogonality => "orthogonality",
            Suite::Plancherel => "plancherel",
            Suite::Inversion => "inversion",
            Suite::Homomorphism => "homomorphism",
            Suite::Characters => "characters",
            Suite::Center => "center",
            Suite::Diagonal => "diagonal",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub max_dev: f64,
    pub tol: f64,
}

impl CheckOutcome {
    pub fn pass(&self) -> bool {
        self.max_dev <= self.tol
    }
}

#[derive(Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass())
    }
}

struct Recorder {
    checks: Vec<CheckOutcome>,
}

impl Recorder {
    fn new() -> Self {
        Recorder { checks: Vec::new() }
    }

    fn record(&mut self, name: &str, dev: f64, tol: f64) {
        match self.checks.iter_mut().find(|c| c.name == name) {
            Some(c) => c.max_dev = c.max_dev.max(dev),
            None => self.checks.push(CheckOutcome {
                name: name.to_string(),
                max_dev: dev,
                tol,
            }),
        }
    }
}

fn random_fiber_fn<R: Rng>(g: &FiniteGroupoid, u: Unit, v: Unit, rng: &mut R) -> FunctionBundle {
    let mut f = FunctionBundle::zeros(g);
    for &x in g.fiber(u, v) {
        f.set(x, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    }
    f
}

fn random_coeff<R: Rng>(
    g: &FiniteGroupoid,
    table: &IrrepTable,
    u: Unit,
    v: Unit,
    rng: &mut R,
) -> FourierCoefficient {
    let blocks = table
        .component_entries(g.component_of(u))
        .into_iter()
        .map(|entry| {
            let d = entry.rep.orbit_dim();
            CoeffBlock {
                id: entry.id.clone(),
                dim: d,
                mat: random_matrix(rng, d, d),
            }
        })
        .collect();
    FourierCoefficient { u, v, blocks }
}

/// All fiber pairs `(u, v)` within one component, `u` the base unit first.
fn component_fibers(g: &FiniteGroupoid, ci: usize) -> Vec<(Unit, Unit)> {
    let units = &g.components()[ci].units;
    let mut out = Vec::new();
    for &u in units {
        for &v in units {
            out.push((u, v));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

fn suite_peterweyl(g: &FiniteGroupoid, table: &IrrepTable, rec: &mut Recorder) {
    for (ci, _) in g.components().iter().enumerate() {
        let entries = table.component_entries(ci);
        for (u, v) in component_fibers(g, ci) {
            let fiber = g.fiber(u, v);
            let n = fiber.len();
            // Columns: √d · π(x)_{ij} for each irrep π and entry (i,j).
            let total: usize = entries.iter().map(|e| e.rep.orbit_dim().pow(2)).sum();
            rec.record(
                "peterweyl_dimension_sum_d_squared",
                if total == n { 0.0 } else { 1.0 },
                0.0,
            );
            let mut cols = CMat::zeros(n, total);
            let mut col = 0;
            for entry in &entries {
                let d = entry.rep.orbit_dim();
                let scale = (d as f64).sqrt();
                for i in 0..d {
                    for j in 0..d {
                        for (row, &x) in fiber.iter().enumerate() {
                            cols[(row, col)] = entry.rep.matrix(x)[(i, j)] * scale;
                        }
                        col += 1;
                    }
                }
            }
            let gram = cols.adjoint() * &cols * C64::new(1.0 / n as f64, 0.0);
            rec.record(
                "peterweyl_gram_identity",
                max_norm(&(gram - identity(total))),
                1e-9,
            );
        }
    }
}

fn suite_orthogonality(
    g: &FiniteGroupoid,
    table: &IrrepTable,
    seed: u64,
    trials: usize,
    rec: &mut Recorder,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5afe_0001);
    for (ci, comp) in g.components().iter().enumerate() {
        let entries = table.component_entries(ci);
        let u = comp.base;
        for tau in &entries {
            for rho in &entries {
                let same = tau.id == rho.id;
                let dt = tau.rep.orbit_dim();
                let dr = rho.rep.orbit_dim();
                for _ in 0..trials.max(1) {
                    let a = random_matrix(&mut rng, dt, dr);
                    let t = random_matrix(&mut rng, dt, dt);
                    let s = random_matrix(&mut rng, dr, dr);
                    let xi = random_vector(&mut rng, dt);
                    let eta = random_vector(&mut rng, dr);
                    for &v in &comp.units {
                        let fiber = g.fiber(u, v);
                        let w = C64::new(g.fiber_weight(u, v), 0.0);
                        // (i) Σ τ(x) A ρ(x⁻¹) λ = δ Tr(A)/d · id.
                        let mut lhs1 = CMat::zeros(dt, dr);
                        // (ii) Σ (τ(x)ξ)(ρ(x⁻¹)η)ᵀ λ = δ η ξᵀ / d.
                        let mut lhs2 = CMat::zeros(dt, dr);
                        // (iii) Σ Tr(Tτ(x)) Tr(Sρ(x⁻¹)) λ = δ Tr(TS)/d.
                        let mut lhs3 = czero();
                        // (iv) Σ Tr(Tτ(x)) conj(Tr(Sρ(x))) λ = δ Tr(TS*)/d.
                        let mut lhs4 = czero();
                        // (v) Σ Tr(Tτ(x)) ρ(x⁻¹) λ = δ T/d.
                        let mut lhs5 = CMat::zeros(dr, dr);
                        for &x in fiber {
                            let tx = tau.rep.matrix(x);
                            let rxi = rho.rep.matrix(g.inverse(x));
                            let rx = rho.rep.matrix(x);
                            lhs1 += tx * &a * rxi * w;
                            let left = tx * &xi;
                            let right = rxi * &eta;
                            lhs2 += &left * right.transpose() * w;
                            let tr_t: C64 = (&t * tx).diagonal().sum();
                            let tr_s: C64 = (&s * rxi).diagonal().sum();
                            let tr_sx: C64 = (&s * rx).diagonal().sum();
                            lhs3 += tr_t * tr_s * w;
                            lhs4 += tr_t * tr_sx.conj() * w;
                            lhs5 += rxi.map(|z| z * tr_t * w);
                        }
                        let d = C64::new(dt as f64, 0.0);
                        let (rhs1, rhs2, rhs3, rhs4, rhs5) = if same {
                            let tr_a: C64 = a.diagonal().sum();
                            (
                                identity(dt).map(|z| z * tr_a / d),
                                (&eta * xi.transpose()).map(|z| z / d),
                                (&t * &s).diagonal().sum() / d,
                                (&t * s.adjoint()).diagonal().sum() / d,
                                t.map(|z| z / d),
                            )
                        } else {
                            (
                                CMat::zeros(dt, dr),
                                CMat::zeros(dt, dr),
                                czero(),
                                czero(),
                                CMat::zeros(dr, dr),
                            )
                        };
                        rec.record("orthogonality_i", max_norm(&(lhs1 - rhs1)), 1e-9);
                        rec.record("orthogonality_ii", max_norm(&(lhs2 - rhs2)), 1e-9);
                        rec.record("orthogonality_iii", (lhs3 - rhs3).norm(), 1e-9);
                        rec.record("orthogonality_iv", (lhs4 - rhs4).norm(), 1e-9);
                        rec.record("orthogonality_v", max_norm(&(lhs5 - rhs5)), 1e-9);
                    }
                }
            }
        }
    }
}

fn suite_inversion(
    g: &FiniteGroupoid,
    table: &IrrepTable,
    seed: u64,
    trials: usize,
    rec: &mut Recorder,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5afe_0002);
    for (ci, _) in g.components().iter().enumerate() {
        for (u, v) in component_fibers(g, ci) {
            for _ in 0..trials.max(1) {
                let f = random_fiber_fn(g, u, v, &mut rng);
                let round = inverse_fourier(g, table, &fourier_fiber(g, table, &f, u, v));
                rec.record(
                    "inversion_f_inv_f",
                    round.sub(&f).max_abs_fiber(g, u, v),
                    1e-10,
                );
                let h = random_coeff(g, table, u, v, &mut rng);
                let back = fourier_fiber(g, table, &inverse_fourier(g, table, &h), u, v);
                rec.record("inversion_f_f_inv", back.sub(&h).max_abs(), 1e-10);
            }
        }
    }
}

fn suite_plancherel(
    g: &FiniteGroupoid,
    table: &IrrepTable,
    seed: u64,
    trials: usize,
    rec: &mut Recorder,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5afe_0003);
    for (ci, _) in g.components().iter().enumerate() {
        let dim_sum: usize = table
            .component_entries(ci)
            .iter()
            .map(|e| e.rep.orbit_dim().pow(2))
            .sum();
        for (u, v) in component_fibers(g, ci) {
            rec.record(
                "plancherel_dimension_match",
                if dim_sum == g.fiber(u, v).len() { 0.0 } else { 1.0 },
                0.0,
            );
            for _ in 0..trials.max(1) {
                let f = random_fiber_fn(g, u, v, &mut rng);
                let h = random_fiber_fn(g, u, v, &mut rng);
                let lhs = coeff_inner(
                    &fourier_fiber(g, table, &f, u, v),
                    &fourier_fiber(g, table, &h, u, v),
                );
                let rhs = inner_fiber(g, &f, &h, u, v);
                rec.record("plancherel_parseval", (lhs - rhs).norm(), 1e-10);

                let a = random_coeff(g, table, u, v, &mut rng);
                let b = random_coeff(g, table, u, v, &mut rng);
                let lhs2 = inner_fiber(
                    g,
                    &inverse_fourier(g, table, &a),
                    &inverse_fourier(g, table, &b),
                    u,
                    v,
                );
                rec.record(
                    "plancherel_inverse_isometry",
                    (lhs2 - coeff_inner(&a, &b)).norm(),
                    1e-10,
                );
            }
        }
    }
}

fn suite_homomorphism(
    g: &FiniteGroupoid,
    table: &IrrepTable,
    seed: u64,
    trials: usize,
    rec: &mut Recorder,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5afe_0004);
    for (ci, comp) in g.components().iter().enumerate() {
        let units = comp.units.clone();
        for &u in &units {
            for &w in &units {
                for &v in &units {
                    for _ in 0..trials.max(1) {
                        // Convolution theorem: F_{u,v}(f∗g) = F_{u,w}(g)·F_{w,v}(f)
                        // for f on G_w^v, g on G_u^w (fiberwise measure).
                        let f = random_fiber_fn(g, w, v, &mut rng);
                        let h = random_fiber_fn(g, u, w, &mut rng);
                        let conv = convolve_fiber(g, &f, &h);
                        let lhs = fourier_fiber(g, table, &conv, u, v);
                        let rhs = fourier_fiber(g, table, &h, u, w)
                            .product(&fourier_fiber(g, table, &f, w, v));
                        rec.record("homomorphism_convolution", lhs.sub(&rhs).max_abs(), 1e-10);
                    }
                }
            }
        }
        // Linearity, involution, translations and Prop 3.4(ii)/(iii) per fiber.
        for (u, v) in component_fibers(g, ci) {
            for _ in 0..trials.max(1) {
                let f = random_fiber_fn(g, u, v, &mut rng);
                let h = random_fiber_fn(g, u, v, &mut rng);
                let alpha = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let lin_lhs = fourier_fiber(g, table, &f.scale(alpha).add(&h), u, v);
                let lin_rhs = fourier_fiber(g, table, &f, u, v)
                    .scale(alpha)
                    .add(&fourier_fiber(g, table, &h, u, v));
                rec.record("homomorphism_linearity", lin_lhs.sub(&lin_rhs).max_abs(), 1e-10);

                // Involution: F_{v,u}(f*) = F_{u,v}(f)* (Lemma 2.3(iii)).
                let lhs = fourier_fiber(g, table, &involution(g, &f), v, u);
                let rhs = fourier_fiber(g, table, &f, u, v).adjoint();
                rec.record("homomorphism_involution", lhs.sub(&rhs).max_abs(), 1e-10);

                // Left translation by x ∈ G_v^v: F(x.f)(π) = F(f)(π)·π(x⁻¹).
                let iso_v = g.fiber(v, v);
                let x = iso_v[rng.gen_range(0..iso_v.len())];
                let lhs = fourier_fiber(
                    g,
                    table,
                    &translate_left(g, x, &f).expect("x is isotropy"),
                    u,
                    v,
                );
                let mut rhs = fourier_fiber(g, table, &f, u, v);
                for block in &mut rhs.blocks {
                    let entry = table.by_id(&block.id).expect("table id");
                    block.mat = &block.mat * entry.rep.matrix(g.inverse(x));
                }
                rec.record("homomorphism_translate_left", lhs.sub(&rhs).max_abs(), 1e-10);

                // Right translation by y ∈ G_u^u: F(f.y)(π) = π(y)·F(f)(π).
                let iso_u = g.fiber(u, u);
                let y = iso_u[rng.gen_range(0..iso_u.len())];
                let lhs = fourier_fiber(
                    g,
                    table,
                    &translate_right(g, y, &f).expect("y is isotropy"),
                    u,
                    v,
                );
                let mut rhs = fourier_fiber(g, table, &f, u, v);
                for block in &mut rhs.blocks {
                    let entry = table.by_id(&block.id).expect("table id");
                    block.mat = entry.rep.matrix(y) * &block.mat;
                }
                rec.record("homomorphism_translate_right", lhs.sub(&rhs).max_abs(), 1e-10);

                // Prop 3.4(iii): F⁻¹(h*) = (F⁻¹(h))*.
                let h = random_coeff(g, table, u, v, &mut rng);
                let lhs = inverse_fourier(g, table, &h.adjoint());
                let rhs = involution(g, &inverse_fourier(g, table, &h));
                rec.record(
                    "homomorphism_inverse_involution",
                    lhs.sub(&rhs).max_abs_fiber(g, v, u),
                    1e-10,
                );
            }
        }
        // Prop 3.4(ii) on isotropy fibers, where coefficient products are
        // defined: F⁻¹(hk) = F⁻¹(k) ∗ F⁻¹(h).
        for &u in &units {
            for _ in 0..trials.max(1) {
                let h = random_coeff(g, table, u, u, &mut rng);
                let k = random_coeff(g, table, u, u, &mut rng);
                let lhs = inverse_fourier(g, table, &h.product(&k));
                let rhs = convolve_fiber(
                    g,
                    &inverse_fourier(g, table, &k),
                    &inverse_fourier(g, table, &h),
                );
                rec.record(
                    "homomorphism_inverse_convolution",
                    lhs.sub(&rhs).max_abs_fiber(g, u, u),
                    1e-10,
                );
            }
        }
    }
}

fn suite_characters(
    g: &FiniteGroupoid,
    table: &IrrepTable,
    seed: u64,
    trials: usize,
    rec: &mut Recorder,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5afe_0005);
    for (ci, comp) in g.components().iter().enumerate() {
        let entries = table.component_entries(ci);
        for &u in &comp.units {
            // Cor 2.6: χ^π ∗ χ^π' = δ · χ^π / d^π (fiberwise measure).
            for tau in &entries {
                let chi_t = character_function(g, &tau.rep, u);
                for rho in &entries {
                    let chi_r = character_function(g, &rho.rep, u);
                    let conv = convolve_fiber(g, &chi_t, &chi_r);
                    let expected = if tau.id == rho.id {
                        chi_t.scale(C64::new(1.0 / tau.rep.orbit_dim() as f64, 0.0))
                    } else {
                        FunctionBundle::zeros(g)
                    };
                    rec.record(
                        "characters_cor_2_6",
                        conv.sub(&expected).max_abs_fiber(g, u, u),
                        1e-10,
                    );
                }
            }
            // Lemma 3.7: χ^π lies in its own coefficient space E_{u,u}^π.
            for tau in &entries {
                let chi = character_function(g, &tau.rep, u);
                for rho in &entries {
                    let proj = isotypic_project(g, &rho.rep, &chi, u, u);
                    let expected = if tau.id == rho.id { chi.clone() } else { FunctionBundle::zeros(g) };
                    rec.record(
                        "characters_lemma_3_7",
                        proj.sub(&expected).max_abs_fiber(g, u, u),
                        1e-9,
                    );
                }
            }
            // Cor 2.5 on random functions: idempotent, complete, orthogonal.
            for &v in &comp.units {
                for _ in 0..trials.max(1) {
                    let f = random_fiber_fn(g, u, v, &mut rng);
                    let mut total = FunctionBundle::zeros(g);
                    let projections: Vec<FunctionBundle> = entries
                        .iter()
                        .map(|e| isotypic_project(g, &e.rep, &f, u, v))
                        .collect();
                    for (ei, p) in projections.iter().enumerate() {
                        let twice = isotypic_project(g, &entries[ei].rep, p, u, v);
                        rec.record(
                            "characters_projection_idempotent",
                            twice.sub(p).max_abs_fiber(g, u, v),
                            1e-10,
                        );
                        total = total.add(p);
                    }
                    rec.record(
                        "characters_projection_complete",
                        total.sub(&f).max_abs_fiber(g, u, v),
                        1e-10,
                    );
                    for i in 0..projections.len() {
                        for j in 0..i {
                            rec.record(
                                "characters_projection_orthogonal",
                                inner_fiber(g, &projections[i], &projections[j], u, v).norm(),
                                1e-10,
                            );
                        }
                    }
                }
            }
        }
    }
}

fn suite_center(g: &FiniteGroupoid, table: &IrrepTable, seed: u64, rec: &mut Recorder) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5afe_0006);
    // Lemma 4.2 over the indicator basis of the isotropy bundle: central iff
    // class function, exactly.
    for x in g.isotropy_arrows() {
        let f = FunctionBundle::indicator(g, x);
        let (central, _) = center_test(g, &f, 1e-12);
        let (class, _) = is_class_function(g, &f, 1e-12);
        rec.record(
            "center_lemma_4_2_equivalence",
            if central == class { 0.0 } else { 1.0 },
            0.0,
        );
    }
    // Class-sum indicators are central (and class functions).
    let cq = g.conjugacy_groupoid();
    for (ci, class) in cq.classes().iter().enumerate() {
        let mut f = FunctionBundle::zeros(g);
        for &x in &class.arrows {
            f.set(x, C64::new(1.0, 0.0));
        }
        let (central, _) = center_test(g, &f, 1e-12);
        let (class_fn, _) = is_class_function(g, &f, 1e-12);
        let _ = ci;
        rec.record(
            "center_class_sums_central",
            if central && class_fn { 0.0 } else { 1.0 },
            0.0,
        );
    }
    // Characters are central.
    for entry in &table.entries {
        let chi = character_bundle(g, &entry.rep);
        let (central, _) = center_test(g, &chi, 1e-9);
        rec.record("center_characters_central", if central { 0.0 } else { 1.0 }, 0.0);
    }
    // Conjugation averaging: idempotent projection commuting with ∗.
    for _ in 0..4 {
        let mut f = FunctionBundle::zeros(g);
        let mut h = FunctionBundle::zeros(g);
        for x in g.arrows() {
            f.set(x, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            h.set(x, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
        let p = central_projection(g, &f);
        rec.record(
            "center_projection_class",
            class_function_violation(g, &p),
            1e-12,
        );
        let pp = central_projection(g, &p);
        rec.record("center_projection_idempotent", pp.sub(&p).max_abs(), 1e-12);
        let ph = central_projection(g, &h);
        let lhs = convolve_fiber(g, &p, &ph);
        let rhs = central_projection(g, &convolve_fiber(g, &p, &ph));
        rec.record(
            "center_projection_convolution",
            lhs.sub(&rhs).max_abs(),
            1e-12,
        );
    }
}

fn suite_diagonal(
    g: &FiniteGroupoid,
    table: &IrrepTable,
    seed: u64,
    trials: usize,
    rec: &mut Recorder,
) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5afe_0007);
    let cq = g.conjugacy_groupoid();
    let trials = trials.max(1).min(16);
    for (ci, comp) in g.components().iter().enumerate() {
        // Prop 4.5 scalar form on random class functions.
        for _ in 0..trials {
            let mut raw = FunctionBundle::zeros(g);
            for x in g.arrows() {
                raw.set(x, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
            let f = central_projection(g, &raw);
            let report = scalar_check(g, table, &f);
            rec.record("diagonal_prop_4_5_scalar", report.max_scalar_dev, 1e-10);
            rec.record(
                "diagonal_hat_constant_in_u",
                report.max_constancy_dev,
                1e-10,
            );

            // Prop 4.6: hat is an algebra homomorphism on class functions.
            let mut raw2 = FunctionBundle::zeros(g);
            for x in g.arrows() {
                raw2.set(x, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
            let h = central_projection(g, &raw2);
            let conv = convolve_fiber(g, &f, &h);
            for entry in table.component_entries(ci) {
                let u = comp.base;
                let lhs = hat_diag(g, &entry.rep, &conv, u);
                let rhs = hat_diag(g, &entry.rep, &f, u) * hat_diag(g, &entry.rep, &h, u);
                rec.record("diagonal_prop_4_6_homomorphism", (lhs - rhs).norm(), 1e-10);
                let lhs_star = hat_diag(g, &entry.rep, &involution(g, &f), u);
                let rhs_star = hat_diag(g, &entry.rep, &f, u).conj();
                rec.record(
                    "diagonal_prop_4_6_involution",
                    (lhs_star - rhs_star).norm(),
                    1e-10,
                );
            }

            // Lemma 4.14: per-unit norm preservation under the conjugacy
            // quotient, and round trip.
            if let Ok(pushed) = to_conjugacy(g, &cq, &f) {
                for &u in &comp.units {
                    let up = norm_at_unit(g, &f, u);
                    let down = conjugacy_inner_at(g, &cq, &pushed, &pushed, u)
                        .re
                        .max(0.0)
                        .sqrt();
                    rec.record("diagonal_lemma_4_14_norm", (up - down).abs(), 1e-12);
                }
                let lifted = from_conjugacy(g, &cq, &pushed);
                let mut dev: f64 = 0.0;
                for x in g.isotropy_arrows() {
                    dev = dev.max((lifted.value(x) - f.value(x)).norm());
                }
                rec.record("diagonal_conjugacy_round_trip", dev, 1e-10);
            } else {
                rec.record("diagonal_lemma_4_14_norm", f64::INFINITY, 1e-12);
            }
        }

        // Prop 4.10 on random spectral functions.
        for _ in 0..trials {
            let mut s = SpectralFunction::zeros(table, ci);
            let mut t = SpectralFunction::zeros(table, ci);
            for (_, _, v) in &mut s.values {
                *v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            for (_, _, v) in &mut t.values {
                *v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            let s_inv = inverse_diag(g, table, &s);
            let t_inv = inverse_diag(g, table, &t);

            // (i) round trip (ǧ)ˆ = g.
            let (round, constancy) = diag_transform(g, table, &s_inv, ci);
            rec.record("diagonal_prop_4_10_i", round.sub(&s).max_abs(), 1e-10);
            rec.record("diagonal_hat_constant_in_u", constancy, 1e-10);

            // (ii) (gh)ˇ = ǧ ∗ ȟ (order immaterial: scalar product).
            let prod_inv = inverse_diag(g, table, &s.product(&t));
            let conv = convolve_fiber(g, &t_inv, &s_inv);
            let mut dev: f64 = 0.0;
            for &u in &comp.units {
                dev = dev.max(conv.sub(&prod_inv).max_abs_fiber(g, u, u));
            }
            rec.record("diagonal_prop_4_10_ii", dev, 1e-10);

            // (iii) (g*)ˇ = (ǧ)*.
            let star_inv = inverse_diag(g, table, &s.star());
            let inv_star = involution(g, &s_inv);
            let mut dev: f64 = 0.0;
            for &u in &comp.units {
                dev = dev.max(star_inv.sub(&inv_star).max_abs_fiber(g, u, u));
            }
            rec.record("diagonal_prop_4_10_iii", dev, 1e-10);

            // (iv) isometry into L²(G′^G).
            if let (Ok(sc), Ok(tc)) = (to_conjugacy(g, &cq, &s_inv), to_conjugacy(g, &cq, &t_inv)) {
                let lhs = conjugacy_inner_component(g, &cq, &sc, &tc, ci);
                let rhs = spectral_inner(&s, &t);
                rec.record("diagonal_prop_4_10_iv", (lhs - rhs).norm(), 1e-10);
            } else {
                rec.record("diagonal_prop_4_10_iv", f64::INFINITY, 1e-10);
            }
        }

        // Thm 4.15: Gram of {(δ_π)ˇ} equals the spectral measure; class
        // count matches irrep count.
        match diag_plancherel_check(g, table, &cq, ci) {
            Ok(report) => {
                rec.record("diagonal_thm_4_15_gram", report.max_dev, 1e-10);
                rec.record(
                    "diagonal_class_count_equals_irreps",
                    if report.class_count == report.irrep_count { 0.0 } else { 1.0 },
                    0.0,
                );
            }
            Err(_) => rec.record("diagonal_thm_4_15_gram", f64::INFINITY, 1e-10),
        }
    }
}

/// Runs one suite (or all of them) and reports per-identity deviations.
pub fn run_suite(
    g: &FiniteGroupoid,
    table: &IrrepTable,
    suite: Suite,
    seed: u64,
    trials: usize,
) -> SuiteReport {
    let mut rec = Recorder::new();
    let run_one = |s: Suite, rec: &mut Recorder| match s {
        Suite::PeterWeyl => suite_peterweyl(g, table, rec),
        Suite::Orthogonality => suite_orthogonality(g, table, seed, trials, rec),
        Suite::Plancherel => suite_plancherel(g, table, seed, trials, rec),
        Suite::Inversion => suite_inversion(g, table, seed, trials, rec),
        Suite::Homomorphism => suite_homomorphism(g, table, seed, trials, rec),
        Suite::Characters => suite_characters(g, table, seed, trials, rec),
        Suite::Center => suite_center(g, table, seed, rec),
        Suite::Diagonal => suite_diagonal(g, table, seed, trials, rec),
        Suite::All => unreachable!(),
    };
    match suite {
        Suite::All => {
            for s in [
                Suite::PeterWeyl,
                Suite::Orthogonality,
                Suite::Plancherel,
                Suite::Inversion,
                Suite::Homomorphism,
                Suite::Characters,
                Suite::Center,
                Suite::Diagonal,
            ] {
                run_one(s, &mut rec);
            }
        }
        s => run_one(s, &mut rec),
    }
    SuiteReport {
        suite: suite.name().to_string(),
        checks: rec.checks,
    }
}
