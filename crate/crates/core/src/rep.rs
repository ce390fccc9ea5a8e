//! Numerical construction of the unitary dual: irreducible unitary
//! representations of the isotropy groups by randomized commutant splitting
//! of the regular representation, induction to representation bundles along
//! the component transversal, and representation-theoretic predicates.

use nalgebra::SymmetricEigen;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::groupoid::{Arrow, FiniteGroupoid, TransitiveComponent, Unit};
use crate::linalg::{
    cluster_sorted, cone, czero, identity, max_norm, nullspace, random_matrix, CMat, C64,
};

/// Certification tolerance for homomorphism and unitarity checks.
pub const REP_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum RepError {
    #[error("eigenvalue clustering ambiguous at tolerance {tol} after {attempts} attempts")]
    SplitFailure { tol: f64, attempts: usize },
    #[error("singular value {0} too close to the rank threshold")]
    ToleranceError(f64),
    #[error("unit {0} lies off the representation's supporting orbit")]
    UnitOffOrbit(String),
}

/// A unitary representation of a finite group, as one matrix per element of
/// its multiplication table.
#[derive(Debug, Clone)]
pub struct GroupIrrep {
    pub dim: usize,
    pub matrices: Vec<CMat>,
}

impl GroupIrrep {
    pub fn character(&self) -> Vec<C64> {
        self.matrices.iter().map(|m| m.diagonal().sum()).collect()
    }
}

/// A representation bundle: a dimension per unit (zero off the supporting
/// orbit) and a `d_{r(x)} × d_{s(x)}` matrix per arrow.
#[derive(Debug, Clone)]
pub struct RepBundle {
    dims: Vec<usize>,
    matrices: Vec<CMat>,
}

impl RepBundle {
    pub fn new(dims: Vec<usize>, matrices: Vec<CMat>) -> Self {
        RepBundle { dims, matrices }
    }

    pub fn dim(&self, u: Unit) -> usize {
        self.dims[u.0]
    }

    /// Common dimension on the supporting orbit.
    pub fn orbit_dim(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    pub fn matrix(&self, x: Arrow) -> &CMat {
        &self.matrices[x.0]
    }

    /// Checks the homomorphism, identity and unitarity laws exhaustively;
    /// returns the pass verdict at [`REP_TOL`] and the max deviation.
    pub fn is_representation(&self, g: &FiniteGroupoid) -> (bool, f64) {
        let mut dev: f64 = 0.0;
        for u in g.units() {
            let e = g.unit_arrow(u);
            dev = dev.max(max_norm(&(self.matrix(e) - identity(self.dim(u)))));
        }
        for x in g.arrows() {
            let inv = &self.matrix(x).adjoint();
            dev = dev.max(max_norm(&(self.matrix(g.inverse(x)) - inv)));
            for y in g.arrows() {
                if let Some(xy) = g.compose(x, y) {
                    dev = dev.max(max_norm(&(self.matrix(xy) - self.matrix(x) * self.matrix(y))));
                }
            }
        }
        (dev < REP_TOL, dev)
    }

    /// Character at `u`: `x ↦ Tr π(x)` over the fiber `G_u^u` in fiber order.
    pub fn character(&self, g: &FiniteGroupoid, u: Unit) -> Result<Vec<C64>, RepError> {
        if self.dim(u) == 0 {
            return Err(RepError::UnitOffOrbit(g.unit_name(u).to_string()));
        }
        Ok(g.fiber(u, u)
            .iter()
            .map(|&x| self.matrix(x).diagonal().sum())
            .collect())
    }

    pub fn direct_sum(&self, g: &FiniteGroupoid, other: &RepBundle) -> RepBundle {
        let dims: Vec<usize> = (0..g.n_units())
            .map(|u| self.dims[u] + other.dims[u])
            .collect();
        let matrices = g
            .arrows()
            .map(|x| {
                let (a, b) = (self.matrix(x), other.matrix(x));
                let mut m = CMat::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
                m.view_mut((0, 0), a.shape()).copy_from(a);
                m.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
                m
            })
            .collect();
        RepBundle::new(dims, matrices)
    }

    pub fn tensor(&self, g: &FiniteGroupoid, other: &RepBundle) -> RepBundle {
        let dims = (0..g.n_units())
            .map(|u| self.dims[u] * other.dims[u])
            .collect();
        let matrices = g
            .arrows()
            .map(|x| self.matrix(x).kronecker(other.matrix(x)))
            .collect();
        RepBundle::new(dims, matrices)
    }

    pub fn conjugate(&self, g: &FiniteGroupoid) -> RepBundle {
        let matrices = g.arrows().map(|x| self.matrix(x).map(|z| z.conj())).collect();
        RepBundle::new(self.dims.clone(), matrices)
    }

    /// Conjugates by a bundle of unitaries `U_u`: `π'(x) = U_{r(x)} π(x) U_{s(x)}*`.
    pub fn conjugated_by(&self, g: &FiniteGroupoid, unitaries: &[CMat]) -> RepBundle {
        let matrices = g
            .arrows()
            .map(|x| {
                &unitaries[g.dst(x).0] * self.matrix(x) * unitaries[g.src(x).0].adjoint()
            })
            .collect();
        RepBundle::new(self.dims.clone(), matrices)
    }
}

/// One entry of the unitary dual, with a stable identifier.
#[derive(Debug, Clone)]
pub struct IrrepEntry {
    pub id: String,
    pub component: usize,
    pub rep: RepBundle,
}

/// The unitary dual Ĝ, enumerated per transitive component.
#[derive(Debug, Clone)]
pub struct IrrepTable {
    pub entries: Vec<IrrepEntry>,
}

impl IrrepTable {
    pub fn component_entries(&self, component: usize) -> Vec<&IrrepEntry> {
        self.entries
            .iter()
            .filter(|e| e.component == component)
            .collect()
    }

    pub fn by_id(&self, id: &str) -> Option<&IrrepEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

fn identity_index(table: &[Vec<usize>]) -> usize {
    let n = table.len();
    (0..n)
        .find(|&e| (0..n).all(|j| table[e][j] == j && table[j][e] == j))
        .expect("validated group table has an identity")
}

fn inverse_indices(table: &[Vec<usize>]) -> Vec<usize> {
    let id = identity_index(table);
    let n = table.len();
    (0..n)
        .map(|i| (0..n).find(|&j| table[i][j] == id).expect("group inverse"))
        .collect()
}

/// Computes an orthonormal basis of the commutant of a matrix representation
/// by solving the intertwining system `M(h)C = CM(h)` for all `h`.
fn commutant_basis(mats: &[CMat], rel_tol: f64) -> Result<Vec<CMat>, RepError> {
    let d = mats[0].nrows();
    let mut a = CMat::zeros(mats.len() * d * d, d * d);
    for (h, m) in mats.iter().enumerate() {
        // Row (i,j): sum_{k,l} (M[i,k] δ_{jl} - δ_{ik} M[l,j]) C[k,l] = 0.
        for i in 0..d {
            for j in 0..d {
                let row = h * d * d + i * d + j;
                for k in 0..d {
                    a[(row, k * d + j)] += m[(i, k)];
                }
                for l in 0..d {
                    a[(row, i * d + l)] -= m[(l, j)];
                }
            }
        }
    }
    let (_, basis) = nullspace(&a, rel_tol, 1.0).map_err(RepError::ToleranceError)?;
    Ok(basis
        .iter()
        .map(|v| CMat::from_fn(d, d, |i, j| v[i * d + j]))
        .collect())
}

/// Splits a dense unitary representation into irreducible blocks along the
/// eigenspaces of a random Hermitian commutant element.
fn split_dense(
    mats: &[CMat],
    basis: Option<Vec<CMat>>,
    rng: &mut ChaCha8Rng,
    tol: f64,
) -> Result<Vec<Vec<CMat>>, RepError> {
    let d = mats[0].nrows();
    if d == 1 {
        return Ok(vec![mats.to_vec()]);
    }
    let basis = match basis {
        Some(b) => b,
        None => commutant_basis(mats, 1e-8)?,
    };
    if basis.len() <= 1 {
        return Ok(vec![mats.to_vec()]);
    }
    let mut k = CMat::zeros(d, d);
    for b in &basis {
        let c = C64::new(rand::Rng::gen_range(rng, -1.0..1.0), rand::Rng::gen_range(rng, -1.0..1.0));
        k += b.map(|z| z * c);
    }
    let k = (&k + k.adjoint()).map(|z| z * C64::new(0.5, 0.0));
    let eig = SymmetricEigen::new(k);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let radius = sorted.iter().map(|v| v.abs()).fold(0.0_f64, f64::max);
    let theta = tol * radius.max(1.0);
    let clusters = cluster_sorted(&sorted, theta);
    if clusters.len() <= 1 {
        return Err(RepError::SplitFailure { tol, attempts: 1 });
    }
    // A gap barely above the clustering threshold cannot be trusted.
    for w in clusters.windows(2) {
        let gap = sorted[w[1].start] - sorted[w[0].end - 1];
        if gap < 1e3 * theta {
            return Err(RepError::SplitFailure { tol, attempts: 1 });
        }
    }
    let mut blocks = Vec::new();
    for cluster in clusters {
        let m = cluster.len();
        let v = CMat::from_fn(d, m, |i, j| eig.eigenvectors[(i, order[cluster.start + j])]);
        // Eigenvector columns are orthonormal; a QR pass guards against
        // rounding in nearly-degenerate clusters.
        let v = v.qr().q();
        let sub: Vec<CMat> = mats.iter().map(|mh| v.adjoint() * mh * &v).collect();
        blocks.extend(split_dense(&sub, None, rng, tol)?);
    }
    Ok(blocks)
}

/// Rounded character key for canonical ordering and deduplication.
fn character_key(chi: &[C64]) -> Vec<(i64, i64)> {
    chi.iter()
        .map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64))
        .collect()
}

/// Computes the complete list of pairwise-inequivalent unitary irreducible
/// representations of a finite group by commutant splitting of its regular
/// representation.
///
/// Deterministic given `(table, seed, tol)`. The output is certified: each
/// entry passes the homomorphism and unitarity checks at [`REP_TOL`], the
/// entries are pairwise inequivalent by character inner product, and
/// `Σ d² = |H|` exactly. On an ambiguous eigenvalue split the algorithm
/// reseeds, up to 8 attempts.
pub fn group_irreps(table: &[Vec<usize>], seed: u64, tol: f64) -> Result<Vec<GroupIrrep>, RepError> {
    let n = table.len();
    if n == 1 {
        return Ok(vec![GroupIrrep {
            dim: 1,
            matrices: vec![CMat::from_element(1, 1, cone())],
        }]);
    }
    let inv = inverse_indices(table);
    let mut last_err = None;
    for attempt in 0..8 {
        let mut rng = ChaCha8Rng::seed_from_u64(
            seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        );
        match split_regular(table, &inv, &mut rng, tol) {
            Ok(irreps) => match certify(table, irreps) {
                Ok(done) => return Ok(done),
                Err(e) => last_err = Some(e),
            },
            Err(e) => last_err = Some(e),
        }
    }
    match last_err {
        Some(RepError::SplitFailure { tol, .. }) => Err(RepError::SplitFailure { tol, attempts: 8 }),
        Some(e) => Err(e),
        None => unreachable!(),
    }
}

/// One splitting pass over the regular representation.
///
/// The left regular representation acts by permutations, and its commutant
/// is spanned in closed form by the right translations, so the first random
/// Hermitian commutant element is assembled directly; only the sub-blocks
/// fall back to the linear intertwining solve.
fn split_regular(
    table: &[Vec<usize>],
    inv: &[usize],
    rng: &mut ChaCha8Rng,
    tol: f64,
) -> Result<Vec<GroupIrrep>, RepError> {
    let n = table.len();
    // Random Hermitian K = Σ_k c_k R(k) with conj(c_k) = c_{k⁻¹}.
    let mut coeff = vec![czero(); n];
    for k in 0..n {
        if coeff[k] != czero() {
            continue;
        }
        if inv[k] == k {
            coeff[k] = C64::new(rand::Rng::gen_range(rng, -1.0..1.0), 0.0);
        } else {
            let c = C64::new(
                rand::Rng::gen_range(rng, -1.0..1.0),
                rand::Rng::gen_range(rng, -1.0..1.0),
            );
            coeff[k] = c;
            coeff[inv[k]] = c.conj();
        }
    }
    let mut k_mat = CMat::zeros(n, n);
    for g in 0..n {
        for k in 0..n {
            k_mat[(table[g][k], g)] += coeff[k];
        }
    }
    let eig = SymmetricEigen::new(k_mat);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let radius = sorted.iter().map(|v| v.abs()).fold(0.0_f64, f64::max);
    let theta = tol * radius.max(1.0);
    let clusters = cluster_sorted(&sorted, theta);
    if clusters.len() <= 1 {
        return Err(RepError::SplitFailure { tol, attempts: 1 });
    }
    for w in clusters.windows(2) {
        let gap = sorted[w[1].start] - sorted[w[0].end - 1];
        if gap < 1e3 * theta {
            return Err(RepError::SplitFailure { tol, attempts: 1 });
        }
    }
    let mut irreps = Vec::new();
    for cluster in clusters {
        let m = cluster.len();
        let v = CMat::from_fn(n, m, |i, j| eig.eigenvectors[(i, order[cluster.start + j])]);
        let v = v.qr().q();
        // Sub-representation V* L(h) V, applying the permutation L(h)
        // implicitly: (L(h)V)[table[h][g], :] = V[g, :].
        let sub: Vec<CMat> = (0..n)
            .map(|h| {
                let mut lv = CMat::zeros(n, m);
                for g in 0..n {
                    for j in 0..m {
                        lv[(table[h][g], j)] = v[(g, j)];
                    }
                }
                v.adjoint() * lv
            })
            .collect();
        irreps.extend(
            split_dense(&sub, None, rng, tol)?
                .into_iter()
                .map(|matrices| GroupIrrep {
                    dim: matrices[0].nrows(),
                    matrices,
                }),
        );
    }
    Ok(irreps)
}

/// Certifies a candidate irrep list: homomorphism/unitarity per entry,
/// deduplication by character inner product, canonical ordering, exact
/// dimension count.
fn certify(table: &[Vec<usize>], candidates: Vec<GroupIrrep>) -> Result<Vec<GroupIrrep>, RepError> {
    let n = table.len();
    for irrep in &candidates {
        let mut dev: f64 = 0.0;
        let id = identity_index(table);
        dev = dev.max(max_norm(
            &(&irrep.matrices[id] - identity(irrep.dim)),
        ));
        for a in 0..n {
            let ua = &irrep.matrices[a];
            dev = dev.max(max_norm(&(ua * ua.adjoint() - identity(irrep.dim))));
            for b in 0..n {
                dev = dev.max(max_norm(
                    &(&irrep.matrices[table[a][b]] - ua * &irrep.matrices[b]),
                ));
            }
        }
        if dev > REP_TOL {
            return Err(RepError::SplitFailure {
                tol: dev,
                attempts: 1,
            });
        }
    }
    // Dedup: ⟨χ_a, χ_b⟩ = 1 for equivalent irreducibles, 0 otherwise.
    let chars: Vec<Vec<C64>> = candidates.iter().map(|i| i.character()).collect();
    let mut keep: Vec<GroupIrrep> = Vec::new();
    let mut kept_chars: Vec<Vec<C64>> = Vec::new();
    for (irrep, chi) in candidates.into_iter().zip(chars) {
        let dup = kept_chars.iter().any(|prev| {
            let ip: C64 = prev
                .iter()
                .zip(&chi)
                .map(|(a, b)| a.conj() * b)
                .sum::<C64>()
                / C64::new(n as f64, 0.0);
            (ip - cone()).norm() < 1e-6
        });
        if !dup {
            kept_chars.push(chi);
            keep.push(irrep);
        }
    }
    let total: usize = keep.iter().map(|i| i.dim * i.dim).sum();
    if total != n {
        return Err(RepError::SplitFailure {
            tol: total as f64,
            attempts: 1,
        });
    }
    keep.sort_by_key(|i| (i.dim, character_key(&i.character())));
    Ok(keep)
}

/// Induces an irrep of the isotropy group to a representation bundle on the
/// component: `π(x) = σ(t(r(x))⁻¹ ∘ x ∘ t(s(x)))`, zero-dimensional off the
/// orbit.
pub fn induce(
    g: &FiniteGroupoid,
    component: &TransitiveComponent,
    sigma: &GroupIrrep,
) -> RepBundle {
    let mut dims = vec![0usize; g.n_units()];
    for &u in &component.units {
        dims[u.0] = sigma.dim;
    }
    let matrices = g
        .arrows()
        .map(|x| {
            if component.contains(g.src(x)) && component.contains(g.dst(x)) {
                sigma.matrices[component.reduce(g, x)].clone()
            } else {
                CMat::zeros(0, 0)
            }
        })
        .collect();
    RepBundle::new(dims, matrices)
}

/// Enumerates the unitary dual: per component, every isotropy irrep induced
/// along the transversal. Completeness `Σ d² = |H|` holds per component by
/// construction of [`group_irreps`].
pub fn dual_object(g: &FiniteGroupoid, seed: u64, tol: f64) -> Result<IrrepTable, RepError> {
    let mut entries = Vec::new();
    for (ci, component) in g.components().iter().enumerate() {
        let sigmas = group_irreps(&component.isotropy.table, seed.wrapping_add(ci as u64), tol)?;
        for (k, sigma) in sigmas.iter().enumerate() {
            entries.push(IrrepEntry {
                id: format!("c{ci}_i{k}"),
                component: ci,
                rep: induce(g, component, sigma),
            });
        }
    }
    Ok(IrrepTable { entries })
}

/// Dimension of the intertwiner space `Mor(τ, ρ)`: solutions `A_u` of
/// `ρ(x) A_{s(x)} = A_{r(x)} τ(x)` for all arrows.
pub fn mor_dim(g: &FiniteGroupoid, tau: &RepBundle, rho: &RepBundle) -> Result<usize, RepError> {
    // Variable layout: A_u flattened row-major, offset per unit.
    let mut offsets = vec![0usize; g.n_units() + 1];
    for u in 0..g.n_units() {
        offsets[u + 1] = offsets[u] + rho.dim(Unit(u)) * tau.dim(Unit(u));
    }
    let nvars = offsets[g.n_units()];
    if nvars == 0 {
        return Ok(0);
    }
    let mut rows = Vec::new();
    for x in g.arrows() {
        let (u, v) = (g.src(x), g.dst(x));
        let (rt, rr) = (tau.matrix(x), rho.matrix(x));
        let (dr_v, dt_u) = (rho.dim(v), tau.dim(u));
        if dr_v * dt_u == 0 {
            continue;
        }
        // Equation block: ρ(x) A_u - A_v τ(x) = 0, entries (i, j).
        for i in 0..dr_v {
            for j in 0..dt_u {
                let mut row = vec![czero(); nvars];
                for k in 0..rho.dim(u) {
                    row[offsets[u.0] + k * tau.dim(u) + j] += rr[(i, k)];
                }
                for l in 0..tau.dim(v) {
                    row[offsets[v.0] + i * tau.dim(v) + l] -= rt[(l, j)];
                }
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return Ok(nvars);
    }
    let a = CMat::from_fn(rows.len(), nvars, |i, j| rows[i][j]);
    let (dim, _) = nullspace(&a, 1e-8, 1.0).map_err(RepError::ToleranceError)?;
    Ok(dim)
}

/// Unitary equivalence: equal dimensions, equal characters within `1e-8`,
/// and a nonzero intertwiner space.
pub fn equivalent(g: &FiniteGroupoid, tau: &RepBundle, rho: &RepBundle) -> Result<bool, RepError> {
    for u in g.units() {
        if tau.dim(u) != rho.dim(u) {
            return Ok(false);
        }
    }
    for u in g.units() {
        if tau.dim(u) == 0 {
            continue;
        }
        let (ct, cr) = (tau.character(g, u)?, rho.character(g, u)?);
        if ct
            .iter()
            .zip(&cr)
            .any(|(a, b)| (a - b).norm() > 1e-8)
        {
            return Ok(false);
        }
    }
    Ok(mor_dim(g, tau, rho)? >= 1)
}

/// The trivial representation bundle (dimension one everywhere, π(x) = 1).
pub fn trivial_rep(g: &FiniteGroupoid) -> RepBundle {
    RepBundle::new(
        vec![1; g.n_units()],
        g.arrows().map(|_| CMat::from_element(1, 1, cone())).collect(),
    )
}

/// Random unitary bundle compatible with a representation's dimensions.
pub fn random_unitary_bundle(
    g: &FiniteGroupoid,
    rep: &RepBundle,
    rng: &mut ChaCha8Rng,
) -> Vec<CMat> {
    (0..g.n_units())
        .map(|u| {
            let d = rep.dim(Unit(u));
            if d == 0 {
                CMat::zeros(0, 0)
            } else {
                random_matrix(rng, d, d).qr().q()
            }
        })
        .collect()
}
