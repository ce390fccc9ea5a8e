//! Finite groupoid data model: arrows with partial composition, normalized
//! Haar weights, orbit decomposition and the conjugacy quotient.
//!
//! The composition convention is fixed globally: `x ∘ y` is defined exactly
//! when `s(x) = r(y)` ("apply `y` first"), with `s(x∘y) = s(y)` and
//! `r(x∘y) = r(x)`. Every formula in the other modules is derived under this
//! convention.

use std::collections::HashMap;

use thiserror::Error;

/// Index of a unit (object) in the unit space `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Unit(pub usize);

/// Index of an arrow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow(pub usize);

#[derive(Debug, Error)]
pub enum GroupoidError {
    #[error("composition is not associative at ({x}, {y}, {z})")]
    NonAssociative { x: String, y: String, z: String },
    #[error("arrow {arrow} has no valid inverse: {reason}")]
    MissingInverse { arrow: String, reason: String },
    #[error("unit {unit} has no identity arrow")]
    MissingUnit { unit: String },
    #[error("composition domain error for ({x}, {y}): {reason}")]
    CompositionDomainError { x: String, y: String, reason: String },
    #[error("unknown unit {0}")]
    UnknownUnit(String),
    #[error("unknown arrow {0}")]
    UnknownArrow(String),
    #[error("not a group action: {0}")]
    InvalidAction(String),
    #[error("parse error: {0}")]
    ParseError(String),
}

/// Raw groupoid description, prior to validation.
///
/// Arrow and unit identifiers are strings; `compose` lists every defined
/// composite as a triple `(x, y, x∘y)`.
#[derive(Debug, Clone, Default)]
pub struct GroupoidData {
    pub units: Vec<String>,
    /// `(id, src, dst)` per arrow.
    pub arrows: Vec<(String, String, String)>,
    /// `x ↦ x⁻¹` by arrow id.
    pub inverse: Vec<(String, String)>,
    /// `(x, y, x∘y)` by arrow id.
    pub compose: Vec<(String, String, String)>,
}

/// The isotropy group `H = G_{u₀}^{u₀}` of a transitive component, as an
/// explicit multiplication table over its arrow list.
#[derive(Debug, Clone)]
pub struct IsotropyGroup {
    /// Arrows of `G_{u₀}^{u₀}`, sorted; index 0 is the unit arrow.
    pub elements: Vec<Arrow>,
    /// `table[i][j]` = index of `elements[i] ∘ elements[j]`.
    pub table: Vec<Vec<usize>>,
    index_of: HashMap<Arrow, usize>,
}

impl IsotropyGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, x: Arrow) -> Option<usize> {
        self.index_of.get(&x).copied()
    }
}

/// One orbit of the unit space together with a base unit, a transversal of
/// arrows out of the base, and the isotropy group at the base.
#[derive(Debug, Clone)]
pub struct TransitiveComponent {
    /// Units of the orbit, sorted.
    pub units: Vec<Unit>,
    pub base: Unit,
    /// `v ↦ t(v) ∈ G_{u₀}^v`, with `t(u₀)` the unit arrow at the base.
    transversal: HashMap<Unit, Arrow>,
    pub isotropy: IsotropyGroup,
}

impl TransitiveComponent {
    pub fn contains(&self, u: Unit) -> bool {
        self.transversal.contains_key(&u)
    }

    /// The chosen arrow `t(v) ∈ G_{u₀}^v`.
    pub fn transversal(&self, v: Unit) -> Arrow {
        self.transversal[&v]
    }

    /// Reduces an arrow of the component to its isotropy coordinate
    /// `t(r(x))⁻¹ ∘ x ∘ t(s(x)) ∈ H`.
    pub fn reduce(&self, g: &FiniteGroupoid, x: Arrow) -> usize {
        let tu = self.transversal(g.src(x));
        let tv_inv = g.inverse(self.transversal(g.dst(x)));
        let h = g
            .compose(tv_inv, g.compose(x, tu).expect("transversal composable"))
            .expect("transversal composable");
        self.isotropy
            .index_of(h)
            .expect("reduced arrow lies in the isotropy group")
    }
}

/// A validated finite groupoid with dense integer indices, lookup-table
/// composition and precomputed fibers and orbit structure.
///
/// Immutable after construction; all derived structures borrow it.
#[derive(Debug, Clone)]
pub struct FiniteGroupoid {
    unit_names: Vec<String>,
    arrow_names: Vec<String>,
    src: Vec<Unit>,
    dst: Vec<Unit>,
    unit_arrows: Vec<Arrow>,
    inverse: Vec<Arrow>,
    /// Flattened `n_arrows × n_arrows`; `compose[x * n + y] = x∘y`.
    compose: Vec<Option<Arrow>>,
    /// `fibers[u * n_units + v] = G_u^v`, each sorted by arrow index.
    fibers: Vec<Vec<Arrow>>,
    /// `G_u = s⁻¹(u)`, sorted.
    arrows_from: Vec<Vec<Arrow>>,
    /// `G^u = r⁻¹(u)`, sorted.
    arrows_into: Vec<Vec<Arrow>>,
    components: Vec<TransitiveComponent>,
    component_of_unit: Vec<usize>,
}

impl FiniteGroupoid {
    /// Validates a raw description against the groupoid axioms.
    ///
    /// Every invariant is checked exhaustively: composition domain, identity
    /// arrows, inverses, associativity over all composable triples.
    pub fn validate(data: &GroupoidData) -> Result<Self, GroupoidError> {
        let n_units = data.units.len();
        let n = data.arrows.len();

        let mut unit_index = HashMap::new();
        for (i, name) in data.units.iter().enumerate() {
            if unit_index.insert(name.clone(), Unit(i)).is_some() {
                return Err(GroupoidError::ParseError(format!("duplicate unit {name}")));
            }
        }
        let mut arrow_index = HashMap::new();
        let mut src = Vec::with_capacity(n);
        let mut dst = Vec::with_capacity(n);
        for (i, (id, s, r)) in data.arrows.iter().enumerate() {
            if arrow_index.insert(id.clone(), Arrow(i)).is_some() {
                return Err(GroupoidError::ParseError(format!("duplicate arrow {id}")));
            }
            let su = *unit_index
                .get(s)
                .ok_or_else(|| GroupoidError::UnknownUnit(s.clone()))?;
            let ru = *unit_index
                .get(r)
                .ok_or_else(|| GroupoidError::UnknownUnit(r.clone()))?;
            src.push(su);
            dst.push(ru);
        }
        let arrow_names: Vec<String> = data.arrows.iter().map(|(id, _, _)| id.clone()).collect();
        let look = |id: &str| -> Result<Arrow, GroupoidError> {
            arrow_index
                .get(id)
                .copied()
                .ok_or_else(|| GroupoidError::UnknownArrow(id.to_string()))
        };

        // Composition table: domain is exactly {(x, y) : s(x) = r(y)}.
        let mut compose = vec![None; n * n];
        for (xid, yid, zid) in &data.compose {
            let (x, y, z) = (look(xid)?, look(yid)?, look(zid)?);
            if src[x.0] != dst[y.0] {
                return Err(GroupoidError::CompositionDomainError {
                    x: xid.clone(),
                    y: yid.clone(),
                    reason: "s(x) != r(y)".into(),
                });
            }
            if src[z.0] != src[y.0] || dst[z.0] != dst[x.0] {
                return Err(GroupoidError::CompositionDomainError {
                    x: xid.clone(),
                    y: yid.clone(),
                    reason: format!("composite {zid} has wrong source or range"),
                });
            }
            if compose[x.0 * n + y.0].replace(z).is_some() {
                return Err(GroupoidError::CompositionDomainError {
                    x: xid.clone(),
                    y: yid.clone(),
                    reason: "composition listed twice".into(),
                });
            }
        }
        for x in 0..n {
            for y in 0..n {
                if src[x] == dst[y] && compose[x * n + y].is_none() {
                    return Err(GroupoidError::CompositionDomainError {
                        x: arrow_names[x].clone(),
                        y: arrow_names[y].clone(),
                        reason: "composable pair has no listed composite".into(),
                    });
                }
            }
        }

        // Identity arrow per unit: two-sided identity with src = dst = u.
        let mut unit_arrows = Vec::with_capacity(n_units);
        'units: for u in 0..n_units {
            'cands: for e in 0..n {
                if src[e] != Unit(u) || dst[e] != Unit(u) {
                    continue;
                }
                for x in 0..n {
                    if src[x] == Unit(u) && compose[x * n + e] != Some(Arrow(x)) {
                        continue 'cands;
                    }
                    if dst[x] == Unit(u) && compose[e * n + x] != Some(Arrow(x)) {
                        continue 'cands;
                    }
                }
                unit_arrows.push(Arrow(e));
                continue 'units;
            }
            return Err(GroupoidError::MissingUnit {
                unit: data.units[u].clone(),
            });
        }

        // Inverses: s/r swapped, two-sided up to units, involutive.
        let mut inverse = vec![None; n];
        for (xid, yid) in &data.inverse {
            let (x, y) = (look(xid)?, look(yid)?);
            inverse[x.0] = Some(y);
        }
        let mut inv = Vec::with_capacity(n);
        for x in 0..n {
            let y = inverse[x].ok_or_else(|| GroupoidError::MissingInverse {
                arrow: arrow_names[x].clone(),
                reason: "no inverse listed".into(),
            })?;
            let fail = |reason: &str| GroupoidError::MissingInverse {
                arrow: arrow_names[x].clone(),
                reason: reason.into(),
            };
            if src[y.0] != dst[x] || dst[y.0] != src[x] {
                return Err(fail("inverse has wrong source or range"));
            }
            if compose[x * n + y.0] != Some(unit_arrows[dst[x].0]) {
                return Err(fail("x ∘ x⁻¹ is not the unit at r(x)"));
            }
            if compose[y.0 * n + x] != Some(unit_arrows[src[x].0]) {
                return Err(fail("x⁻¹ ∘ x is not the unit at s(x)"));
            }
            if inverse[y.0] != Some(Arrow(x)) {
                return Err(fail("inverse is not involutive"));
            }
            inv.push(y);
        }

        // Associativity, exhaustively over all composable triples.
        for x in 0..n {
            for y in 0..n {
                let Some(xy) = compose[x * n + y] else { continue };
                for z in 0..n {
                    let Some(yz) = compose[y * n + z] else { continue };
                    if compose[xy.0 * n + z] != compose[x * n + yz.0] {
                        return Err(GroupoidError::NonAssociative {
                            x: arrow_names[x].clone(),
                            y: arrow_names[y].clone(),
                            z: arrow_names[z].clone(),
                        });
                    }
                }
            }
        }

        // Fibers and per-unit arrow lists.
        let mut fibers = vec![Vec::new(); n_units * n_units];
        let mut arrows_from = vec![Vec::new(); n_units];
        let mut arrows_into = vec![Vec::new(); n_units];
        for x in 0..n {
            fibers[src[x].0 * n_units + dst[x].0].push(Arrow(x));
            arrows_from[src[x].0].push(Arrow(x));
            arrows_into[dst[x].0].push(Arrow(x));
        }

        let mut g = FiniteGroupoid {
            unit_names: data.units.clone(),
            arrow_names,
            src,
            dst,
            unit_arrows,
            inverse: inv,
            compose,
            fibers,
            arrows_from,
            arrows_into,
            components: Vec::new(),
            component_of_unit: vec![usize::MAX; n_units],
        };
        g.build_components();

        // Fiber cardinality is constant over each orbit (forced by the
        // axioms; checked as a sanity invariant).
        for comp in &g.components {
            let h = comp.isotropy.order();
            for &u in &comp.units {
                for &v in &comp.units {
                    debug_assert_eq!(g.fiber(u, v).len(), h);
                }
            }
        }
        Ok(g)
    }

    fn build_components(&mut self) {
        let n_units = self.unit_names.len();
        let mut seen = vec![false; n_units];
        for u0 in 0..n_units {
            if seen[u0] {
                continue;
            }
            // Breadth-first over units reachable from u0; within one orbit a
            // direct arrow from the base always exists, so the transversal is
            // the least arrow of each base fiber.
            let mut units = vec![Unit(u0)];
            seen[u0] = true;
            let mut queue = vec![Unit(u0)];
            while let Some(u) = queue.pop() {
                for &x in self.arrows_from(u) {
                    let v = self.dst(x);
                    if !seen[v.0] {
                        seen[v.0] = true;
                        units.push(v);
                        queue.push(v);
                    }
                }
            }
            units.sort();
            let base = Unit(u0);
            let mut transversal = HashMap::new();
            for &v in &units {
                let t = if v == base {
                    self.unit_arrows[base.0]
                } else {
                    *self
                        .fiber(base, v)
                        .first()
                        .expect("nonempty fiber within an orbit")
                };
                transversal.insert(v, t);
            }
            let elements: Vec<Arrow> = self.fiber(base, base).to_vec();
            let index_of: HashMap<Arrow, usize> =
                elements.iter().enumerate().map(|(i, &a)| (a, i)).collect();
            let table = elements
                .iter()
                .map(|&a| {
                    elements
                        .iter()
                        .map(|&b| index_of[&self.compose(a, b).expect("isotropy closed")])
                        .collect()
                })
                .collect();
            // Put the unit arrow first for a stable convention.
            let mut isotropy = IsotropyGroup {
                elements,
                table,
                index_of,
            };
            if isotropy.elements[0] != self.unit_arrows[base.0] {
                // The unit arrow has the least index among base-fiber arrows
                // for all builders; general input may order differently.
                let e = self.unit_arrows[base.0];
                let pos = isotropy.index_of[&e];
                isotropy.elements.swap(0, pos);
                let perm: Vec<usize> = (0..isotropy.elements.len())
                    .map(|i| if i == 0 { pos } else if i == pos { 0 } else { i })
                    .collect();
                let old = isotropy.table.clone();
                for i in 0..perm.len() {
                    for j in 0..perm.len() {
                        let k = old[perm[i]][perm[j]];
                        isotropy.table[i][j] = perm.iter().position(|&p| p == k).unwrap();
                    }
                }
                isotropy.index_of = isotropy
                    .elements
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| (a, i))
                    .collect();
            }
            let comp_idx = self.components.len();
            for &u in &units {
                self.component_of_unit[u.0] = comp_idx;
            }
            self.components.push(TransitiveComponent {
                units,
                base,
                transversal,
                isotropy,
            });
        }
    }

    pub fn n_units(&self) -> usize {
        self.unit_names.len()
    }

    pub fn n_arrows(&self) -> usize {
        self.arrow_names.len()
    }

    pub fn units(&self) -> impl Iterator<Item = Unit> + '_ {
        (0..self.n_units()).map(Unit)
    }

    pub fn arrows(&self) -> impl Iterator<Item = Arrow> + '_ {
        (0..self.n_arrows()).map(Arrow)
    }

    pub fn unit_name(&self, u: Unit) -> &str {
        &self.unit_names[u.0]
    }

    pub fn arrow_name(&self, x: Arrow) -> &str {
        &self.arrow_names[x.0]
    }

    pub fn unit_by_name(&self, name: &str) -> Result<Unit, GroupoidError> {
        self.unit_names
            .iter()
            .position(|s| s == name)
            .map(Unit)
            .ok_or_else(|| GroupoidError::UnknownUnit(name.to_string()))
    }

    pub fn arrow_by_name(&self, name: &str) -> Result<Arrow, GroupoidError> {
        self.arrow_names
            .iter()
            .position(|s| s == name)
            .map(Arrow)
            .ok_or_else(|| GroupoidError::UnknownArrow(name.to_string()))
    }

    pub fn src(&self, x: Arrow) -> Unit {
        self.src[x.0]
    }

    /// Range of `x` (`dst` in file terms).
    pub fn dst(&self, x: Arrow) -> Unit {
        self.dst[x.0]
    }

    pub fn unit_arrow(&self, u: Unit) -> Arrow {
        self.unit_arrows[u.0]
    }

    pub fn inverse(&self, x: Arrow) -> Arrow {
        self.inverse[x.0]
    }

    /// `x ∘ y`, defined iff `s(x) = r(y)`.
    pub fn compose(&self, x: Arrow, y: Arrow) -> Option<Arrow> {
        self.compose[x.0 * self.n_arrows() + y.0]
    }

    /// The fiber `G_u^v = {x : s(x) = u, r(x) = v}`, sorted by arrow index.
    pub fn fiber(&self, u: Unit, v: Unit) -> &[Arrow] {
        &self.fibers[u.0 * self.n_units() + v.0]
    }

    /// `G_u = s⁻¹(u)`.
    pub fn arrows_from(&self, u: Unit) -> &[Arrow] {
        &self.arrows_from[u.0]
    }

    /// `G^u = r⁻¹(u)`.
    pub fn arrows_into(&self, u: Unit) -> &[Arrow] {
        &self.arrows_into[u.0]
    }

    /// Arrows of the isotropy bundle `G′ = {x : s(x) = r(x)}`, ascending.
    pub fn isotropy_arrows(&self) -> Vec<Arrow> {
        self.arrows().filter(|&x| self.src(x) == self.dst(x)).collect()
    }

    /// Haar weight of one arrow under `λ_u^v` (uniform probability on the
    /// fiber).
    pub fn fiber_weight(&self, u: Unit, v: Unit) -> f64 {
        1.0 / self.fiber(u, v).len() as f64
    }

    /// Haar weight of one arrow under `λ_u` (uniform probability on `G_u`).
    pub fn source_weight(&self, u: Unit) -> f64 {
        1.0 / self.arrows_from(u).len() as f64
    }

    /// Haar weight of one arrow under `λ^u` (uniform probability on `G^u`).
    pub fn range_weight(&self, u: Unit) -> f64 {
        1.0 / self.arrows_into(u).len() as f64
    }

    pub fn components(&self) -> &[TransitiveComponent] {
        &self.components
    }

    pub fn component_of(&self, u: Unit) -> usize {
        self.component_of_unit[u.0]
    }

    /// Whether `u` and `v` lie in the same orbit, i.e. `G_u^v ≠ ∅`.
    pub fn same_orbit(&self, u: Unit, v: Unit) -> bool {
        self.component_of(u) == self.component_of(v)
    }

    /// Quotient of the isotropy bundle by conjugation, with pushforward Haar
    /// weights.
    pub fn conjugacy_groupoid(&self) -> ConjugacyGroupoid {
        let mut class_of: Vec<Option<usize>> = vec![None; self.n_arrows()];
        let mut classes = Vec::new();
        for x in self.isotropy_arrows() {
            if class_of[x.0].is_some() {
                continue;
            }
            // Orbit of x under y ↦ y⁻¹ ∘ x ∘ y over all y ∈ G^{s(x)}, closed
            // transitively across units.
            let idx = classes.len();
            let mut members = vec![x];
            class_of[x.0] = Some(idx);
            let mut queue = vec![x];
            while let Some(z) = queue.pop() {
                for &y in self.arrows_into(self.src(z)) {
                    let w = self
                        .compose(self.inverse(y), self.compose(z, y).expect("composable"))
                        .expect("composable");
                    if class_of[w.0].is_none() {
                        class_of[w.0] = Some(idx);
                        members.push(w);
                        queue.push(w);
                    }
                }
            }
            members.sort();
            classes.push(ConjugacyClass {
                arrows: members,
                component: self.component_of(self.src(x)),
            });
        }
        ConjugacyGroupoid { classes, class_of }
    }
}

/// One conjugacy class `ẋ = {y⁻¹ ∘ x ∘ y}` of the isotropy bundle.
#[derive(Debug, Clone)]
pub struct ConjugacyClass {
    /// Member arrows, sorted by index.
    pub arrows: Vec<Arrow>,
    pub component: usize,
}

/// Quotient `G′^G` of the isotropy bundle by conjugation.
///
/// Classes are ordered by their least member arrow, which is deterministic
/// for a fixed input.
#[derive(Debug, Clone)]
pub struct ConjugacyGroupoid {
    classes: Vec<ConjugacyClass>,
    class_of: Vec<Option<usize>>,
}

impl ConjugacyGroupoid {
    pub fn classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    /// Class of an isotropy arrow; `None` off the isotropy bundle.
    pub fn class_of(&self, x: Arrow) -> Option<usize> {
        self.class_of[x.0]
    }

    /// Pushforward Haar weight `λ̇_u(c) = |c ∩ G_u^u| / |G_u^u|`.
    pub fn weight_at(&self, g: &FiniteGroupoid, class: usize, u: Unit) -> f64 {
        let iso = g.fiber(u, u);
        let hits = self.classes[class]
            .arrows
            .iter()
            .filter(|&&x| g.src(x) == u)
            .count();
        hits as f64 / iso.len() as f64
    }

    /// Members of a class inside `G_u^u`.
    pub fn members_at(&self, g: &FiniteGroupoid, class: usize, u: Unit) -> Vec<Arrow> {
        self.classes[class]
            .arrows
            .iter()
            .copied()
            .filter(|&x| g.src(x) == u)
            .collect()
    }

    /// Classes supported in one component, in global class order.
    pub fn classes_of_component(&self, component: usize) -> Vec<usize> {
        self.classes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.component == component)
            .map(|(i, _)| i)
            .collect()
    }
}
