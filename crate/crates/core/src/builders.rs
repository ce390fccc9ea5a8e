//! Constructors for the stock families of finite groupoids.
//!
//! Every builder emits a raw [`GroupoidData`] and runs it through
//! [`FiniteGroupoid::validate`], so the axioms are checked rather than
//! assumed.

use crate::groupoid::{FiniteGroupoid, GroupoidData, GroupoidError};

/// A finite group as a Cayley table: `table[i][j]` is the index of the
/// product `i·j`. Index 0 need not be the identity; validation finds it.
#[derive(Debug, Clone)]
pub struct GroupTable {
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

impl GroupTable {
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self, GroupoidError> {
        let elements = (0..table.len()).map(|i| format!("g{i}")).collect();
        Self::with_names(elements, table)
    }

    pub fn with_names(
        elements: Vec<String>,
        table: Vec<Vec<usize>>,
    ) -> Result<Self, GroupoidError> {
        let n = elements.len();
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(GroupoidError::ParseError(
                "group table is not square over the element list".into(),
            ));
        }
        if table.iter().flatten().any(|&k| k >= n) {
            return Err(GroupoidError::ParseError(
                "group table entry out of range".into(),
            ));
        }
        Ok(GroupTable { elements, table })
    }

    /// Cyclic group of order `n`.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n)
            .map(|i| (0..n).map(|j| (i + j) % n).collect())
            .collect();
        GroupTable::new(table).expect("cyclic table is well formed")
    }

    /// Symmetric group S₃ as permutations of three points.
    pub fn symmetric3() -> Self {
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [1, 2, 0],
            [2, 0, 1],
            [1, 0, 2],
            [0, 2, 1],
            [2, 1, 0],
        ];
        let compose = |a: &[usize; 3], b: &[usize; 3]| -> [usize; 3] {
            // a·b acts as "apply b first".
            [a[b[0]], a[b[1]], a[b[2]]]
        };
        let table = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| perms.iter().position(|p| *p == compose(a, b)).unwrap())
                    .collect()
            })
            .collect();
        let names = ["e", "c3", "c3c3", "t01", "t12", "t02"]
            .map(String::from)
            .to_vec();
        GroupTable::with_names(names, table).expect("S3 table is well formed")
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// Pair groupoid on `n` units: exactly one arrow `u -> v` for every pair.
pub fn pair_groupoid(n: usize) -> Result<FiniteGroupoid, GroupoidError> {
    let units: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let arrow = |u: usize, v: usize| format!("{}>{}", units[u], units[v]);
    let mut data = GroupoidData {
        units: units.clone(),
        ..Default::default()
    };
    for u in 0..n {
        for v in 0..n {
            data.arrows.push((arrow(u, v), units[u].clone(), units[v].clone()));
            data.inverse.push((arrow(u, v), arrow(v, u)));
        }
    }
    for u in 0..n {
        for v in 0..n {
            for w in 0..n {
                // (v>w) ∘ (u>v) = u>w
                data.compose.push((arrow(v, w), arrow(u, v), arrow(u, w)));
            }
        }
    }
    FiniteGroupoid::validate(&data)
}

/// A finite group viewed as a single-unit groupoid.
pub fn group_groupoid(group: &GroupTable) -> Result<FiniteGroupoid, GroupoidError> {
    group_bundle(&[("u".to_string(), group.clone())])
}

/// Disjoint union of groups, one isotropy group per unit and no arrows
/// between units.
pub fn group_bundle(groups: &[(String, GroupTable)]) -> Result<FiniteGroupoid, GroupoidError> {
    let mut data = GroupoidData::default();
    for (unit, group) in groups {
        data.units.push(unit.clone());
        let name = |i: usize| format!("{unit}.{}", group.elements[i]);
        let n = group.order();
        let mut inv = vec![None; n];
        // The identity index is the row acting as the left identity.
        let id = (0..n)
            .find(|&e| (0..n).all(|j| group.table[e][j] == j))
            .ok_or_else(|| GroupoidError::MissingUnit { unit: unit.clone() })?;
        for i in 0..n {
            for j in 0..n {
                if group.table[i][j] == id {
                    inv[i] = Some(j);
                }
            }
        }
        for i in 0..n {
            data.arrows.push((name(i), unit.clone(), unit.clone()));
            let j = inv[i].ok_or_else(|| GroupoidError::MissingInverse {
                arrow: name(i),
                reason: "group table row has no inverse".into(),
            })?;
            data.inverse.push((name(i), name(j)));
            for j in 0..n {
                data.compose.push((name(i), name(j), name(group.table[i][j])));
            }
        }
    }
    FiniteGroupoid::validate(&data)
}

/// Action groupoid of a group acting on a finite point set.
///
/// Arrows are pairs `(p, h)` with `s = p`, `r = h·p`, and
/// `(p₂, h₂) ∘ (p₁, h₁) = (p₁, h₂h₁)` when `h₁·p₁ = p₂`.
pub fn action_groupoid(
    group: &GroupTable,
    points: &[String],
    action: &[Vec<usize>],
) -> Result<FiniteGroupoid, GroupoidError> {
    let n = group.order();
    let m = points.len();
    if action.len() != n || action.iter().any(|row| row.len() != m) {
        return Err(GroupoidError::InvalidAction(
            "action table shape does not match group × points".into(),
        ));
    }
    if action.iter().flatten().any(|&p| p >= m) {
        return Err(GroupoidError::InvalidAction("action point out of range".into()));
    }
    let id = (0..n)
        .find(|&e| (0..n).all(|j| group.table[e][j] == j && group.table[j][e] == j))
        .ok_or_else(|| GroupoidError::InvalidAction("group table has no identity".into()))?;
    for p in 0..m {
        if action[id][p] != p {
            return Err(GroupoidError::InvalidAction(format!(
                "identity moves point {}",
                points[p]
            )));
        }
    }
    for h2 in 0..n {
        for h1 in 0..n {
            for p in 0..m {
                if action[group.table[h2][h1]][p] != action[h2][action[h1][p]] {
                    return Err(GroupoidError::InvalidAction(format!(
                        "action is not a homomorphism at ({}, {})",
                        group.elements[h2], group.elements[h1]
                    )));
                }
            }
        }
    }

    let name = |p: usize, h: usize| format!("({},{})", points[p], group.elements[h]);
    let mut inv_of = vec![0usize; n];
    for i in 0..n {
        for j in 0..n {
            if group.table[i][j] == id && group.table[j][i] == id {
                inv_of[i] = j;
            }
        }
    }
    let mut data = GroupoidData {
        units: points.to_vec(),
        ..Default::default()
    };
    for p in 0..m {
        for h in 0..n {
            data.arrows
                .push((name(p, h), points[p].clone(), points[action[h][p]].clone()));
            // (p, h)⁻¹ = (h·p, h⁻¹)
            data.inverse.push((name(p, h), name(action[h][p], inv_of[h])));
        }
    }
    for p1 in 0..m {
        for h1 in 0..n {
            let p2 = action[h1][p1];
            for h2 in 0..n {
                data.compose
                    .push((name(p2, h2), name(p1, h1), name(p1, group.table[h2][h1])));
            }
        }
    }
    FiniteGroupoid::validate(&data)
}

/// Product groupoid: units and arrows are pairs, composition componentwise.
pub fn product(
    a: &FiniteGroupoid,
    b: &FiniteGroupoid,
) -> Result<FiniteGroupoid, GroupoidError> {
    let unit_name = |ua, ub| format!("{}|{}", a.unit_name(ua), b.unit_name(ub));
    let arrow_name =
        |xa, xb| format!("{}|{}", a.arrow_name(xa), b.arrow_name(xb));
    let mut data = GroupoidData::default();
    for ua in a.units() {
        for ub in b.units() {
            data.units.push(unit_name(ua, ub));
        }
    }
    for xa in a.arrows() {
        for xb in b.arrows() {
            data.arrows.push((
                arrow_name(xa, xb),
                unit_name(a.src(xa), b.src(xb)),
                unit_name(a.dst(xa), b.dst(xb)),
            ));
            data.inverse
                .push((arrow_name(xa, xb), arrow_name(a.inverse(xa), b.inverse(xb))));
        }
    }
    for xa in a.arrows() {
        for ya in a.arrows() {
            let Some(za) = a.compose(xa, ya) else { continue };
            for xb in b.arrows() {
                for yb in b.arrows() {
                    let Some(zb) = b.compose(xb, yb) else { continue };
                    data.compose
                        .push((arrow_name(xa, xb), arrow_name(ya, yb), arrow_name(za, zb)));
                }
            }
        }
    }
    FiniteGroupoid::validate(&data)
}
