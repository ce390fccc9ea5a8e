//! JSON file formats: groupoids (explicit tables or builder recipes),
//! function bundles, Fourier coefficients, irrep tables, spectral functions
//! and check reports. Complex numbers are always `[re, im]` pairs; all
//! emitted floats are rounded to 12 significant digits for stable output.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::builders;
use crate::fourier::{FourierCoefficient, FunctionBundle};
use crate::groupoid::{FiniteGroupoid, GroupoidData, GroupoidError, Unit};
use crate::harmonic::SpectralFunction;
use crate::linalg::{C64, CMat};
use crate::rep::IrrepTable;

/// Rounds to 12 significant digits (decimal), the precision of all printed
/// numbers.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    // Round in decimal via scientific formatting with 11 fractional digits.
    format!("{x:.11e}").parse().expect("valid float literal")
}

fn pair(z: C64) -> [f64; 2] {
    [round_sig(z.re), round_sig(z.im)]
}

fn unpair(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

fn mat_to_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect())
        .collect()
}

fn rows_to_mat(rows: &[Vec<[f64; 2]>]) -> Result<CMat, GroupoidError> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(GroupoidError::ParseError("ragged matrix".to_string()));
    }
    Ok(CMat::from_fn(nrows, ncols, |i, j| unpair(rows[i][j])))
}

// ---------------------------------------------------------------------------
// Groupoid files
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowSpec {
    pub id: String,
    pub src: String,
    pub dst: String,
}

/// Explicit groupoid table.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitGroupoid {
    pub units: Vec<String>,
    pub arrows: Vec<ArrowSpec>,
    pub inverse: BTreeMap<String, String>,
    pub compose: Vec<[String; 3]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    /// Multiplication table `table[i][j] = i·j` as element indices.
    pub table: Option<Vec<Vec<usize>>>,
    /// Shortcut: cyclic group of this order instead of an explicit table.
    pub cyclic: Option<usize>,
    pub elements: Option<Vec<String>>,
}

impl GroupSpec {
    fn build(&self) -> Result<builders::GroupTable, GroupoidError> {
        match (&self.table, self.cyclic) {
            (Some(t), None) => match &self.elements {
                Some(names) => builders::GroupTable::with_names(names.clone(), t.clone()),
                None => builders::GroupTable::new(t.clone()),
            },
            (None, Some(n)) => Ok(builders::GroupTable::cyclic(n)),
            _ => Err(GroupoidError::ParseError(
                "group spec needs exactly one of `table` or `cyclic`".to_string(),
            )),
        }
    }
}

/// Builder recipes, dispatched on the `builder` field.
#[derive(Debug, Deserialize)]
#[serde(tag = "builder", rename_all = "lowercase", deny_unknown_fields)]
pub enum BuilderSpec {
    Pair {
        n: usize,
    },
    Group {
        table: Option<Vec<Vec<usize>>>,
        cyclic: Option<usize>,
        elements: Option<Vec<String>>,
    },
    Bundle {
        groups: BTreeMap<String, GroupSpec>,
    },
    Action {
        group: GroupSpec,
        points: Vec<String>,
        /// `action[h][p]` = index of `h·p`.
        action: Vec<Vec<usize>>,
    },
    Product {
        left: Box<GroupoidFile>,
        right: Box<GroupoidFile>,
    },
}

/// A groupoid file: either an explicit table or a builder recipe.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum GroupoidFile {
    Builder(BuilderSpec),
    Explicit(ExplicitGroupoid),
}

impl GroupoidFile {
    pub fn build(&self) -> Result<FiniteGroupoid, GroupoidError> {
        match self {
            GroupoidFile::Explicit(e) => {
                let data = GroupoidData {
                    units: e.units.clone(),
                    arrows: e
                        .arrows
                        .iter()
                        .map(|a| (a.id.clone(), a.src.clone(), a.dst.clone()))
                        .collect(),
                    inverse: e.inverse.iter().map(|(a, b)| (a.clone(), b.clone())).collect(),
                    compose: e.compose.iter().map(|t| (t[0].clone(), t[1].clone(), t[2].clone())).collect(),
                };
                FiniteGroupoid::validate(&data)
            }
            GroupoidFile::Builder(b) => match b {
                BuilderSpec::Pair { n } => builders::pair_groupoid(*n),
                BuilderSpec::Group {
                    table,
                    cyclic,
                    elements,
                } => {
                    let spec = GroupSpec {
                        table: table.clone(),
                        cyclic: *cyclic,
                        elements: elements.clone(),
                    };
                    builders::group_groupoid(&spec.build()?)
                }
                BuilderSpec::Bundle { groups } => {
                    let built: Vec<(String, builders::GroupTable)> = groups
                        .iter()
                        .map(|(u, spec)| Ok((u.clone(), spec.build()?)))
                        .collect::<Result<_, GroupoidError>>()?;
                    builders::group_bundle(&built)
                }
                BuilderSpec::Action {
                    group,
                    points,
                    action,
                } => builders::action_groupoid(&group.build()?, points, action),
                BuilderSpec::Product { left, right } => {
                    builders::product(&left.build()?, &right.build()?)
                }
            },
        }
    }
}

/// Parses a groupoid from a JSON string.
pub fn groupoid_from_str(json: &str) -> Result<FiniteGroupoid, GroupoidError> {
    let file: GroupoidFile = serde_json::from_str(json)
        .map_err(|e| GroupoidError::ParseError(e.to_string()))?;
    file.build()
}

/// Loads and validates a groupoid file.
pub fn from_file(path: impl AsRef<Path>) -> Result<FiniteGroupoid, GroupoidError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| GroupoidError::ParseError(format!("{}: {e}", path.as_ref().display())))?;
    groupoid_from_str(&text)
}

/// Content hash of a validated groupoid (units, arrows with endpoints,
/// inverse pairs, full composition table), independent of input formatting.
pub fn fingerprint(g: &FiniteGroupoid) -> String {
    let mut hasher = Sha256::new();
    for u in g.units() {
        hasher.update(g.unit_name(u).as_bytes());
        hasher.update([0u8]);
    }
    for x in g.arrows() {
        hasher.update(g.arrow_name(x).as_bytes());
        hasher.update(g.unit_name(g.src(x)).as_bytes());
        hasher.update(g.unit_name(g.dst(x)).as_bytes());
        hasher.update(g.arrow_name(g.inverse(x)).as_bytes());
        hasher.update([0u8]);
    }
    for x in g.arrows() {
        for y in g.arrows() {
            if let Some(z) = g.compose(x, y) {
                hasher.update(g.arrow_name(x).as_bytes());
                hasher.update([1u8]);
                hasher.update(g.arrow_name(y).as_bytes());
                hasher.update([1u8]);
                hasher.update(g.arrow_name(z).as_bytes());
                hasher.update([0u8]);
            }
        }
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

// ---------------------------------------------------------------------------
// Function files
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionFile {
    pub values: BTreeMap<String, [f64; 2]>,
}

pub fn function_to_file(g: &FiniteGroupoid, f: &FunctionBundle) -> FunctionFile {
    let mut values = BTreeMap::new();
    for x in g.arrows() {
        let v = f.value(x);
        if v.norm() > 0.0 {
            values.insert(g.arrow_name(x).to_string(), pair(v));
        }
    }
    FunctionFile { values }
}

pub fn function_from_file(
    g: &FiniteGroupoid,
    file: &FunctionFile,
) -> Result<FunctionBundle, GroupoidError> {
    let mut f = FunctionBundle::zeros(g);
    for (name, v) in &file.values {
        f.set(g.arrow_by_name(name)?, unpair(*v));
    }
    Ok(f)
}

pub fn load_function(
    g: &FiniteGroupoid,
    path: impl AsRef<Path>,
) -> Result<FunctionBundle, GroupoidError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| GroupoidError::ParseError(format!("{}: {e}", path.as_ref().display())))?;
    let file: FunctionFile =
        serde_json::from_str(&text).map_err(|e| GroupoidError::ParseError(e.to_string()))?;
    function_from_file(g, &file)
}

// ---------------------------------------------------------------------------
// Coefficient files
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientFile {
    /// `[u, v]` unit names of the fiber.
    pub fiber: [String; 2],
    pub coeffs: BTreeMap<String, Vec<Vec<[f64; 2]>>>,
}

pub fn coefficient_to_file(g: &FiniteGroupoid, h: &FourierCoefficient) -> CoefficientFile {
    CoefficientFile {
        fiber: [
            g.unit_name(h.u).to_string(),
            g.unit_name(h.v).to_string(),
        ],
        coeffs: h
            .blocks
            .iter()
            .map(|b| (b.id.clone(), mat_to_rows(&b.mat)))
            .collect(),
    }
}

pub fn coefficient_from_file(
    g: &FiniteGroupoid,
    table: &IrrepTable,
    file: &CoefficientFile,
) -> Result<FourierCoefficient, GroupoidError> {
    let u = g.unit_by_name(&file.fiber[0])?;
    let v = g.unit_by_name(&file.fiber[1])?;
    let mut blocks = Vec::new();
    for (id, rows) in &file.coeffs {
        let entry = table
            .by_id(id)
            .ok_or_else(|| GroupoidError::ParseError(format!("unknown irrep id {id}")))?;
        let mat = rows_to_mat(rows)?;
        blocks.push(crate::fourier::CoeffBlock {
            id: id.clone(),
            dim: entry.rep.orbit_dim(),
            mat,
        });
    }
    Ok(FourierCoefficient { u, v, blocks })
}

// ---------------------------------------------------------------------------
// Irrep table files
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct IrrepFileEntry {
    pub id: String,
    pub dims: BTreeMap<String, usize>,
    pub matrices: BTreeMap<String, Vec<Vec<[f64; 2]>>>,
    pub character: BTreeMap<String, [f64; 2]>,
}

#[derive(Debug, Serialize)]
pub struct ComponentFileEntry {
    pub units: Vec<String>,
    pub isotropy_order: usize,
    pub irreps: Vec<IrrepFileEntry>,
}

#[derive(Debug, Serialize)]
pub struct IrrepTableFile {
    pub components: Vec<ComponentFileEntry>,
}

pub fn irrep_table_to_file(g: &FiniteGroupoid, table: &IrrepTable) -> IrrepTableFile {
    let components = g
        .components()
        .iter()
        .enumerate()
        .map(|(ci, comp)| {
            let irreps = table
                .component_entries(ci)
                .into_iter()
                .map(|entry| {
                    let mut dims = BTreeMap::new();
                    for &u in &comp.units {
                        dims.insert(g.unit_name(u).to_string(), entry.rep.dim(u));
                    }
                    let mut matrices = BTreeMap::new();
                    let mut character = BTreeMap::new();
                    for x in g.arrows() {
                        let u = g.src(x);
                        if !comp.contains(u) {
                            continue;
                        }
                        matrices.insert(
                            g.arrow_name(x).to_string(),
                            mat_to_rows(entry.rep.matrix(x)),
                        );
                        if u == g.dst(x) {
                            character.insert(
                                g.arrow_name(x).to_string(),
                                pair(entry.rep.matrix(x).diagonal().sum()),
                            );
                        }
                    }
                    IrrepFileEntry {
                        id: entry.id.clone(),
                        dims,
                        matrices,
                        character,
                    }
                })
                .collect();
            ComponentFileEntry {
                units: comp.units.iter().map(|&u| g.unit_name(u).to_string()).collect(),
                isotropy_order: comp.isotropy.order(),
                irreps,
            }
        })
        .collect();
    IrrepTableFile { components }
}

// ---------------------------------------------------------------------------
// Spectral function files
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralFile {
    pub component: usize,
    pub values: BTreeMap<String, [f64; 2]>,
}

pub fn spectral_to_file(s: &SpectralFunction) -> SpectralFile {
    SpectralFile {
        component: s.component,
        values: s
            .values
            .iter()
            .map(|(id, _, v)| (id.clone(), pair(*v)))
            .collect(),
    }
}

pub fn spectral_from_file(
    table: &IrrepTable,
    file: &SpectralFile,
) -> Result<SpectralFunction, GroupoidError> {
    let mut s = SpectralFunction::zeros(table, file.component);
    for (id, v) in &file.values {
        let mut found = false;
        for (i, _, val) in &mut s.values {
            if i == id {
                *val = unpair(*v);
                found = true;
            }
        }
        if !found {
            return Err(GroupoidError::ParseError(format!(
                "irrep id {id} not in component {}",
                file.component
            )));
        }
    }
    Ok(s)
}

// ---------------------------------------------------------------------------
// Check reports
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub max_dev: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct CheckReportFile {
    pub suite: String,
    pub fingerprint: String,
    pub seed: u64,
    pub version: String,
    pub checks: Vec<CheckLine>,
    pub pass: bool,
}

/// Serializes any value with the crate's formatting conventions.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

/// Resolves a unit name, defaulting to the first unit.
pub fn resolve_unit(g: &FiniteGroupoid, name: Option<&str>) -> Result<Unit, GroupoidError> {
    match name {
        Some(n) => g.unit_by_name(n),
        None => Ok(Unit(0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_sig_behaves() {
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(123456.7890123456), 123456.789012);
        assert_eq!(round_sig(-1e-15), -1e-15);
    }

    #[test]
    fn explicit_groupoid_round_trip() {
        let json = r#"{
            "units": ["u"],
            "arrows": [{"id": "e", "src": "u", "dst": "u"},
                       {"id": "a", "src": "u", "dst": "u"}],
            "inverse": {"e": "e", "a": "a"},
            "compose": [["e","e","e"],["e","a","a"],["a","e","a"],["a","a","e"]]
        }"#;
        let g = groupoid_from_str(json).expect("valid Z2");
        assert_eq!(g.n_units(), 1);
        assert_eq!(g.n_arrows(), 2);
    }

    #[test]
    fn unknown_fields_rejected() {
        let json = r#"{
            "units": ["u"], "arrows": [], "inverse": {}, "compose": [],
            "extra": 1
        }"#;
        assert!(groupoid_from_str(json).is_err());
    }

    #[test]
    fn builder_pair() {
        let g = groupoid_from_str(r#"{"builder": "pair", "n": 3}"#).expect("pair");
        assert_eq!(g.n_arrows(), 9);
    }

    #[test]
    fn builder_cyclic_group() {
        let g = groupoid_from_str(r#"{"builder": "group", "cyclic": 4}"#).expect("Z4");
        assert_eq!(g.n_units(), 1);
        assert_eq!(g.n_arrows(), 4);
    }

    #[test]
    fn builder_product() {
        let g = groupoid_from_str(
            r#"{"builder": "product",
                "left": {"builder": "group", "cyclic": 2},
                "right": {"builder": "pair", "n": 2}}"#,
        )
        .expect("Z2 x pair2");
        assert_eq!(g.n_units(), 2);
        assert_eq!(g.n_arrows(), 8);
    }

    #[test]
    fn fingerprint_is_format_independent() {
        let a = groupoid_from_str(r#"{"builder": "group", "cyclic": 3}"#).unwrap();
        let b = groupoid_from_str(
            r#"{"builder": "group", "table": [[0,1,2],[1,2,0],[2,0,1]]}"#,
        )
        .unwrap();
        // Same element names (g0, g1, g2) and same tables → same hash.
        assert_eq!(fingerprint(&a), fingerprint(&b));
    }
}
