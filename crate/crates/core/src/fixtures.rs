//! Checked-in data: polytopes, fans, lattice maps, affine chart descriptors
//! and point lists, embedded at build time and pinned by SHA-256.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fan::{Fan, FanJson};
use crate::lattice::{IntVector, LatticeTag};
use crate::morphism::{LatticeMap, MapJson};
use crate::laurent::{ChartVar, ChartVars};
use crate::polytope::Polytope;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Polytope,
    Fan,
    Map,
    Chart,
    Sections,
    List,
}

/// One registered file.
#[derive(Clone, Copy, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub kind: Kind,
    pub path: &'static str,
    pub contents: &'static str,
    pub sha256: &'static str,
}

macro_rules! entry {
    ($name:literal, $kind:expr, $path:literal, $hash:literal) => {
        Entry {
            name: $name,
            kind: $kind,
            path: $path,
            contents: include_str!(concat!("../fixtures/", $path)),
            sha256: $hash,
        }
    };
}

const ENTRIES: &[Entry] = &[
entry!("delta_p24", Kind::Polytope, "polytopes/delta_p24.json", "aac73f181d4caf2fadbd6673083987e46aee876bc44cb5bbfc4503b1d603a199"),
    entry!("delta_p5", Kind::Polytope, "polytopes/delta_p5.json", "210914c6cc539286bdbebf9001cd14729070034f7b3e06b918a1a990b2606015"),
    entry!("delta_star_p24", Kind::Polytope, "polytopes/delta_star_p24.json", "518664f0aacbb627fa25f7095fa750f069e56beb26381d080e0e4d8e7e6073ac"),
    entry!("delta_star_wp", Kind::Polytope, "polytopes/delta_star_wp.json", "723f7030900664f5e7f3658bcbc3137629f8e9bd4b0977a2bb88bb7e04c96f1d"),
    entry!("delta_wp", Kind::Polytope, "polytopes/delta_wp.json", "b06d834ced2cc686dcde5afe92a8bdb030d56891dd0d77c804327fd47f7fb560"),
    entry!("face_f1", Kind::Polytope, "polytopes/face_f1.json", "673bb6e47bb2b8af20253cf489d9208a958fb903cfdb7f2cd1c1717b7d4b7454"),
    entry!("nabla", Kind::Polytope, "polytopes/nabla.json", "e35bc64edae67c904bd84883fde3a3e4c67486034446df59501bf71eb4bc057b"),
    entry!("nabla_1", Kind::Polytope, "polytopes/nabla_1.json", "0998d6c4e9bef790fc03d438e4ebc0c7a0d3d9ef31cb3ef77178d69eedea0178"),
    entry!("nabla_2", Kind::Polytope, "polytopes/nabla_2.json", "4cca046b35352e6c4fd472a8d6e1020eb74cebd6db58f05d9959c2ca8ec6d73e"),
    entry!("nabla_prime_2", Kind::Polytope, "polytopes/nabla_prime_2.json", "a4f4b974fdcca335e4b6dd70c4cab6f8822980fba752c7833ef027b8d1c8cff0"),
    entry!("sigma_prime_wp", Kind::Fan, "fans/sigma_prime_wp.json", "1790e97fb139558f2fe55eb589d3f8a63d4a6b18a4f6b7c4f328b1d8e0fbb7fc"),
    entry!("h_star", Kind::Map, "maps/h_star.json", "5b015c53378582cc6d61462f88ca15ac5f13dd4874adcf8f664fb545214f9298"),
    entry!("sections", Kind::Sections, "charts/sections.json", "c80618f7938387444d6617d6c9df0f18edfbc9e6d3e25475a170ada0d2903eed"),
    entry!("u1", Kind::Chart, "charts/u1.json", "5545f89b4dc4634e0bc2adaec415727716169120c322afc5a98e0392127a34bf"),
    entry!("u2", Kind::Chart, "charts/u2.json", "07244d1b32f8511dfa09289f6be949853312599f2d2d298867b8adf76a619e11"),
    entry!("w1", Kind::Chart, "charts/w1.json", "de03e0b0c7008cf6acdcd21ba7a42f95a53045f651d86c40d8f0b493f6729c9b"),
    entry!("forbidden_sets", Kind::List, "lists/forbidden_sets.json", "4030a704421332c12b10ba187ae916108b35b3304f05f7f70ec2a479a63e68d5"),
    entry!("image_points", Kind::List, "lists/image_points.json", "123203418bdba238d5b1a5c44b27fc43132ee7bac2a9db98e48fa76cc67fe036"),
    entry!("nef_p5", Kind::List, "lists/nef_p5.json", "a1b820a80119ac5cdf6266986871caea274a8c75b14dbc7b1d42718f206268e6"),
    entry!("newton_points", Kind::List, "lists/newton_points.json", "30b0336e47762c33a6050cfae4a34be6e3481b3896bc3292619c19fa139b9383"),
    entry!("phi_prime", Kind::List, "lists/phi_prime.json", "d719e9e759232ea4dc60a88018cb683a39251ae43c3ed3c39da809a4ec5976a8"),
    entry!("triangles", Kind::List, "lists/triangles.json", "b840a5a654baf0b604287a7d4e322383c2c7867d173658574136e92e3048b186"),
];

const CHECKS_JSON: &str = include_str!("../fixtures/checks.json");
const CHECKS_SHA256: &str = "2dde865709bea490eb6be7eb3ccf1d7d9a5d736ad77647a05144ccebad1ce310";

pub fn entries() -> &'static [Entry] {
    ENTRIES
}

pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.name).collect()
}

pub fn entry(name: &str) -> Result<&'static Entry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownFixture(name.to_string()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Raw JSON text after the hash pin has been checked.
pub fn raw(name: &str) -> Result<&'static str> {
    let e = entry(name)?;
    pinned(e.name, e.contents, e.sha256)
}

fn pinned(name: &str, contents: &'static str, sha: &str) -> Result<&'static str> {
    let got = sha256_hex(contents.as_bytes());
    if got != sha {
        return Err(schema(name, format!("hash {got} does not match pin {sha}")));
    }
    Ok(contents)
}

fn schema(name: &str, reason: impl Into<String>) -> Error {
    Error::Schema {
        name: name.to_string(),
        reason: reason.into(),
    }
}

fn parse<T: for<'de> Deserialize<'de>>(name: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| schema(name, e.to_string()))
}

pub fn lattice_dim(tag: LatticeTag) -> usize {
    match tag {
        LatticeTag::M | LatticeTag::N => 4,
        LatticeTag::MPrime | LatticeTag::NPrime => 5,
    }
}

/// Layout of polytope files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub name: String,
    pub lattice: LatticeTag,
    pub vertices: Vec<Vec<i64>>,
}

/// A coordinate of an affine chart: the monomial `z^exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartVariable {
    pub name: String,
    pub exponent: IntVector,
    #[serde(default)]
    pub unit: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equation {
    pub lhs: String,
    pub rhs: String,
}

/// A ring map from this chart's coordinate ring to another chart's, with its
/// inverse on a localization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartMorphism {
    pub name: String,
    pub target_chart: String,
    pub forward: BTreeMap<String, String>,
    pub inverse: BTreeMap<String, String>,
    /// `inverse(lhs - rhs) = relation_cofactor * (target ideal generator)`.
    pub relation_cofactor: String,
}

/// An affine chart `Spec C[sigma^dual ∩ M]` given by its cone, its coordinate
/// monomials, a monoid relation and the restricted ideal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chart {
    pub name: String,
    pub lattice: LatticeTag,
    pub cone: Vec<IntVector>,
    pub variables: Vec<ChartVariable>,
    pub ideal: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<Equation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factored: Option<Equation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub morphism: Option<ChartMorphism>,
}

impl Chart {
    pub fn variable(&self, name: &str) -> Option<&ChartVariable> {
        self.variables.iter().find(|v| v.name == name)
    }

    pub fn names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.name.clone()).collect()
    }

    pub fn chart_vars(&self) -> ChartVars {
        ChartVars::new(
            self.variables
                .iter()
                .map(|v| ChartVar {
                    name: v.name.clone(),
                    exponent: v.exponent.clone(),
                    unit: v.unit,
                })
                .collect(),
            self.cone.clone(),
        )
    }
}

/// Global sections on a torus, written in named coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusSections {
    pub lattice: LatticeTag,
    pub variables: BTreeMap<String, IntVector>,
    #[serde(flatten)]
    pub rest: BTreeMap<String, Value>,
}

impl TorusSections {
    pub fn expr(&self, key: &str) -> Option<&str> {
        self.rest.get(key).and_then(Value::as_str)
    }

    /// Variable names ordered by the coordinate their exponent selects.
    pub fn ordered_variables(&self) -> Vec<String> {
        let mut v: Vec<(&IntVector, &String)> = self.variables.iter().map(|(k, e)| (e, k)).collect();
        v.sort_by(|a, b| b.0.cmp(a.0));
        v.into_iter().map(|(_, k)| k.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sections {
    pub name: String,
    pub mirror_wp: TorusSections,
    pub bb: TorusSections,
}

/// A named list of points or point sets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointList {
    pub name: String,
    pub lattice: Option<LatticeTag>,
    pub data: Value,
}

impl PointList {
    pub fn points(&self, key: &str) -> Result<Vec<IntVector>> {
        let v = self
            .data
            .get(key)
            .ok_or_else(|| schema(&self.name, format!("missing key {key}")))?;
        serde_json::from_value(v.clone()).map_err(|e| schema(&self.name, e.to_string()))
    }

    pub fn point(&self, path: &[&str]) -> Result<IntVector> {
        let mut v = &self.data;
        for k in path {
            v = v
                .get(k)
                .ok_or_else(|| schema(&self.name, format!("missing key {k}")))?;
        }
        serde_json::from_value(v.clone()).map_err(|e| schema(&self.name, e.to_string()))
    }

    pub fn point_sets(&self, key: &str) -> Result<Vec<Vec<IntVector>>> {
        let v = self
            .data
            .get(key)
            .ok_or_else(|| schema(&self.name, format!("missing key {key}")))?;
        serde_json::from_value(v.clone()).map_err(|e| schema(&self.name, e.to_string()))
    }

    pub fn str_field(&self, key: &str) -> Option<&str> {
        self.data.get(key).and_then(Value::as_str)
    }
}

#[derive(Clone, Debug)]
pub enum Fixture {
    Polytope(Polytope),
    Fan(Fan),
    Map(LatticeMap),
    Chart(Box<Chart>),
    Sections(Box<Sections>),
    List(PointList),
}

/// Parses and checks a registered fixture.
pub fn load(name: &str) -> Result<Fixture> {
    let e = entry(name)?;
    let text = pinned(e.name, e.contents, e.sha256)?;
    match e.kind {
        Kind::Polytope => load_polytope(name, text).map(Fixture::Polytope),
        Kind::Fan => load_fan(name, text).map(Fixture::Fan),
        Kind::Map => load_map(name, text).map(Fixture::Map),
        Kind::Chart => load_chart(name, text).map(|c| Fixture::Chart(Box::new(c))),
        Kind::Sections => load_sections(name, text).map(|s| Fixture::Sections(Box::new(s))),
        Kind::List => load_list(name, text).map(Fixture::List),
    }
}

fn wrong_kind(name: &str, want: &str) -> Error {
    schema(name, format!("not a {want}"))
}

pub fn polytope(name: &str) -> Result<Polytope> {
    match load(name)? {
        Fixture::Polytope(p) => Ok(p),
        _ => Err(wrong_kind(name, "polytope")),
    }
}

/// The vertex rows exactly as listed in the file.
pub fn polytope_rows(name: &str) -> Result<Vec<IntVector>> {
    let j: PolytopeJson = parse(name, raw(name)?)?;
    Ok(j.vertices.iter().map(|r| IntVector::from_i64s(r)).collect())
}

pub fn fan(name: &str) -> Result<Fan> {
    match load(name)? {
        Fixture::Fan(f) => Ok(f),
        _ => Err(wrong_kind(name, "fan")),
    }
}

pub fn map(name: &str) -> Result<LatticeMap> {
    match load(name)? {
        Fixture::Map(m) => Ok(m),
        _ => Err(wrong_kind(name, "lattice map")),
    }
}

pub fn chart(name: &str) -> Result<Chart> {
    match load(name)? {
        Fixture::Chart(c) => Ok(*c),
        _ => Err(wrong_kind(name, "chart")),
    }
}

pub fn sections() -> Result<Sections> {
    match load("sections")? {
        Fixture::Sections(s) => Ok(*s),
        _ => Err(wrong_kind("sections", "section list")),
    }
}

pub fn list(name: &str) -> Result<PointList> {
    match load(name)? {
        Fixture::List(l) => Ok(l),
        _ => Err(wrong_kind(name, "point list")),
    }
}

fn load_polytope(name: &str, text: &str) -> Result<Polytope> {
    let j: PolytopeJson = parse(name, text)?;
    let d = lattice_dim(j.lattice);
    if j.vertices.is_empty() {
        return Err(schema(name, "no vertices"));
    }
    if let Some(r) = j.vertices.iter().find(|r| r.len() != d) {
        return Err(schema(name, format!("row {r:?} does not have {d} entries")));
    }
    let rows: Vec<IntVector> = j.vertices.iter().map(|r| IntVector::from_i64s(r)).collect();
    let p = Polytope::from_integer_points(&rows)?.with_lattice(j.lattice);
    if p.vertices().len() != rows.len() {
        return Err(schema(
            name,
            format!("{} rows but {} vertices", rows.len(), p.vertices().len()),
        ));
    }
    Ok(p)
}

fn load_fan(name: &str, text: &str) -> Result<Fan> {
    let j: FanJson = parse(name, text)?;
    for r in &j.rays {
        let v = IntVector::from_i64s(r);
        if r.len() != j.ambient_dim || v.is_zero() || v.primitive()? != v {
            return Err(schema(name, format!("ray {r:?} is not a primitive vector of length {}", j.ambient_dim)));
        }
    }
    let f = Fan::from_json(&j)?;
    if f.maximal_cones().len() != j.maximal_cones.len() {
        return Err(schema(name, "a listed cone is contained in another"));
    }
    for c in f.maximal_cones() {
        if f.cone_dim(c) != j.ambient_dim {
            return Err(schema(name, format!("cone {c:?} is not full-dimensional")));
        }
    }
    Ok(f)
}

fn load_map(name: &str, text: &str) -> Result<LatticeMap> {
    let j: MapJson = parse(name, text)?;
    let m = LatticeMap::from_json(&j)?;
    if m.source_dim() != lattice_dim(j.source) || m.target_dim() != lattice_dim(j.target) {
        return Err(schema(name, "matrix shape does not match the lattices"));
    }
    Ok(m)
}

fn load_chart(name: &str, text: &str) -> Result<Chart> {
    let c: Chart = parse(name, text)?;
    let d = lattice_dim(c.lattice);
    if c.cone.iter().any(|r| r.dim() != d) {
        return Err(schema(name, "cone ray of wrong length"));
    }
    if c.variables.iter().any(|v| v.exponent.dim() != d) {
        return Err(schema(name, "exponent of wrong length"));
    }
    for v in &c.variables {
        let pairing_ok = c.cone.iter().all(|r| {
            let p = v.exponent.dot(&r.clone());
            if v.unit {
                p == 0.into()
            } else {
                p >= 0.into()
            }
        });
        if !pairing_ok {
            return Err(schema(name, format!("{} is not regular on the cone", v.name)));
        }
    }
    Ok(c)
}

fn load_sections(name: &str, text: &str) -> Result<Sections> {
    let s: Sections = parse(name, text)?;
    for t in [&s.mirror_wp, &s.bb] {
        let d = lattice_dim(t.lattice);
        if t.variables.values().any(|e| e.dim() != d) {
            return Err(schema(name, "exponent of wrong length"));
        }
    }
    Ok(s)
}

fn load_list(name: &str, text: &str) -> Result<PointList> {
    let data: Value = parse(name, text)?;
    let lattice = match data.get("lattice") {
        Some(v) => Some(serde_json::from_value(v.clone()).map_err(|e| schema(name, e.to_string()))?),
        None => None,
    };
    Ok(PointList {
        name: name.to_string(),
        lattice,
        data,
    })
}

/// One acceptance check and where its claim comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckInfo {
    pub id: String,
    pub slug: String,
    pub title: String,
    pub anchor: String,
}

pub fn list_checks() -> Vec<CheckInfo> {
    let text = pinned("checks", CHECKS_JSON, CHECKS_SHA256).expect("checks.json pin");
    serde_json::from_str(text).expect("checks.json parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_loads() {
        for e in entries() {
            load(e.name).unwrap_or_else(|err| panic!("{}: {err}", e.name));
        }
    }

    #[test]
    fn embedded_matches_disk() {
        let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        for e in entries() {
            let on_disk = std::fs::read_to_string(root.join(e.path)).unwrap();
            assert_eq!(sha256_hex(on_disk.as_bytes()), e.sha256, "{}", e.path);
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(load("nope"), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn wrong_pin_is_rejected() {
        assert!(matches!(pinned("x", "{}", "00"), Err(Error::Schema { .. })));
    }

    #[test]
    fn check_table() {
        let c = list_checks();
        assert!(c.len() >= 14);
        assert!(c.iter().any(|c| c.id == "V3"));
        assert!(c.iter().any(|c| c.id == "V7"));
    }
}
