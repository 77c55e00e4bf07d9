//! Built-in names a config may reference.

use serde::Serialize;

use cstk::chernweil::winding_map;
use cstk::equivariant::{ConnectionFamily, ToyBundle};
use cstk::forms::{builtin_chain, builtin_chain_names, ModelChart};
use cstk::liealg::{GroupId, InvariantPolynomial};
use cstk::moduli::FlatFamily;
use cstk::prequantum::high_degree_family;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    Chart,
    Cycle,
    Group,
    Polynomial,
    ToyBundle,
    WindingMap,
    Family,
}

impl Category {
    pub fn label(&self) -> &'static str {
        match self {
            Category::Chart => "chart",
            Category::Cycle => "cycle",
            Category::Group => "group",
            Category::Polynomial => "polynomial",
            Category::ToyBundle => "toy-bundle",
            Category::WindingMap => "winding-map",
            Category::Family => "family",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub category: Category,
    pub name: String,
    pub description: String,
}

fn entry(category: Category, name: impl Into<String>, description: impl Into<String>) -> Entry {
    Entry { category, name: name.into(), description: description.into() }
}

pub const WINDING_DEGREES: [i32; 4] = [-1, 0, 1, 2];

pub const FAMILIES: [(&str, &str); 5] = [
    ("torus2.su2_flat", "flat SU(2) family s·H on T², parameters in R²"),
    ("torus3.su2_commuting", "flat SU(2) family s·H on T³, parameters in R³"),
    ("torus3.su2_gauged", "flat SU(2) family on T³ gauge-rotated by a non-abelian map"),
    ("torus4.su3_high_degree", "flat SU(3) family on T⁴ with a parameter-dependent gauge, two parameters"),
    ("torus2.su2_bent", "non-flat SU(2) family s(dx iσ₁ + dy iσ₂) on T², one parameter"),
];

pub fn catalog() -> Vec<Entry> {
    let mut v = Vec::new();
    let charts = [
        ("torus1", "circle R/Z"),
        ("torus2", "2-torus R²/Z²"),
        ("torus3", "3-torus R³/Z³"),
        ("torus4", "4-torus R⁴/Z⁴"),
        ("cubes3", "unit cube with boundary collapsed, a model of S³"),
        ("sphere2", "2-sphere in polar coordinates"),
        ("hopf", "S³ in Hopf coordinates (η, ξ1, ξ2)"),
        ("polygon(1)", "genus-1 surface as a glued 4-gon"),
        ("polygon(2)", "genus-2 surface as a glued 8-gon"),
        ("polygon(3)", "genus-3 surface as a glued 12-gon"),
        ("euclidean1", "R"),
        ("euclidean2", "R²"),
        ("euclidean3", "R³"),
    ];
    for (n, d) in charts {
        v.push(entry(Category::Chart, n, d));
    }
    for n in builtin_chain_names() {
        let d = match builtin_chain(&n).ok().and_then(|c| c.dim()) {
            Some(k) => format!("{k}-cycle"),
            None => "cycle".into(),
        };
        v.push(entry(Category::Cycle, n, d));
    }
    for (n, d) in [("U1", "unit complex numbers"), ("SU2", "special unitary 2×2"), ("SU3", "special unitary 3×3")] {
        v.push(entry(Category::Group, n, d));
    }
    for r in 1..=3 {
        v.push(entry(Category::Polynomial, format!("p{r}"), format!("degree-{r} Chern polynomial, integral normalization")));
    }
    for b in ToyBundle::all() {
        let d = match b {
            ToyBundle::Hopf => "Hopf bundle S³ → S² with its round connection",
            ToyBundle::TorusBundle => "U(1)-bundle T³ → T² with a twisted invariant connection",
        };
        v.push(entry(Category::ToyBundle, b.name(), d));
    }
    for d in WINDING_DEGREES {
        v.push(entry(Category::WindingMap, winding_name(d), format!("cubes3 → SU(2) of degree {d}")));
    }
    for (n, d) in FAMILIES {
        v.push(entry(Category::Family, n, d));
    }
    v
}

pub fn winding_name(d: i32) -> String {
    format!("cubes3.winding({d})")
}

pub fn contains(category: Category, name: &str) -> bool {
    catalog().iter().any(|e| e.category == category && e.name == name)
}

pub fn parse_group(name: &str) -> Option<GroupId> {
    GroupId::parse(name).ok().filter(|g| contains(Category::Group, &g.name()))
}

pub fn parse_chart(name: &str) -> Option<ModelChart> {
    contains(Category::Chart, name).then(|| ModelChart::parse(name).ok()).flatten()
}

pub fn parse_polynomial(name: &str) -> Option<InvariantPolynomial> {
    let r: usize = name.strip_prefix('p')?.parse().ok()?;
    contains(Category::Polynomial, name).then(|| InvariantPolynomial::default_for(r).ok()).flatten()
}

pub fn parse_winding(name: &str) -> Option<(i32, cstk::connection::GaugeTransformation)> {
    let d = WINDING_DEGREES.into_iter().find(|d| winding_name(*d) == name)?;
    Some((d, winding_map(d)))
}

pub fn family(name: &str) -> Option<cstk::Result<ConnectionFamily>> {
    let s = cstk::chernweil::pauli().map(|m| m * cstk::liealg::C64::i());
    Some(match name {
        "torus2.su2_flat" => FlatFamily::su2_torus(2).map(|f| f.family()),
        "torus3.su2_commuting" => FlatFamily::su2_torus(3).map(|f| f.family()),
        "torus3.su2_gauged" => ConnectionFamily::gauged_torus3(),
        "torus4.su3_high_degree" => high_degree_family(),
        "torus2.su2_bent" => {
            let [k1, k2, _] = s;
            ConnectionFamily::new(
                ModelChart::Torus(2),
                ModelChart::Euclidean(1),
                GroupId::SU(2),
                std::sync::Arc::new(move |_, p| {
                    let c = cstk::liealg::C64::new(p[0], 0.0);
                    vec![&k1 * c, &k2 * c]
                }),
            )
        }
        _ => return None,
    })
}
