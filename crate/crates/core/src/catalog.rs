//! The built-in identity catalog: the 39-row main table plus the eight
//! individually studied identities (left/right semimedial, Cote, Manin,
//! identity 1, and duals), with lookup by abbreviation or kebab-case name
//! and a line-oriented exchange format.

use std::sync::LazyLock;

use thiserror::Error;

use crate::term::{parse_identity, Identity, ParseError};

/// Which block of the built-in catalog an entry belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Source {
    /// One of the 39 rows of the main identity table.
    MainTable,
    /// An individually studied identity (semimedial, Cote, Manin, identity 1).
    Supplement,
    /// The dual of a supplement entry.
    DerivedDual,
}

/// One catalog row: a labeled identity plus its source formula.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    identity: Identity,
    formula: &'static str,
    source: Source,
}

impl CatalogEntry {
    pub fn identity(&self) -> &Identity {
        &self.identity
    }

    pub fn name(&self) -> &str {
        self.identity.name().unwrap_or_default()
    }

    pub fn abbrev(&self) -> &str {
        self.identity.abbrev().unwrap_or_default()
    }

    /// The formula string the entry was defined with; reparses to
    /// `identity()`.
    pub fn formula(&self) -> &'static str {
        self.formula
    }

    pub fn source(&self) -> Source {
        self.source
    }
}

const MAIN_TABLE: &[(&str, &str, &str)] = &[
    ("Semigroups", "SGR", "x(yz) = (xy)z"),
    ("Extra", "EL", "x(y(zx)) = ((xy)z)x"),
    ("Moufang", "ML", "(xy)(zx) = (x(yz))x"),
    ("Left Bol", "LB", "x(y(xz)) = (x(yx))z"),
    ("Right Bol", "RB", "y((xz)x) = ((yx)z)x"),
    ("C-loops", "CL", "x(y(xz)) = ((yx)x)z"),
    ("LC-loops", "LC", "(xx)(yz) = (x(xy))z"),
    ("RC-loops", "RC", "y((zx)x) = (yz)(xx)"),
    ("Middle Nuclear Square", "MN", "y((xx)z) = (y(xx))z"),
    ("Right Nuclear Square", "RN", "y(z(xx)) = (yz)(xx)"),
    ("Left Nuclear Square", "LN", "((xx)y)z = (xx)(yz)"),
    ("Comm. Moufang", "CM", "(xy)(xz) = (xx)(zy)"),
    ("Abelian Group", "AG", "x(yz) = (yx)z"),
    ("Comm. C-loop", "CC", "(y(xy))z = x(y(yz))"),
    ("Comm. Alternative", "CA", "((xx)y)z = z(x(yx))"),
    ("Comm. Nuclear square", "CN", "((xx)y)z = (xx)(zy)"),
    ("Comm. loops", "CP", "((yx)x)z = z(x(yx))"),
    ("Cheban 1", "C1", "x((xy)z) = (yx)(xz)"),
    ("Cheban 2", "C2", "x((xy)z) = (y(zx))x"),
    ("Lonely I", "L1", "(x(xy))z = y((zx)x)"),
    ("Cheban I Dual", "CD", "(yx)(xz) = (y(zx))x"),
    ("Lonely II", "L2", "(x(xy))z = y((xx)z)"),
    ("Lonely III", "L3", "(y(xx))z = y((zx)x)"),
    ("Mate I", "M1", "(x(xy))z = ((yz)x)x"),
    ("Mate II", "M2", "(y(xx))z = ((yz)x)x"),
    ("Mate III", "M3", "x(x(yz)) = y((zx)x)"),
    ("Mate IV", "M4", "x(x(yz)) = y((xx)z)"),
    ("Triad I", "T1", "(xx)(yz) = y(z(xx))"),
    ("Triad II", "T2", "((xx)y)z = y(z(xx))"),
    ("Triad III", "T3", "((xx)y)z = (yz)(xx)"),
    ("Triad IV", "T4", "((xx)y)z = ((yz)x)x"),
    ("Triad V", "T5", "x(x(yz)) = y(z(xx))"),
    ("Triad VI", "T6", "(xx)(yz) = (yz)(xx)"),
    ("Triad VII", "T7", "((xx)y)z = ((yx)x)z"),
    ("Triad VIII", "T8", "(xx)(yz) = y((zx)x)"),
    ("Triad IX", "T9", "(x(xy))z = y(z(xx))"),
    ("Frute", "FR", "(x(xy))z = (y(zx))x"),
    ("Crazy Loop", "CR", "(x(xy))z = x((zx)y)"),
    ("Krypton", "KL", "((xx)y)z = (x(yz))x"),
];

const SUPPLEMENTS: &[(&str, &str, &str, Source)] = &[
    ("Left semimedial", "LSM", "xx*yz = xy*xz", Source::Supplement),
    ("Right semimedial", "RSM", "xy*zz = xz*yz", Source::DerivedDual),
    ("Cote", "COT", "x(xy*z) = (z*xx)y", Source::Supplement),
    ("Cote dual", "COTD", "(z*yx)x = y(xx*z)", Source::DerivedDual),
    ("Manin", "MAN", "x(y*xz) = (xx*y)z", Source::Supplement),
    ("Manin dual", "MAND", "(zx*y)x = z(y*xx)", Source::DerivedDual),
    ("Identity 1", "ID1", "(xy*x)z = (y*xz)x", Source::Supplement),
    ("Identity 1 dual", "ID1D", "z(x*yx) = x(zx*y)", Source::DerivedDual),
];

static CATALOG: LazyLock<Vec<CatalogEntry>> = LazyLock::new(|| {
    let mut entries = Vec::with_capacity(MAIN_TABLE.len() + SUPPLEMENTS.len());
    for &(name, abbrev, formula) in MAIN_TABLE {
        entries.push(CatalogEntry {
            identity: parse_identity(formula)
                .unwrap_or_else(|e| panic!("catalog formula `{formula}`: {e}"))
                .with_labels(name, abbrev),
            formula,
            source: Source::MainTable,
        });
    }
    for &(name, abbrev, formula, source) in SUPPLEMENTS {
        entries.push(CatalogEntry {
            identity: parse_identity(formula)
                .unwrap_or_else(|e| panic!("catalog formula `{formula}`: {e}"))
                .with_labels(name, abbrev),
            formula,
            source,
        });
    }
    entries
});

/// All 47 built-in entries, main table first.
pub fn catalog() -> &'static [CatalogEntry] {
    &CATALOG
}

/// The 39 main-table entries.
pub fn main_table() -> impl Iterator<Item = &'static CatalogEntry> {
    catalog().iter().filter(|e| e.source == Source::MainTable)
}

/// The 8 individually studied entries (including duals).
pub fn supplements() -> impl Iterator<Item = &'static CatalogEntry> {
    catalog().iter().filter(|e| e.source != Source::MainTable)
}

/// Lowercases and hyphenates a display name: `Comm. Moufang` becomes
/// `comm-moufang`.
pub fn kebab(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('-') && !out.is_empty() {
            out.push('-');
        }
    }
    out.trim_end_matches('-').to_string()
}

/// Finds a catalog entry by abbreviation (case-insensitive) or
/// kebab-case name.
pub fn find(key: &str) -> Option<&'static CatalogEntry> {
    let key = key.trim().to_ascii_lowercase();
    catalog()
        .iter()
        .find(|e| e.abbrev().to_ascii_lowercase() == key || kebab(e.name()) == key)
}

/// Resolves a key to an identity. A `-dual` suffix falls back to the
/// mirror of the base entry, normalized, when no entry carries the
/// suffixed name itself.
pub fn resolve(key: &str) -> Option<Identity> {
    if let Some(entry) = find(key) {
        return Some(entry.identity.clone());
    }
    let key = key.trim().to_ascii_lowercase();
    let base = key.strip_suffix("-dual")?;
    let entry = find(base)?;
    Some(
        entry
            .identity
            .mirror()
            .normalize_variables()
            .with_labels(
                format!("{} dual", entry.name()),
                format!("{}D", entry.abbrev()),
            ),
    )
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("line {line}: expected `name;abbrev;formula`")]
    Fields { line: usize },
    #[error("line {line}: {source}")]
    Formula { line: usize, source: ParseError },
}

/// Renders identities in the exchange format: one `name;abbrev;formula`
/// line per identity, `#` starting comment lines.
pub fn to_identity_file<'a>(identities: impl IntoIterator<Item = &'a Identity>) -> String {
    let mut out = String::from("# name;abbrev;formula\n");
    for id in identities {
        out.push_str(&format!(
            "{};{};{}\n",
            id.name().unwrap_or_default(),
            id.abbrev().unwrap_or_default(),
            id
        ));
    }
    out
}

/// Parses the exchange format. Blank lines and `#` comments are skipped.
pub fn parse_identity_file(text: &str) -> Result<Vec<Identity>, CatalogError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(';').collect();
        if fields.len() != 3 {
            return Err(CatalogError::Fields { line: i + 1 });
        }
        let id = parse_identity(fields[2])
            .map_err(|source| CatalogError::Formula { line: i + 1, source })?;
        let (name, abbrev) = (fields[0].trim(), fields[1].trim());
        out.push(if name.is_empty() && abbrev.is_empty() {
            id
        } else {
            id.with_labels(name, abbrev)
        });
    }
    Ok(out)
}
