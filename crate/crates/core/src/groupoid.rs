//! Finite groupoids as dense Cayley tables, with the relabeling action,
//! canonical forms, and structural predicates.
//!
//! Tables are row-major: the entry at row `x`, column `y` is `x·y`.
//! Elements are 0-based internally; the text format is 1-based.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupoidError {
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("order {0} has more tables than a 64-bit index can address")]
    OrderTooLarge(usize),
    #[error("table length {len} does not match order {order}")]
    TableLength { order: usize, len: usize },
    #[error("entry {entry} out of range for order {order}")]
    EntryRange { order: usize, entry: u8 },
    #[error("index {index} out of range for order {order}")]
    IndexRange { order: usize, index: u64 },
    #[error("permutation images are not a bijection on 0..{0}")]
    NotBijection(usize),
    #[error("malformed Cayley table text: {0}")]
    Text(String),
}

/// An order-n groupoid: n² table entries, each in `0..n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Groupoid {
    order: usize,
    table: Vec<u8>,
}

impl Groupoid {
    pub fn new(order: usize, table: Vec<u8>) -> Result<Self, GroupoidError> {
        if order == 0 {
            return Err(GroupoidError::ZeroOrder);
        }
        if table.len() != order * order {
            return Err(GroupoidError::TableLength {
                order,
                len: table.len(),
            });
        }
        if let Some(&entry) = table.iter().find(|&&e| e as usize >= order) {
            return Err(GroupoidError::EntryRange { order, entry });
        }
        Ok(Groupoid { order, table })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    /// The product x·y. Panics if an argument is not an element.
    #[inline]
    pub fn op(&self, x: u8, y: u8) -> u8 {
        assert!(
            (x as usize) < self.order && (y as usize) < self.order,
            "element out of range for order {}",
            self.order
        );
        self.table[x as usize * self.order + y as usize]
    }

    /// Number of order-n tables, n^(n²); errors when it overflows u64.
    pub fn table_count(order: usize) -> Result<u64, GroupoidError> {
        if order == 0 {
            return Err(GroupoidError::ZeroOrder);
        }
        let mut count: u64 = 1;
        for _ in 0..order * order {
            count = count
                .checked_mul(order as u64)
                .ok_or(GroupoidError::OrderTooLarge(order))?;
        }
        Ok(count)
    }

    /// The table whose row-major entries are the big-endian base-n
    /// expansion of `index`.
    pub fn from_index(order: usize, index: u64) -> Result<Self, GroupoidError> {
        let count = Self::table_count(order)?;
        if index >= count {
            return Err(GroupoidError::IndexRange { order, index });
        }
        let cells = order * order;
        let mut table = vec![0u8; cells];
        let mut k = index;
        for d in (0..cells).rev() {
            table[d] = (k % order as u64) as u8;
            k /= order as u64;
        }
        Ok(Groupoid { order, table })
    }

    /// Inverse of [`Groupoid::from_index`].
    pub fn to_index(&self) -> u64 {
        let mut k: u64 = 0;
        for &d in &self.table {
            k = k * self.order as u64 + d as u64;
        }
        k
    }

    /// Relabels elements by `p`: the result satisfies
    /// `r.op(x, y) = p(g.op(p⁻¹(x), p⁻¹(y)))`. Panics on order mismatch.
    pub fn apply_iso(&self, p: &Permutation) -> Groupoid {
        assert_eq!(self.order, p.degree(), "permutation degree mismatch");
        let n = self.order;
        let inv = p.inverse();
        let mut table = vec![0u8; n * n];
        for x in 0..n as u8 {
            for y in 0..n as u8 {
                table[x as usize * n + y as usize] =
                    p.apply(self.op(inv.apply(x), inv.apply(y)));
            }
        }
        Groupoid { order: n, table }
    }

    /// Minimum of `to_index` over all n! relabelings. Two groupoids are
    /// isomorphic iff their canonical indices are equal.
    pub fn canonical_index(&self) -> u64 {
        let n = self.order;
        let mut best = u64::MAX;
        for p in Permutation::all(n) {
            let inv = p.inverse();
            let mut k: u64 = 0;
            for x in 0..n as u8 {
                for y in 0..n as u8 {
                    k = k * n as u64
                        + p.apply(self.op(inv.apply(x), inv.apply(y))) as u64;
                }
            }
            best = best.min(k);
        }
        best
    }

    /// The canonical representative of this groupoid's isomorphism class.
    pub fn canonical_form(&self) -> Groupoid {
        Groupoid::from_index(self.order, self.canonical_index())
            .expect("canonical index is in range")
    }

    /// The (12)-parastrophe: `r.op(x, y) = g.op(y, x)`.
    pub fn opposite(&self) -> Groupoid {
        let n = self.order;
        let mut table = vec![0u8; n * n];
        for x in 0..n {
            for y in 0..n {
                table[x * n + y] = self.table[y * n + x];
            }
        }
        Groupoid { order: n, table }
    }

    /// True iff every row and column is a permutation of 0..n (the table
    /// is a Latin square).
    pub fn is_quasigroup(&self) -> bool {
        let n = self.order;
        let mut seen = vec![false; n];
        for row in self.table.chunks(n) {
            seen.fill(false);
            for &e in row {
                if seen[e as usize] {
                    return false;
                }
                seen[e as usize] = true;
            }
        }
        for c in 0..n {
            seen.fill(false);
            for r in 0..n {
                let e = self.table[r * n + c];
                if seen[e as usize] {
                    return false;
                }
                seen[e as usize] = true;
            }
        }
        true
    }

    pub fn is_associative(&self) -> bool {
        let n = self.order as u8;
        for x in 0..n {
            for y in 0..n {
                let xy = self.op(x, y);
                for z in 0..n {
                    if self.op(xy, z) != self.op(x, self.op(y, z)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.order;
        for x in 0..n {
            for y in 0..x {
                if self.table[x * n + y] != self.table[y * n + x] {
                    return false;
                }
            }
        }
        true
    }

    /// Renders the 1-based text format: a header line `order n` followed
    /// by n rows of n space-separated entries.
    pub fn to_table_text(&self) -> String {
        let mut out = format!("order {}\n", self.order);
        for row in self.table.chunks(self.order) {
            let line: Vec<String> = row.iter().map(|&e| (e + 1).to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the text format produced by [`Groupoid::to_table_text`].
    /// Blank lines and `#` comment lines are ignored.
    pub fn parse_table_text(text: &str) -> Result<Self, GroupoidError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| GroupoidError::Text("missing header".into()))?;
        let order: usize = header
            .strip_prefix("order")
            .map(str::trim)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| GroupoidError::Text(format!("bad header `{header}`")))?;
        if order == 0 {
            return Err(GroupoidError::ZeroOrder);
        }
        let mut table = Vec::with_capacity(order * order);
        for _ in 0..order {
            let line = lines
                .next()
                .ok_or_else(|| GroupoidError::Text("missing table row".into()))?;
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != order {
                return Err(GroupoidError::Text(format!(
                    "expected {order} entries, got {} in `{line}`",
                    entries.len()
                )));
            }
            for e in entries {
                let v: u64 = e
                    .parse()
                    .map_err(|_| GroupoidError::Text(format!("bad entry `{e}`")))?;
                if v < 1 || v > order as u64 {
                    return Err(GroupoidError::Text(format!(
                        "entry {v} out of range 1..={order}"
                    )));
                }
                table.push((v - 1) as u8);
            }
        }
        Groupoid::new(order, table)
    }
}

impl fmt::Display for Groupoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_table_text())
    }
}

/// A Cayley table under construction: each cell is filled or not.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PartialGroupoid {
    order: usize,
    cells: Vec<Option<u8>>,
}

impl PartialGroupoid {
    pub fn empty(order: usize) -> Self {
        assert!(order >= 1, "order must be at least 1");
        PartialGroupoid {
            order,
            cells: vec![None; order * order],
        }
    }

    pub fn from_groupoid(g: &Groupoid) -> Self {
        PartialGroupoid {
            order: g.order(),
            cells: g.table().iter().map(|&e| Some(e)).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, x: u8, y: u8) -> Option<u8> {
        self.cells[x as usize * self.order + y as usize]
    }

    pub fn set(&mut self, x: u8, y: u8, value: u8) {
        assert!((value as usize) < self.order, "entry out of range");
        self.cells[x as usize * self.order + y as usize] = Some(value);
    }

    pub fn clear(&mut self, x: u8, y: u8) {
        self.cells[x as usize * self.order + y as usize] = None;
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    /// The completed groupoid, if every cell is filled.
    pub fn to_groupoid(&self) -> Option<Groupoid> {
        let table: Option<Vec<u8>> = self.cells.iter().copied().collect();
        table.map(|table| Groupoid {
            order: self.order,
            table,
        })
    }
}

/// A relabeling of 0..n: position i holds the image of i.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u8).collect(),
        }
    }

    pub fn new(images: Vec<u8>) -> Result<Self, GroupoidError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if (i as usize) >= n || seen[i as usize] {
                return Err(GroupoidError::NotBijection(n));
            }
            seen[i as usize] = true;
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: u8) -> u8 {
        self.images[x as usize]
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u8; self.images.len()];
        for (i, &img) in self.images.iter().enumerate() {
            images[img as usize] = i as u8;
        }
        Permutation { images }
    }

    /// Composition `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Permutation {
            images: other.images.iter().map(|&x| self.apply(x)).collect(),
        }
    }

    /// All n! permutations of 0..n, in lexicographic order of images.
    pub fn all(degree: usize) -> Vec<Permutation> {
        assert!(degree <= 8, "refusing to enumerate {degree}! permutations");
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(degree);
        let mut used = vec![false; degree];
        fn rec(
            degree: usize,
            current: &mut Vec<u8>,
            used: &mut Vec<bool>,
            out: &mut Vec<Permutation>,
        ) {
            if current.len() == degree {
                out.push(Permutation {
                    images: current.clone(),
                });
                return;
            }
            for i in 0..degree {
                if !used[i] {
                    used[i] = true;
                    current.push(i as u8);
                    rec(degree, current, used, out);
                    current.pop();
                    used[i] = false;
                }
            }
        }
        rec(degree, &mut current, &mut used, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(order: usize, table: &[u8]) -> Groupoid {
        Groupoid::new(order, table.to_vec()).unwrap()
    }

    #[test]
    fn op_reads_row_major() {
        // the order-2 xor table
        let z2 = g(2, &[0, 1, 1, 0]);
        assert_eq!(z2.op(0, 1), 1);
        assert_eq!(z2.op(1, 1), 0);
        let constant = g(2, &[0, 0, 0, 0]);
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(constant.op(x, y), 0);
            }
        }
        let all_max = Groupoid::from_index(3, Groupoid::table_count(3).unwrap() - 1).unwrap();
        assert_eq!(all_max.op(2, 2), 2);
    }

    #[test]
    fn index_round_trip() {
        assert_eq!(Groupoid::from_index(2, 0).unwrap().table(), &[0, 0, 0, 0]);
        assert_eq!(Groupoid::from_index(2, 15).unwrap().table(), &[1, 1, 1, 1]);
        let g = Groupoid::from_index(3, 19682).unwrap();
        assert_eq!(g.to_index(), 19682);
        assert!(Groupoid::from_index(2, 16).is_err());
        assert!(Groupoid::table_count(6).is_err());
    }

    #[test]
    fn apply_iso_examples() {
        let z2 = g(2, &[0, 1, 1, 0]);
        let id = Permutation::identity(2);
        assert_eq!(z2.apply_iso(&id), z2);
        let swap = Permutation::new(vec![1, 0]).unwrap();
        assert_eq!(z2.apply_iso(&swap), z2);
        let constant0 = g(2, &[0, 0, 0, 0]);
        assert_eq!(constant0.apply_iso(&swap), g(2, &[1, 1, 1, 1]));
    }

    #[test]
    fn canonical_index_bounds() {
        for k in 0..16 {
            let t = Groupoid::from_index(2, k).unwrap();
            assert!(t.canonical_index() <= t.to_index());
            for p in Permutation::all(2) {
                assert_eq!(t.apply_iso(&p).canonical_index(), t.canonical_index());
            }
        }
    }

    #[test]
    fn opposite_examples() {
        // the paper-style right-projection table and its opposite
        let right_proj = g(2, &[0, 1, 0, 1]);
        let left_proj = g(2, &[0, 0, 1, 1]);
        assert_eq!(right_proj.opposite(), left_proj);
        assert_eq!(left_proj.opposite(), right_proj);
        let commutative = g(2, &[0, 1, 1, 0]);
        assert_eq!(commutative.opposite(), commutative);
    }

    #[test]
    fn structural_predicates() {
        let z2 = g(2, &[0, 1, 1, 0]);
        assert!(z2.is_quasigroup());
        assert!(z2.is_associative());
        assert!(z2.is_commutative());
        let constant = g(2, &[0, 0, 0, 0]);
        assert!(!constant.is_quasigroup());
        // sixth of the seven displayed order-2 tables: not associative
        let sixth = g(2, &[1, 0, 1, 0]);
        assert!(!sixth.is_associative());
        // second of the seven: associative
        let second = g(2, &[0, 0, 0, 1]);
        assert!(second.is_associative());
        let seventh = g(2, &[1, 1, 0, 0]);
        assert!(!seventh.is_associative());
    }

    #[test]
    fn order_one_is_supported() {
        let trivial = Groupoid::from_index(1, 0).unwrap();
        assert_eq!(Groupoid::table_count(1).unwrap(), 1);
        assert!(trivial.is_quasigroup());
        assert!(trivial.is_associative());
        assert_eq!(trivial.canonical_index(), 0);
    }

    #[test]
    fn table_text_round_trip() {
        let t = g(2, &[1, 0, 1, 0]);
        let text = t.to_table_text();
        assert_eq!(text, "order 2\n2 1\n2 1\n");
        assert_eq!(Groupoid::parse_table_text(&text).unwrap(), t);
        let with_comment = "# a comment\norder 2\n1 2\n2 1\n";
        assert_eq!(
            Groupoid::parse_table_text(with_comment).unwrap(),
            g(2, &[0, 1, 1, 0])
        );
        assert!(Groupoid::parse_table_text("order 2\n1 2\n").is_err());
        assert!(Groupoid::parse_table_text("order 2\n1 3\n1 1\n").is_err());
        assert!(Groupoid::parse_table_text("2\n1 1\n1 1\n").is_err());
    }

    #[test]
    fn partial_groupoid_cells() {
        let mut pg = PartialGroupoid::empty(2);
        assert!(!pg.is_complete());
        assert_eq!(pg.get(1, 1), None);
        pg.set(1, 1, 1);
        assert_eq!(pg.get(1, 1), Some(1));
        pg.clear(1, 1);
        assert_eq!(pg.get(1, 1), None);
        for x in 0..2 {
            for y in 0..2 {
                pg.set(x, y, 0);
            }
        }
        assert_eq!(pg.to_groupoid().unwrap(), g(2, &[0, 0, 0, 0]));
    }

    #[test]
    fn permutation_basics() {
        assert_eq!(Permutation::all(3).len(), 6);
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![2, 0]).is_err());
        let p = Permutation::new(vec![1, 2, 0]).unwrap();
        let q = p.inverse();
        assert_eq!(p.compose(&q), Permutation::identity(3));
        assert_eq!(q.compose(&p), Permutation::identity(3));
    }
}
