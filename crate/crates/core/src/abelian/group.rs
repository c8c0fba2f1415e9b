use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Order of a group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    Finite(BigInt),
    Infinite,
}

impl Order {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Order::Infinite)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

/// A finitely generated abelian group `Z^r + Z/d1 + ... + Z/dk` in invariant
/// factor form, `d1 | d2 | ... | dk`, each `di >= 2`.
///
/// Generators are ordered free summands first, then the torsion summands in
/// chain order. Elements are integer coefficient vectors over that basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FgAbGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
    gen_names: Vec<String>,
}

impl FgAbGroup {
    pub fn new(free_rank: usize, torsion: Vec<BigInt>, gen_names: Vec<String>) -> Result<Self> {
        for d in &torsion {
            if *d < BigInt::from(2) {
                return Err(Error::InvalidTorsion(format!("coefficient {d} is below 2")));
            }
        }
        for w in torsion.windows(2) {
            if !w[1].is_multiple_of(&w[0]) {
                return Err(Error::InvalidTorsion(format!("{} does not divide {}", w[0], w[1])));
            }
        }
        if gen_names.len() != free_rank + torsion.len() {
            return Err(Error::InvalidNames(format!(
                "{} names for {} generators",
                gen_names.len(),
                free_rank + torsion.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for name in &gen_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidNames(format!("duplicate name `{name}`")));
            }
        }
        Ok(FgAbGroup {
            free_rank,
            torsion,
            gen_names,
        })
    }

    /// Group with generated names `{prefix}0, {prefix}1, ...`.
    pub fn with_prefix(free_rank: usize, torsion: Vec<BigInt>, prefix: &str) -> Result<Self> {
        let names = (0..free_rank + torsion.len()).map(|i| format!("{prefix}{i}")).collect();
        Self::new(free_rank, torsion, names)
    }

    pub fn trivial() -> Self {
        FgAbGroup {
            free_rank: 0,
            torsion: Vec::new(),
            gen_names: Vec::new(),
        }
    }

    /// `Z^r` on the given names.
    pub fn free(names: &[&str]) -> Self {
        Self::new(names.len(), Vec::new(), names.iter().map(|s| s.to_string()).collect())
            .expect("free group names")
    }

    /// `Z/d` on one named generator.
    pub fn cyclic(d: impl Into<BigInt>, name: &str) -> Result<Self> {
        Self::new(0, vec![d.into()], vec![name.to_string()])
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn gen_names(&self) -> &[String] {
        &self.gen_names
    }

    pub fn ngens(&self) -> usize {
        self.gen_names.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.gen_names.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    /// Order of generator `i`; free generators have infinite order.
    pub fn gen_order(&self, i: usize) -> Order {
        if i < self.free_rank {
            Order::Infinite
        } else {
            Order::Finite(self.torsion[i - self.free_rank].clone())
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gen_names.iter().position(|g| g == name)
    }

    pub fn renamed(&self, names: Vec<String>) -> Result<Self> {
        Self::new(self.free_rank, self.torsion.clone(), names)
    }

    fn check_len(&self, elem: &[BigInt]) -> Result<()> {
        if elem.len() != self.ngens() {
            return Err(Error::DimensionMismatch(format!(
                "element of length {} in a group with {} generators",
                elem.len(),
                self.ngens()
            )));
        }
        Ok(())
    }

    /// Canonical representative: torsion coordinates reduced into `[0, d)`.
    pub fn reduce(&self, elem: &[BigInt]) -> Result<Vec<BigInt>> {
        self.check_len(elem)?;
        Ok(elem
            .iter()
            .enumerate()
            .map(|(i, x)| {
                if i < self.free_rank {
                    x.clone()
                } else {
                    x.mod_floor(&self.torsion[i - self.free_rank])
                }
            })
            .collect())
    }

    pub fn is_zero_elem(&self, elem: &[BigInt]) -> Result<bool> {
        Ok(self.reduce(elem)?.iter().all(Zero::is_zero))
    }

    /// Least `k >= 1` with `k * elem = 0`, or infinite.
    pub fn element_order(&self, elem: &[BigInt]) -> Result<Order> {
        self.check_len(elem)?;
        if elem[..self.free_rank].iter().any(|x| !x.is_zero()) {
            return Ok(Order::Infinite);
        }
        let k = elem[self.free_rank..]
            .iter()
            .zip(&self.torsion)
            .fold(BigInt::one(), |acc, (c, d)| acc.lcm(&(d / c.gcd(d))));
        Ok(Order::Finite(k))
    }

    /// Relation lattice columns: `d_i * e_{r+i}` for each torsion summand.
    pub fn relation_matrix(&self) -> super::IntMatrix {
        let mut r = super::IntMatrix::zeros(self.ngens(), self.torsion.len());
        for (j, d) in self.torsion.iter().enumerate() {
            r[(self.free_rank + j, j)] = d.clone();
        }
        r
    }

    /// Renders an element as a combination of generator names.
    pub fn describe(&self, elem: &[BigInt]) -> String {
        combination(elem, &self.gen_names)
    }
}

/// `Z^r + Z/d1 + ...` without generator names.
pub fn normal_form_string(free_rank: usize, torsion: &[BigInt]) -> String {
    let mut parts = Vec::new();
    match free_rank {
        0 => {}
        1 => parts.push("Z".to_string()),
        r => parts.push(format!("Z^{r}")),
    }
    parts.extend(torsion.iter().map(|d| format!("Z/{d}")));
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

impl fmt::Display for FgAbGroup {
    /// ASCII normal form with generators, e.g. `Z[a] + Z/4[b]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .gen_names
            .iter()
            .enumerate()
            .map(|(i, g)| match self.gen_order(i) {
                Order::Infinite => format!("Z<{g}>"),
                Order::Finite(d) => format!("Z/{d}<{g}>"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Two groups are isomorphic iff free rank and invariant factors agree.
pub fn is_isomorphic(g1: &FgAbGroup, g2: &FgAbGroup) -> bool {
    g1.free_rank == g2.free_rank && g1.torsion == g2.torsion
}

pub fn element_order(g: &FgAbGroup, elem: &[BigInt]) -> Result<Order> {
    g.element_order(elem)
}

/// `2·a + b`, `-c`, `0`; names are kept verbatim.
pub(crate) fn combination(coeffs: &[BigInt], names: &[String]) -> String {
    let mut out = String::new();
    for (c, name) in coeffs.iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        let a = c.abs();
        if !a.is_one() {
            out.push_str(&format!("{a}·"));
        }
        out.push_str(name);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn bv(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| b(x)).collect()
    }

    fn z_plus_z4() -> FgAbGroup {
        FgAbGroup::new(1, vec![b(4)], vec!["a".into(), "b".into()]).unwrap()
    }

    #[test]
    fn orders() {
        let g = z_plus_z4();
        assert_eq!(g.element_order(&bv(&[0, 1])).unwrap(), Order::Finite(b(4)));
        assert_eq!(g.element_order(&bv(&[1, 0])).unwrap(), Order::Infinite);
        assert_eq!(g.element_order(&bv(&[0, 0])).unwrap(), Order::Finite(b(1)));
        assert_eq!(g.element_order(&bv(&[0, 6])).unwrap(), Order::Finite(b(2)));
        assert!(g.element_order(&bv(&[1])).is_err());
        assert_eq!(FgAbGroup::trivial().element_order(&[]).unwrap(), Order::Finite(b(1)));
    }

    #[test]
    fn validation() {
        assert!(FgAbGroup::new(0, bv(&[2, 3]), vec!["x".into(), "y".into()]).is_err());
        assert!(FgAbGroup::new(0, bv(&[1]), vec!["x".into()]).is_err());
        assert!(FgAbGroup::new(2, vec![], vec!["x".into(), "x".into()]).is_err());
        assert!(FgAbGroup::new(2, vec![], vec!["x".into()]).is_err());
        assert!(FgAbGroup::new(0, bv(&[2, 4, 12]), vec!["x".into(), "y".into(), "z".into()]).is_ok());
    }

    #[test]
    fn isomorphism_classes() {
        let z = FgAbGroup::free(&["x"]);
        assert!(is_isomorphic(&z, &FgAbGroup::free(&["y"])));
        // normal form is order-insensitive: Z + Z/2 and Z/2 + Z land on the same data
        let a = FgAbGroup::new(1, bv(&[2]), vec!["p".into(), "q".into()]).unwrap();
        let c = FgAbGroup::new(1, bv(&[2]), vec!["q".into(), "p".into()]).unwrap();
        assert!(is_isomorphic(&a, &c));
        let z4 = FgAbGroup::cyclic(4, "x").unwrap();
        let z2z2 = FgAbGroup::new(0, bv(&[2, 2]), vec!["x".into(), "y".into()]).unwrap();
        assert!(!is_isomorphic(&z4, &z2z2));
    }

    #[test]
    fn display_forms() {
        assert_eq!(z_plus_z4().to_string(), "Z<a> + Z/4<b>");
        assert_eq!(FgAbGroup::trivial().to_string(), "0");
        assert_eq!(normal_form_string(2, &bv(&[3])), "Z^2 + Z/3");
        assert_eq!(combination(&bv(&[2, -1, 0]), &["a".into(), "b".into(), "c".into()]), "2·a - b");
    }
}
