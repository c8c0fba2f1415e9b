//! Baum-Connes comparison for `BS(1,n)`: the K-homology of the presentation
//! complex against the crossed-product K-theory, generator by generator.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::abelian::{is_isomorphic, FgAbGroup, Order};
use crate::error::{Error, Result};
use crate::presentation::{bs_presentation, classifying_space_k, BASEPOINT};
use crate::pv::{bs_input, pv_solve, Home, KClassLedger, PvSolution, UNIT};

/// One line of the generator dictionary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMatch {
    pub lhs: String,
    pub rhs: String,
    pub order_lhs: Order,
    pub order_rhs: Order,
    pub matched: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BcReport {
    pub n: i64,
    pub lhs_k0: FgAbGroup,
    pub lhs_k1: FgAbGroup,
    pub rhs_k0: FgAbGroup,
    pub rhs_k1: FgAbGroup,
    pub generator_matches: Vec<GeneratorMatch>,
    pub verdict: bool,
    pub trace_image: TraceImage,
    /// Statements taken as given rather than computed.
    pub assumptions: Vec<String>,
}

/// Dictionary `(K-homology symbol, K-theory symbol)`.
const DICTIONARY: [(&str, &str); 3] = [(BASEPOINT, UNIT), ("a", "[a]"), ("b", "[b]")];

const ASSUMPTIONS: [&str; 4] = [
    "the presentation complex is a 2-dimensional model for BG, the relator not being a proper power",
    "the assembly map sends the base point class [pt] in K_0(BG) to [1]",
    "on K_1 the assembly map restricts on G^ab = H_1(BG) to g ↦ [g]",
    "∂1([u]) = -[1] in the Pimsner-Voiculescu sequence",
];

fn located_order(g: &FgAbGroup, ledger: &KClassLedger, sym: &str, home: Home) -> Result<(Order, Vec<BigInt>)> {
    let e = ledger
        .get(sym)
        .filter(|e| e.home == home)
        .ok_or_else(|| Error::Inconsistency(format!("{sym} is missing from the {home} ledger")))?;
    let c = e
        .coords
        .clone()
        .ok_or_else(|| Error::Inconsistency(format!("{sym} has no located class")))?;
    Ok((g.element_order(&c)?, c))
}

/// True iff `g` is cyclic and generated by `x`.
fn generates_cyclic(g: &FgAbGroup, x: &[BigInt]) -> bool {
    match (g.free_rank(), g.torsion()) {
        (0, []) => true,
        (1, []) => x[0].abs().is_one(),
        (0, [d]) => x[0].gcd(d).is_one(),
        _ => false,
    }
}

/// Renames basis generators of `g` that coincide with a named class.
fn label_generators(g: &FgAbGroup, ledger: &KClassLedger, home: Home) -> Result<FgAbGroup> {
    let mut names = g.gen_names().to_vec();
    for (_, sym) in DICTIONARY {
        let Some(c) = ledger.get(sym).filter(|e| e.home == home).and_then(|e| e.coords.as_ref()) else {
            continue;
        };
        let support: Vec<usize> = (0..c.len()).filter(|&j| !c[j].is_zero()).collect();
        if let [j] = support[..] {
            if c[j].is_one() && !names.iter().any(|x| x == sym) {
                names[j] = sym.to_string();
            }
        }
    }
    g.renamed(names)
}

pub fn bc_compare(n: i64) -> Result<BcReport> {
    if n == 0 || n == 1 {
        return Err(Error::Domain(format!("BS(1,n) requires n ∉ {{0, 1}}, got n = {n}")));
    }
    let top = classifying_space_k(&bs_presentation(n)?)?;
    let sol = pv_solve(&bs_input(n)?)?;

    let mut matches = Vec::new();
    for (i, (l, r)) in DICTIONARY.into_iter().enumerate() {
        let (lhome, lgroup, rhome, rgroup) = if i == 0 {
            (Home::K0, &top.k0, Home::Crossed0, &sol.k0_crossed)
        } else {
            (Home::K1, &top.k1, Home::Crossed1, &sol.k1_crossed)
        };
        let (order_lhs, lc) = located_order(lgroup, &top.ledger, l, lhome)?;
        let (order_rhs, rc) = located_order(rgroup, &sol.ledger_out, r, rhome)?;
        let mut matched = order_lhs == order_rhs;
        if i == 0 {
            matched &= generates_cyclic(lgroup, &lc) && generates_cyclic(rgroup, &rc);
        }
        matches.push(GeneratorMatch {
            lhs: l.to_string(),
            rhs: r.to_string(),
            order_lhs,
            order_rhs,
            matched,
        });
    }

    let verdict = is_isomorphic(&top.k0, &sol.k0_crossed)
        && is_isomorphic(&top.k1, &sol.k1_crossed)
        && matches.iter().all(|m| m.matched);
    Ok(BcReport {
        n,
        lhs_k0: top.k0,
        lhs_k1: top.k1,
        rhs_k0: label_generators(&sol.k0_crossed, &sol.ledger_out, Home::Crossed0)?,
        rhs_k1: label_generators(&sol.k1_crossed, &sol.ledger_out, Home::Crossed1)?,
        generator_matches: matches,
        verdict,
        trace_image: trace_image(&sol)?,
        assumptions: ASSUMPTIONS.iter().map(|s| s.to_string()).collect(),
    })
}

/// A finitely generated subgroup of `Q` inside the reals: `{0}` or `d·Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceImage {
    Zero,
    Multiples(BigRational),
}

impl fmt::Display for TraceImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceImage::Zero => f.write_str("{0}"),
            TraceImage::Multiples(d) if d.is_one() => f.write_str("Z"),
            TraceImage::Multiples(d) if d.is_integer() => write!(f, "{d}Z"),
            TraceImage::Multiples(d) => write!(f, "({d})Z"),
        }
    }
}

/// `τ_*(K_0(A⋊Z))` from the unital normalization `τ([1]) = 1`.
pub fn trace_image(solution: &PvSolution) -> Result<TraceImage> {
    let values = BTreeMap::from([(UNIT.to_string(), BigRational::one())]);
    trace_image_with(&solution.k0_crossed, &solution.ledger_out, &values)
}

/// Image of `K_0` under the trace whose values on ledger classes are given.
///
/// Torsion generators go to 0. Free generators must be pinned down by the
/// declared values; otherwise the trace is not determined and an error names
/// the first free generator left open.
pub fn trace_image_with(
    k0: &FgAbGroup,
    ledger: &KClassLedger,
    values: &BTreeMap<String, BigRational>,
) -> Result<TraceImage> {
    let r = k0.free_rank();
    // augmented rows [free coords | value]
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for (sym, v) in values {
        let e = ledger
            .get(sym)
            .filter(|e| e.home == Home::Crossed0)
            .ok_or_else(|| Error::UnspecifiedTraceValue(format!("{sym} is not a located K_0 class")))?;
        let c = e
            .coords
            .as_ref()
            .ok_or_else(|| Error::UnspecifiedTraceValue(format!("{sym} is not located")))?;
        let mut row: Vec<BigRational> = c[..r].iter().map(|x| BigRational::from_integer(x.clone())).collect();
        row.push(v.clone());
        rows.push(row);
    }

    // Gauss-Jordan over Q
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..r {
        let Some(p) = (next..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(next, p);
        let inv = rows[next][col].recip();
        for x in rows[next].iter_mut() {
            *x *= &inv;
        }
        let pivot = rows[next].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != next && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        next += 1;
    }
    if rows[next..].iter().any(|row| !row[r].is_zero()) {
        return Err(Error::Inconsistency(
            "declared trace values contradict each other or a torsion relation".into(),
        ));
    }
    if let Some(j) = (0..r).find(|j| !pivots.contains(j)) {
        return Err(Error::UnspecifiedTraceValue(k0.gen_names()[j].clone()));
    }

    let image: Vec<BigRational> = (0..r).map(|k| rows[k][r].clone()).collect();
    let num = image.iter().fold(BigInt::zero(), |g, q| g.gcd(q.numer()));
    if num.is_zero() {
        return Ok(TraceImage::Zero);
    }
    let den = image
        .iter()
        .filter(|q| !q.is_zero())
        .fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    Ok(TraceImage::Multiples(BigRational::new(num, den)))
}

impl BcReport {
    /// Plain-text table of both sides and the generator dictionary.
    pub fn render(&self) -> String {
        let mut out = format!("BS(1,{}) assembly comparison\n\n", self.n);
        let groups = vec![
            vec!["degree".into(), "K_*(BG)".into(), "K_*(C*G)".into(), "isomorphic".into()],
            vec![
                "0".into(),
                self.lhs_k0.to_string(),
                self.rhs_k0.to_string(),
                is_isomorphic(&self.lhs_k0, &self.rhs_k0).to_string(),
            ],
            vec![
                "1".into(),
                self.lhs_k1.to_string(),
                self.rhs_k1.to_string(),
                is_isomorphic(&self.lhs_k1, &self.rhs_k1).to_string(),
            ],
        ];
        out.push_str(&crate::cli::table(&groups));
        out.push('\n');
        let mut lines = vec![vec![
            "K_*(BG)".into(),
            "K_*(C*G)".into(),
            "order".into(),
            "order".into(),
            "matched".into(),
        ]];
        for m in &self.generator_matches {
            lines.push(vec![
                m.lhs.clone(),
                m.rhs.clone(),
                m.order_lhs.to_string(),
                m.order_rhs.to_string(),
                m.matched.to_string(),
            ]);
        }
        out.push_str(&crate::cli::table(&lines));
        out.push_str(&format!("\ntrace image: {}\n", self.trace_image));
        out.push_str(&format!("verdict: {}\n", if self.verdict { "isomorphism" } else { "MISMATCH" }));
        out.push_str("assumed:\n");
        for a in &self.assumptions {
            out.push_str(&format!("  - {a}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pv::{KInput, LedgerEntry, OrderNote};

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn line<'a>(r: &'a BcReport, sym: &str) -> &'a GeneratorMatch {
        r.generator_matches.iter().find(|m| m.lhs == sym).unwrap()
    }

    #[test]
    fn bs5() {
        let r = bc_compare(5).unwrap();
        assert!(r.verdict);
        assert_eq!(r.lhs_k1.to_string(), "Z<a> + Z/4<b>");
        assert_eq!(r.rhs_k1.to_string(), "Z<[a]> + Z/4<[b]>");
        assert_eq!(r.rhs_k0.to_string(), "Z<[1]>");
        assert!(is_isomorphic(&r.lhs_k1, &r.rhs_k1));
        assert_eq!(line(&r, "b").order_lhs, Order::Finite(b(4)));
        assert_eq!(line(&r, "b").order_rhs, Order::Finite(b(4)));
        assert_eq!(line(&r, "a").order_rhs, Order::Infinite);
        assert_eq!(r.trace_image.to_string(), "Z");
    }

    #[test]
    fn bs2_has_trivial_b() {
        let r = bc_compare(2).unwrap();
        assert!(r.verdict);
        assert_eq!(r.lhs_k1.to_string(), "Z<a>");
        assert!(r.rhs_k1.is_free() && r.rhs_k1.free_rank() == 1);
        assert_eq!(line(&r, "b").order_lhs, Order::Finite(b(1)));
        assert_eq!(line(&r, "b").order_rhs, Order::Finite(b(1)));
    }

    #[test]
    fn klein_bottle() {
        let r = bc_compare(-1).unwrap();
        assert!(r.verdict);
        assert_eq!(r.rhs_k1.torsion(), &[b(2)]);
        assert_eq!(r.lhs_k1.torsion(), &[b(2)]);
    }

    #[test]
    fn domain() {
        assert!(matches!(bc_compare(0), Err(Error::Domain(_))));
        assert!(matches!(bc_compare(1), Err(Error::Domain(_))));
    }

    #[test]
    fn trace_of_trivial_action() {
        let sol = pv_solve(&KInput::trivial_action()).unwrap();
        assert_eq!(trace_image(&sol).unwrap(), TraceImage::Multiples(BigRational::one()));
    }

    #[test]
    fn trace_needs_every_free_generator() {
        let k0 = FgAbGroup::free(&["[1]", "g"]);
        let mut ledger = KClassLedger::new();
        ledger.insert("[1]", Home::Crossed0, vec![b(1), b(0)]);
        let values = BTreeMap::from([("[1]".to_string(), BigRational::one())]);
        assert_eq!(
            trace_image_with(&k0, &ledger, &values),
            Err(Error::UnspecifiedTraceValue("g".into()))
        );

        ledger.insert("[p]", Home::Crossed0, vec![b(1), b(2)]);
        let mut values = values;
        values.insert("[p]".into(), BigRational::new(b(2), b(1)));
        // τ(g) = 1/2
        assert_eq!(
            trace_image_with(&k0, &ledger, &values).unwrap().to_string(),
            "(1/2)Z"
        );
    }

    #[test]
    fn trace_of_torsion_and_trivial_groups() {
        let ledger = KClassLedger::new();
        let none = BTreeMap::new();
        assert_eq!(
            trace_image_with(&FgAbGroup::trivial(), &ledger, &none).unwrap(),
            TraceImage::Zero
        );
        let z3 = FgAbGroup::cyclic(3, "t").unwrap();
        assert_eq!(trace_image_with(&z3, &ledger, &none).unwrap().to_string(), "{0}");

        let mut ledger = KClassLedger::new();
        ledger.insert_entry(
            "[1]",
            LedgerEntry {
                home: Home::Crossed0,
                coords: Some(vec![b(2)]),
                order: OrderNote::Undetermined,
                note: None,
            },
        );
        let values = BTreeMap::from([("[1]".to_string(), BigRational::one())]);
        let z = FgAbGroup::free(&["e"]);
        assert_eq!(trace_image_with(&z, &ledger, &values).unwrap().to_string(), "(1/2)Z");
    }

    #[test]
    fn render_is_stable() {
        let r = bc_compare(3).unwrap();
        assert_eq!(r.render(), bc_compare(3).unwrap().render());
        assert!(r.render().contains("verdict: isomorphism"));
    }
}
