//! Pimsner-Voiculescu six-term solver for crossed products `A ⋊ Z`.
//!
//! Given `K_0(A)`, `K_1(A)` as colimit systems and the automorphism `α_*`
//! on each, the cyclic sequence
//!
//! ```text
//! K0(A) --1-α*--> K0(A) --ι*--> K0(A⋊Z)
//!   ^                               |
//!   ∂1                              ∂0
//!   |                               v
//! K1(A⋊Z) <--ι*-- K1(A) <--1-α*-- K1(A)
//! ```
//!
//! breaks into `0 -> coker(1-α*) -> K_i(A⋊Z) -> ker(1-α*) -> 0`, the
//! cokernel taken in degree `i` and the kernel in degree `i+1`.
//!
//! The boundary map is not derived here. The solver takes as an axiom that
//! the implementing unitary `u` satisfies `∂1([u]) = -[1]`; that is what
//! [`boundary_rule`] installs in a ledger, and it is the only way the class
//! of `u` gets located in `K_1(A⋊Z)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::abelian::{FgAbGroup, GroupHom, IntMatrix, Order};
use crate::colimit::{ladder_cokernel_term, ladder_kernel_term, ColimModule, LadderMap, LadderTerm};
use crate::error::{Error, Result};

/// Symbol of the unit class in `K_0(A)`.
pub const UNIT: &str = "[1]";
/// Symbol of the implementing unitary's class in `K_1(A⋊Z)`.
pub const UNITARY: &str = "[u]";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Home {
    K0,
    K1,
    Crossed0,
    Crossed1,
}

impl fmt::Display for Home {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Home::K0 => "k0",
            Home::K1 => "k1",
            Home::Crossed0 => "crossed0",
            Home::Crossed1 => "crossed1",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderNote {
    Exact(Order),
    Undetermined,
}

impl fmt::Display for OrderNote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderNote::Exact(o) => write!(f, "{o}"),
            OrderNote::Undetermined => f.write_str("undetermined"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerEntry {
    pub home: Home,
    /// Coordinates in the housing group (stage coordinates for `k0`/`k1`);
    /// `None` when the class has not been located.
    pub coords: Option<Vec<BigInt>>,
    pub order: OrderNote,
    pub note: Option<String>,
}

/// `∂1(unitary) = sign · class`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryRelation {
    pub unitary: String,
    pub class: String,
    pub sign: i8,
}

/// Named K-theory classes and where they live.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KClassLedger {
    entries: BTreeMap<String, LedgerEntry>,
    unitaries: BTreeSet<String>,
    boundary: Option<BoundaryRelation>,
}

impl KClassLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a class with known coordinates; its order is unknown until the
    /// housing group is fixed.
    pub fn insert(&mut self, symbol: &str, home: Home, coords: Vec<BigInt>) {
        self.entries.insert(
            symbol.to_string(),
            LedgerEntry {
                home,
                coords: Some(coords),
                order: OrderNote::Undetermined,
                note: None,
            },
        );
    }

    pub(crate) fn insert_entry(&mut self, symbol: &str, entry: LedgerEntry) {
        self.entries.insert(symbol.to_string(), entry);
    }

    /// Declares `symbol` as a name for the implementing unitary of the
    /// crossed product.
    pub fn declare_unitary(&mut self, symbol: &str) {
        self.unitaries.insert(symbol.to_string());
    }

    pub fn unitaries(&self) -> impl Iterator<Item = &str> {
        self.unitaries.iter().map(String::as_str)
    }

    pub fn get(&self, symbol: &str) -> Option<&LedgerEntry> {
        self.entries.get(symbol)
    }

    pub fn order_of(&self, symbol: &str) -> Option<&OrderNote> {
        self.entries.get(symbol).map(|e| &e.order)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &LedgerEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn boundary(&self) -> Option<&BoundaryRelation> {
        self.boundary.as_ref()
    }

    pub fn remove_boundary_rule(&mut self) {
        self.boundary = None;
    }
}

/// Installs `∂1([u]) = -[1]`.
///
/// Afterwards the solver adjoins `[u]` to `K_1(A⋊Z)` as the section over the
/// copy of `Z·[1]` in `ker(1-α_0)`, so `[u]` has infinite order whenever
/// `[1]` does.
pub fn boundary_rule(ledger: &mut KClassLedger) -> Result<()> {
    match ledger.get(UNIT) {
        Some(e) if e.home == Home::K0 && e.coords.is_some() => {}
        _ => return Err(Error::InvalidInput(format!("{UNIT} must be located in k0"))),
    }
    ledger.declare_unitary(UNITARY);
    ledger.boundary = Some(BoundaryRelation {
        unitary: UNITARY.to_string(),
        class: UNIT.to_string(),
        sign: -1,
    });
    Ok(())
}

/// K-theory of `A` with the induced automorphism in each degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KInput {
    k0: ColimModule,
    k1: ColimModule,
    alpha0: GroupHom,
    alpha1: GroupHom,
    ledger: KClassLedger,
}

impl KInput {
    /// `alpha_i` acts on the stage of `k_i` and must commute with its bond.
    /// The ledger must locate `[1]` in `k0`, fixed by `alpha0`.
    pub fn new(
        k0: ColimModule,
        alpha0: GroupHom,
        k1: ColimModule,
        alpha1: GroupHom,
        ledger: KClassLedger,
    ) -> Result<Self> {
        LadderMap::new(k0.clone(), k0.clone(), alpha0.clone())?;
        LadderMap::new(k1.clone(), k1.clone(), alpha1.clone())?;
        let unit = ledger
            .get(UNIT)
            .filter(|e| e.home == Home::K0)
            .and_then(|e| e.coords.clone())
            .ok_or_else(|| Error::InvalidInput(format!("{UNIT} must be located in k0")))?;
        if alpha0.apply(&unit)? != k0.stage().reduce(&unit)? {
            return Err(Error::InvalidInput(format!("alpha0 must fix {UNIT}")));
        }
        if k0.stage().element_order(&unit)? != Order::Infinite {
            return Err(Error::InvalidInput(format!("{UNIT} must have infinite order")));
        }
        for (sym, e) in ledger.entries() {
            let g = match e.home {
                Home::K0 => k0.stage(),
                Home::K1 => k1.stage(),
                _ => return Err(Error::InvalidInput(format!("{sym}: input classes live in k0 or k1"))),
            };
            if let Some(c) = &e.coords {
                g.reduce(c)?;
            }
        }
        Ok(KInput {
            k0,
            k1,
            alpha0,
            alpha1,
            ledger,
        })
    }

    pub fn k0(&self) -> &ColimModule {
        &self.k0
    }

    pub fn k1(&self) -> &ColimModule {
        &self.k1
    }

    pub fn alpha0(&self) -> &GroupHom {
        &self.alpha0
    }

    pub fn alpha1(&self) -> &GroupHom {
        &self.alpha1
    }

    pub fn ledger(&self) -> &KClassLedger {
        &self.ledger
    }

    pub fn ledger_mut(&mut self) -> &mut KClassLedger {
        &mut self.ledger
    }

    /// `A = C` with the trivial action: the crossed product is `C*(Z)`.
    pub fn trivial_action() -> Self {
        let k0 = FgAbGroup::free(&[UNIT]);
        let k1 = FgAbGroup::trivial();
        let mut ledger = KClassLedger::new();
        ledger.insert(UNIT, Home::K0, vec![BigInt::one()]);
        boundary_rule(&mut ledger).expect("unit located");
        KInput::new(
            ColimModule::constant(&k0),
            GroupHom::identity(&k0),
            ColimModule::constant(&k1),
            GroupHom::identity(&k1),
            ledger,
        )
        .expect("trivial action input")
    }
}

/// Input for `C*(BS(1,n)) = C(X_n) ⋊ Z`: `K_0 = Z·[1]` with `α_* = 1`,
/// `K_1 = Z[1/n]` generated by the class `v` of `z -> z_0` with `α_* = ×n`.
/// `[b]` is the class of `v`, `[a]` the implementing unitary.
pub fn bs_input(n: i64) -> Result<KInput> {
    if n == 0 || n == 1 {
        return Err(Error::Domain(format!("BS(1,n) requires n ∉ {{0, 1}}, got n = {n}")));
    }
    let k0 = FgAbGroup::free(&[UNIT]);
    let k1 = ColimModule::localized(n, "v");
    let alpha1 = GroupHom::scalar(k1.stage(), n);
    let mut ledger = KClassLedger::new();
    ledger.insert(UNIT, Home::K0, vec![BigInt::one()]);
    ledger.insert("[b]", Home::K1, vec![BigInt::one()]);
    ledger.declare_unitary("[a]");
    boundary_rule(&mut ledger)?;
    KInput::new(
        ColimModule::constant(&k0),
        GroupHom::identity(&k0),
        k1,
        alpha1,
        ledger,
    )
}

/// `0 -> sub -> middle -> quotient -> 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortExact {
    pub sub: FgAbGroup,
    pub middle: FgAbGroup,
    pub quotient: FgAbGroup,
    pub split: bool,
    pub section: String,
    pub inclusion: GroupHom,
    pub projection: GroupHom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PvSolution {
    pub k0_crossed: FgAbGroup,
    pub k1_crossed: FgAbGroup,
    pub ledger_out: KClassLedger,
    pub seq0: ShortExact,
    pub seq1: ShortExact,
}

impl PvSolution {
    /// Rank/torsion bookkeeping of both sequences and the ledger orders.
    pub fn audit(&self) -> Result<()> {
        for (i, s) in [&self.seq0, &self.seq1].into_iter().enumerate() {
            let fail = |what: &str| Err(Error::Inconsistency(format!("degree {i}: {what}")));
            if !s.projection.compose(&s.inclusion)?.is_zero() {
                return fail("projection after inclusion is nonzero");
            }
            if s.split && s.middle.free_rank() != s.sub.free_rank() + s.quotient.free_rank() {
                return fail("free rank does not add up");
            }
            if s.sub.is_finite() && s.quotient.is_finite() && s.middle.is_finite() {
                let expect = s.sub.torsion_order() * s.quotient.torsion_order();
                if s.middle.torsion_order() != expect {
                    return fail("torsion order does not add up");
                }
            }
            if s.split && s.quotient.is_free() && s.middle.torsion_order() != s.sub.torsion_order() {
                return fail("torsion of a split extension by a free group must come from the sub");
            }
        }
        for (sym, e) in self.ledger_out.entries() {
            let g = match e.home {
                Home::Crossed0 => &self.k0_crossed,
                Home::Crossed1 => &self.k1_crossed,
                _ => continue,
            };
            if let (Some(c), OrderNote::Exact(o)) = (&e.coords, &e.order) {
                if &g.element_order(c)? != o {
                    return Err(Error::Inconsistency(format!("order annotation of {sym}")));
                }
            }
        }
        Ok(())
    }

    pub fn crossed(&self, degree: u8) -> &FgAbGroup {
        if degree == 0 {
            &self.k0_crossed
        } else {
            &self.k1_crossed
        }
    }
}

struct Terms {
    coker: FgAbGroup,
    /// Stage of `k_i` to the cokernel.
    coker_map: GroupHom,
    kernel: FgAbGroup,
    /// Stage kernel, its inclusion into the stage, and its map to the
    /// normalized kernel.
    kernel_term: LadderTerm,
}

fn terms(k: &ColimModule, alpha: &GroupHom, degree: u8) -> Result<Terms> {
    let rung = GroupHom::identity(k.stage()).sub(alpha)?;
    let ladder = LadderMap::new(k.clone(), k.clone(), rung)?;
    let c = ladder_cokernel_term(&ladder)?;
    let n = ladder_kernel_term(&ladder)?;
    let not_fg = |what: &str| Error::NotFinitelyGenerated(format!("{what}(1-α*) in degree {degree}"));
    let coker = c.normalized.object.as_fg().ok_or_else(|| not_fg("coker"))?.clone();
    let kernel = n.normalized.object.as_fg().ok_or_else(|| not_fg("ker"))?.clone();
    let coker_map = c.normalized.from_stage.clone().ok_or_else(|| not_fg("coker"))?;
    Ok(Terms {
        coker,
        coker_map,
        kernel,
        kernel_term: n,
    })
}

/// Resolves `0 -> sub -> ? -> quotient -> 0` when the quotient is free or
/// either end is trivial. `section_names[j]` names the section generator over
/// quotient generator `j`; `flip[j]` makes that generator map to `-e_j`.
fn extension(
    degree: u8,
    sub: &FgAbGroup,
    quotient: &FgAbGroup,
    section_names: Vec<String>,
    flip: &[bool],
    section: String,
) -> Result<ShortExact> {
    if quotient.is_trivial() {
        return Ok(ShortExact {
            sub: sub.clone(),
            middle: sub.clone(),
            quotient: quotient.clone(),
            split: true,
            section: "none (quotient is trivial)".into(),
            inclusion: GroupHom::identity(sub),
            projection: GroupHom::zero(sub, quotient),
        });
    }
    if !quotient.is_free() && !sub.is_trivial() {
        return Err(Error::UnresolvedExtension {
            degree,
            sub: sub.clone(),
            quotient: quotient.clone(),
        });
    }
    // Either the quotient is free, or the sub is trivial; in both cases the
    // middle is sub + quotient with sub's free part, then the section, then
    // sub's torsion (at most one of the two carries torsion).
    let (sf, q) = (sub.free_rank(), quotient.ngens());
    let mut names: Vec<String> = sub.gen_names()[..sf].to_vec();
    names.extend(section_names);
    names.extend(sub.gen_names()[sf..].iter().cloned());
    let mut torsion = quotient.torsion().to_vec();
    torsion.extend(sub.torsion().iter().cloned());
    let middle = FgAbGroup::new(sf + quotient.free_rank(), torsion, names)?;

    let mut incl = IntMatrix::zeros(middle.ngens(), sub.ngens());
    for k in 0..sub.ngens() {
        let row = if k < sf { k } else { k + q };
        incl[(row, k)] = BigInt::one();
    }
    let mut proj = IntMatrix::zeros(q, middle.ngens());
    for j in 0..q {
        proj[(j, sf + j)] = if flip[j] { -BigInt::one() } else { BigInt::one() };
    }
    Ok(ShortExact {
        sub: sub.clone(),
        middle: middle.clone(),
        quotient: quotient.clone(),
        split: true,
        section,
        inclusion: GroupHom::new(sub.clone(), middle.clone(), incl)?,
        projection: GroupHom::new(middle, quotient.clone(), proj)?,
    })
}

fn default_section_names(q: &FgAbGroup) -> Vec<String> {
    q.gen_names().iter().map(|g| format!("σ({g})")).collect()
}

/// Solves the six-term sequence for `A ⋊ Z`.
pub fn pv_solve(input: &KInput) -> Result<PvSolution> {
    let t0 = terms(&input.k0, &input.alpha0, 0)?;
    let t1 = terms(&input.k1, &input.alpha1, 1)?;

    // Degree 0: 0 -> C0 -> K0(A⋊Z) -> N1 -> 0, sectioned generically.
    let seq0 = extension(
        0,
        &t0.coker,
        &t1.kernel,
        default_section_names(&t1.kernel),
        &vec![false; t1.kernel.ngens()],
        "σ: free generators of ker(1-α*) on K1(A) lifted to K0(A⋊Z)".into(),
    )?;

    // Degree 1: 0 -> C1 -> K1(A⋊Z) -> N0 -> 0, the unitary sectioning [1].
    let unit = input
        .ledger
        .get(UNIT)
        .and_then(|e| e.coords.clone())
        .expect("validated at construction");
    let unit_in_n0 = locate_in_kernel(&t0.kernel_term, &unit)?;
    let mut names = default_section_names(&t0.kernel);
    let mut flip = vec![false; t0.kernel.ngens()];
    let mut section = "σ: free generators of ker(1-α*) on K0(A) lifted to K1(A⋊Z)".to_string();
    let rule = input.ledger.boundary().cloned();
    if rule.is_some() {
        let u = unit_in_n0
            .as_ref()
            .ok_or_else(|| Error::Inconsistency(format!("{UNIT} is not fixed by alpha0")))?;
        let support: Vec<usize> = (0..u.len()).filter(|&j| !u[j].is_zero()).collect();
        if let [j] = support[..] {
            if u[j].abs().is_one() {
                names[j] = UNITARY.to_string();
                // ∂1([u]) = -[1]: the generator [u] projects to -[1].
                flip[j] = u[j].is_positive();
                section = format!("{UNITARY} over -{UNIT} (boundary rule ∂1({UNITARY}) = -{UNIT})");
            }
        }
    }
    let seq1 = extension(1, &t1.coker, &t0.kernel, names, &flip, section)?;

    let mut ledger_out = KClassLedger::new();
    for (sym, e) in input.ledger.entries() {
        let (home, map, seq) = match e.home {
            Home::K0 => (Home::Crossed0, &t0.coker_map, &seq0),
            Home::K1 => (Home::Crossed1, &t1.coker_map, &seq1),
            _ => continue,
        };
        let coords = e.coords.as_ref().expect("input classes are located");
        let image = seq.inclusion.apply(&map.apply(coords)?)?;
        let order = seq.middle.element_order(&image)?;
        let note = seq
            .middle
            .is_zero_elem(&image)?
            .then(|| "killed by ι*: lies in the image of 1-α*".to_string());
        ledger_out.insert_entry(
            sym,
            LedgerEntry {
                home,
                coords: Some(image),
                order: OrderNote::Exact(order),
                note,
            },
        );
    }

    let unitary_entry = match (&rule, &unit_in_n0) {
        (Some(r), Some(u)) => {
            // [u] = σ(-[1]) with σ(e_j) = ±(section generator j).
            let sf = seq1.sub.free_rank();
            let mut coords = vec![BigInt::zero(); seq1.middle.ngens()];
            for (j, c) in u.iter().enumerate() {
                let s = if flip[j] { -BigInt::one() } else { BigInt::one() };
                coords[sf + j] = c * s * BigInt::from(r.sign);
            }
            let order = seq1.middle.element_order(&coords)?;
            LedgerEntry {
                home: Home::Crossed1,
                coords: Some(coords),
                order: OrderNote::Exact(order),
                note: Some(format!("∂1({}) = -{}", r.unitary, r.class)),
            }
        }
        _ => LedgerEntry {
            home: Home::Crossed1,
            coords: None,
            order: OrderNote::Undetermined,
            note: Some("no boundary rule: the unitary's class is not located".into()),
        },
    };
    let mut unitaries: BTreeSet<&str> = input.ledger.unitaries().collect();
    if rule.is_some() {
        unitaries.insert(UNITARY);
    }
    for sym in unitaries {
        ledger_out.insert_entry(sym, unitary_entry.clone());
        ledger_out.declare_unitary(sym);
    }
    ledger_out.boundary = rule;

    let solution = PvSolution {
        k0_crossed: seq0.middle.clone(),
        k1_crossed: seq1.middle.clone(),
        ledger_out,
        seq0,
        seq1,
    };
    solution.audit()?;
    Ok(solution)
}

/// Coordinates of a stage element in the normalized kernel, if it lies in
/// the stage kernel.
fn locate_in_kernel(term: &LadderTerm, x: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    let Some(y) = term.stage_map.preimage(x)? else {
        return Ok(None);
    };
    match &term.normalized.from_stage {
        Some(f) => Ok(Some(f.apply(&y)?)),
        None => Ok(None),
    }
}
