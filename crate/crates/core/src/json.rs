//! JSON forms of the public types. Integers that fit in an `i64` are written
//! as numbers, larger ones as decimal strings; both are accepted on input.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::abelian::{FgAbGroup, GroupHom, IntMatrix, SnfDecomposition};
use crate::bc::BcReport;
use crate::colimit::{AbObject, ColimModule};
use crate::error::{Error, Result};
use crate::presentation::{ClassifyingSpaceK, ComplexHomology};
use crate::pv::{boundary_rule, Home, KClassLedger, KInput, PvSolution, ShortExact};
use crate::solenoid::{PairingTally, RationalAngle, SolenoidPoint};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match i64::try_from(&self.0) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(JsonInt(v.into())),
            Raw::Str(s) => s
                .trim()
                .parse()
                .map(JsonInt)
                .map_err(|_| serde::de::Error::custom(format!("`{s}` is not an integer"))),
        }
    }
}

fn ints(v: &[BigInt]) -> Vec<JsonInt> {
    v.iter().cloned().map(JsonInt).collect()
}

fn bigs(v: &[JsonInt]) -> Vec<BigInt> {
    v.iter().map(|x| x.0.clone()).collect()
}

pub type MatrixJson = Vec<Vec<JsonInt>>;

pub fn matrix_to_json(m: &IntMatrix) -> MatrixJson {
    m.to_rows().iter().map(|r| ints(r)).collect()
}

/// Rows of a `rows x cols` matrix; `cols` fixes the shape of an empty row list.
pub fn matrix_from_json(rows: &MatrixJson, cols: usize) -> Result<IntMatrix> {
    let data: Vec<Vec<BigInt>> = rows.iter().map(|r| bigs(r)).collect();
    IntMatrix::from_rows(&data, cols)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub free_rank: usize,
    #[serde(default)]
    pub torsion: Vec<JsonInt>,
    pub gens: Vec<String>,
}

impl From<&FgAbGroup> for GroupJson {
    fn from(g: &FgAbGroup) -> Self {
        GroupJson {
            free_rank: g.free_rank(),
            torsion: ints(g.torsion()),
            gens: g.gen_names().to_vec(),
        }
    }
}

impl TryFrom<&GroupJson> for FgAbGroup {
    type Error = Error;

    fn try_from(g: &GroupJson) -> Result<Self> {
        FgAbGroup::new(g.free_rank, bigs(&g.torsion), g.gens.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomJson {
    pub source: GroupJson,
    pub target: GroupJson,
    pub matrix: MatrixJson,
}

impl From<&GroupHom> for HomJson {
    fn from(h: &GroupHom) -> Self {
        HomJson {
            source: h.source().into(),
            target: h.target().into(),
            matrix: matrix_to_json(h.matrix()),
        }
    }
}

impl TryFrom<&HomJson> for GroupHom {
    type Error = Error;

    fn try_from(h: &HomJson) -> Result<Self> {
        let source = FgAbGroup::try_from(&h.source)?;
        let target = FgAbGroup::try_from(&h.target)?;
        let m = matrix_from_json(&h.matrix, source.ngens())?;
        GroupHom::new(source, target, m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColimJson {
    pub stage: GroupJson,
    pub bond: MatrixJson,
}

impl From<&ColimModule> for ColimJson {
    fn from(c: &ColimModule) -> Self {
        ColimJson {
            stage: c.stage().into(),
            bond: matrix_to_json(c.bond().matrix()),
        }
    }
}

impl TryFrom<&ColimJson> for ColimModule {
    type Error = Error;

    fn try_from(c: &ColimJson) -> Result<Self> {
        let stage = FgAbGroup::try_from(&c.stage)?;
        let m = matrix_from_json(&c.bond, stage.ngens())?;
        let bond = GroupHom::new(stage.clone(), stage.clone(), m)?;
        ColimModule::new(stage, bond)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizedJson {
    pub n: JsonInt,
    pub symbol: String,
}

/// A normalized colimit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NormalizedJson {
    Fg {
        group: GroupJson,
        normal_form: String,
    },
    Loc {
        inverted: Vec<LocalizedJson>,
        torsion: GroupJson,
        normal_form: String,
    },
}

impl From<&AbObject> for NormalizedJson {
    fn from(o: &AbObject) -> Self {
        match o {
            AbObject::Fg(g) => NormalizedJson::Fg {
                group: g.into(),
                normal_form: o.normal_form(),
            },
            AbObject::Loc { summands, torsion } => NormalizedJson::Loc {
                inverted: summands
                    .iter()
                    .map(|s| LocalizedJson {
                        n: JsonInt(s.inverted().clone()),
                        symbol: s.symbol().to_string(),
                    })
                    .collect(),
                torsion: torsion.into(),
                normal_form: o.normal_form(),
            },
        }
    }
}

/// `k0`/`k1` of a [`KInput`]: a plain group, or a colimit system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModuleJson {
    Colim(ColimJson),
    Group(GroupJson),
}

impl TryFrom<&ModuleJson> for ColimModule {
    type Error = Error;

    fn try_from(m: &ModuleJson) -> Result<Self> {
        match m {
            ModuleJson::Colim(c) => ColimModule::try_from(c),
            ModuleJson::Group(g) => Ok(ColimModule::constant(&FgAbGroup::try_from(g)?)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassJson {
    pub home: Home,
    pub coords: Vec<JsonInt>,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KInputJson {
    pub k0: ModuleJson,
    pub k1: ModuleJson,
    /// Stage matrices of the automorphism in each degree.
    pub alpha0: MatrixJson,
    pub alpha1: MatrixJson,
    #[serde(default)]
    pub ledger: BTreeMap<String, ClassJson>,
    /// Symbols naming the implementing unitary.
    #[serde(default)]
    pub unitaries: Vec<String>,
    #[serde(default = "default_true")]
    pub boundary_rule: bool,
}

impl From<&KInput> for KInputJson {
    fn from(k: &KInput) -> Self {
        let module = |c: &ColimModule| {
            if c.bond().same_map(&GroupHom::identity(c.stage())) {
                ModuleJson::Group(c.stage().into())
            } else {
                ModuleJson::Colim(c.into())
            }
        };
        KInputJson {
            k0: module(k.k0()),
            k1: module(k.k1()),
            alpha0: matrix_to_json(k.alpha0().matrix()),
            alpha1: matrix_to_json(k.alpha1().matrix()),
            ledger: k
                .ledger()
                .entries()
                .filter_map(|(s, e)| {
                    e.coords.as_ref().map(|c| {
                        (
                            s.to_string(),
                            ClassJson {
                                home: e.home,
                                coords: ints(c),
                            },
                        )
                    })
                })
                .collect(),
            unitaries: k.ledger().unitaries().map(str::to_string).collect(),
            boundary_rule: k.ledger().boundary().is_some(),
        }
    }
}

impl TryFrom<&KInputJson> for KInput {
    type Error = Error;

    fn try_from(j: &KInputJson) -> Result<Self> {
        let k0 = ColimModule::try_from(&j.k0)?;
        let k1 = ColimModule::try_from(&j.k1)?;
        let endo = |c: &ColimModule, m: &MatrixJson| {
            let g = c.stage().clone();
            GroupHom::new(g.clone(), g.clone(), matrix_from_json(m, g.ngens())?)
        };
        let alpha0 = endo(&k0, &j.alpha0)?;
        let alpha1 = endo(&k1, &j.alpha1)?;
        let mut ledger = KClassLedger::new();
        for (sym, c) in &j.ledger {
            ledger.insert(sym, c.home, bigs(&c.coords));
        }
        for u in &j.unitaries {
            ledger.declare_unitary(u);
        }
        if j.boundary_rule {
            boundary_rule(&mut ledger)?;
        }
        KInput::new(k0, alpha0, k1, alpha1, ledger)
    }
}

pub fn parse_kinput(text: &str) -> Result<KInput> {
    let j: KInputJson = serde_json::from_str(text)?;
    KInput::try_from(&j)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LedgerEntryJson {
    pub home: Home,
    pub coords: Option<Vec<JsonInt>>,
    pub order: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn ledger_to_json(l: &KClassLedger) -> BTreeMap<String, LedgerEntryJson> {
    l.entries()
        .map(|(s, e)| {
            (
                s.to_string(),
                LedgerEntryJson {
                    home: e.home,
                    coords: e.coords.as_deref().map(ints),
                    order: e.order.to_string(),
                    note: e.note.clone(),
                },
            )
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SequenceJson {
    pub degree: u8,
    pub sub: GroupJson,
    pub middle: GroupJson,
    pub quotient: GroupJson,
    pub split: bool,
    pub section: String,
}

fn sequence(degree: u8, s: &ShortExact) -> SequenceJson {
    SequenceJson {
        degree,
        sub: (&s.sub).into(),
        middle: (&s.middle).into(),
        quotient: (&s.quotient).into(),
        split: s.split,
        section: s.section.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryJson {
    pub unitary: String,
    pub class: String,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PvSolutionJson {
    pub k0: GroupJson,
    pub k1: GroupJson,
    pub normal_form: BTreeMap<String, String>,
    pub ledger: BTreeMap<String, LedgerEntryJson>,
    pub sequences: Vec<SequenceJson>,
    pub boundary: Option<BoundaryJson>,
}

impl From<&PvSolution> for PvSolutionJson {
    fn from(s: &PvSolution) -> Self {
        let nf = |g: &FgAbGroup| crate::abelian::normal_form_string(g.free_rank(), g.torsion());
        PvSolutionJson {
            k0: (&s.k0_crossed).into(),
            k1: (&s.k1_crossed).into(),
            normal_form: BTreeMap::from([
                ("k0".to_string(), nf(&s.k0_crossed)),
                ("k1".to_string(), nf(&s.k1_crossed)),
            ]),
            ledger: ledger_to_json(&s.ledger_out),
            sequences: vec![sequence(0, &s.seq0), sequence(1, &s.seq1)],
            boundary: s.ledger_out.boundary().map(|b| BoundaryJson {
                unitary: b.unitary.clone(),
                class: b.class.clone(),
                sign: b.sign,
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SidesJson {
    pub k0: GroupJson,
    pub k1: GroupJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchJson {
    pub lhs: String,
    pub rhs: String,
    pub order_lhs: String,
    pub order_rhs: String,
    pub matched: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BcReportJson {
    pub n: i64,
    pub lhs: SidesJson,
    pub rhs: SidesJson,
    pub matches: Vec<MatchJson>,
    pub verdict: bool,
    pub trace_image: String,
    pub assumptions: Vec<String>,
}

impl From<&BcReport> for BcReportJson {
    fn from(r: &BcReport) -> Self {
        BcReportJson {
            n: r.n,
            lhs: SidesJson {
                k0: (&r.lhs_k0).into(),
                k1: (&r.lhs_k1).into(),
            },
            rhs: SidesJson {
                k0: (&r.rhs_k0).into(),
                k1: (&r.rhs_k1).into(),
            },
            matches: r
                .generator_matches
                .iter()
                .map(|m| MatchJson {
                    lhs: m.lhs.clone(),
                    rhs: m.rhs.clone(),
                    order_lhs: m.order_lhs.to_string(),
                    order_rhs: m.order_rhs.to_string(),
                    matched: m.matched,
                })
                .collect(),
            verdict: r.verdict,
            trace_image: r.trace_image.to_string(),
            assumptions: r.assumptions.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyJson {
    pub h0: GroupJson,
    pub h1: GroupJson,
    pub h2: GroupJson,
}

impl From<&ComplexHomology> for HomologyJson {
    fn from(h: &ComplexHomology) -> Self {
        HomologyJson {
            h0: (&h.h0).into(),
            h1: (&h.h1).into(),
            h2: (&h.h2).into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KHomologyJson {
    pub k0: GroupJson,
    pub k1: GroupJson,
    pub ledger: BTreeMap<String, LedgerEntryJson>,
}

impl From<&ClassifyingSpaceK> for KHomologyJson {
    fn from(k: &ClassifyingSpaceK) -> Self {
        KHomologyJson {
            k0: (&k.k0).into(),
            k1: (&k.k1).into(),
            ledger: ledger_to_json(&k.ledger),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SnfJson {
    pub input: MatrixJson,
    pub diag: Vec<JsonInt>,
    pub rank: usize,
    pub s: MatrixJson,
    pub u: MatrixJson,
    pub v: MatrixJson,
}

impl SnfJson {
    pub fn new(a: &IntMatrix, d: &SnfDecomposition) -> Self {
        SnfJson {
            input: matrix_to_json(a),
            diag: ints(&d.diag),
            rank: d.rank(),
            s: matrix_to_json(&d.s),
            u: matrix_to_json(&d.u),
            v: matrix_to_json(&d.v),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointJson {
    pub n: i64,
    /// `[p, q]` pairs as decimal strings.
    pub coords: Vec<[String; 2]>,
}

impl From<&SolenoidPoint> for PointJson {
    fn from(z: &SolenoidPoint) -> Self {
        PointJson {
            n: z.n(),
            coords: z
                .coords()
                .iter()
                .map(|a| [a.numer().to_string(), a.denom().to_string()])
                .collect(),
        }
    }
}

impl TryFrom<&PointJson> for SolenoidPoint {
    type Error = Error;

    fn try_from(p: &PointJson) -> Result<Self> {
        let coords = p
            .coords
            .iter()
            .map(|[a, b]| {
                let parse = |s: &str| {
                    s.trim()
                        .parse::<BigInt>()
                        .map_err(|_| Error::InvalidInput(format!("`{s}` is not an integer")))
                };
                RationalAngle::new(parse(a)?, parse(b)?)
            })
            .collect::<Result<Vec<_>>>()?;
        SolenoidPoint::new(p.n, coords)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairSummaryJson {
    pub n: i64,
    pub depth: usize,
    pub seed: u64,
    pub trials: usize,
    pub checks: usize,
    pub passed: usize,
    pub skipped: usize,
    pub failed: usize,
    pub failures: Vec<String>,
}

impl PairSummaryJson {
    pub fn new(n: i64, depth: usize, seed: u64, t: &PairingTally) -> Self {
        PairSummaryJson {
            n,
            depth,
            seed,
            trials: t.trials,
            checks: t.checks(),
            passed: t.passed,
            skipped: t.skipped,
            failed: t.failures.len(),
            failures: t.failures.clone(),
        }
    }
}
