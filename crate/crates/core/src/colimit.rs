//! Directed colimits `colim(G -f-> G -f-> G -> ...)` of one finitely generated
//! abelian group along a self-map, and kernels/cokernels of maps between such
//! systems that commute with the bonds.
//!
//! `Z[1/n]` arises as `colim(Z, ×n)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::abelian::{cokernel_tagged, kernel, solve, FgAbGroup, GroupHom, IntMatrix};
use crate::error::{Error, Result};

/// Hard cap on kernel-chain iterations.
pub const STABILIZATION_CAP: usize = 64;

/// The colimit of `stage` along the self-map `bond`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColimModule {
    stage: FgAbGroup,
    bond: GroupHom,
}

impl ColimModule {
    pub fn new(stage: FgAbGroup, bond: GroupHom) -> Result<Self> {
        if bond.source() != &stage || bond.target() != &stage {
            return Err(Error::DimensionMismatch("bond must be a self-map of the stage".into()));
        }
        Ok(ColimModule { stage, bond })
    }

    /// Constant system: the colimit is `g` itself.
    pub fn constant(g: &FgAbGroup) -> Self {
        ColimModule {
            stage: g.clone(),
            bond: GroupHom::identity(g),
        }
    }

    /// `colim(Z, ×n) = Z[1/n]` with the stage generator named `symbol`.
    pub fn localized(n: impl Into<BigInt>, symbol: &str) -> Self {
        let stage = FgAbGroup::free(&[symbol]);
        ColimModule {
            bond: GroupHom::scalar(&stage, n),
            stage,
        }
    }

    pub fn stage(&self) -> &FgAbGroup {
        &self.stage
    }

    pub fn bond(&self) -> &GroupHom {
        &self.bond
    }

    /// `Some(n)` when the stage is `Z` and the bond is `×n`.
    fn rank_one_free_bond(&self) -> Option<BigInt> {
        (self.stage.free_rank() == 1 && self.stage.is_free())
            .then(|| self.bond.matrix()[(0, 0)].clone())
    }
}

/// `Z[1/n]`, with `symbol` naming the image of `1` from stage zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalizedInt {
    n: BigInt,
    symbol: String,
}

impl LocalizedInt {
    pub fn new(n: impl Into<BigInt>, symbol: &str) -> Result<Self> {
        let n = n.into();
        if n.is_zero() {
            return Err(Error::Domain("cannot invert 0".into()));
        }
        Ok(LocalizedInt {
            n,
            symbol: symbol.to_string(),
        })
    }

    pub fn inverted(&self) -> &BigInt {
        &self.n
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    /// `Z[1/±1] = Z`.
    pub fn is_integers(&self) -> bool {
        self.n.abs().is_one()
    }
}

impl fmt::Display for LocalizedInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[1/{}]<{}>", self.n, self.symbol)
    }
}

/// `Z[1/a] = Z[1/b]` iff `a` and `b` have the same prime divisors.
pub fn localized_eq(a: &LocalizedInt, b: &LocalizedInt) -> bool {
    same_radical(&a.n, &b.n)
}

fn same_radical(a: &BigInt, b: &BigInt) -> bool {
    coprime_part(a, b).is_one() && coprime_part(b, a).is_one()
}

/// Largest divisor of `|c|` coprime to `n`.
pub fn coprime_part(c: &BigInt, n: &BigInt) -> BigInt {
    let mut c = c.abs();
    if c.is_zero() {
        return c;
    }
    loop {
        let g = c.gcd(n);
        if g.is_one() {
            return c;
        }
        c /= g;
    }
}

/// Normalized colimit.
///
/// `Loc` carries the localized summands together with a finitely generated
/// complement (free `Z` summands on which the bond was `±1`, plus torsion).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AbObject {
    Fg(FgAbGroup),
    Loc {
        summands: Vec<LocalizedInt>,
        torsion: FgAbGroup,
    },
}

impl AbObject {
    pub fn as_fg(&self) -> Option<&FgAbGroup> {
        match self {
            AbObject::Fg(g) => Some(g),
            AbObject::Loc { .. } => None,
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, AbObject::Fg(g) if g.is_trivial())
    }

    /// Unnamed normal form, e.g. `Z[1/2] + Z/3`.
    pub fn normal_form(&self) -> String {
        match self {
            AbObject::Fg(g) => crate::abelian::normal_form_string(g.free_rank(), g.torsion()),
            AbObject::Loc { summands, torsion } => {
                let mut parts: Vec<String> =
                    summands.iter().map(|l| format!("Z[1/{}]", l.n)).collect();
                if !torsion.is_trivial() {
                    parts.push(crate::abelian::normal_form_string(
                        torsion.free_rank(),
                        torsion.torsion(),
                    ));
                }
                parts.join(" + ")
            }
        }
    }
}

impl fmt::Display for AbObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbObject::Fg(g) => write!(f, "{g}"),
            AbObject::Loc { summands, torsion } => {
                let mut parts: Vec<String> = summands.iter().map(ToString::to_string).collect();
                if !torsion.is_trivial() {
                    parts.push(torsion.to_string());
                }
                write!(f, "{}", parts.join(" + "))
            }
        }
    }
}

/// A normalized colimit together with the canonical map from stage zero,
/// available whenever the colimit is finitely generated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub object: AbObject,
    pub from_stage: Option<GroupHom>,
}

/// A morphism of systems given by one map on stages commuting with the bonds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderMap {
    source: ColimModule,
    target: ColimModule,
    rung: GroupHom,
}

impl LadderMap {
    pub fn new(source: ColimModule, target: ColimModule, rung: GroupHom) -> Result<Self> {
        if rung.source() != &source.stage || rung.target() != &target.stage {
            return Err(Error::DimensionMismatch("rung must map stage to stage".into()));
        }
        let left = rung.compose(&source.bond)?;
        let right = target.bond.compose(&rung)?;
        if !left.same_map(&right) {
            return Err(Error::NotCommuting);
        }
        Ok(LadderMap {
            source,
            target,
            rung,
        })
    }

    pub fn source(&self) -> &ColimModule {
        &self.source
    }

    pub fn target(&self) -> &ColimModule {
        &self.target
    }

    pub fn rung(&self) -> &GroupHom {
        &self.rung
    }
}

/// Stage-wise kernel or cokernel of a ladder map, before and after
/// normalization. `stage_map` is the inclusion into the source stage (kernel)
/// or the projection from the target stage (cokernel).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderTerm {
    pub system: ColimModule,
    pub stage_map: GroupHom,
    pub normalized: Normalized,
}

fn stabilization_bound(g: &FgAbGroup) -> usize {
    let log2 = g.torsion_order().bits().saturating_sub(1) as usize;
    (g.free_rank() + log2 + 2).min(STABILIZATION_CAP)
}

/// `ker(bond^N)` for `N` large enough that the chain has stabilized.
fn eventual_kernel(c: &ColimModule) -> Result<GroupHom> {
    let bound = stabilization_bound(&c.stage);
    let mut prev_power = GroupHom::identity(&c.stage);
    for _ in 0..=bound {
        let power = c.bond.compose(&prev_power)?;
        let (_, incl) = kernel(&power)?;
        if prev_power.compose(&incl)?.is_zero() {
            return Ok(incl);
        }
        prev_power = power;
    }
    Err(Error::StabilizationOverflow(bound))
}

pub fn normalize(c: &ColimModule) -> Result<AbObject> {
    Ok(normalize_with_map(c)?.object)
}

/// Classifies the colimit.
///
/// 1. Quotient by the eventual kernel, making the bond injective.
/// 2. The bond is now bijective on the (finite) torsion subgroup. If it is
///    also unimodular on the free quotient, the colimit is this group.
/// 3. Otherwise the torsion is split off by a change of free basis, and the
///    free part must be diagonal; each `×a` with `|a| >= 2` contributes a
///    `Z[1/a]` summand.
pub fn normalize_with_map(c: &ColimModule) -> Result<Normalized> {
    let incl = eventual_kernel(c)?;
    let (g, proj, lift) = cokernel_tagged(&incl, "")?;
    let m = proj
        .matrix()
        .mul(c.bond.matrix())?
        .mul(&lift)?;
    let bond = GroupHom::new(g.clone(), g.clone(), m)?.reduced();

    let r = g.free_rank();
    let t = g.torsion().len();
    let free_idx: Vec<usize> = (0..r).collect();
    let tors_idx: Vec<usize> = (r..r + t).collect();
    let a = bond.matrix().select(&free_idx, &free_idx);
    let c_block = bond.matrix().select(&tors_idx, &free_idx);
    let b_block = bond.matrix().select(&tors_idx, &tors_idx);

    if a.det()?.abs().is_one() {
        return Ok(Normalized {
            object: AbObject::Fg(g),
            from_stage: Some(proj),
        });
    }

    if !c_block.is_zero() && split_torsion(&a, &b_block, &c_block, g.torsion()).is_none() {
        return Err(Error::UnsupportedColimitShape(
            "torsion is entangled with a localized free part".into(),
        ));
    }
    if !a.is_diagonal() {
        return Err(Error::UnsupportedColimitShape(format!(
            "free rank {r} with a non-diagonal, non-invertible bond"
        )));
    }

    let names = g.gen_names();
    let mut summands = Vec::new();
    let mut rest_names = Vec::new();
    for i in 0..r {
        let entry = &a[(i, i)];
        if entry.abs().is_one() {
            rest_names.push(names[i].clone());
        } else {
            summands.push(LocalizedInt::new(entry.clone(), &names[i])?);
        }
    }
    let rest_free = rest_names.len();
    rest_names.extend(names[r..].iter().cloned());
    let torsion = FgAbGroup::new(rest_free, g.torsion().to_vec(), rest_names)?;
    Ok(Normalized {
        object: AbObject::Loc { summands, torsion },
        from_stage: None,
    })
}

/// Finds `t` (torsion rows by free columns) with `C + B t - t A ≡ 0`, i.e. a
/// change of free basis `x -> x + t x` that makes the bond block diagonal.
fn split_torsion(
    a: &IntMatrix,
    b: &IntMatrix,
    c: &IntMatrix,
    torsion: &[BigInt],
) -> Option<IntMatrix> {
    let (t, r) = (c.rows(), c.cols());
    let unknowns = t * r;
    let var = |j: usize, i: usize| j * r + i;
    let mut sys = IntMatrix::zeros(unknowns, 2 * unknowns);
    let mut rhs = vec![BigInt::zero(); unknowns];
    for j in 0..t {
        for i in 0..r {
            let eq = var(j, i);
            for l in 0..t {
                sys[(eq, var(l, i))] += &b[(j, l)];
            }
            for k in 0..r {
                sys[(eq, var(j, k))] -= &a[(k, i)];
            }
            sys[(eq, unknowns + eq)] = -torsion[j].clone();
            rhs[eq] = -c[(j, i)].clone();
        }
    }
    let x = solve(&sys, &rhs)?;
    let mut out = IntMatrix::zeros(t, r);
    for j in 0..t {
        for i in 0..r {
            out[(j, i)] = x[var(j, i)].mod_floor(&torsion[j]);
        }
    }
    Some(out)
}

/// Kernel of the induced map on colimits, computed stage-wise.
pub fn ladder_kernel(m: &LadderMap) -> Result<AbObject> {
    Ok(ladder_kernel_term(m)?.normalized.object)
}

pub fn ladder_kernel_term(m: &LadderMap) -> Result<LadderTerm> {
    let (k, incl) = kernel(&m.rung)?;
    let bond = incl.factor(&m.source.bond.compose(&incl)?)?;
    let system = ColimModule::new(k, bond)?;
    let normalized = normalize_with_map(&system)?;
    Ok(LadderTerm {
        system,
        stage_map: incl,
        normalized,
    })
}

/// Cokernel of the induced map on colimits.
///
/// On `Z[1/n]` the cokernel of `×c` is `Z/c'` with `c'` the largest divisor
/// of `|c|` coprime to `n`, and the stage generator maps to `1`.
pub fn ladder_cokernel(m: &LadderMap) -> Result<AbObject> {
    Ok(ladder_cokernel_term(m)?.normalized.object)
}

pub fn ladder_cokernel_term(m: &LadderMap) -> Result<LadderTerm> {
    if let Some(n) = m.target.rank_one_free_bond() {
        let c = m.rung.matrix()[(0, 0)].clone();
        if n.abs() > BigInt::one() && !c.is_zero() && m.source == m.target {
            return localized_cokernel(m, &n, &c);
        }
    }
    staged_cokernel(m)
}

fn localized_cokernel(m: &LadderMap, n: &BigInt, c: &BigInt) -> Result<LadderTerm> {
    let stage = &m.target.stage;
    let name = format!("{}‾", stage.gen_names()[0]);
    let order = coprime_part(c, n);
    let group = if order.is_one() {
        FgAbGroup::trivial()
    } else {
        FgAbGroup::cyclic(order.clone(), &name)?
    };
    let proj_matrix = IntMatrix::from_rows(&vec![vec![BigInt::one()]; group.ngens()], 1)?;
    let from_stage = GroupHom::new(stage.clone(), group.clone(), proj_matrix)?;

    // Stage-wise system Z/c with bond ×n, kept for inspection.
    let (q, proj, lift) = cokernel_tagged(&m.rung, "‾")?;
    let qm = proj.matrix().mul(m.target.bond.matrix())?.mul(&lift)?;
    let system = ColimModule::new(q.clone(), GroupHom::new(q.clone(), q, qm)?.reduced())?;
    Ok(LadderTerm {
        system,
        stage_map: proj,
        normalized: Normalized {
            object: AbObject::Fg(group),
            from_stage: Some(from_stage),
        },
    })
}

fn staged_cokernel(m: &LadderMap) -> Result<LadderTerm> {
    let tag = if m.rung.is_zero() { "" } else { "‾" };
    let (q, proj, lift) = cokernel_tagged(&m.rung, tag)?;
    let qm = proj.matrix().mul(m.target.bond.matrix())?.mul(&lift)?;
    let bond = GroupHom::new(q.clone(), q.clone(), qm)?.reduced();
    let system = ColimModule::new(q, bond)?;
    let normalized = normalize_with_map(&system)?;
    let normalized = Normalized {
        from_stage: match normalized.from_stage {
            Some(f) => Some(f.compose(&proj)?),
            None => None,
        },
        object: normalized.object,
    };
    Ok(LadderTerm {
        system,
        stage_map: proj,
        normalized,
    })
}
