use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::group::{combination, FgAbGroup};
use super::matrix::IntMatrix;
use super::snf::smith_normal_form;
use crate::error::{Error, Result};

/// A homomorphism between [`FgAbGroup`]s: column `j` is the image of source
/// generator `j` in target coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    source: FgAbGroup,
    target: FgAbGroup,
    matrix: IntMatrix,
}

impl GroupHom {
    /// Checks shape and that every torsion generator of order `d` is sent to
    /// an element killed by `d`.
    pub fn new(source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix) -> Result<Self> {
        if matrix.rows() != target.ngens() || matrix.cols() != source.ngens() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a map from {} to {} generators",
                matrix.rows(),
                matrix.cols(),
                source.ngens(),
                target.ngens()
            )));
        }
        for (j, d) in source.torsion().iter().enumerate() {
            let col = source.free_rank() + j;
            let scaled: Vec<BigInt> = matrix.column(col).iter().map(|x| x * d).collect();
            if !target.is_zero_elem(&scaled)? {
                return Err(Error::NotWellDefined(format!(
                    "generator `{}` has order {d} but its image does not",
                    source.gen_names()[col]
                )));
            }
        }
        Ok(GroupHom {
            source,
            target,
            matrix,
        })
    }

    pub fn zero(source: &FgAbGroup, target: &FgAbGroup) -> Self {
        GroupHom {
            matrix: IntMatrix::zeros(target.ngens(), source.ngens()),
            source: source.clone(),
            target: target.clone(),
        }
    }

    pub fn identity(g: &FgAbGroup) -> Self {
        GroupHom {
            matrix: IntMatrix::identity(g.ngens()),
            source: g.clone(),
            target: g.clone(),
        }
    }

    /// Multiplication by `c` on `g`.
    pub fn scalar(g: &FgAbGroup, c: impl Into<BigInt>) -> Self {
        GroupHom {
            matrix: IntMatrix::scalar(g.ngens(), c),
            source: g.clone(),
            target: g.clone(),
        }
    }

    pub fn source(&self) -> &FgAbGroup {
        &self.source
    }

    pub fn target(&self) -> &FgAbGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn is_endomorphism(&self) -> bool {
        self.source == self.target
    }

    pub fn apply(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        self.target.reduce(&self.matrix.mul_vec(x)?)
    }

    /// `self ∘ inner`
    pub fn compose(&self, inner: &GroupHom) -> Result<GroupHom> {
        if inner.target != self.source {
            return Err(Error::DimensionMismatch("composition across different groups".into()));
        }
        let matrix = self.matrix.mul(&inner.matrix)?;
        Ok(GroupHom {
            source: inner.source.clone(),
            target: self.target.clone(),
            matrix,
        }
        .reduced())
    }

    pub fn sub(&self, other: &GroupHom) -> Result<GroupHom> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::DimensionMismatch("difference of maps with different ends".into()));
        }
        Ok(GroupHom {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.sub(&other.matrix)?,
        }
        .reduced())
    }

    pub fn pow(&self, e: u32) -> Result<GroupHom> {
        if !self.is_endomorphism() {
            return Err(Error::DimensionMismatch("power of a non-endomorphism".into()));
        }
        let mut acc = GroupHom::identity(&self.source);
        for _ in 0..e {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Same map with torsion rows reduced into `[0, d)`.
    pub fn reduced(mut self) -> Self {
        let r = self.target.free_rank();
        for (i, d) in self.target.torsion().iter().enumerate() {
            self.matrix.reduce_row_mod(r + i, d);
        }
        self
    }

    /// Equality as maps (entries compared modulo target relations).
    pub fn same_map(&self, other: &GroupHom) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.clone().reduced().matrix == other.clone().reduced().matrix
    }

    pub fn is_zero(&self) -> bool {
        self.clone().reduced().matrix.is_zero()
    }

    /// Some `x` with `self(x) = y`, if one exists.
    pub fn preimage(&self, y: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        if y.len() != self.target.ngens() {
            return Err(Error::DimensionMismatch("preimage of a wrongly sized element".into()));
        }
        let a = self.matrix.hconcat(&self.target.relation_matrix())?;
        Ok(solve(&a, y).map(|x| {
            self.source
                .reduce(&x[..self.source.ngens()])
                .expect("length checked")
        }))
    }

    /// Factors `g` through this map: returns `h` with `self ∘ h = g`.
    /// Fails when the image of `g` is not contained in the image of `self`.
    pub fn factor(&self, g: &GroupHom) -> Result<GroupHom> {
        if g.target != self.target {
            return Err(Error::DimensionMismatch("factoring through a map with another target".into()));
        }
        let mut cols = Vec::with_capacity(g.source.ngens());
        for j in 0..g.source.ngens() {
            match self.preimage(&g.matrix.column(j))? {
                Some(x) => cols.push(x),
                None => {
                    return Err(Error::NotWellDefined(format!(
                        "image of `{}` is not in the image of the map",
                        g.source.gen_names()[j]
                    )))
                }
            }
        }
        let matrix = IntMatrix::from_columns(self.source.ngens(), &cols);
        GroupHom::new(g.source.clone(), self.source.clone(), matrix)
    }
}

impl fmt::Display for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let images: Vec<String> = (0..self.source.ngens())
            .map(|j| {
                format!(
                    "{} -> {}",
                    self.source.gen_names()[j],
                    self.target.describe(&self.matrix.column(j))
                )
            })
            .collect();
        write!(f, "{{{}}}", images.join(", "))
    }
}

/// Integer solution of `a x = b`, if any.
pub(crate) fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows(), b.len());
    let d = smith_normal_form(a);
    let c = d.u.mul_vec(b).expect("shape");
    let r = d.rank();
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, ci) in c.iter().enumerate() {
        if i < r {
            if !(ci % &d.diag[i]).is_zero() {
                return None;
            }
            y[i] = ci / &d.diag[i];
        } else if !ci.is_zero() {
            return None;
        }
    }
    Some(d.v.mul_vec(&y).expect("shape"))
}

/// Quotient of `Z^m` by the column span of `relations`, in normal form.
pub(crate) struct Quotient {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
    /// `ngens x m`: coordinates of the image of each ambient basis vector.
    pub proj: IntMatrix,
    /// `m x ngens`: a lift of each quotient generator.
    pub lift: IntMatrix,
}

pub(crate) fn quotient(relations: &IntMatrix) -> Quotient {
    let m = relations.rows();
    let d = smith_normal_form(relations);
    let factor = |i: usize| d.diag.get(i).cloned().unwrap_or_else(BigInt::zero);

    let free: Vec<usize> = (0..m).filter(|&i| factor(i).is_zero()).collect();
    let tors: Vec<usize> = (0..m).filter(|&i| factor(i) > BigInt::one()).collect();
    let keep: Vec<usize> = free.iter().chain(&tors).copied().collect();
    let all: Vec<usize> = (0..m).collect();

    let mut proj = d.u.select(&keep, &all);
    let mut lift = d.u_inv.select(&all, &keep);
    for k in 0..keep.len() {
        let col = lift.column(k);
        if col.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            proj.negate_row(k);
            lift.negate_col(k);
        }
    }
    let torsion: Vec<BigInt> = tors.iter().map(|&i| factor(i)).collect();
    for (k, t) in torsion.iter().enumerate() {
        proj.reduce_row_mod(free.len() + k, t);
    }
    Quotient {
        free_rank: free.len(),
        torsion,
        proj,
        lift,
    }
}

/// `name` for a unit vector, `(combination)` otherwise.
fn lift_name(col: &[BigInt], names: &[String]) -> String {
    let nonzero: Vec<usize> = (0..col.len()).filter(|&i| !col[i].is_zero()).collect();
    if nonzero.len() == 1 && col[nonzero[0]].is_one() {
        names[nonzero[0]].clone()
    } else {
        format!("({})", combination(col, names))
    }
}

fn named_group(free_rank: usize, torsion: Vec<BigInt>, names: Vec<String>, tag: &str) -> FgAbGroup {
    FgAbGroup::new(free_rank, torsion.clone(), names)
        .or_else(|_| FgAbGroup::with_prefix(free_rank, torsion, &format!("g{tag}")))
        .expect("normal form from Smith decomposition")
}

/// Cokernel of `h` with generators named after their lifts in `h.target`,
/// each suffixed by `tag`.
pub(crate) fn cokernel_tagged(h: &GroupHom, tag: &str) -> Result<(FgAbGroup, GroupHom, IntMatrix)> {
    let rel = h.matrix.hconcat(&h.target.relation_matrix())?;
    let q = quotient(&rel);
    let names = (0..q.lift.cols())
        .map(|k| format!("{}{tag}", lift_name(&q.lift.column(k), h.target.gen_names())))
        .collect();
    let group = named_group(q.free_rank, q.torsion, names, tag);
    let proj = GroupHom::new(h.target.clone(), group.clone(), q.proj)?;
    Ok((group, proj, q.lift))
}

/// Cokernel of `h` with its projection from `h.target`.
///
/// Generators are named after a lift in the target, with a `‾` suffix unless
/// `h` is the zero map (in which case the cokernel is the target itself).
pub fn cokernel(h: &GroupHom) -> Result<(FgAbGroup, GroupHom)> {
    let tag = if h.is_zero() { "" } else { "‾" };
    let (g, p, _) = cokernel_tagged(h, tag)?;
    Ok((g, p))
}

/// Kernel of `h` with its inclusion into `h.source`.
pub fn kernel(h: &GroupHom) -> Result<(FgAbGroup, GroupHom)> {
    let ns = h.source.ngens();
    let a = h.matrix.hconcat(&h.target.relation_matrix())?;
    let d = smith_normal_form(&a);
    let r = d.rank();

    // Preimage lattice of the kernel inside Z^ns, as a generating set.
    let gens: Vec<Vec<BigInt>> = (r..a.cols()).map(|j| d.v.column(j)[..ns].to_vec()).collect();
    let g = IntMatrix::from_columns(ns, &gens);

    // Reduce the generating set to a basis: columns of u_inv scaled by the factors.
    let dg = smith_normal_form(&g);
    let rank = dg.rank();
    let mut basis = IntMatrix::zeros(ns, rank);
    for i in 0..rank {
        for row in 0..ns {
            basis[(row, i)] = &dg.u_inv[(row, i)] * &dg.diag[i];
        }
    }

    // The source relations live in the lattice; write them in basis coordinates.
    let srel = h.source.relation_matrix();
    let mut coords = IntMatrix::zeros(rank, srel.cols());
    for j in 0..srel.cols() {
        let c = dg.u.mul_vec(&srel.column(j))?;
        for i in 0..rank {
            coords[(i, j)] = &c[i] / &dg.diag[i];
        }
    }

    let q = quotient(&coords);
    let mut incl = basis.mul(&q.lift)?;
    let fr = h.source.free_rank();
    for (i, t) in h.source.torsion().iter().enumerate() {
        incl.reduce_row_mod(fr + i, t);
    }
    let names = (0..incl.cols())
        .map(|k| {
            let col = incl.column(k);
            let s = lift_name(&col, h.source.gen_names());
            s.strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .map(str::to_string)
                .unwrap_or(s)
        })
        .collect();
    let group = named_group(q.free_rank, q.torsion, names, "");
    let inclusion = GroupHom::new(group.clone(), h.source.clone(), incl)?;
    Ok((group, inclusion))
}
