//! Independent oracles and random generators shared by the integration tests.
//! Nothing here calls the SNF or colimit code under test.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use bsk_core::abelian::{FgAbGroup, GroupHom, IntMatrix, SnfDecomposition};
use bsk_core::colimit::{AbObject, ColimModule, LadderMap};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

pub fn b(x: i64) -> BigInt {
    BigInt::from(x)
}

pub fn bv(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| b(x)).collect()
}

// ---------------------------------------------------------------------------
// determinants and minors

/// Determinant by cofactor expansion; only for the small sizes in tests.
pub fn laplace_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    match n {
        0 => BigInt::from(1),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = BigInt::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<BigInt>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = &m[0][j] * laplace_det(&minor);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// `g_k = gcd of all k x k minors` for `k = 1..=min(rows, cols)`.
pub fn minor_gcds(a: &IntMatrix) -> Vec<BigInt> {
    let rows = a.to_rows();
    (1..=a.rows().min(a.cols()))
        .map(|k| {
            let mut g = BigInt::zero();
            for rs in subsets(a.rows(), k) {
                for cs in subsets(a.cols(), k) {
                    let sub: Vec<Vec<BigInt>> = rs
                        .iter()
                        .map(|&i| cs.iter().map(|&j| rows[i][j].clone()).collect())
                        .collect();
                    g = g.gcd(&laplace_det(&sub));
                }
            }
            g
        })
        .collect()
}

/// Invariant factors predicted by minors: `d_k = g_k / g_{k-1}`, zero past
/// the rank.
pub fn diag_from_minors(a: &IntMatrix) -> Vec<BigInt> {
    let g = minor_gcds(a);
    let mut prev = BigInt::from(1);
    g.into_iter()
        .map(|gk| {
            if gk.is_zero() || prev.is_zero() {
                prev = BigInt::zero();
                BigInt::zero()
            } else {
                let d = &gk / &prev;
                prev = gk;
                d
            }
        })
        .collect()
}

/// Every structural property of a decomposition of `a`.
pub fn check_snf(a: &IntMatrix, d: &SnfDecomposition) -> Result<(), String> {
    let prod = d.u.mul(a).and_then(|m| m.mul(&d.v)).map_err(|e| e.to_string())?;
    if prod != d.s {
        return Err("u·a·v != s".into());
    }
    for (m, inv, what) in [(&d.u, &d.u_inv, "u"), (&d.v, &d.v_inv, "v")] {
        if m.mul(inv).map_err(|e| e.to_string())? != IntMatrix::identity(m.rows()) {
            return Err(format!("{what}·{what}^-1 != 1"));
        }
        if !m.det().map_err(|e| e.to_string())?.abs().is_one() {
            return Err(format!("{what} is not unimodular"));
        }
    }
    if !d.s.is_diagonal() || d.diag.len() != a.rows().min(a.cols()) {
        return Err("s is not diagonal".into());
    }
    for (i, x) in d.diag.iter().enumerate() {
        if x.is_negative() || d.s[(i, i)] != *x {
            return Err("diagonal entry negative or inconsistent".into());
        }
    }
    for w in d.diag.windows(2) {
        let ok = if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) };
        if !ok {
            return Err(format!("{} does not divide {}", w[0], w[1]));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// random data

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let data: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect();
    IntMatrix::from_rows(&data, cols).unwrap()
}

/// Random unimodular matrix as a product of elementary operations.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        while j == i {
            j = rng.gen_range(0..n);
        }
        let k = b(rng.gen_range(-2..=2));
        for c in 0..n {
            let add = &m[(j, c)] * &k;
            m[(i, c)] += add;
        }
    }
    m
}

/// Random group `Z^r + Z/d1 + ...` in invariant factor form with torsion
/// order at most `max_order`.
pub fn random_group<R: Rng>(rng: &mut R, max_free: usize, max_tors: usize, max_order: u64, prefix: &str) -> FgAbGroup {
    let r = rng.gen_range(0..=max_free);
    let mut torsion = Vec::new();
    let mut order = 1u64;
    for _ in 0..rng.gen_range(0..=max_tors) {
        let d = match torsion.last() {
            None => rng.gen_range(2..=6u64),
            Some(&last) => last * rng.gen_range(1..=3u64),
        };
        if order * d > max_order {
            break;
        }
        order *= d;
        torsion.push(d);
    }
    FgAbGroup::with_prefix(r, torsion.into_iter().map(BigInt::from).collect(), prefix).unwrap()
}

/// Order of generator `i`, with 0 for infinite.
pub fn gen_modulus(g: &FgAbGroup, i: usize) -> BigInt {
    if i < g.free_rank() {
        BigInt::zero()
    } else {
        g.torsion()[i - g.free_rank()].clone()
    }
}

/// Random well-defined homomorphism: entry `(i, j)` is a multiple of the
/// smallest step compatible with the orders of `e_j` and `f_i`.
pub fn random_hom<R: Rng>(rng: &mut R, src: &FgAbGroup, tgt: &FgAbGroup, bound: i64) -> GroupHom {
    let mut m = IntMatrix::zeros(tgt.ngens(), src.ngens());
    for i in 0..tgt.ngens() {
        let t = gen_modulus(tgt, i);
        for j in 0..src.ngens() {
            let s = gen_modulus(src, j);
            let step = match (t.is_zero(), s.is_zero()) {
                (true, false) => continue,
                (true, true) | (false, true) => BigInt::from(1),
                (false, false) => &t / t.gcd(&s),
            };
            m[(i, j)] = step * rng.gen_range(-bound..=bound);
        }
    }
    GroupHom::new(src.clone(), tgt.clone(), m).unwrap()
}

// ---------------------------------------------------------------------------
// finite abelian groups by enumeration

/// Multiset of element orders of `Z/m_1 + ... + Z/m_k`, all `m_i >= 1`.
pub fn order_multiset(moduli: &[u64]) -> BTreeMap<u64, u64> {
    let mut counts = BTreeMap::from([(1u64, 1u64)]);
    for &m in moduli {
        let mut next = BTreeMap::new();
        for (&o, &c) in &counts {
            for x in 0..m {
                let ox = m / x.gcd(&m);
                *next.entry(o.lcm(&ox)).or_insert(0) += c;
            }
        }
        counts = next;
    }
    counts
}

/// Element-order multiset of a finite `FgAbGroup`; `None` if it is infinite.
pub fn group_order_multiset(g: &FgAbGroup) -> Option<BTreeMap<u64, u64>> {
    if g.free_rank() > 0 {
        return None;
    }
    let m: Vec<u64> = g.torsion().iter().map(|d| d.to_u64().unwrap()).collect();
    Some(order_multiset(&m))
}

/// A finite abelian group `Z/m_1 + ... + Z/m_k` with an endomorphism given by
/// an integer matrix acting on coordinate vectors. Elements are enumerated.
#[derive(Clone, Debug)]
pub struct FiniteSystem {
    pub moduli: Vec<u64>,
    pub bond: Vec<Vec<i64>>,
}

pub type Elem = Vec<u64>;

impl FiniteSystem {
    pub fn elements(&self) -> Vec<Elem> {
        let mut out = vec![vec![]];
        for &m in &self.moduli {
            out = out
                .into_iter()
                .flat_map(|e: Elem| {
                    (0..m).map(move |x| {
                        let mut e = e.clone();
                        e.push(x);
                        e
                    })
                })
                .collect();
        }
        out
    }

    pub fn apply(&self, mat: &[Vec<i64>], x: &Elem) -> Elem {
        (0..self.moduli.len())
            .map(|i| {
                let m = self.moduli[i] as i64;
                let s: i64 = (0..x.len()).map(|j| mat[i][j] * x[j] as i64).sum();
                s.rem_euclid(m) as u64
            })
            .collect()
    }

    pub fn add(&self, x: &Elem, y: &Elem) -> Elem {
        (0..x.len()).map(|i| (x[i] + y[i]) % self.moduli[i]).collect()
    }

    pub fn neg(&self, x: &Elem) -> Elem {
        (0..x.len()).map(|i| (self.moduli[i] - x[i]) % self.moduli[i]).collect()
    }

    pub fn is_zero(&self, x: &Elem) -> bool {
        x.iter().all(|&c| c == 0)
    }

    /// `f^stages(G)` by pushing every element through the unrolled stages.
    pub fn eventual_image(&self, stages: usize) -> BTreeSet<Elem> {
        let mut cur: BTreeSet<Elem> = self.elements().into_iter().collect();
        for _ in 0..stages {
            cur = cur.iter().map(|x| self.apply(&self.bond, x)).collect();
        }
        cur
    }

    pub fn order_in(&self, x: &Elem, sub: &BTreeSet<Elem>) -> u64 {
        let mut k = 1;
        let mut y = x.clone();
        while !sub.contains(&y) {
            y = self.add(&y, x);
            k += 1;
        }
        k
    }

    /// Element-order multiset of the quotient `e / s` for subgroups `s <= e`.
    pub fn quotient_orders(&self, e: &BTreeSet<Elem>, s: &BTreeSet<Elem>) -> BTreeMap<u64, u64> {
        let mut seen: BTreeSet<Elem> = BTreeSet::new();
        let mut counts = BTreeMap::new();
        for x in e {
            if seen.contains(x) {
                continue;
            }
            for y in s {
                seen.insert(self.add(x, y));
            }
            *counts.entry(self.order_in(x, s)).or_insert(0) += 1;
        }
        counts
    }
}

/// Ladder kernel and cokernel of `phi` on `colim(G, f)` for finite `G`,
/// read off the eventual image after `stages` unrolled stages.
pub fn finite_ladder_oracle(
    sys: &FiniteSystem,
    phi: &[Vec<i64>],
    stages: usize,
) -> (BTreeMap<u64, u64>, BTreeMap<u64, u64>) {
    let e = sys.eventual_image(stages);
    let zero: BTreeSet<Elem> = [vec![0; sys.moduli.len()]].into_iter().collect();
    let ker: BTreeSet<Elem> = e.iter().filter(|x| sys.is_zero(&sys.apply(phi, x))).cloned().collect();
    let img: BTreeSet<Elem> = e.iter().map(|x| sys.apply(phi, x)).collect();
    (sys.quotient_orders(&ker, &zero), sys.quotient_orders(&e, &img))
}

/// Cokernel of `x c` on `Z[1/n]` by element chasing: the class of `m/n^k`
/// lives in the stage quotient `Z/|c|`, and two classes agree once pushed far
/// enough along `x n`.
pub fn localized_cokernel_orders(n: i64, c: i64, stages: usize) -> BTreeMap<u64, u64> {
    let c = c.unsigned_abs();
    let sys = FiniteSystem {
        moduli: vec![c],
        bond: vec![vec![n]],
    };
    let e = sys.eventual_image(stages);
    let zero: BTreeSet<Elem> = [vec![0]].into_iter().collect();
    sys.quotient_orders(&e, &zero)
}

/// Direct sum of order multisets.
pub fn sum_orders(a: &BTreeMap<u64, u64>, b: &BTreeMap<u64, u64>) -> BTreeMap<u64, u64> {
    let mut out = BTreeMap::new();
    for (&oa, &ca) in a {
        for (&ob, &cb) in b {
            *out.entry(oa.lcm(&ob)).or_insert(0) += ca * cb;
        }
    }
    out
}

fn torsion_orders(t: &[BigInt]) -> BTreeMap<u64, u64> {
    order_multiset(&t.iter().map(|d| d.to_u64().unwrap()).collect::<Vec<_>>())
}

/// `(localized summands, free rank, torsion orders)` of a normalized object.
pub fn object_shape(o: &AbObject) -> Shape {
    match o {
        AbObject::Fg(g) => (vec![], g.free_rank(), Some(torsion_orders(g.torsion()))),
        AbObject::Loc { summands, torsion } => (
            summands.iter().map(|s| s.inverted().abs()).collect(),
            torsion.free_rank(),
            Some(torsion_orders(torsion.torsion())),
        ),
    }
}

/// A random ladder case: stage `Z^f + T` (f in {0,1}) with bond `diag(n) + M`,
/// rung `a + b·bond`. Returns the ladder and the data the oracle needs.
pub struct LadderCase {
    pub n: i64,
    pub free: bool,
    pub torsion_sys: FiniteSystem,
    pub phi_t: Vec<Vec<i64>>,
    pub c: i64,
    pub ladder: LadderMap,
}

pub fn random_ladder_case<R: Rng>(rng: &mut R) -> LadderCase {
    let free = rng.gen_bool(0.5);
    let mut n = 0;
    while n.abs() < 2 {
        n = rng.gen_range(-12..=12);
    }
    let t = random_group(rng, 0, 2, 96, "t");
    let tors: Vec<u64> = t.torsion().iter().map(|d| d.to_u64().unwrap()).collect();
    let th = random_hom(rng, &t, &t, 3);
    let mt: Vec<Vec<i64>> = th.matrix().to_rows().iter().map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect()).collect();
    let (mut a, bb) = (rng.gen_range(-3..=3i64), rng.gen_range(-2..=2i64));
    if free && rng.gen_bool(0.3) {
        // rung vanishes on the free part, leaving a localized summand
        a = -bb * n;
    }
    let k = tors.len();
    let phi_t: Vec<Vec<i64>> = (0..k)
        .map(|i| (0..k).map(|j| bb * mt[i][j] + if i == j { a } else { 0 }).collect())
        .collect();

    let fr = usize::from(free);
    let size = fr + k;
    let mut bond = IntMatrix::zeros(size, size);
    let mut rung = IntMatrix::zeros(size, size);
    if free {
        bond[(0, 0)] = b(n);
        rung[(0, 0)] = b(a + bb * n);
    }
    for i in 0..k {
        for j in 0..k {
            bond[(fr + i, fr + j)] = b(mt[i][j]);
            rung[(fr + i, fr + j)] = b(phi_t[i][j]);
        }
    }
    let stage = FgAbGroup::with_prefix(fr, t.torsion().to_vec(), "g").unwrap();
    let bond = GroupHom::new(stage.clone(), stage.clone(), bond).unwrap();
    let rung = GroupHom::new(stage.clone(), stage.clone(), rung).unwrap();
    let sys = ColimModule::new(stage, bond).unwrap();
    LadderCase {
        n,
        free,
        torsion_sys: FiniteSystem { moduli: tors, bond: mt },
        phi_t,
        c: a + bb * n,
        ladder: LadderMap::new(sys.clone(), sys, rung).unwrap(),
    }
}

/// Expected `(localized radicals, free rank, torsion orders)` of the ladder
/// kernel and cokernel, by brute force over 12 unrolled stages.
pub type Shape = (Vec<BigInt>, usize, Option<BTreeMap<u64, u64>>);

pub fn oracle_shapes(case: &LadderCase) -> (Shape, Shape) {
    const STAGES: usize = 12;
    let (kt, ct) = finite_ladder_oracle(&case.torsion_sys, &case.phi_t, STAGES);
    if !case.free {
        return ((vec![], 0, Some(kt)), (vec![], 0, Some(ct)));
    }
    if case.c == 0 {
        let loc = vec![b(case.n.abs())];
        ((loc.clone(), 0, Some(kt)), (loc, 0, Some(ct)))
    } else {
        let cz = localized_cokernel_orders(case.n, case.c, STAGES);
        ((vec![], 0, Some(kt)), (vec![], 0, Some(sum_orders(&cz, &ct))))
    }
}

/// Radical of `n`: product of its distinct primes.
pub fn radical(n: &BigInt) -> BigInt {
    let mut n = n.abs();
    let mut r = BigInt::from(1);
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            r *= &p;
            while (&n % &p).is_zero() {
                n /= &p;
            }
        }
        p += 1;
    }
    if n > BigInt::from(1) {
        r *= n;
    }
    r
}

pub fn same_shape(got: &Shape, want: &Shape) -> bool {
    let rad = |v: &Vec<BigInt>| {
        let mut r: Vec<BigInt> = v.iter().map(radical).collect();
        r.sort();
        r
    };
    rad(&got.0) == rad(&want.0) && got.1 == want.1 && got.2 == want.2
}
