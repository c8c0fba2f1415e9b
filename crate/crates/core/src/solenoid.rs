//! Finite-depth points of the solenoid `X_n`, the Pontryagin dual of
//! `Z[1/n]`, with exact rational angles.
//!
//! A point of depth `L` is `(θ_0, ..., θ_L)` in `Q/Z` with
//! `n·θ_{k+1} = θ_k`. It pairs with `m/n^l` for `l <= L` by `m·θ_l`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// `p/q mod 1`, stored reduced with `0 <= p/q < 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalAngle(BigRational);

impl RationalAngle {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let q = q.into();
        if q.is_zero() {
            return Err(Error::InvalidInput("angle with zero denominator".into()));
        }
        Ok(Self::from_rational(BigRational::new(p.into(), q)))
    }

    pub fn zero() -> Self {
        RationalAngle(BigRational::zero())
    }

    pub fn from_rational(r: BigRational) -> Self {
        RationalAngle(&r - r.floor())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, other: &RationalAngle) -> RationalAngle {
        Self::from_rational(&self.0 + &other.0)
    }

    pub fn scale(&self, k: &BigInt) -> RationalAngle {
        Self::from_rational(&self.0 * BigRational::from_integer(k.clone()))
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

/// `m / n^l`. Raw forms such as `2/2` are kept as written so that the
/// pairing can be evaluated on every representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    pub m: BigInt,
    pub l: u32,
}

impl DyadicRational {
    pub fn new(m: impl Into<BigInt>, l: u32) -> Self {
        DyadicRational { m: m.into(), l }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    /// Strips factors of `n` until `n` does not divide `m` or `l = 0`.
    pub fn canonical(&self, n: i64) -> Self {
        let nb = BigInt::from(n);
        let mut out = self.clone();
        if n.unsigned_abs() == 1 {
            // n^l = ±1, so m/n^l is an integer
            out.m = &out.m * nb.pow(out.l);
            out.l = 0;
            return out;
        }
        while out.l > 0 && out.m.is_multiple_of(&nb) {
            out.m /= &nb;
            out.l -= 1;
        }
        if out.m.is_zero() {
            out.l = 0;
        }
        out
    }

    /// The same number written over `n^l` for a larger `l`.
    pub fn expanded(&self, n: i64, l: u32) -> Self {
        assert!(l >= self.l);
        Self::new(&self.m * BigInt::from(n).pow(l - self.l), l)
    }

    /// Sum over the common denominator `n^max(l, l')`.
    pub fn add(&self, other: &Self, n: i64) -> Self {
        let l = self.l.max(other.l);
        Self::new(self.expanded(n, l).m + other.expanded(n, l).m, l)
    }

    /// The raw multiplication-by-`n` image `(n·m)/n^l`.
    pub fn times_n(&self, n: i64) -> Self {
        Self::new(&self.m * n, self.l)
    }

    pub fn to_rational(&self, n: i64) -> BigRational {
        BigRational::new(self.m.clone(), BigInt::from(n).pow(self.l))
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/n^{}", self.m, self.l)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SolenoidPoint {
    n: i64,
    coords: Vec<RationalAngle>,
}

impl SolenoidPoint {
    pub fn new(n: i64, coords: Vec<RationalAngle>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("the solenoid needs n ≠ 0".into()));
        }
        if coords.is_empty() {
            return Err(Error::InvalidInput("a point needs at least one coordinate".into()));
        }
        let nb = BigInt::from(n);
        for k in 0..coords.len() - 1 {
            if coords[k + 1].scale(&nb) != coords[k] {
                return Err(Error::InvalidInput(format!(
                    "incompatible coordinates at bond {k}: {n}·{} ≠ {}",
                    coords[k + 1],
                    coords[k]
                )));
            }
        }
        Ok(SolenoidPoint { n, coords })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[RationalAngle] {
        &self.coords
    }
}

impl fmt::Display for SolenoidPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<String> = self.coords.iter().map(ToString::to_string).collect();
        write!(f, "({})", cs.join(", "))
    }
}

/// `(z, m/n^l) = m·θ_l`.
pub fn pairing(z: &SolenoidPoint, x: &DyadicRational) -> Result<RationalAngle> {
    let l = x.l as usize;
    if l > z.depth() {
        return Err(Error::DepthExceeded {
            depth: z.depth(),
            needed: l,
        });
    }
    Ok(z.coords[l].scale(&x.m))
}

/// The backward shift `(z_1, ..., z_L)`.
pub fn dual_shift(z: &SolenoidPoint) -> Result<SolenoidPoint> {
    if z.depth() == 0 {
        return Err(Error::DepthExceeded { depth: 0, needed: 1 });
    }
    Ok(SolenoidPoint {
        n: z.n,
        coords: z.coords[1..].to_vec(),
    })
}

/// `(α̂z, αx) = (z, x)` with `α` multiplication by `n` and `α̂` the backward
/// shift. Needs depth `l + 1`.
pub fn duality_check(z: &SolenoidPoint, x: &DyadicRational) -> Result<bool> {
    let lhs = pairing(&dual_shift(z)?, &x.times_n(z.n))?;
    Ok(lhs == pairing(z, x)?)
}

/// Chooses `θ_L` from the seed and fills in `θ_k = n·θ_{k+1}` downward.
pub fn random_point(n: i64, depth: usize, seed: u64) -> Result<SolenoidPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q: u64 = rng.gen_range(1..=10_000);
    let p: u64 = rng.gen_range(0..q);
    random_point_from(n, depth, RationalAngle::new(p, q)?)
}

fn random_point_from(n: i64, depth: usize, top: RationalAngle) -> Result<SolenoidPoint> {
    let nb = BigInt::from(n);
    let mut coords = vec![top];
    for _ in 0..depth {
        let next = coords.last().expect("nonempty").scale(&nb);
        coords.push(next);
    }
    coords.reverse();
    SolenoidPoint::new(n, coords)
}

/// Outcome of one randomized round of the pairing identities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairingTally {
    pub trials: usize,
    pub passed: usize,
    /// Checks that needed a deeper point than requested.
    pub skipped: usize,
    pub failures: Vec<String>,
}

impl PairingTally {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Every individual check performed, three per trial.
    pub fn checks(&self) -> usize {
        3 * self.trials
    }

    fn record(&mut self, outcome: Result<bool>, what: impl FnOnce() -> String) -> Result<()> {
        match outcome {
            Ok(true) => self.passed += 1,
            Ok(false) => self.failures.push(what()),
            Err(Error::DepthExceeded { .. }) => self.skipped += 1,
            Err(e) => return Err(e),
        }
        Ok(())
    }
}

/// Runs `trials` random checks of well-definedness, bilinearity and the shift
/// intertwining on points of the given depth, numerators `|m| <= 50`.
pub fn check_pairing_identities(n: i64, depth: usize, seed: u64, trials: usize) -> Result<PairingTally> {
    if n == 0 {
        return Err(Error::Domain("the solenoid needs n ≠ 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = PairingTally {
        trials,
        ..Default::default()
    };
    for t in 0..trials {
        let z = random_point(n, depth, rng.gen())?;
        let mut dyadic = |max_l: usize| DyadicRational::new(rng.gen_range(-50i64..=50), rng.gen_range(0..=max_l) as u32);
        let x = dyadic(depth.saturating_sub(1));
        let y = dyadic(depth);

        let well_defined = (|| {
            let p = pairing(&z, &x)?;
            Ok(p == pairing(&z, &x.expanded(n, x.l + 1))? && p == pairing(&z, &x.canonical(n))?)
        })();
        tally.record(well_defined, || format!("trial {t}: well-definedness at z = {z}, x = {x}"))?;

        let bilinear = (|| Ok(pairing(&z, &x.add(&y, n))? == pairing(&z, &x)?.add(&pairing(&z, &y)?)))();
        tally.record(bilinear, || format!("trial {t}: bilinearity at z = {z}, x = {x}, y = {y}"))?;

        tally.record(duality_check(&z, &x), || format!("trial {t}: intertwining at z = {z}, x = {x}"))?;
    }
    Ok(tally)
}

/// Sanity value for a point: `n^depth · θ_depth = θ_0`.
pub fn base_angle(z: &SolenoidPoint) -> RationalAngle {
    let k = BigInt::from(z.n).pow(z.depth() as u32);
    z.coords[z.depth()].scale(&k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ang(p: i64, q: i64) -> RationalAngle {
        RationalAngle::new(p, q).unwrap()
    }

    /// θ_k = 1/(3·2^k)
    fn thirds(depth: usize) -> SolenoidPoint {
        let coords = (0..=depth).map(|k| ang(1, 3 << k)).collect();
        SolenoidPoint::new(2, coords).unwrap()
    }

    #[test]
    fn angles_normalize() {
        assert_eq!(ang(7, 6), ang(1, 6));
        assert_eq!(ang(-1, 3), ang(2, 3));
        assert_eq!(ang(4, -6), ang(1, 3));
        assert_eq!(ang(5, 5), RationalAngle::zero());
        assert!(RationalAngle::new(1, 0).is_err());
        assert_eq!(ang(-1, 3).to_string(), "2/3");
    }

    #[test]
    fn pairing_examples() {
        let z = thirds(3);
        assert!(pairing(&z, &DyadicRational::zero()).unwrap().is_zero());
        assert_eq!(pairing(&z, &DyadicRational::new(1, 1)).unwrap(), ang(1, 6));
        assert_eq!(pairing(&z, &DyadicRational::new(2, 1)).unwrap(), ang(1, 3));
        assert_eq!(pairing(&z, &DyadicRational::new(1, 0)).unwrap(), ang(1, 3));
        assert_eq!(
            pairing(&z, &DyadicRational::new(1, 4)),
            Err(Error::DepthExceeded { depth: 3, needed: 4 })
        );
    }

    #[test]
    fn compatibility_is_enforced() {
        assert!(SolenoidPoint::new(2, vec![ang(1, 3), ang(1, 3)]).is_err());
        assert!(SolenoidPoint::new(2, vec![ang(1, 3), ang(2, 3)]).is_ok());
        assert!(SolenoidPoint::new(0, vec![ang(0, 1)]).is_err());
        assert!(SolenoidPoint::new(2, vec![]).is_err());
    }

    #[test]
    fn shift_examples() {
        let z = SolenoidPoint::new(2, vec![ang(0, 1); 4]).unwrap();
        let s = dual_shift(&z).unwrap();
        assert_eq!(s.depth(), 2);
        assert!(s.coords().iter().all(RationalAngle::is_zero));

        let z = SolenoidPoint::new(2, vec![ang(1, 3), ang(1, 6), ang(7, 12)]).unwrap();
        assert_eq!(dual_shift(&z).unwrap().coords(), &[ang(1, 6), ang(7, 12)]);

        let z = SolenoidPoint::new(3, vec![ang(0, 1), ang(1, 3)]).unwrap();
        assert_eq!(dual_shift(&z).unwrap().coords(), &[ang(1, 3)]);

        let z = SolenoidPoint::new(3, vec![ang(0, 1)]).unwrap();
        assert!(matches!(dual_shift(&z), Err(Error::DepthExceeded { .. })));
    }

    #[test]
    fn double_shift() {
        let z = random_point(5, 6, 11).unwrap();
        let twice = dual_shift(&dual_shift(&z).unwrap()).unwrap();
        assert_eq!(twice.coords(), &z.coords()[2..]);
    }

    #[test]
    fn intertwining_on_examples() {
        let z = thirds(4);
        for m in -5..=5 {
            for l in 0..4 {
                assert!(duality_check(&z, &DyadicRational::new(m, l)).unwrap());
            }
        }
        assert!(duality_check(&z, &DyadicRational::zero()).unwrap());
        assert!(matches!(
            duality_check(&z, &DyadicRational::new(1, 4)),
            Err(Error::DepthExceeded { .. })
        ));
    }

    #[test]
    fn shift_is_not_dual_to_multiplication_on_the_same_side() {
        // (α̂z, x) = m·θ_{l+1} is the pairing with x/n, not with n·x
        let z = thirds(3);
        let x = DyadicRational::new(1, 1);
        let shifted = pairing(&dual_shift(&z).unwrap(), &x).unwrap();
        assert_eq!(shifted, ang(1, 12));
        assert_eq!(pairing(&z, &x.times_n(2)).unwrap(), ang(1, 3));
        assert_eq!(pairing(&z, &DyadicRational::new(1, 2)).unwrap(), shifted);
    }

    #[test]
    fn random_points() {
        let z = random_point(2, 0, 1).unwrap();
        assert_eq!(z.depth(), 0);
        assert_eq!(random_point(2, 5, 42).unwrap(), random_point(2, 5, 42).unwrap());
        let z = random_point(5, 4, 9).unwrap();
        let five = BigInt::from(5);
        for k in 0..4 {
            assert_eq!(z.coords()[k + 1].scale(&five), z.coords()[k]);
        }
        assert_eq!(base_angle(&z), z.coords()[0]);
        for n in [-2, -1, 1, 3] {
            assert!(random_point(n, 6, 3).is_ok());
        }
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(DyadicRational::new(12, 3).canonical(2), DyadicRational::new(3, 1));
        assert_eq!(DyadicRational::new(0, 5).canonical(3), DyadicRational::zero());
        assert_eq!(DyadicRational::new(7, 2).canonical(-1), DyadicRational::new(7, 0));
        assert_eq!(DyadicRational::new(4, 1).canonical(-2), DyadicRational::new(-2, 0));
        let x = DyadicRational::new(5, 2);
        assert_eq!(x.to_rational(3), x.expanded(3, 5).to_rational(3));
    }

    #[test]
    fn identities_hold() {
        for n in [2, 3, 5, -2, -1] {
            let t = check_pairing_identities(n, 6, 7, 100).unwrap();
            assert!(t.all_passed(), "{:?}", t.failures);
            assert_eq!((t.passed, t.skipped), (300, 0));
        }
    }

    #[test]
    fn shallow_points_skip() {
        let t = check_pairing_identities(2, 0, 1, 10).unwrap();
        assert!(t.all_passed());
        assert_eq!((t.passed, t.skipped), (10, 20));
    }
}
