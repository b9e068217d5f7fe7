use rand::Rng;
use serde::{Deserialize, Serialize};

use super::DistributionError;

/// Tolerance on the mass bookkeeping of a piecewise CDF.
const MASS_TOLERANCE: f64 = 1e-12;

/// Affine piece of a CDF: F rises linearly from `f_lo` at `x_lo` to `f_hi`
/// as x approaches `x_hi` from the left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub x_lo: f64,
    pub x_hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

/// A point carrying positive probability mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub mass: f64,
}

/// JSON shape of a [`PiecewiseCdf`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CdfSpec {
    #[serde(default)]
    pub segments: Vec<Segment>,
    #[serde(default)]
    pub atoms: Vec<Atom>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Piece {
    Atom { x: f64, before: f64, after: f64 },
    Segment(Segment),
}

impl Piece {
    fn location(&self) -> f64 {
        match self {
            Piece::Atom { x, .. } => *x,
            Piece::Segment(s) => s.x_lo,
        }
    }
}

/// Monotone right-continuous CDF made of affine segments and atoms.
///
/// Between pieces F is flat. Total mass is one; F is 0 left of the first
/// piece and 1 right of the last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CdfSpec", into = "CdfSpec")]
pub struct PiecewiseCdf {
    spec: CdfSpec,
    pieces: Vec<Piece>,
    has_atoms: bool,
}

impl From<PiecewiseCdf> for CdfSpec {
    fn from(cdf: PiecewiseCdf) -> Self {
        cdf.spec
    }
}

impl TryFrom<CdfSpec> for PiecewiseCdf {
    type Error = DistributionError;

    fn try_from(spec: CdfSpec) -> Result<Self, Self::Error> {
        PiecewiseCdf::new(spec)
    }
}

fn invalid(pointer: String, message: impl Into<String>) -> DistributionError {
    DistributionError::Invalid { pointer, message: message.into() }
}

impl PiecewiseCdf {
    pub fn new(spec: CdfSpec) -> Result<Self, DistributionError> {
        // (location, atom-first order key, original index)
        let mut order: Vec<(f64, u8, usize)> = Vec::new();
        for (i, s) in spec.segments.iter().enumerate() {
            let p = |f: &str| format!("/segments/{i}/{f}");
            if !s.x_lo.is_finite() {
                return Err(invalid(p("x_lo"), "must be finite"));
            }
            if !(s.x_hi.is_finite() && s.x_hi > s.x_lo) {
                return Err(invalid(p("x_hi"), "must be finite and greater than x_lo"));
            }
            if !(0.0..=1.0).contains(&s.f_lo) {
                return Err(invalid(p("f_lo"), "must lie in [0, 1]"));
            }
            if !(s.f_lo..=1.0).contains(&s.f_hi) {
                return Err(invalid(p("f_hi"), "must lie in [f_lo, 1]"));
            }
            order.push((s.x_lo, 1, i));
        }
        for (i, a) in spec.atoms.iter().enumerate() {
            if !a.x.is_finite() {
                return Err(invalid(format!("/atoms/{i}/x"), "must be finite"));
            }
            if !(a.mass > 0.0 && a.mass <= 1.0 + MASS_TOLERANCE) {
                return Err(invalid(format!("/atoms/{i}/mass"), "must lie in (0, 1]"));
            }
            order.push((a.x, 0, i));
        }
        if order.is_empty() {
            return Err(invalid(String::new(), "a CDF needs at least one segment or atom"));
        }
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut pieces = Vec::with_capacity(order.len());
        let mut cumulative = 0.0;
        // right end of the last segment, and location of the last atom
        let mut frontier = f64::NEG_INFINITY;
        let mut last_atom = f64::NEG_INFINITY;
        for &(_, kind, i) in &order {
            if kind == 0 {
                let a = spec.atoms[i];
                if a.x < frontier || a.x == last_atom {
                    return Err(invalid(
                        format!("/atoms/{i}/x"),
                        "atom overlaps a segment interior or another atom",
                    ));
                }
                last_atom = a.x;
                let after = cumulative + a.mass;
                pieces.push(Piece::Atom { x: a.x, before: cumulative, after });
                cumulative = after;
            } else {
                let s = spec.segments[i];
                if s.x_lo < frontier {
                    return Err(invalid(format!("/segments/{i}/x_lo"), "segments overlap"));
                }
                if (s.f_lo - cumulative).abs() > MASS_TOLERANCE {
                    return Err(invalid(
                        format!("/segments/{i}/f_lo"),
                        format!("expected {cumulative} from the mass to the left"),
                    ));
                }
                frontier = s.x_hi;
                pieces.push(Piece::Segment(s));
                cumulative = s.f_hi;
            }
        }
        if (cumulative - 1.0).abs() > MASS_TOLERANCE {
            return Err(invalid(String::new(), format!("total mass is {cumulative}, expected 1")));
        }
        let has_atoms = !spec.atoms.is_empty();
        Ok(Self { spec, pieces, has_atoms })
    }

    /// Uniform distribution on [lo, hi].
    pub fn uniform(lo: f64, hi: f64) -> Result<Self, DistributionError> {
        Self::new(CdfSpec {
            segments: vec![Segment { x_lo: lo, x_hi: hi, f_lo: 0.0, f_hi: 1.0 }],
            atoms: vec![],
        })
    }

    pub fn spec(&self) -> &CdfSpec {
        &self.spec
    }

    /// True when the CDF has no jumps.
    pub fn is_continuous(&self) -> bool {
        !self.has_atoms
    }

    /// F(x), right-continuous at atoms.
    pub fn eval(&self, x: f64) -> f64 {
        let mut f = 0.0;
        for piece in &self.pieces {
            match *piece {
                Piece::Atom { x: at, after, .. } => {
                    if at > x {
                        break;
                    }
                    f = after;
                }
                Piece::Segment(s) => {
                    if x < s.x_lo {
                        break;
                    }
                    if x >= s.x_hi {
                        f = s.f_hi;
                    } else {
                        return s.f_lo + (x - s.x_lo) / (s.x_hi - s.x_lo) * (s.f_hi - s.f_lo);
                    }
                }
            }
        }
        f
    }

    /// F(x⁻), the limit from the left.
    pub fn eval_left_limit(&self, x: f64) -> f64 {
        let mut f = 0.0;
        for piece in &self.pieces {
            match *piece {
                Piece::Atom { x: at, after, .. } => {
                    if at >= x {
                        break;
                    }
                    f = after;
                }
                Piece::Segment(s) => {
                    if x <= s.x_lo {
                        break;
                    }
                    if x >= s.x_hi {
                        f = s.f_hi;
                    } else {
                        return s.f_lo + (x - s.x_lo) / (s.x_hi - s.x_lo) * (s.f_hi - s.f_lo);
                    }
                }
            }
        }
        f
    }

    /// Generalized inverse inf{x : F(x) >= v} for v in (0, 1].
    pub fn quantile(&self, v: f64) -> f64 {
        let mut last = self.pieces[0].location();
        for piece in &self.pieces {
            match *piece {
                Piece::Atom { x, after, .. } => {
                    if after >= v {
                        return x;
                    }
                    last = x;
                }
                Piece::Segment(s) => {
                    if s.f_hi >= v && s.f_hi > s.f_lo {
                        if s.f_lo >= v {
                            return s.x_lo;
                        }
                        let frac = (v - s.f_lo) / (s.f_hi - s.f_lo);
                        return (s.x_lo + frac * (s.x_hi - s.x_lo)).clamp(s.x_lo, s.x_hi);
                    }
                    last = s.x_hi;
                }
            }
        }
        last
    }

    /// τ = sup{F(x) : F(x) < t}, with the supremum of the empty set taken as 0.
    ///
    /// Writing α = inf{x : F(x) >= t}, the set {F < t} is (-∞, α), so
    /// τ = F(α⁻): equal to t in the continuous range and to the bottom of
    /// the jump when t falls inside an atom's jump (F(α⁻), F(α)].
    pub fn sup_below(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let t = t.min(1.0);
        if !self.has_atoms {
            return t;
        }
        self.eval_left_limit(self.quantile(t)).min(t)
    }

    /// Inverse-CDF draw: v uniform on (0, 1), return inf{x : F(x) >= v}.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let v: f64 = rng.random();
            if v > 0.0 {
                return self.quantile(v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Jump 0 -> 0.5 at x = 0, then F(x) = 0.5 + x on [0, 0.5].
    pub(crate) fn atom_then_ramp() -> PiecewiseCdf {
        PiecewiseCdf::new(CdfSpec {
            segments: vec![Segment { x_lo: 0.0, x_hi: 0.5, f_lo: 0.5, f_hi: 1.0 }],
            atoms: vec![Atom { x: 0.0, mass: 0.5 }],
        })
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let u = PiecewiseCdf::uniform(0.0, 1.0).unwrap();
        assert!((u.eval(0.3) - 0.3).abs() < 1e-15);
        assert_eq!(u.eval(-4.0), 0.0);
        assert_eq!(u.eval(7.0), 1.0);
        let a = atom_then_ramp();
        assert_eq!(a.eval(0.0), 0.5);
        assert_eq!(a.eval(-1e-9), 0.0);
        assert!((a.eval(0.2) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn left_limit_examples() {
        let a = atom_then_ramp();
        assert_eq!(a.eval_left_limit(0.0), 0.0);
        assert!((a.eval_left_limit(0.2) - 0.7).abs() < 1e-15);
        assert_eq!(a.eval_left_limit(3.0), 1.0);
        let u = PiecewiseCdf::uniform(-1.0, 1.0).unwrap();
        for &x in &[-2.0, -1.0, -0.3, 0.0, 0.8, 1.0, 2.0] {
            assert_eq!(u.eval_left_limit(x), u.eval(x));
        }
    }

    #[test]
    fn sup_below_examples() {
        let a = atom_then_ramp();
        assert_eq!(a.sup_below(0.3), 0.0);
        assert_eq!(a.sup_below(0.5), 0.0);
        assert!((a.sup_below(0.7) - 0.7).abs() < 1e-15);
        assert_eq!(a.sup_below(0.0), 0.0);
        let u = PiecewiseCdf::uniform(0.0, 1.0).unwrap();
        for &t in &[0.0, 0.1, 0.5, 0.999, 1.0] {
            assert_eq!(u.sup_below(t), t);
        }
    }

    #[test]
    fn quantile_examples() {
        let a = atom_then_ramp();
        assert_eq!(a.quantile(0.2), 0.0);
        assert_eq!(a.quantile(0.5), 0.0);
        assert!((a.quantile(0.75) - 0.25).abs() < 1e-15);
        assert_eq!(a.quantile(1.0), 0.5);
    }

    #[test]
    fn pure_atom_always_same_value() {
        let cdf = PiecewiseCdf::new(CdfSpec { segments: vec![], atoms: vec![Atom { x: 3.0, mass: 1.0 }] })
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..1000).all(|_| cdf.sample(&mut rng) == 3.0));
    }

    #[test]
    fn rejects_malformed() {
        let bad_mass = CdfSpec {
            segments: vec![Segment { x_lo: 0.0, x_hi: 1.0, f_lo: 0.0, f_hi: 0.9 }],
            atoms: vec![],
        };
        assert!(PiecewiseCdf::new(bad_mass).is_err());
        let overlap = CdfSpec {
            segments: vec![
                Segment { x_lo: 0.0, x_hi: 1.0, f_lo: 0.0, f_hi: 0.5 },
                Segment { x_lo: 0.5, x_hi: 2.0, f_lo: 0.5, f_hi: 1.0 },
            ],
            atoms: vec![],
        };
        assert!(PiecewiseCdf::new(overlap).is_err());
        let inside = CdfSpec {
            segments: vec![Segment { x_lo: 0.0, x_hi: 1.0, f_lo: 0.0, f_hi: 0.5 }],
            atoms: vec![Atom { x: 0.5, mass: 0.5 }],
        };
        assert!(PiecewiseCdf::new(inside).is_err());
        let err = PiecewiseCdf::new(CdfSpec {
            segments: vec![],
            atoms: vec![Atom { x: 0.0, mass: -0.5 }],
        })
        .unwrap_err();
        assert!(matches!(err, DistributionError::Invalid { ref pointer, .. } if pointer == "/atoms/0/mass"));
        assert!(PiecewiseCdf::new(CdfSpec::default()).is_err());
    }

    #[test]
    fn json_round_trip() {
        let a = atom_then_ramp();
        let text = serde_json::to_string(&a).unwrap();
        let back: PiecewiseCdf = serde_json::from_str(&text).unwrap();
        assert_eq!(a, back);
        let bad = r#"{"segments":[{"x_lo":0,"x_hi":1,"f_lo":0,"f_hi":0.5}]}"#;
        assert!(serde_json::from_str::<PiecewiseCdf>(bad).is_err());
    }
}
