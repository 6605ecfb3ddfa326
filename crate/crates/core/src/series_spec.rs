//! Symbolic series descriptions and their text form.
//!
//! ```text
//! spec := zeta | zeta-minus-one | power:t=<real> | g:r=<real> | ci:r=<real>
//!       | cii:r=<real> | kalmar:m=<int> | recip:alpha=<real>,base=<spec>
//!       | conv(<spec>,<spec>)
//! ```
//!
//! `recip` always drops the unit coefficient of its base, so
//! `recip:alpha=1,base=conv(zeta,zeta)` is `1 / (2 - zeta^2)`.

use std::fmt;
use std::str::FromStr;

use crate::constructions::{
    check_r, construction_i_coeffs, construction_ii_coeffs, exact_radical_power, g_coeffs,
    growth_envelope, kalmar_dm_coeffs, prime_weight,
};
use crate::error::{DsError, Result};
use crate::series::{
    dirichlet_convolve, ones, power_shift, reciprocal_coeffs, CoefficientSequence, Envelope, Payload,
};
use crate::support::SmoothSupport;
use crate::zeta::zeta_real;

#[derive(Debug, Clone, PartialEq)]
pub enum SeriesSpec {
    Zeta,
    ZetaMinusOne,
    Power { t: f64 },
    G { r: f64 },
    ConstructionI { r: f64 },
    ConstructionII { r: f64 },
    Kalmar { m: u32 },
    Reciprocal { alpha: f64, base: Box<SeriesSpec> },
    Conv(Box<SeriesSpec>, Box<SeriesSpec>),
}

impl fmt::Display for SeriesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesSpec::Zeta => write!(f, "zeta"),
            SeriesSpec::ZetaMinusOne => write!(f, "zeta-minus-one"),
            SeriesSpec::Power { t } => write!(f, "power:t={t}"),
            SeriesSpec::G { r } => write!(f, "g:r={r}"),
            SeriesSpec::ConstructionI { r } => write!(f, "ci:r={r}"),
            SeriesSpec::ConstructionII { r } => write!(f, "cii:r={r}"),
            SeriesSpec::Kalmar { m } => write!(f, "kalmar:m={m}"),
            SeriesSpec::Reciprocal { alpha, base } => write!(f, "recip:alpha={alpha},base={base}"),
            SeriesSpec::Conv(a, b) => write!(f, "conv({a},{b})"),
        }
    }
}

impl FromStr for SeriesSpec {
    type Err = DsError;

    fn from_str(s: &str) -> Result<Self> {
        let mut parser = Parser { text: s, pos: 0 };
        if s.trim().is_empty() {
            return Err(parser.error("empty series spec"));
        }
        let spec = parser.spec()?;
        if parser.pos != s.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        spec.validate()?;
        Ok(spec)
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> DsError {
        DsError::Parse { position: self.pos, message: message.into() }
    }

    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            Ok(())
        } else {
            Err(self.error(format!("expected '{token}'")))
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &str {
        let start = self.pos;
        let len = self.rest().find(|c: char| !pred(c)).unwrap_or(self.rest().len());
        self.pos += len;
        &self.text[start..self.pos]
    }

    fn number<T: FromStr>(&mut self) -> Result<T> {
        let start = self.pos;
        let raw = self.take_while(|c| c.is_ascii_digit() || "+-.eE".contains(c));
        raw.parse().map_err(|_| DsError::Parse {
            position: start,
            message: format!("invalid number '{raw}'"),
        })
    }

    fn spec(&mut self) -> Result<SeriesSpec> {
        let start = self.pos;
        let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-').to_string();
        let spec = match name.as_str() {
            "zeta" => SeriesSpec::Zeta,
            "zeta-minus-one" => SeriesSpec::ZetaMinusOne,
            "power" => {
                self.expect(":t=")?;
                SeriesSpec::Power { t: self.number()? }
            }
            "g" => {
                self.expect(":r=")?;
                SeriesSpec::G { r: self.number()? }
            }
            "ci" => {
                self.expect(":r=")?;
                SeriesSpec::ConstructionI { r: self.number()? }
            }
            "cii" => {
                self.expect(":r=")?;
                SeriesSpec::ConstructionII { r: self.number()? }
            }
            "kalmar" => {
                self.expect(":m=")?;
                SeriesSpec::Kalmar { m: self.number()? }
            }
            "recip" => {
                self.expect(":alpha=")?;
                let alpha = self.number()?;
                self.expect(",base=")?;
                SeriesSpec::Reciprocal { alpha, base: Box::new(self.spec()?) }
            }
            "conv" => {
                self.expect("(")?;
                let a = self.spec()?;
                self.expect(",")?;
                let b = self.spec()?;
                self.expect(")")?;
                SeriesSpec::Conv(Box::new(a), Box::new(b))
            }
            "" => return Err(self.error("expected a series name")),
            other => {
                return Err(DsError::Parse { position: start, message: format!("unknown series '{other}'") })
            }
        };
        Ok(spec)
    }
}

impl SeriesSpec {
    /// Parameter-range checks.
    pub fn validate(&self) -> Result<()> {
        match self {
            SeriesSpec::Zeta | SeriesSpec::ZetaMinusOne => Ok(()),
            SeriesSpec::Power { t } if t.is_finite() => Ok(()),
            SeriesSpec::Power { t } => Err(DsError::invalid(format!("power exponent must be finite, got {t}"))),
            SeriesSpec::G { r } | SeriesSpec::ConstructionI { r } | SeriesSpec::ConstructionII { r } => check_r(*r),
            SeriesSpec::Kalmar { m } if *m >= 1 => Ok(()),
            SeriesSpec::Kalmar { .. } => Err(DsError::invalid("kalmar m must be >= 1")),
            SeriesSpec::Reciprocal { alpha, base } => {
                if !(*alpha > 0.0) || !alpha.is_finite() {
                    return Err(DsError::invalid(format!("alpha must be a positive real, got {alpha}")));
                }
                base.validate()
            }
            SeriesSpec::Conv(a, b) => {
                a.validate()?;
                b.validate()
            }
        }
    }

    /// Base `g` of a reciprocal, or the series itself.
    pub fn reciprocal_base(&self) -> &SeriesSpec {
        match self {
            SeriesSpec::Reciprocal { base, .. } => base,
            other => other,
        }
    }

    /// Dense coefficients `a_1..a_n`.
    pub fn materialize(&self, n: usize) -> Result<CoefficientSequence> {
        self.validate()?;
        let seq = match self {
            SeriesSpec::Zeta => ones(n)?,
            SeriesSpec::ZetaMinusOne => ones(n)?.without_unit(),
            SeriesSpec::Power { t } => power_shift(*t, n)?,
            SeriesSpec::G { r } => g_coeffs(*r, n)?,
            SeriesSpec::ConstructionI { r } => construction_i_coeffs(*r, n)?,
            SeriesSpec::ConstructionII { r } => construction_ii_coeffs(*r, n)?,
            SeriesSpec::Kalmar { m } => kalmar_dm_coeffs(*m, n)?,
            SeriesSpec::Reciprocal { alpha, base } => {
                reciprocal_coeffs(*alpha, &base.materialize(n)?.without_unit(), n)?
            }
            SeriesSpec::Conv(a, b) => dirichlet_convolve(&a.materialize(n)?, &b.materialize(n)?, n)?,
        };
        let relabeled = match seq.payload().clone() {
            Payload::Exact(v) => CoefficientSequence::from_exact(v, self.to_string()),
            Payload::Real(v) => CoefficientSequence::from_real(v, self.to_string()),
        };
        Ok(match self.envelope() {
            Some(e) => relabeled.with_envelope(e),
            None => relabeled,
        })
    }

    /// Coefficients at the elements of a smooth support, same payload rules as
    /// [`SeriesSpec::materialize`].
    pub fn coeffs_on(&self, support: &SmoothSupport) -> Result<Payload> {
        self.validate()?;
        let elements = support.elements();
        let primes = support.primes();
        let present = |i: usize| {
            support.exponents(i).iter().zip(primes).filter(|(&e, _)| e > 0).map(|(_, &p)| p)
        };
        Ok(match self {
            SeriesSpec::Zeta => Payload::Exact(vec![1; elements.len()]),
            SeriesSpec::ZetaMinusOne => {
                let mut v = vec![1; elements.len()];
                v[0] = 0;
                Payload::Exact(v)
            }
            SeriesSpec::Power { t } => Payload::Real(elements.iter().map(|&j| (t * (j as f64).ln()).exp()).collect()),
            SeriesSpec::G { r } => Payload::Real(g_on(support, *r)),
            SeriesSpec::ConstructionI { r } => {
                let shift: Vec<f64> = elements.iter().map(|&j| ((r - 1.0) * (j as f64).ln()).exp()).collect();
                let mut one_plus_g = g_on(support, *r);
                one_plus_g[0] = 1.0;
                Payload::Real(support.convolve(&shift, &one_plus_g)?)
            }
            SeriesSpec::ConstructionII { r } => match exact_radical_power(*r, support.limit()) {
                Some(k) => Payload::Exact(
                    (0..elements.len()).map(|i| (present(i).product::<u64>() as i128).pow(k)).collect(),
                ),
                None => Payload::Real(
                    (0..elements.len()).map(|i| present(i).map(|p| prime_weight(p, *r)).product()).collect(),
                ),
            },
            SeriesSpec::Kalmar { m } => {
                let one = vec![1i128; elements.len()];
                let mut power = one.clone();
                for _ in 1..*m {
                    power = support.convolve(&power, &one)?;
                }
                power[0] = 0;
                Payload::Exact(support.reciprocal(&power, |acc, first| if first { 1 } else { acc })?)
            }
            SeriesSpec::Reciprocal { alpha, base } => match (base.coeffs_on(support)?, *alpha == 1.0) {
                (Payload::Exact(mut b), true) => {
                    b[0] = 0;
                    Payload::Exact(support.reciprocal(&b, |acc, first| if first { 1 } else { acc })?)
                }
                (b, _) => {
                    let mut b = b.to_f64_vec();
                    b[0] = 0.0;
                    let alpha = *alpha;
                    Payload::Real(support.reciprocal(&b, |acc, first| if first { 1.0 / alpha } else { acc / alpha })?)
                }
            },
            SeriesSpec::Conv(a, b) => match (a.coeffs_on(support)?, b.coeffs_on(support)?) {
                (Payload::Exact(x), Payload::Exact(y)) => Payload::Exact(support.convolve(&x, &y)?),
                (x, y) => Payload::Real(support.convolve(&x.to_f64_vec(), &y.to_f64_vec())?),
            },
        })
    }

    /// Closed-form growth envelope `|a_n| <= scale n^exponent`, when known.
    pub fn envelope(&self) -> Option<Envelope> {
        match self {
            SeriesSpec::Zeta | SeriesSpec::ZetaMinusOne => Some(Envelope::UNIT),
            SeriesSpec::Power { t } => Some(Envelope { scale: 1.0, exponent: *t }),
            SeriesSpec::G { r } | SeriesSpec::ConstructionII { r } => Some(growth_envelope(*r)),
            _ => None,
        }
    }

    /// Value of the full series at real `sigma` when a closed form exists;
    /// `+inf` on the divergent side.
    pub fn eval_real(&self, sigma: f64) -> Option<f64> {
        let zeta = |x: f64| zeta_real(x).unwrap_or(f64::INFINITY);
        match self {
            SeriesSpec::Zeta => Some(zeta(sigma)),
            SeriesSpec::ZetaMinusOne => Some(zeta(sigma) - 1.0),
            SeriesSpec::Power { t } => Some(zeta(sigma - t)),
            SeriesSpec::Kalmar { m } => {
                let z = zeta(sigma).powi(*m as i32);
                Some(if z < 2.0 { 1.0 / (2.0 - z) } else { f64::INFINITY })
            }
            SeriesSpec::Conv(a, b) => Some(a.eval_real(sigma)? * b.eval_real(sigma)?),
            SeriesSpec::Reciprocal { alpha, base } => {
                let unit = base.materialize(1).ok()?.get(1);
                let rest = alpha - (base.eval_real(sigma)? - unit);
                Some(if rest > 0.0 { 1.0 / rest } else { f64::INFINITY })
            }
            SeriesSpec::G { .. } | SeriesSpec::ConstructionI { .. } | SeriesSpec::ConstructionII { .. } => None,
        }
    }

    /// Abscissa of absolute convergence when it is known in closed form.
    pub fn known_abscissa(&self) -> Option<f64> {
        match self {
            SeriesSpec::Zeta | SeriesSpec::ZetaMinusOne => Some(1.0),
            SeriesSpec::Power { t } => Some(t + 1.0),
            _ => None,
        }
    }
}

fn g_on(support: &SmoothSupport, r: f64) -> Vec<f64> {
    (0..support.len())
        .map(|i| {
            let mut nonzero = support.exponents(i).iter().zip(support.primes()).filter(|(&e, _)| e > 0);
            match (nonzero.next(), nonzero.next()) {
                (Some((_, &p)), None) => prime_weight(p, r),
                _ => 0.0,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::SmoothBound;

    fn parse(s: &str) -> SeriesSpec {
        s.parse().unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse("zeta"), SeriesSpec::Zeta);
        assert_eq!(parse("ci:r=0.5"), SeriesSpec::ConstructionI { r: 0.5 });
        let recip = parse("recip:alpha=1,base=conv(zeta,zeta)");
        let k2 = parse("kalmar:m=2");
        assert_eq!(recip.materialize(2).unwrap().get(2), k2.materialize(2).unwrap().get(2));
        assert_eq!(recip.materialize(200).unwrap().as_exact(), k2.materialize(200).unwrap().as_exact());
    }

    #[test]
    fn canonical_forms_round_trip() {
        for text in [
            "zeta",
            "zeta-minus-one",
            "power:t=-2",
            "power:t=0.5",
            "g:r=1.5",
            "ci:r=0.5",
            "cii:r=2",
            "kalmar:m=2",
            "recip:alpha=1,base=zeta-minus-one",
            "recip:alpha=1,base=conv(zeta,zeta)",
            "conv(recip:alpha=2.5,base=g:r=0.25,zeta)",
        ] {
            assert_eq!(parse(text).to_string(), text);
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        match "zeta2".parse::<SeriesSpec>() {
            Err(DsError::Parse { position, .. }) => assert_eq!(position, 0),
            other => panic!("{other:?}"),
        }
        match "conv(zeta,bogus)".parse::<SeriesSpec>() {
            Err(DsError::Parse { position, message }) => {
                assert_eq!(position, 10);
                assert!(message.contains("bogus"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!("ci:r=abc".parse::<SeriesSpec>(), Err(DsError::Parse { position: 5, .. })));
        assert!(matches!("".parse::<SeriesSpec>(), Err(DsError::Parse { .. })));
        assert!(matches!("conv(zeta,zeta".parse::<SeriesSpec>(), Err(DsError::Parse { .. })));
        assert!(matches!("zeta)".parse::<SeriesSpec>(), Err(DsError::Parse { position: 4, .. })));
    }

    #[test]
    fn range_errors_are_domain_errors() {
        assert!(matches!("ci:r=-1".parse::<SeriesSpec>(), Err(DsError::InvalidArgument(_))));
        assert!(matches!("kalmar:m=0".parse::<SeriesSpec>(), Err(DsError::InvalidArgument(_))));
        assert!(matches!("recip:alpha=0,base=zeta".parse::<SeriesSpec>(), Err(DsError::InvalidArgument(_))));
    }

    #[test]
    fn sparse_matches_dense_on_smooth_support() {
        let limit = 20_000u64;
        let specs = [
            "zeta",
            "zeta-minus-one",
            "power:t=0.5",
            "g:r=1.5",
            "ci:r=0.5",
            "ci:r=2",
            "cii:r=2",
            "cii:r=0.5",
            "kalmar:m=1",
            "kalmar:m=3",
            "recip:alpha=1.5,base=g:r=0.5",
            "conv(zeta,cii:r=2)",
        ];
        for text in specs {
            let spec = parse(text);
            let dense = spec.materialize(limit as usize).unwrap();
            for n in 1..=4 {
                let support = SmoothSupport::new(SmoothBound::new(n).unwrap(), limit).unwrap();
                let sparse = spec.coeffs_on(&support).unwrap();
                assert_eq!(sparse.kind(), dense.kind(), "{text}");
                for (i, &j) in support.elements().iter().enumerate() {
                    let (s, d) = (sparse.get_f64(i), dense.get(j as usize));
                    assert!((s - d).abs() <= 1e-12 * d.abs().max(1.0), "{text} j={j}: {s} vs {d}");
                }
            }
        }
    }

    #[test]
    fn closed_forms() {
        let z = SeriesSpec::Zeta.eval_real(2.0).unwrap();
        assert!((z - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
        assert_eq!(SeriesSpec::Zeta.eval_real(1.0), Some(f64::INFINITY));
        let recip = parse("recip:alpha=1,base=zeta");
        let k1 = parse("kalmar:m=1");
        assert!((recip.eval_real(3.0).unwrap() - k1.eval_real(3.0).unwrap()).abs() < 1e-14);
        assert_eq!(SeriesSpec::G { r: 1.0 }.eval_real(2.0), None);
    }
}
