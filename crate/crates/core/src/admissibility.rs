//! Exact admissible ranges of the power `p` for the five global existence
//! theorems, with a per-condition breakdown.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{exponent_formula, EstimateId, EstimateSpec, ExponentInputs, Source, Target, TimeRegime};
use crate::model::{kappa1, kappa2, ModelError, ModelParams, NormSetup};
use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdmissibilityError {
    #[error("{theorem} requires {gate} (got s = {s})")]
    Gate {
        theorem: TheoremId,
        gate: &'static str,
        s: Rational,
    },
    #[error("{0} needs the regularity index s")]
    MissingS(TheoremId),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}: no admissible p, decay rates are not asserted")]
    EmptyAdmissibility(TheoremId),
}

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    /// `|u|^p`, `s = 2δ`
    T2_1,
    /// `|u|^p`, `0 < s < 2δ`
    T2_2,
    /// `|u|^p`, `2δ < s ≤ 2δ + n/q`
    T2_3,
    /// `|u|^p`, `s > 2δ + n/q`
    T2_4,
    /// `|u_t|^p`, `s > 2δ + n/q`
    T2_5,
}

impl TheoremId {
    pub const ALL: [TheoremId; 5] = [Self::T2_1, Self::T2_2, Self::T2_3, Self::T2_4, Self::T2_5];

    /// Whether the nonlinearity is `|u_t|^p` rather than `|u|^p`.
    pub fn acts_on_velocity(self) -> bool {
        self == Self::T2_5
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::T2_1 => "T2_1",
            Self::T2_2 => "T2_2",
            Self::T2_3 => "T2_3",
            Self::T2_4 => "T2_4",
            Self::T2_5 => "T2_5",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for TheoremId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|t| t.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown theorem `{s}` (expected T2_1 .. T2_5)"))
    }
}

/// Interval endpoint; an infinite lower end is `-∞`, an infinite upper end `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Finite(Rational),
    Infinite,
}

/// Non-empty interval of rationals. Infinite ends are always open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalInterval {
    pub lower: Endpoint,
    pub upper: Endpoint,
    pub lower_open: bool,
    pub upper_open: bool,
}

impl RationalInterval {
    pub const LINE: RationalInterval = RationalInterval {
        lower: Endpoint::Infinite,
        upper: Endpoint::Infinite,
        lower_open: true,
        upper_open: true,
    };

    /// `None` when the described set is empty.
    pub fn new(lower: Endpoint, lower_open: bool, upper: Endpoint, upper_open: bool) -> Option<Self> {
        let lower_open = lower_open || lower == Endpoint::Infinite;
        let upper_open = upper_open || upper == Endpoint::Infinite;
        if let (Endpoint::Finite(a), Endpoint::Finite(b)) = (lower, upper) {
            if a > b || (a == b && (lower_open || upper_open)) {
                return None;
            }
        }
        Some(Self {
            lower,
            upper,
            lower_open,
            upper_open,
        })
    }

    /// `(a, ∞)`
    pub fn above(a: Rational) -> Self {
        Self::new(Endpoint::Finite(a), true, Endpoint::Infinite, true).expect("half line")
    }

    /// `[a, ∞)`
    pub fn at_least(a: Rational) -> Self {
        Self::new(Endpoint::Finite(a), false, Endpoint::Infinite, true).expect("half line")
    }

    /// `[a, b]`, empty when `a > b`.
    pub fn closed(a: Rational, b: Rational) -> Option<Self> {
        Self::new(Endpoint::Finite(a), false, Endpoint::Finite(b), false)
    }

    pub fn contains(&self, p: Rational) -> bool {
        let above = match self.lower {
            Endpoint::Infinite => true,
            Endpoint::Finite(a) => p > a || (p == a && !self.lower_open),
        };
        let below = match self.upper {
            Endpoint::Infinite => true,
            Endpoint::Finite(b) => p < b || (p == b && !self.upper_open),
        };
        above && below
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let (lower, lower_open) = match (self.lower, other.lower) {
            (Endpoint::Infinite, _) => (other.lower, other.lower_open),
            (_, Endpoint::Infinite) => (self.lower, self.lower_open),
            (Endpoint::Finite(a), Endpoint::Finite(b)) => {
                if a > b {
                    (self.lower, self.lower_open)
                } else if b > a {
                    (other.lower, other.lower_open)
                } else {
                    (self.lower, self.lower_open || other.lower_open)
                }
            }
        };
        let (upper, upper_open) = match (self.upper, other.upper) {
            (Endpoint::Infinite, _) => (other.upper, other.upper_open),
            (_, Endpoint::Infinite) => (self.upper, self.upper_open),
            (Endpoint::Finite(a), Endpoint::Finite(b)) => {
                if a < b {
                    (self.upper, self.upper_open)
                } else if b < a {
                    (other.upper, other.upper_open)
                } else {
                    (self.upper, self.upper_open || other.upper_open)
                }
            }
        };
        Self::new(lower, lower_open, upper, upper_open)
    }

    pub fn lower_value(&self) -> Option<Rational> {
        match self.lower {
            Endpoint::Finite(a) => Some(a),
            Endpoint::Infinite => None,
        }
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lower_open { '(' } else { '[' };
        let close = if self.upper_open { ')' } else { ']' };
        let lo = match self.lower {
            Endpoint::Finite(a) => a.to_string(),
            Endpoint::Infinite => "-inf".into(),
        };
        let hi = match self.upper {
            Endpoint::Finite(b) => b.to_string(),
            Endpoint::Infinite => "inf".into(),
        };
        write!(f, "{open}{lo}, {hi}{close}")
    }
}

/// Renders an optional interval, `None` being the empty set.
pub fn display_set(set: &Option<RationalInterval>) -> String {
    match set {
        Some(i) => i.to_string(),
        None => "empty".into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub formula: String,
    /// Values of `p` allowed by this condition alone; `None` if none are.
    pub set: Option<RationalInterval>,
    pub display: String,
}

impl Condition {
    fn new(name: &str, formula: String, set: Option<RationalInterval>) -> Self {
        Self {
            name: name.into(),
            formula,
            display: display_set(&set),
            set,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub n: u32,
    pub sigma: Rational,
    pub delta: Rational,
    pub q: Rational,
    pub m: Rational,
    pub s: Rational,
    pub kappa: Rational,
    pub conditions: Vec<Condition>,
    /// Intersection of all condition sets.
    pub result: Option<RationalInterval>,
    pub result_display: String,
    pub notes: Vec<String>,
}

impl TheoremReport {
    pub fn is_empty(&self) -> bool {
        self.result.is_none()
    }
}

fn gate(
    theorem: TheoremId,
    params: &ModelParams,
    setup: &NormSetup,
    s: Option<Rational>,
) -> Result<Rational, AdmissibilityError> {
    let delta = params.exact_params()?.delta;
    let two_delta = delta * 2;
    let sobolev = two_delta + Rational::int(params.n as i128) / setup.q;
    let fail = |gate: &'static str, s: Rational| Err(AdmissibilityError::Gate { theorem, gate, s });
    match theorem {
        TheoremId::T2_1 => match s {
            None => Ok(two_delta),
            Some(s) if s == two_delta => Ok(s),
            Some(s) => fail("s = 2 delta", s),
        },
        _ => {
            let s = s.ok_or(AdmissibilityError::MissingS(theorem))?;
            let ok = match theorem {
                TheoremId::T2_2 => s > Rational::ZERO && s < two_delta,
                TheoremId::T2_3 => s > two_delta && s <= sobolev,
                _ => s > sobolev,
            };
            if ok {
                Ok(s)
            } else {
                fail(
                    match theorem {
                        TheoremId::T2_2 => "0 < s < 2 delta",
                        TheoremId::T2_3 => "2 delta < s <= 2 delta + n/q",
                        _ => "s > 2 delta + n/q",
                    },
                    s,
                )
            }
        }
    }
}

/// Exact admissible set of `p` for `theorem`. `s` may be omitted for `T2_1`.
pub fn admissible_p(
    theorem: TheoremId,
    params: &ModelParams,
    setup: &NormSetup,
    s: Option<Rational>,
) -> Result<TheoremReport, AdmissibilityError> {
    let e = params.exact_params()?;
    if !setup.is_mixed() {
        return Err(ModelError::MOutOfRange { m: setup.m, q: setup.q }.into());
    }
    let s = gate(theorem, params, setup, s)?;
    let (q, m, delta) = (setup.q, setup.m, e.delta);
    let n = Rational::int(params.n as i128);
    let one = Rational::ONE;
    let mut notes = Vec::new();
    let mut conditions = Vec::new();

    let velocity = theorem.acts_on_velocity();
    let kappa = if velocity {
        kappa2(params, setup)?
    } else {
        kappa1(params, setup)?
    };
    let kname = if velocity { "kappa2" } else { "kappa1" };

    // p > 1 + max{2mδ(1+κ), n - (m/q)n + m·x} / (n - 2mδκ)
    let (shift, shift_text) = match theorem {
        TheoremId::T2_1 => (delta * 2, "2 m delta"),
        TheoremId::T2_5 => (s - e.sigma, "m (s - sigma)"),
        _ => (s, "m s"),
    };
    let first = m * delta * 2 * (one + kappa);
    let second = n - m / q * n + m * shift;
    let denominator = n - m * delta * 2 * kappa;
    let exponent_formula = format!(
        "p > 1 + max{{2 m delta (1 + {kname}), n - (m/q) n + {shift_text}}} / (n - 2 m delta {kname}) = 1 + max{{{first}, {second}}} / {denominator}"
    );
    let exponent_set = if denominator > Rational::ZERO {
        if first == second {
            notes.push("both branches of the max coincide".into());
        }
        Some(RationalInterval::above(one + first.max(second) / denominator))
    } else {
        notes.push("dimension too small for this theorem".into());
        None
    };
    conditions.push(Condition::new("exponent", exponent_formula, exponent_set));

    match theorem {
        TheoremId::T2_1 | TheoremId::T2_2 => {
            let threshold = if theorem == TheoremId::T2_1 {
                q * delta * 2
            } else {
                q * s
            };
            let upper_n = threshold * q / (q - m);
            let (formula, set) = if n <= threshold {
                (
                    format!("n = {n} <= {threshold}: p in [q/m, inf)"),
                    Some(RationalInterval::at_least(q / m)),
                )
            } else if n <= upper_n {
                let top = n / (n - threshold);
                (
                    format!("n = {n} in ({threshold}, {upper_n}]: p in [q/m, n/(n - {threshold})]"),
                    RationalInterval::closed(q / m, top),
                )
            } else {
                notes.push(format!(
                    "n = {n} exceeds the Gagliardo-Nirenberg dimension range (.., {upper_n}]"
                ));
                (format!("n = {n} > {upper_n}: no admissible p"), None)
            };
            conditions.push(Condition::new("gagliardo_nirenberg", formula, set));
        }
        TheoremId::T2_3 => {
            let qs = q * s;
            let upper_n = qs + m * q * delta * 2 / (q - m);
            let (formula, set) = if n <= qs {
                (
                    format!("n = {n} <= qs = {qs}: p in [q/m, inf)"),
                    Some(RationalInterval::at_least(q / m)),
                )
            } else if n <= upper_n {
                let top = one + q * delta * 2 / (n - qs);
                (
                    format!("n = {n} in ({qs}, {upper_n}]: p in [q/m, 1 + 2 q delta/(n - qs)]"),
                    RationalInterval::closed(q / m, top),
                )
            } else {
                notes.push(format!(
                    "n = {n} exceeds the Gagliardo-Nirenberg dimension range (.., {upper_n}]"
                ));
                (format!("n = {n} > {upper_n}: no admissible p"), None)
            };
            conditions.push(Condition::new("gagliardo_nirenberg", formula, set));
            notes.push(
                "the dimension range of the Gagliardo-Nirenberg condition is printed without `n in`; read as n in (qs, qs + 2mq delta/(q - m)]"
                    .into(),
            );
            let k = (s - delta * 2).ceil();
            conditions.push(Condition::new(
                "chain_rule",
                format!("p > 1 + ceil(s - 2 delta) = {}", 1 + k),
                Some(RationalInterval::above(Rational::int(1 + k))),
            ));
        }
        TheoremId::T2_4 | TheoremId::T2_5 => {
            conditions.push(Condition::new(
                "gagliardo_nirenberg",
                "p in [q/m, inf)".into(),
                Some(RationalInterval::at_least(q / m)),
            ));
            let bound = m * delta * 2 * kappa;
            conditions.push(Condition::new(
                "dimension",
                format!("n > 2 m delta {kname} = {bound}"),
                if n > bound { Some(RationalInterval::LINE) } else { None },
            ));
            let lower = one + s - delta * 2;
            conditions.push(Condition::new(
                "fractional_powers",
                format!("p > 1 + s - 2 delta = {lower}"),
                Some(RationalInterval::above(lower)),
            ));
        }
    }

    let mut result = Some(RationalInterval::LINE);
    for c in &conditions {
        result = match (result, c.set) {
            (Some(acc), Some(set)) => acc.intersect(&set),
            _ => None,
        };
    }
    Ok(TheoremReport {
        theorem,
        n: params.n,
        sigma: e.sigma,
        delta: e.delta,
        q,
        m,
        s,
        kappa,
        result_display: display_set(&result),
        conditions,
        result,
        notes,
    })
}

/// Decay exponent of one solution channel, in powers of `1 + t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelExponent {
    /// `u`, `|D|^a u`, `u_t` or `|D|^a u_t`
    pub channel: String,
    pub target: Target,
    /// Derivative order `a`.
    pub order: Rational,
    pub exponent: Rational,
}

/// Channels of the solution norm used by `theorem`, without checking
/// admissibility of any `p`.
pub fn theorem_channels(
    theorem: TheoremId,
    params: &ModelParams,
    setup: &NormSetup,
    s: Option<Rational>,
) -> Result<Vec<ChannelExponent>, AdmissibilityError> {
    let e = params.exact_params()?;
    let s = gate(theorem, params, setup, s)?;
    let two_delta = e.delta * 2;
    let channels: Vec<(Target, Rational)> = match theorem {
        TheoremId::T2_1 => vec![
            (Target::U, Rational::ZERO),
            (Target::U, e.sigma),
            (Target::Ut, Rational::ZERO),
            (Target::U, two_delta),
        ],
        TheoremId::T2_2 => vec![(Target::U, Rational::ZERO), (Target::U, s)],
        _ => vec![
            (Target::U, Rational::ZERO),
            (Target::U, s),
            (Target::Ut, Rational::ZERO),
            (Target::Ut, s - two_delta),
        ],
    };
    let inputs = |a| ExponentInputs {
        sigma: e.sigma,
        delta: e.delta,
        n: params.n,
        inv_r: Some(setup.inv_r),
        a,
        visco: e.sigma == e.delta,
    };
    channels
        .into_iter()
        .map(|(target, order)| {
            // every channel is governed by the u₁ column of the combined estimate
            let spec = EstimateSpec::solution(EstimateId::Combined, Source::U1, target, TimeRegime::LargeT);
            let exponent = exponent_formula(&spec, &inputs(order))
                .ok()
                .and_then(|x| x.power())
                .expect("combined estimate is a power for every regime");
            let base = if target == Target::U { "u" } else { "u_t" };
            let channel = if order.is_zero() {
                base.to_string()
            } else {
                format!("|D|^{order} {base}")
            };
            Ok(ChannelExponent {
                channel,
                target,
                order,
                exponent,
            })
        })
        .collect()
}

/// Decay exponents asserted by `theorem`; fails when no `p` is admissible.
pub fn decay_rate_bundle(
    theorem: TheoremId,
    params: &ModelParams,
    setup: &NormSetup,
    s: Option<Rational>,
) -> Result<Vec<ChannelExponent>, AdmissibilityError> {
    if admissible_p(theorem, params, setup, s)?.is_empty() {
        return Err(AdmissibilityError::EmptyAdmissibility(theorem));
    }
    theorem_channels(theorem, params, setup, s)
}
