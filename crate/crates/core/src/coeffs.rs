//! One period of the coefficient pair (q, ω).
//!
//! Both coefficients are piecewise: every segment is either a constant or a
//! one-sided power `sign * scale * |x - anchor|^exponent` whose anchor sits at
//! one end of the segment. The segments of each coefficient tile `[0, 2π)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Length of the period cell.
pub const PERIOD: f64 = 2.0 * PI;

/// Snapping tolerance for segment endpoints read from documents.
const ENDPOINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn from_value(v: f64) -> Option<Sign> {
        if v == 1.0 {
            Some(Sign::Plus)
        } else if v == -1.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentKind {
    Constant(f64),
    Power {
        scale: f64,
        exponent: f64,
        anchor: f64,
        sign: Sign,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiecewiseSegment {
    pub lo: f64,
    pub hi: f64,
    pub kind: SegmentKind,
}

impl PiecewiseSegment {
    pub fn constant(lo: f64, hi: f64, value: f64) -> Self {
        Self {
            lo,
            hi,
            kind: SegmentKind::Constant(value),
        }
    }

    pub fn power(lo: f64, hi: f64, scale: f64, exponent: f64, anchor: f64, sign: Sign) -> Self {
        Self {
            lo,
            hi,
            kind: SegmentKind::Power {
                scale,
                exponent,
                anchor,
                sign,
            },
        }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, SegmentKind::Constant(_))
    }

    pub fn value(&self, x: f64) -> f64 {
        match self.kind {
            SegmentKind::Constant(v) => v,
            SegmentKind::Power {
                scale,
                exponent,
                anchor,
                sign,
            } => sign.value() * scale * (x - anchor).abs().powf(exponent),
        }
    }

    /// Sign of the coefficient on the open segment (0 for a zero constant).
    pub fn sign(&self) -> f64 {
        match self.kind {
            SegmentKind::Constant(v) => {
                if v > 0.0 {
                    1.0
                } else if v < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            SegmentKind::Power { sign, .. } => sign.value(),
        }
    }

    /// Exact integral over `[a, b]`, a sub-interval of the segment.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match self.kind {
            SegmentKind::Constant(v) => v * (b - a),
            SegmentKind::Power {
                scale,
                exponent,
                anchor,
                sign,
            } => {
                let p = exponent + 1.0;
                let da = (a - anchor).abs().powf(p);
                let db = (b - anchor).abs().powf(p);
                sign.value() * scale * (db - da).abs() / p
            }
        }
    }

    /// Local power-form data `(β, p)` of the segment as seen from the
    /// endpoint `at`: a constant or a power anchored at the far end behaves
    /// like `β = 0` with `p` the one-sided limit of `|value|`.
    fn local_descriptor(&self, at: f64) -> (f64, f64) {
        match self.kind {
            SegmentKind::Constant(v) => (0.0, v.abs()),
            SegmentKind::Power {
                scale,
                exponent,
                anchor,
                ..
            } => {
                if (anchor - at).abs() <= ENDPOINT_TOL {
                    (exponent, scale)
                } else {
                    (0.0, scale * (at - anchor).abs().powf(exponent))
                }
            }
        }
    }

    fn flipped(&self) -> Self {
        let kind = match self.kind {
            SegmentKind::Constant(v) => SegmentKind::Constant(-v),
            SegmentKind::Power {
                scale,
                exponent,
                anchor,
                sign,
            } => SegmentKind::Power {
                scale,
                exponent,
                anchor,
                sign: sign.flip(),
            },
        };
        Self { kind, ..*self }
    }
}

/// A coefficient on one period, stored as an ordered tiling of `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piecewise {
    segments: Vec<PiecewiseSegment>,
}

impl Piecewise {
    pub fn constant(value: f64) -> Self {
        Self {
            segments: vec![PiecewiseSegment::constant(0.0, PERIOD, value)],
        }
    }

    fn new(name: &'static str, mut segments: Vec<PiecewiseSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Tiling {
                coefficient: name,
                detail: "no segments".into(),
            });
        }
        let mut expected = 0.0;
        for seg in segments.iter_mut() {
            if (seg.lo - expected).abs() > ENDPOINT_TOL {
                let detail = if seg.lo > expected {
                    format!("gap between {expected} and {}", seg.lo)
                } else {
                    format!("overlap at {}", seg.lo)
                };
                return Err(Error::Tiling {
                    coefficient: name,
                    detail,
                });
            }
            seg.lo = expected;
            if (seg.hi - PERIOD).abs() <= ENDPOINT_TOL {
                seg.hi = PERIOD;
            }
            if !(seg.hi > seg.lo) || !seg.hi.is_finite() {
                return Err(Error::Tiling {
                    coefficient: name,
                    detail: format!("empty or reversed segment [{}, {})", seg.lo, seg.hi),
                });
            }
            match seg.kind {
                SegmentKind::Constant(v) if !v.is_finite() => {
                    return Err(Error::Schema(format!("non-finite constant {v}")));
                }
                SegmentKind::Power {
                    scale,
                    exponent,
                    anchor,
                    ..
                } => {
                    if !(scale > 0.0) || !scale.is_finite() {
                        return Err(Error::Schema(format!("power scale {scale} must be > 0")));
                    }
                    if !(exponent > -1.0) || !exponent.is_finite() {
                        return Err(Error::NonIntegrable {
                            lo: seg.lo,
                            hi: seg.hi,
                            exponent,
                        });
                    }
                    if anchor > seg.lo + ENDPOINT_TOL && anchor < seg.hi - ENDPOINT_TOL {
                        return Err(Error::Schema(format!(
                            "power anchor {anchor} lies inside [{}, {})",
                            seg.lo, seg.hi
                        )));
                    }
                }
                _ => {}
            }
            expected = seg.hi;
        }
        if expected != PERIOD {
            return Err(Error::Tiling {
                coefficient: name,
                detail: format!("coverage ends at {expected}"),
            });
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[PiecewiseSegment] {
        &self.segments
    }

    pub fn is_piecewise_constant(&self) -> bool {
        self.segments.iter().all(PiecewiseSegment::is_constant)
    }

    /// True when every segment is the constant 0.
    pub fn is_zero(&self) -> bool {
        self.segments
            .iter()
            .all(|s| matches!(s.kind, SegmentKind::Constant(v) if v == 0.0))
    }

    /// Index of the segment containing `x` (reduced to the cell).
    pub fn segment_index(&self, x: f64) -> usize {
        let x = reduce(x);
        self.segments
            .partition_point(|s| s.hi <= x)
            .min(self.segments.len() - 1)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.segments[self.segment_index(x)].value(reduce(x))
    }

    /// Exact integral over the cell.
    pub fn period_integral(&self) -> f64 {
        self.segments.iter().map(|s| s.integral(s.lo, s.hi)).sum()
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.segments.iter().map(|s| s.lo).chain(std::iter::once(PERIOD))
    }

    pub fn min_value(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| match s.kind {
                SegmentKind::Constant(v) => v,
                SegmentKind::Power {
                    scale,
                    exponent,
                    anchor,
                    sign,
                } => {
                    let d_lo = (s.lo - anchor).abs();
                    let d_hi = (s.hi - anchor).abs();
                    let (near, far) = (d_lo.min(d_hi), d_lo.max(d_hi));
                    let a = scale * near.powf(exponent);
                    let b = scale * far.powf(exponent);
                    match sign {
                        Sign::Plus => a.min(b),
                        Sign::Minus => -(a.max(b)),
                    }
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn flipped(&self) -> Self {
        Self {
            segments: self.segments.iter().map(PiecewiseSegment::flipped).collect(),
        }
    }

    /// `x ↦ 2π - x`.
    fn reflected(&self) -> Self {
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|seg| {
                let kind = match seg.kind {
                    SegmentKind::Power {
                        scale,
                        exponent,
                        anchor,
                        sign,
                    } => SegmentKind::Power {
                        scale,
                        exponent,
                        anchor: PERIOD - anchor,
                        sign,
                    },
                    k => k,
                };
                PiecewiseSegment {
                    lo: PERIOD - seg.hi,
                    hi: PERIOD - seg.lo,
                    kind,
                }
            })
            .collect();
        Self { segments }
    }

    fn shifted(&self, delta: f64) -> Result<Self> {
        let delta = delta.rem_euclid(PERIOD);
        let mut out = Vec::new();
        for seg in &self.segments {
            let lo = seg.lo - delta;
            let hi = seg.hi - delta;
            let kind_at = |off: f64| match seg.kind {
                SegmentKind::Power {
                    scale,
                    exponent,
                    anchor,
                    sign,
                } => SegmentKind::Power {
                    scale,
                    exponent,
                    anchor: anchor - delta + off,
                    sign,
                },
                k => k,
            };
            let pieces: Vec<(f64, f64, f64)> = if lo < 0.0 && hi > 0.0 {
                vec![(lo + PERIOD, PERIOD, PERIOD), (0.0, hi, 0.0)]
            } else if hi <= 0.0 {
                vec![(lo + PERIOD, hi + PERIOD, PERIOD)]
            } else {
                vec![(lo, hi, 0.0)]
            };
            if pieces.len() > 1 && !seg.is_constant() {
                return Err(Error::Parameter(format!(
                    "cyclic shift by {delta} would split the power segment [{}, {})",
                    seg.lo, seg.hi
                )));
            }
            for (a, b, off) in pieces {
                if b - a > ENDPOINT_TOL {
                    out.push(PiecewiseSegment {
                        lo: a,
                        hi: b,
                        kind: kind_at(off),
                    });
                }
            }
        }
        out.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for i in 1..out.len() {
            out[i].lo = out[i - 1].hi;
        }
        if let Some(first) = out.first_mut() {
            first.lo = 0.0;
        }
        if let Some(last) = out.last_mut() {
            last.hi = PERIOD;
        }
        Self::new("shifted", out)
    }
}

fn reduce(x: f64) -> f64 {
    if (0.0..PERIOD).contains(&x) {
        x
    } else if x == PERIOD {
        // Right end of the cell belongs to the last segment.
        x
    } else {
        x.rem_euclid(PERIOD)
    }
}

/// A weight sign change on the periodized cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoint {
    pub location: f64,
    pub beta_left: f64,
    pub beta_right: f64,
    pub p_left: f64,
    pub p_right: f64,
    pub simple: bool,
    pub odd_locally: bool,
}

/// Coefficients of `-y'' + q y = z ω y` on one period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicCoefficients {
    pub label: String,
    q: Piecewise,
    w: Piecewise,
    /// Turning-point locations declared non-simple regardless of their
    /// descriptors. Only synthetic fixtures use this.
    non_simple_at: Vec<f64>,
}

impl PeriodicCoefficients {
    pub fn new(
        label: impl Into<String>,
        q_segments: Vec<PiecewiseSegment>,
        w_segments: Vec<PiecewiseSegment>,
    ) -> Result<Self> {
        let q = Piecewise::new("q", q_segments)?;
        let w = Piecewise::new("w", w_segments)?;
        for seg in w.segments() {
            if matches!(seg.kind, SegmentKind::Constant(v) if v == 0.0) {
                return Err(Error::ZeroWeight {
                    lo: seg.lo,
                    hi: seg.hi,
                });
            }
        }
        Ok(Self {
            label: label.into(),
            q,
            w,
            non_simple_at: Vec::new(),
        })
    }

    /// Marks the turning point at `location` as non-simple.
    pub fn with_non_simple_mark(mut self, location: f64) -> Self {
        self.non_simple_at.push(reduce(location));
        self
    }

    pub fn non_simple_marks(&self) -> &[f64] {
        &self.non_simple_at
    }

    pub fn q(&self) -> &Piecewise {
        &self.q
    }

    pub fn w(&self) -> &Piecewise {
        &self.w
    }

    pub fn is_piecewise_constant(&self) -> bool {
        self.q.is_piecewise_constant() && self.w.is_piecewise_constant()
    }

    /// Sorted union of the breakpoints of q and ω, including 0 and 2π.
    pub fn mesh_nodes(&self) -> Vec<f64> {
        let mut nodes: Vec<f64> = self.q.breakpoints().chain(self.w.breakpoints()).collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup_by(|a, b| (*a - *b).abs() <= ENDPOINT_TOL);
        nodes
    }

    /// The same coefficients with ω replaced by 1 (the Hill operator).
    pub fn with_unit_weight(&self) -> Self {
        Self {
            label: format!("{} (unit weight)", self.label),
            q: self.q.clone(),
            w: Piecewise::constant(1.0),
            non_simple_at: Vec::new(),
        }
    }

    /// The same q with ω replaced by -ω.
    pub fn with_flipped_weight(&self) -> Self {
        Self {
            label: format!("{} (flipped)", self.label),
            q: self.q.clone(),
            w: self.w.flipped(),
            non_simple_at: self.non_simple_at.clone(),
        }
    }

    /// The coefficients at `2π - x`.
    pub fn reflected(&self) -> Self {
        Self {
            label: format!("{} (reflected)", self.label),
            q: self.q.reflected(),
            w: self.w.reflected(),
            non_simple_at: self.non_simple_at.iter().map(|&m| reduce(PERIOD - m)).collect(),
        }
    }

    /// Cyclic shift of the cell: the result at `x` equals `self` at `x + delta`.
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        let marks = self
            .non_simple_at
            .iter()
            .map(|&m| (m - delta).rem_euclid(PERIOD))
            .collect();
        Ok(Self {
            label: format!("{} (shifted by {delta})", self.label),
            q: self.q.shifted(delta)?,
            w: self.w.shifted(delta)?,
            non_simple_at: marks,
        })
    }
}

/// `∫₀^{2π} ω(x) dx`, exact for both segment kinds.
pub fn weight_period_integral(coeffs: &PeriodicCoefficients) -> f64 {
    coeffs.w.period_integral()
}

/// Sign changes of ω on the periodized cell, sorted by location.
pub fn detect_turning_points(coeffs: &PeriodicCoefficients) -> Vec<TurningPoint> {
    let segs = coeffs.w.segments();
    let n = segs.len();
    let mut out = Vec::new();
    for i in 0..n {
        // Boundary between segs[i-1] (left) and segs[i] (right); the seam for i = 0.
        let left = &segs[(i + n - 1) % n];
        let right = &segs[i];
        if left.sign() * right.sign() >= 0.0 {
            continue;
        }
        let location = right.lo;
        let at_left = if i == 0 { PERIOD } else { location };
        let (beta_left, p_left) = left.local_descriptor(at_left);
        let (beta_right, p_right) = right.local_descriptor(location);
        let marked = coeffs
            .non_simple_at
            .iter()
            .any(|&m| (m - location).abs() <= 1e-9 || (m - location).abs() >= PERIOD - 1e-9);
        let simple = beta_left > -1.0 && beta_right > -1.0 && !marked;
        let odd_locally = beta_left == beta_right && close(p_left, p_right);
        out.push(TurningPoint {
            location,
            beta_left,
            beta_right,
            p_left,
            p_right,
            simple,
            odd_locally,
        });
    }
    out
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Named models: `sgn_sin`, `shifted_sgn` (parameter `a`) and `const`.
pub fn builtin_model(name: &str, params: &[f64]) -> Result<PeriodicCoefficients> {
    let zero_q = || vec![PiecewiseSegment::constant(0.0, PERIOD, 0.0)];
    match name {
        "sgn_sin" => {
            expect_params(name, params, 0)?;
            PeriodicCoefficients::new(
                "sgn_sin",
                zero_q(),
                vec![
                    PiecewiseSegment::constant(0.0, PI, 1.0),
                    PiecewiseSegment::constant(PI, PERIOD, -1.0),
                ],
            )
        }
        "shifted_sgn" => {
            expect_params(name, params, 1)?;
            let a = params[0];
            if !(0.0..PI).contains(&a) {
                return Err(Error::Parameter(format!("shifted_sgn needs a in [0, pi), got {a}")));
            }
            // sgn(x - a) on (-π, π], periodized onto [0, 2π).
            let mut w = Vec::with_capacity(3);
            if a > 0.0 {
                w.push(PiecewiseSegment::constant(0.0, a, -1.0));
            }
            w.push(PiecewiseSegment::constant(a, PI, 1.0));
            w.push(PiecewiseSegment::constant(PI, PERIOD, -1.0));
            PeriodicCoefficients::new(format!("shifted_sgn(a={a})"), zero_q(), w)
        }
        "const" => {
            expect_params(name, params, 0)?;
            PeriodicCoefficients::new(
                "const",
                zero_q(),
                vec![PiecewiseSegment::constant(0.0, PERIOD, 1.0)],
            )
        }
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

fn expect_params(name: &str, params: &[f64], n: usize) -> Result<()> {
    if params.len() != n {
        return Err(Error::Parameter(format!(
            "{name} takes {n} parameter(s), got {}",
            params.len()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Coefficient-spec documents

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SegmentDoc {
    pub lo: f64,
    pub hi: f64,
    pub kind: String,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CoefficientDoc {
    pub label: String,
    pub q: Vec<SegmentDoc>,
    pub w: Vec<SegmentDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub non_simple_at: Vec<f64>,
}

impl SegmentDoc {
    fn into_segment(self) -> Result<PiecewiseSegment> {
        match (self.kind.as_str(), self.params.as_slice()) {
            ("constant", [v]) => Ok(PiecewiseSegment::constant(self.lo, self.hi, *v)),
            ("power", [scale, exponent, anchor, sign]) => {
                let sign = Sign::from_value(*sign)
                    .ok_or_else(|| Error::Schema(format!("power sign must be +1 or -1, got {sign}")))?;
                if (anchor - self.lo).abs() > ENDPOINT_TOL && (anchor - self.hi).abs() > ENDPOINT_TOL {
                    return Err(Error::Schema(format!(
                        "power anchor {anchor} must be an endpoint of [{}, {})",
                        self.lo, self.hi
                    )));
                }
                Ok(PiecewiseSegment::power(self.lo, self.hi, *scale, *exponent, *anchor, sign))
            }
            ("constant", p) => Err(Error::Schema(format!("constant takes 1 param, got {}", p.len()))),
            ("power", p) => Err(Error::Schema(format!("power takes 4 params, got {}", p.len()))),
            (k, _) => Err(Error::Schema(format!("unknown segment kind `{k}`"))),
        }
    }

    fn from_segment(seg: &PiecewiseSegment) -> Self {
        let (kind, params) = match seg.kind {
            SegmentKind::Constant(v) => ("constant", vec![v]),
            SegmentKind::Power {
                scale,
                exponent,
                anchor,
                sign,
            } => ("power", vec![scale, exponent, anchor, sign.value()]),
        };
        Self {
            lo: seg.lo,
            hi: seg.hi,
            kind: kind.to_string(),
            params,
        }
    }
}

impl CoefficientDoc {
    pub fn into_coefficients(self) -> Result<PeriodicCoefficients> {
        let q = self.q.into_iter().map(SegmentDoc::into_segment).collect::<Result<Vec<_>>>()?;
        let w = self.w.into_iter().map(SegmentDoc::into_segment).collect::<Result<Vec<_>>>()?;
        let mut coeffs = PeriodicCoefficients::new(self.label, q, w)?;
        for m in self.non_simple_at {
            coeffs = coeffs.with_non_simple_mark(m);
        }
        Ok(coeffs)
    }

    pub fn from_coefficients(coeffs: &PeriodicCoefficients) -> Self {
        Self {
            label: coeffs.label.clone(),
            q: coeffs.q.segments().iter().map(SegmentDoc::from_segment).collect(),
            w: coeffs.w.segments().iter().map(SegmentDoc::from_segment).collect(),
            non_simple_at: coeffs.non_simple_at.clone(),
        }
    }
}

/// Parses and validates a JSON coefficient-spec document.
pub fn parse_coefficient_spec(text: &str) -> Result<PeriodicCoefficients> {
    let doc: CoefficientDoc =
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    doc.into_coefficients()
}

/// Serializes coefficients to the JSON coefficient-spec format.
pub fn to_coefficient_spec(coeffs: &PeriodicCoefficients) -> String {
    serde_json::to_string_pretty(&CoefficientDoc::from_coefficients(coeffs))
        .expect("coefficient docs always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(w: &str) -> String {
        format!(
            r#"{{"label": "t", "q": [{{"lo": 0, "hi": 6.283185307179586, "kind": "constant", "params": [0]}}], "w": {w}}}"#
        )
    }

    #[test]
    fn parses_sgn_sin_document() {
        let text = doc(
            r#"[{"lo": 0, "hi": 3.141592653589793, "kind": "constant", "params": [1]},
                {"lo": 3.141592653589793, "hi": 6.283185307179586, "kind": "constant", "params": [-1]}]"#,
        );
        let c = parse_coefficient_spec(&text).unwrap();
        assert_eq!(c, {
            let mut b = builtin_model("sgn_sin", &[]).unwrap();
            b.label = "t".into();
            b
        });
    }

    #[test]
    fn parses_constant_document() {
        let text = doc(r#"[{"lo": 0, "hi": 6.283185307179586, "kind": "constant", "params": [1]}]"#);
        let c = parse_coefficient_spec(&text).unwrap();
        assert_eq!(weight_period_integral(&c), PERIOD);
        assert!(c.q().is_zero());
    }

    #[test]
    fn rejects_gap() {
        let text = doc(
            r#"[{"lo": 0, "hi": 3.0, "kind": "constant", "params": [1]},
                {"lo": 3.1, "hi": 6.283185307179586, "kind": "constant", "params": [-1]}]"#,
        );
        assert!(matches!(parse_coefficient_spec(&text), Err(Error::Tiling { .. })));
    }

    #[test]
    fn rejects_overlap_and_short_coverage() {
        let overlap = doc(
            r#"[{"lo": 0, "hi": 3.5, "kind": "constant", "params": [1]},
                {"lo": 3.0, "hi": 6.283185307179586, "kind": "constant", "params": [-1]}]"#,
        );
        assert!(matches!(parse_coefficient_spec(&overlap), Err(Error::Tiling { .. })));
        let short = doc(r#"[{"lo": 0, "hi": 6.0, "kind": "constant", "params": [1]}]"#);
        assert!(matches!(parse_coefficient_spec(&short), Err(Error::Tiling { .. })));
    }

    #[test]
    fn rejects_zero_weight_and_bad_exponent() {
        let zero = doc(r#"[{"lo": 0, "hi": 6.283185307179586, "kind": "constant", "params": [0]}]"#);
        assert!(matches!(parse_coefficient_spec(&zero), Err(Error::ZeroWeight { .. })));
        let bad = doc(
            r#"[{"lo": 0, "hi": 3.141592653589793, "kind": "power", "params": [1, -1, 0, 1]},
                {"lo": 3.141592653589793, "hi": 6.283185307179586, "kind": "constant", "params": [-1]}]"#,
        );
        assert!(matches!(parse_coefficient_spec(&bad), Err(Error::NonIntegrable { .. })));
    }

    #[test]
    fn rejects_schema_violations() {
        assert!(matches!(parse_coefficient_spec("{}"), Err(Error::Schema(_))));
        let kind = doc(r#"[{"lo": 0, "hi": 6.283185307179586, "kind": "cubic", "params": [1]}]"#);
        assert!(matches!(parse_coefficient_spec(&kind), Err(Error::Schema(_))));
        let anchor = doc(
            r#"[{"lo": 0, "hi": 6.283185307179586, "kind": "power", "params": [1, 0.5, 1.0, 1]}]"#,
        );
        assert!(matches!(parse_coefficient_spec(&anchor), Err(Error::Schema(_))));
    }

    #[test]
    fn builtin_models() {
        let s = builtin_model("sgn_sin", &[]).unwrap();
        assert_eq!(s.w().value(1.0), 1.0);
        assert_eq!(s.w().value(4.0), -1.0);
        assert!(s.q().is_zero());

        let a = builtin_model("shifted_sgn", &[PI / 2.0]).unwrap();
        assert_eq!(a.w().value(1.0), -1.0);
        assert_eq!(a.w().value(2.0), 1.0);
        assert_eq!(a.w().value(5.0), -1.0);
        // Same function as on the cell (-π, π], read periodically.
        assert_eq!(a.w().value(-1.0 + PERIOD), -1.0);

        let c = builtin_model("const", &[]).unwrap();
        assert_eq!(c.w().value(3.0), 1.0);

        assert!(matches!(builtin_model("nope", &[]), Err(Error::UnknownModel(_))));
        assert!(matches!(builtin_model("shifted_sgn", &[PI]), Err(Error::Parameter(_))));
        assert!(matches!(builtin_model("shifted_sgn", &[]), Err(Error::Parameter(_))));
    }

    #[test]
    fn shifted_sgn_at_zero_is_sgn_sin() {
        let a = builtin_model("shifted_sgn", &[0.0]).unwrap();
        let s = builtin_model("sgn_sin", &[]).unwrap();
        assert_eq!(a.w(), s.w());
    }

    #[test]
    fn weight_integrals() {
        assert_eq!(weight_period_integral(&builtin_model("sgn_sin", &[]).unwrap()), 0.0);
        for a in [0.1, 0.5, PI / 2.0, 2.0] {
            let c = builtin_model("shifted_sgn", &[a]).unwrap();
            assert!((weight_period_integral(&c) + 2.0 * a).abs() < 1e-14);
        }
        assert_eq!(weight_period_integral(&builtin_model("const", &[]).unwrap()), PERIOD);
    }

    #[test]
    fn power_segment_integral_is_analytic() {
        // ∫_0^π x^{-1/2} dx = 2√π
        let seg = PiecewiseSegment::power(0.0, PI, 1.0, -0.5, 0.0, Sign::Plus);
        assert!((seg.integral(0.0, PI) - 2.0 * PI.sqrt()).abs() < 1e-14);
        // anchored at hi: ∫_0^π (π - x)^2 dx = π³/3
        let seg = PiecewiseSegment::power(0.0, PI, 1.0, 2.0, PI, Sign::Minus);
        assert!((seg.integral(0.0, PI) + PI.powi(3) / 3.0).abs() < 1e-12);
        assert!((seg.integral(1.0, 2.0) + ((PI - 1.0).powi(3) - (PI - 2.0).powi(3)) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn turning_points_of_sgn_sin() {
        let tps = detect_turning_points(&builtin_model("sgn_sin", &[]).unwrap());
        assert_eq!(tps.len(), 2);
        assert_eq!(tps[0].location, 0.0);
        assert_eq!(tps[1].location, PI);
        for tp in &tps {
            assert!(tp.simple && tp.odd_locally);
            assert_eq!((tp.beta_left, tp.beta_right), (0.0, 0.0));
            assert_eq!((tp.p_left, tp.p_right), (1.0, 1.0));
        }
        assert!(detect_turning_points(&builtin_model("const", &[]).unwrap()).is_empty());
    }

    #[test]
    fn turning_points_of_shifted_sgn_skip_the_seam() {
        let tps = detect_turning_points(&builtin_model("shifted_sgn", &[1.0]).unwrap());
        let locs: Vec<f64> = tps.iter().map(|t| t.location).collect();
        assert_eq!(locs, vec![1.0, PI]);
    }

    #[test]
    fn singular_power_turning_point() {
        let q = vec![PiecewiseSegment::constant(0.0, PERIOD, 0.0)];
        let w = vec![
            PiecewiseSegment::power(0.0, PI, 1.0, -0.5, PI, Sign::Plus),
            PiecewiseSegment::power(PI, PERIOD, 1.0, -0.5, PI, Sign::Minus),
        ];
        let c = PeriodicCoefficients::new("pow", q, w).unwrap();
        let tps = detect_turning_points(&c);
        let at_pi = tps.iter().find(|t| t.location == PI).unwrap();
        assert_eq!((at_pi.beta_left, at_pi.beta_right), (-0.5, -0.5));
        assert!(at_pi.simple && at_pi.odd_locally);
        // The seam at 0 sees both powers from their far ends: (β, p) = (0, π^{-1/2}).
        let seam = tps.iter().find(|t| t.location == 0.0).unwrap();
        assert_eq!((seam.beta_left, seam.beta_right), (0.0, 0.0));
        assert!((seam.p_left - PI.powf(-0.5)).abs() < 1e-15);
        assert!(seam.simple && seam.odd_locally);
    }

    #[test]
    fn asymmetric_turning_point_is_not_odd() {
        let q = vec![PiecewiseSegment::constant(0.0, PERIOD, 0.0)];
        let w = vec![
            PiecewiseSegment::constant(0.0, PI, 2.0),
            PiecewiseSegment::constant(PI, PERIOD, -1.0),
        ];
        let tps = detect_turning_points(&PeriodicCoefficients::new("a", q, w).unwrap());
        assert!(tps.iter().all(|t| t.simple && !t.odd_locally));
    }

    #[test]
    fn non_simple_mark() {
        let c = builtin_model("sgn_sin", &[]).unwrap().with_non_simple_mark(PI);
        let tps = detect_turning_points(&c);
        assert!(tps[0].simple);
        assert!(!tps[1].simple);
    }

    #[test]
    fn shift_preserves_integral_and_rejects_split_power() {
        let a = builtin_model("shifted_sgn", &[0.7]).unwrap();
        for delta in [0.3, 2.0, PI, 5.5] {
            let s = a.shifted(delta).unwrap();
            assert!((weight_period_integral(&s) - weight_period_integral(&a)).abs() < 1e-13);
            for x in [0.1, 1.3, 2.9, 4.4, 6.0] {
                assert_eq!(s.w().value(x), a.w().value(x + delta));
            }
        }
        let q = vec![PiecewiseSegment::constant(0.0, PERIOD, 0.0)];
        let w = vec![
            PiecewiseSegment::power(0.0, PI, 1.0, 0.5, 0.0, Sign::Plus),
            PiecewiseSegment::constant(PI, PERIOD, -1.0),
        ];
        let p = PeriodicCoefficients::new("p", q, w).unwrap();
        assert!(p.shifted(1.0).is_err());
        assert!(p.shifted(PI + 0.5).is_ok());
    }

    #[test]
    fn reflection_mirrors_values() {
        let q = vec![PiecewiseSegment::constant(0.0, PERIOD, 0.0)];
        let w = vec![
            PiecewiseSegment::power(0.0, PI, 2.0, 0.5, 0.0, Sign::Plus),
            PiecewiseSegment::constant(PI, PERIOD, -1.0),
        ];
        let p = PeriodicCoefficients::new("p", q, w).unwrap().with_non_simple_mark(PI);
        let r = p.reflected();
        for x in [0.2, 1.7, 3.0, 3.5, 6.1] {
            assert!((r.w().value(PERIOD - x) - p.w().value(x)).abs() < 1e-12);
        }
        assert_eq!(r.non_simple_marks(), &[PI]);
        assert_eq!(r.reflected().w(), p.w());
    }

    #[test]
    fn document_round_trip() {
        let c = builtin_model("shifted_sgn", &[0.25]).unwrap().with_non_simple_mark(PI);
        let back = parse_coefficient_spec(&to_coefficient_spec(&c)).unwrap();
        assert_eq!(back, c);
    }
}
