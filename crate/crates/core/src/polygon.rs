//! Newton polygons of coefficient valuations and certified zero counts on closed disks.

use std::cmp::Ordering;
use std::fmt;

use serde_json::{json, Value};

use crate::analytic::{ScaledPoint, TruncatedSeries};
use crate::error::{Error, Result};
use crate::valuation::ValuationQ;

/// A valuation that may be infinite (a vanishing coefficient, or a root at the center).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtValuation {
    Finite(ValuationQ),
    Infinite,
}

impl fmt::Display for ExtValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValuation::Finite(v) => write!(f, "{v}"),
            ExtValuation::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slope {
    /// The run of vanishing leading coefficients.
    NegInfinite,
    Finite(ValuationQ),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub slope: Slope,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub points: Vec<(usize, ExtValuation)>,
    /// Lower hull vertices, collinear points included.
    pub hull: Vec<(usize, ValuationQ)>,
    pub segments: Vec<Segment>,
}

fn slope_between(a: (usize, ValuationQ), b: (usize, ValuationQ)) -> ValuationQ {
    let rise = b.1 - a.1;
    ValuationQ::new(rise.numer(), rise.denom() * (b.0 - a.0) as i64)
}

/// Lower convex hull of `(index, valuation)` points; input order is irrelevant.
pub fn polygon_build(points: &[(usize, ExtValuation)]) -> Result<NewtonPolygon> {
    let mut pts = points.to_vec();
    pts.sort_by_key(|p| p.0);
    pts.dedup_by(|b, a| {
        if a.0 != b.0 {
            return false;
        }
        // keep the smaller valuation for a repeated index
        if let (ExtValuation::Finite(va), ExtValuation::Finite(vb)) = (a.1, b.1) {
            if vb < va {
                a.1 = b.1;
            }
        } else if a.1 == ExtValuation::Infinite {
            a.1 = b.1;
        }
        true
    });
    let finite: Vec<(usize, ValuationQ)> = pts
        .iter()
        .filter_map(|&(n, v)| match v {
            ExtValuation::Finite(v) => Some((n, v)),
            ExtValuation::Infinite => None,
        })
        .collect();
    if finite.is_empty() {
        return Err(Error::EmptyPolygon);
    }

    let mut hull: Vec<(usize, ValuationQ)> = Vec::new();
    for &pt in &finite {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if slope_between(a, b) > slope_between(b, pt) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    let mut segments = Vec::new();
    let first_index = pts[0].0;
    let lead = finite[0].0 - first_index;
    if lead > 0 {
        segments.push(Segment {
            start: first_index,
            slope: Slope::NegInfinite,
            length: lead,
        });
    }
    for w in hull.windows(2) {
        let s = slope_between(w[0], w[1]);
        let len = w[1].0 - w[0].0;
        match segments.last_mut() {
            Some(Segment {
                slope: Slope::Finite(prev),
                length,
                ..
            }) if *prev == s => *length += len,
            _ => segments.push(Segment {
                start: w[0].0,
                slope: Slope::Finite(s),
                length: len,
            }),
        }
    }
    Ok(NewtonPolygon {
        points: pts,
        hull,
        segments,
    })
}

impl NewtonPolygon {
    /// Root valuations (negated slopes) with multiplicities for roots in the closed disk.
    pub fn root_valuations(&self) -> Vec<(ExtValuation, usize)> {
        self.segments
            .iter()
            .filter_map(|s| match s.slope {
                Slope::NegInfinite => Some((ExtValuation::Infinite, s.length)),
                Slope::Finite(v) if v <= ValuationQ::zero() => {
                    Some((ExtValuation::Finite(-v), s.length))
                }
                Slope::Finite(_) => None,
            })
            .collect()
    }

    /// `sup{n : v(c_n) = min}`: the number of zeros in the closed disk.
    pub fn weierstrass_degree(&self) -> usize {
        let min_v = self.hull.iter().map(|h| h.1).min().unwrap();
        self.hull
            .iter()
            .filter(|h| h.1 == min_v)
            .map(|h| h.0)
            .max()
            .unwrap()
            - self.points[0].0
    }

    pub fn to_json(&self) -> Value {
        let points: Vec<Value> = self
            .points
            .iter()
            .map(|(n, v)| json!([n, v.to_string()]))
            .collect();
        let segments: Vec<Value> = self
            .segments
            .iter()
            .map(|s| {
                let slope = match s.slope {
                    Slope::NegInfinite => "slope -inf".to_string(),
                    Slope::Finite(v) => format!("slope {v}"),
                };
                json!([slope, s.length])
            })
            .collect();
        json!({ "points": points, "segments": segments })
    }
}

/// The polygon of `series` at its declared radius, certified against truncation and precision:
/// the tail bound and every zero-flagged coefficient must lie strictly above the minimum.
pub fn certified_polygon(series: &TruncatedSeries) -> Result<NewtonPolygon> {
    let scaled = series.scaled_points();
    let min_v = scaled
        .iter()
        .filter_map(|(_, p)| match p {
            ScaledPoint::Exact(v) => Some(*v),
            ScaledPoint::AtLeast(_) => None,
        })
        .min()
        .ok_or_else(|| Error::Uncertified("every coefficient is zero at precision".into()))?;
    if series.tail_bound.cmp(&min_v) != Ordering::Greater {
        return Err(Error::Uncertified(format!(
            "tail bound {} does not exceed the minimum coefficient valuation {}",
            series.tail_bound, min_v
        )));
    }
    let mut pts = Vec::with_capacity(scaled.len());
    for (n, p) in scaled {
        match p {
            ScaledPoint::Exact(v) => pts.push((n, ExtValuation::Finite(v))),
            ScaledPoint::AtLeast(b) if b > min_v => pts.push((n, ExtValuation::Infinite)),
            ScaledPoint::AtLeast(b) => {
                return Err(Error::Uncertified(format!(
                    "coefficient {n} is zero only to valuation {b}, not above the minimum {min_v}"
                )))
            }
        }
    }
    polygon_build(&pts)
}

/// Number of zeros (with multiplicity) in the closed disk the series was built for.
pub fn unit_disk_zero_count(series: &TruncatedSeries) -> Result<usize> {
    Ok(certified_polygon(series)?.weierstrass_degree())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(n: i64) -> ExtValuation {
        ExtValuation::Finite(ValuationQ::integer(n))
    }

    #[test]
    fn horizontal_after_vanishing_constant() {
        let poly =
            polygon_build(&[(0, ExtValuation::Infinite), (1, f(0)), (2, f(0)), (3, f(0))]).unwrap();
        assert_eq!(
            poly.segments,
            vec![
                Segment {
                    start: 0,
                    slope: Slope::NegInfinite,
                    length: 1
                },
                Segment {
                    start: 1,
                    slope: Slope::Finite(ValuationQ::zero()),
                    length: 2
                },
            ]
        );
        assert_eq!(poly.hull.len(), 3);
        assert_eq!(
            poly.root_valuations(),
            vec![
                (ExtValuation::Infinite, 1),
                (ExtValuation::Finite(ValuationQ::zero()), 2)
            ]
        );
        assert_eq!(poly.weierstrass_degree(), 3);
    }

    #[test]
    fn minimum_at_origin() {
        let poly = polygon_build(&[(0, f(0)), (1, f(5)), (2, f(7))]).unwrap();
        assert_eq!(
            poly.hull,
            vec![(0, ValuationQ::zero()), (2, ValuationQ::integer(7))]
        );
        assert!(poly.root_valuations().is_empty());
        assert_eq!(poly.weierstrass_degree(), 0);
    }

    #[test]
    fn three_point_hull() {
        let poly = polygon_build(&[(0, f(2)), (1, f(0)), (2, f(1))]).unwrap();
        let slopes: Vec<_> = poly.segments.iter().map(|s| (s.slope, s.length)).collect();
        assert_eq!(
            slopes,
            vec![
                (Slope::Finite(ValuationQ::integer(-2)), 1),
                (Slope::Finite(ValuationQ::integer(1)), 1)
            ]
        );
        assert_eq!(
            poly.root_valuations(),
            vec![(ExtValuation::Finite(ValuationQ::integer(2)), 1)]
        );
    }

    #[test]
    fn two_point_cases() {
        let a = polygon_build(&[(0, f(1)), (1, f(0))]).unwrap();
        assert_eq!(
            a.root_valuations(),
            vec![(ExtValuation::Finite(ValuationQ::integer(1)), 1)]
        );
        let b = polygon_build(&[(0, ExtValuation::Infinite), (1, f(0))]).unwrap();
        assert_eq!(b.root_valuations(), vec![(ExtValuation::Infinite, 1)]);
    }

    #[test]
    fn all_infinite_is_an_error() {
        assert_eq!(
            polygon_build(&[(0, ExtValuation::Infinite)]).unwrap_err(),
            Error::EmptyPolygon
        );
    }

    #[test]
    fn json_dump() {
        let poly = polygon_build(&[(0, f(2)), (1, f(0)), (2, f(1))]).unwrap();
        assert_eq!(
            poly.to_json().to_string(),
            r#"{"points":[[0,"2/1"],[1,"0/1"],[2,"1/1"]],"segments":[["slope -2/1",1],["slope 1/1",1]]}"#
        );
    }
    fn series1_count(p: u32, e: u32, k: i64, s: i64, n_max: Option<usize>) -> usize {
        use crate::analytic::{q_from_unit, series1};
        use crate::padic::{PadicNumber, PrimeContext};
        let ctx = PrimeContext::new(p, e, k).unwrap();
        let q = q_from_unit(&PadicNumber::one(&ctx), s);
        let x = PadicNumber::zero(&ctx);
        unit_disk_zero_count(&series1(&x, &q, n_max).unwrap()).unwrap()
    }

    #[test]
    fn series1_counts_at_origin() {
        assert_eq!(series1_count(3, 1, 40, 1, None), 3);
        assert_eq!(series1_count(2, 1, 40, 2, None), 2);
        assert_eq!(series1_count(5, 3, 60, 1, Some(40)), 5);
        // m0 = 2/5 is above 1/(p-2): only the trivial zeros
        assert_eq!(series1_count(5, 5, 60, 2, Some(40)), 2);
    }

    #[test]
    fn short_truncation_is_refused() {
        use crate::analytic::{q_from_unit, series1};
        use crate::padic::{PadicNumber, PrimeContext};
        let ctx = PrimeContext::new(5, 3, 60).unwrap();
        let q = q_from_unit(&PadicNumber::one(&ctx), 1);
        let s = series1(&PadicNumber::zero(&ctx), &q, Some(3)).unwrap();
        assert!(matches!(
            unit_disk_zero_count(&s),
            Err(Error::Uncertified(_))
        ));
    }
}
