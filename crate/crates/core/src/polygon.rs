//! Newton polygon of a q-difference polynomial.
//!
//! Each term `a·x^α·∏(σʲy)^{τⱼ}` maps to the point `(α, |τ|)`; the shift
//! operator does not change `x`-valuations, so no correction is applied. The
//! polygon is the part of the lower-left convex hull of that cloud seen by
//! supporting lines `α + h·μ` with `μ > 0`. All arithmetic is exact.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use num_traits::Zero;
use thiserror::Error;

use crate::field::rational::Rational;
use crate::field::Coefficient;
use crate::qdiff::{QDiffPolynomial, TermKey};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolygonError {
    #[error("the zero polynomial has no Newton polygon")]
    EmptyPolynomial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloudPoint {
    pub alpha: Rational,
    pub height: u32,
    pub sources: Vec<TermKey>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Index into `points` of the endpoint with the larger height.
    pub high: usize,
    /// Index into `points` of the endpoint with the smaller height.
    pub low: usize,
    pub coslope: Rational,
}

/// A hull edge offered as a candidate leading exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct Coslope {
    pub mu: Rational,
    pub upper_height: u32,
    pub lower_height: u32,
}

impl Coslope {
    /// Whether the edge stops above height 0, so that following it cannot
    /// by itself cancel the `y`-free part.
    pub fn lower_end_above_axis(&self) -> bool {
        self.lower_height >= 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonPolygon {
    points: Vec<CloudPoint>,
    /// Hull vertices, from the largest height down.
    vertices: Vec<usize>,
    edges: Vec<Edge>,
}

impl NewtonPolygon {
    pub fn build<C: Coefficient>(p: &QDiffPolynomial<C>) -> Result<Self, PolygonError> {
        let mut cloud: BTreeMap<(Rational, u32), Vec<TermKey>> = BTreeMap::new();
        for (key, _) in p.terms() {
            cloud
                .entry((key.xexp.clone(), key.height()))
                .or_default()
                .push(key.clone());
        }
        let points = cloud
            .into_iter()
            .map(|((alpha, height), sources)| CloudPoint {
                alpha,
                height,
                sources,
            })
            .collect();
        Self::from_points(points)
    }

    /// Builds the hull of an arbitrary cloud; points may repeat.
    pub fn from_points(points: Vec<CloudPoint>) -> Result<Self, PolygonError> {
        if points.is_empty() {
            return Err(PolygonError::EmptyPolynomial);
        }
        // leftmost point per height
        let mut per_height: BTreeMap<u32, usize> = BTreeMap::new();
        for (i, pt) in points.iter().enumerate() {
            per_height
                .entry(pt.height)
                .and_modify(|j| {
                    if pt.alpha < points[*j].alpha {
                        *j = i;
                    }
                })
                .or_insert(i);
        }
        // start vertex: minimal alpha, lowest height among ties
        let start = per_height
            .values()
            .copied()
            .min_by(|&a, &b| {
                points[a]
                    .alpha
                    .cmp(&points[b].alpha)
                    .then(points[a].height.cmp(&points[b].height))
            })
            .expect("nonempty cloud");
        let top = points[start].height;
        let mut candidates: Vec<usize> = per_height.range(..=top).map(|(_, &i)| i).collect();
        candidates.sort_by(|&a, &b| {
            points[b]
                .height
                .cmp(&points[a].height)
                .then(points[a].alpha.cmp(&points[b].alpha))
        });

        // monotone chain over (u, v) = (-height, alpha)
        let mut hull: Vec<usize> = Vec::new();
        for &i in &candidates {
            while hull.len() >= 2 {
                let o = &points[hull[hull.len() - 2]];
                let a = &points[hull[hull.len() - 1]];
                if turn(o, a, &points[i]) <= Rational::zero() {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(i);
        }
        let edges = hull
            .windows(2)
            .map(|w| {
                let (hi, lo) = (&points[w[0]], &points[w[1]]);
                Edge {
                    high: w[0],
                    low: w[1],
                    coslope: (&lo.alpha - &hi.alpha)
                        / Rational::from_integer((hi.height - lo.height).into()),
                }
            })
            .collect();
        Ok(Self {
            points,
            vertices: hull,
            edges,
        })
    }

    pub fn points(&self) -> &[CloudPoint] {
        &self.points
    }

    pub fn vertices(&self) -> impl Iterator<Item = &CloudPoint> {
        self.vertices.iter().map(|&i| &self.points[i])
    }

    pub fn vertex_indices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_vertex(&self, index: usize) -> bool {
        self.vertices.contains(&index)
    }

    /// `min (α + h·μ)` over the hull vertices.
    pub fn support_value(&self, mu: &Rational) -> Rational {
        self.vertices()
            .map(|p| line_value(p, mu))
            .min()
            .expect("polygon has a vertex")
    }

    /// `min (α + h·μ)` over every cloud point; reference for
    /// [`support_value`](Self::support_value).
    pub fn brute_support_value(&self, mu: &Rational) -> Rational {
        self.points
            .iter()
            .map(|p| line_value(p, mu))
            .min()
            .expect("nonempty cloud")
    }

    /// Edge co-slopes strictly above `mu_min`, ascending.
    pub fn admissible_coslopes(&self, mu_min: &Rational) -> Vec<Coslope> {
        self.edges
            .iter()
            .filter(|e| e.coslope > *mu_min)
            .map(|e| Coslope {
                mu: e.coslope.clone(),
                upper_height: self.points[e.high].height,
                lower_height: self.points[e.low].height,
            })
            .collect()
    }

    /// Whether some point sits above the start vertex, i.e. the full lower
    /// hull also has edges with co-slope `≤ 0`.
    pub fn has_nonpositive_coslopes(&self) -> bool {
        let top = self.points[self.vertices[0]].height;
        self.points.iter().any(|p| p.height > top)
    }

    /// `alpha,height,on_hull` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,height,on_hull\n");
        for (i, p) in self.points.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", p.alpha, p.height, self.is_vertex(i));
        }
        out
    }
}

fn line_value(p: &CloudPoint, mu: &Rational) -> Rational {
    &p.alpha + mu * Rational::from_integer(p.height.into())
}

fn turn(o: &CloudPoint, a: &CloudPoint, p: &CloudPoint) -> Rational {
    let du_a = Rational::from_integer((i64::from(o.height) - i64::from(a.height)).into());
    let du_p = Rational::from_integer((i64::from(o.height) - i64::from(p.height)).into());
    du_a * (&p.alpha - &o.alpha) - (&a.alpha - &o.alpha) * du_p
}

impl fmt::Display for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "points:")?;
        for (i, p) in self.points.iter().enumerate() {
            let mark = if self.is_vertex(i) { " *" } else { "" };
            writeln!(f, "  ({}, {}){}", p.alpha, p.height, mark)?;
        }
        writeln!(f, "vertices:")?;
        for p in self.vertices() {
            writeln!(f, "  ({}, {})", p.alpha, p.height)?;
        }
        writeln!(f, "edges:")?;
        for e in &self.edges {
            let (hi, lo) = (&self.points[e.high], &self.points[e.low]);
            writeln!(
                f,
                "  ({}, {}) -> ({}, {})  co-slope {}",
                hi.alpha, hi.height, lo.alpha, lo.height, e.coslope
            )?;
        }
        Ok(())
    }
}

/// `ω(μ) = min (α + |τ|·μ)` over the terms of `p`.
pub fn support_value<C: Coefficient>(p: &QDiffPolynomial<C>, mu: &Rational) -> Option<Rational> {
    p.terms()
        .map(|(k, _)| &k.xexp + mu * Rational::from_integer(k.height().into()))
        .min()
}

/// Keys of the terms attaining `ω(μ)`.
pub fn points_on_line<C: Coefficient>(p: &QDiffPolynomial<C>, mu: &Rational) -> Vec<TermKey> {
    let Some(omega) = support_value(p, mu) else {
        return Vec::new();
    };
    p.terms()
        .filter(|(k, _)| &k.xexp + mu * Rational::from_integer(k.height().into()) == omega)
        .map(|(k, _)| k.clone())
        .collect()
}
