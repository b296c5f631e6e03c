use num_rational::Ratio;

use super::AWDiffEq;

/// Upper-left boundary of the region `union_k {x >= k, y <= deg a_(n-k) - (n-k)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// Generator points `(k, deg a_(n-k) - (n-k))`, zero coefficients skipped.
    pub generators: Vec<(i64, i64)>,
    /// Boundary vertices from `P_0` to the leftmost highest generator.
    pub vertices: Vec<(i64, i64)>,
    /// Positive edge slopes in ascending order. Along the boundary they
    /// appear in the reverse order, since the boundary is concave.
    pub edge_slopes: Vec<Ratio<i64>>,
}

impl NewtonPolygon {
    pub fn has_positive_slope(&self) -> bool {
        !self.edge_slopes.is_empty()
    }

    pub fn contains_slope(&self, chi: &Ratio<i64>) -> bool {
        self.edge_slopes.contains(chi)
    }
}

pub fn generators(eq: &AWDiffEq) -> Vec<(i64, i64)> {
    let n = eq.order() as i64;
    (0..=n)
        .filter_map(|k| {
            let a = &eq.coeffs()[(n - k) as usize];
            (!a.is_zero()).then(|| (k, a.degree() as i64 - (n - k)))
        })
        .collect()
}

/// Gift wrapping from `P_0`: each step takes the steepest edge to a later
/// generator, preferring the farthest on ties, and stops once no edge rises.
pub fn newton_polygon(eq: &AWDiffEq) -> NewtonPolygon {
    let gens = generators(eq);
    let mut vertices = vec![gens[0]];
    let mut slopes = Vec::new();
    let mut cur = 0usize;
    loop {
        let (cx, cy) = gens[cur];
        let mut best: Option<(usize, Ratio<i64>)> = None;
        for (j, &(x, y)) in gens.iter().enumerate().skip(cur + 1) {
            let s = Ratio::new(y - cy, x - cx);
            if best.as_ref().is_none_or(|(_, b)| s >= *b) {
                best = Some((j, s));
            }
        }
        match best {
            Some((j, s)) if s > Ratio::from_integer(0) => {
                vertices.push(gens[j]);
                slopes.push(s);
                cur = j;
            }
            _ => break,
        }
    }
    slopes.reverse();
    NewtonPolygon { generators: gens, vertices, edge_slopes: slopes }
}

/// Exhaustive oracle: the slope of every generator pair whose line is
/// positive and has no generator strictly above it.
pub fn brute_force_slopes(gens: &[(i64, i64)]) -> Vec<Ratio<i64>> {
    let mut out: Vec<Ratio<i64>> = Vec::new();
    for (i, &(x1, y1)) in gens.iter().enumerate() {
        for &(x2, y2) in &gens[i + 1..] {
            let s = Ratio::new(y2 - y1, x2 - x1);
            if s <= Ratio::from_integer(0) {
                continue;
            }
            let supporting = gens
                .iter()
                .all(|&(x, y)| Ratio::from_integer(y) <= Ratio::from_integer(y1) + s * Ratio::from_integer(x - x1));
            if supporting && !out.contains(&s) {
                out.push(s);
            }
        }
    }
    out.sort();
    out
}
