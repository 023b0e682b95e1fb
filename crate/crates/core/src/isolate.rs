//! Certified complex root location by interval subdivision.
//!
//! Boxes with rational corners are subdivided and discarded by an interval
//! Horner exclusion test. Once the surviving boxes fall into exactly deg(f)
//! connected clusters, every cluster holds exactly one root of the
//! squarefree polynomial, which certifies per-rectangle counts.

use num_rational::BigRational;
use num_traits::Signed;

use crate::arith::rat_int;
use crate::poly::QPoly;

#[derive(Clone, Debug, PartialEq)]
pub struct Rect {
    pub re_lo: BigRational,
    pub re_hi: BigRational,
    pub im_lo: BigRational,
    pub im_hi: BigRational,
}

impl Rect {
    pub fn new(
        re_lo: BigRational,
        re_hi: BigRational,
        im_lo: BigRational,
        im_hi: BigRational,
    ) -> Self {
        Rect {
            re_lo,
            re_hi,
            im_lo,
            im_hi,
        }
    }

    fn contains(&self, other: &Rect) -> bool {
        self.re_lo <= other.re_lo
            && other.re_hi <= self.re_hi
            && self.im_lo <= other.im_lo
            && other.im_hi <= self.im_hi
    }

    fn disjoint(&self, other: &Rect) -> bool {
        self.re_hi < other.re_lo
            || other.re_hi < self.re_lo
            || self.im_hi < other.im_lo
            || other.im_hi < self.im_lo
    }

    /// Closed boxes touch (shared edge or corner counts).
    fn touches(&self, other: &Rect) -> bool {
        !(self.re_hi < other.re_lo
            || other.re_hi < self.re_lo
            || self.im_hi < other.im_lo
            || other.im_hi < self.im_lo)
    }

    fn quarters(&self) -> [Rect; 4] {
        let rm = (&self.re_lo + &self.re_hi) / rat_int(2);
        let im = (&self.im_lo + &self.im_hi) / rat_int(2);
        [
            Rect::new(self.re_lo.clone(), rm.clone(), self.im_lo.clone(), im.clone()),
            Rect::new(rm.clone(), self.re_hi.clone(), self.im_lo.clone(), im.clone()),
            Rect::new(self.re_lo.clone(), rm.clone(), im.clone(), self.im_hi.clone()),
            Rect::new(rm, self.re_hi.clone(), im, self.im_hi.clone()),
        ]
    }
}

/// Real interval with rational endpoints.
#[derive(Clone, Debug)]
struct Ival {
    lo: BigRational,
    hi: BigRational,
}

impl Ival {
    fn point(v: BigRational) -> Self {
        Ival { lo: v.clone(), hi: v }
    }

    fn add(&self, o: &Ival) -> Ival {
        Ival {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    fn sub(&self, o: &Ival) -> Ival {
        Ival {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }

    fn mul(&self, o: &Ival) -> Ival {
        let c = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let mut lo = c[0].clone();
        let mut hi = c[0].clone();
        for v in &c[1..] {
            if *v < lo {
                lo = v.clone();
            }
            if *v > hi {
                hi = v.clone();
            }
        }
        Ival { lo, hi }
    }

    fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }
}

struct CIval {
    re: Ival,
    im: Ival,
}

impl CIval {
    fn from_rect(r: &Rect) -> Self {
        CIval {
            re: Ival {
                lo: r.re_lo.clone(),
                hi: r.re_hi.clone(),
            },
            im: Ival {
                lo: r.im_lo.clone(),
                hi: r.im_hi.clone(),
            },
        }
    }

    fn mul(&self, o: &CIval) -> CIval {
        CIval {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    fn add_real(&self, c: &BigRational) -> CIval {
        CIval {
            re: self.re.add(&Ival::point(c.clone())),
            im: Ival {
                lo: self.im.lo.clone(),
                hi: self.im.hi.clone(),
            },
        }
    }

    fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }
}

/// Interval Horner: may f vanish somewhere on the box?
fn possibly_zero_on(f: &QPoly, r: &Rect) -> bool {
    let z = CIval::from_rect(r);
    let mut acc = CIval {
        re: Ival::point(rat_int(0)),
        im: Ival::point(rat_int(0)),
    };
    for c in f.coeffs.iter().rev() {
        acc = acc.mul(&z).add_real(c);
    }
    acc.contains_zero()
}

fn cluster(boxes: &[Rect]) -> Vec<Vec<usize>> {
    let n = boxes.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            if boxes[i].touches(&boxes[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Certified count of roots of a squarefree polynomial inside a closed
/// rectangle. `None` when certification fails at the depth cap (roots on or
/// near the rectangle boundary, or clusters unresolved).
pub fn count_roots_in_rect(f: &QPoly, rect: &Rect, max_depth: u32) -> Option<usize> {
    assert!(!f.is_zero() && f.deg() >= 1);
    let n = f.deg();
    // Cauchy bound: all roots have |z| < 1 + max |c_i| / |c_n|
    let lead = f.leading();
    let mut maxc = rat_int(0);
    for c in &f.coeffs {
        let a = (c / &lead).abs();
        if a > maxc {
            maxc = a;
        }
    }
    let bound = maxc + rat_int(1);
    let mut boxes = vec![Rect::new(-bound.clone(), bound.clone(), -bound.clone(), bound)];
    for _ in 0..max_depth {
        let mut next = Vec::new();
        for b in &boxes {
            for q in b.quarters() {
                if possibly_zero_on(f, &q) {
                    next.push(q);
                }
            }
        }
        boxes = next;
        if boxes.is_empty() {
            return Some(0);
        }
        let clusters = cluster(&boxes);
        if clusters.len() != n {
            continue;
        }
        // every cluster holds exactly one root; resolve the rectangle
        let mut inside = 0usize;
        let mut decided = true;
        for cl in &clusters {
            let all_in = cl.iter().all(|&i| rect.contains(&boxes[i]));
            let all_out = cl.iter().all(|&i| rect.disjoint(&boxes[i]));
            if all_in {
                inside += 1;
            } else if !all_out {
                decided = false;
                break;
            }
        }
        if decided {
            return Some(inside);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn p(cs: &[i64]) -> QPoly {
        QPoly::from_ints(cs)
    }

    fn rect(a: i64, b: i64, c: i64, d: i64) -> Rect {
        Rect::new(rat(a, 1), rat(b, 1), rat(c, 1), rat(d, 1))
    }

    #[test]
    fn isolates_gaussian_roots() {
        // x^2 - 2x + 2 has roots 1 +- i
        let f = p(&[2, -2, 1]);
        assert_eq!(count_roots_in_rect(&f, &rect(0, 2, 0, 2), 12), Some(1));
        assert_eq!(count_roots_in_rect(&f, &rect(0, 2, -2, 0), 12), Some(1));
        assert_eq!(count_roots_in_rect(&f, &rect(-3, 3, -3, 3), 12), Some(2));
        assert_eq!(count_roots_in_rect(&f, &rect(5, 6, 5, 6), 12), Some(0));
    }

    #[test]
    fn isolates_real_roots() {
        // x^2 - 2
        let f = p(&[-2, 0, 1]);
        assert_eq!(count_roots_in_rect(&f, &rect(1, 2, -1, 1), 12), Some(1));
        assert_eq!(count_roots_in_rect(&f, &rect(-2, -1, -1, 1), 12), Some(1));
    }

    #[test]
    fn cubic_with_mixed_roots() {
        // (x-1)(x^2+1): roots 1, i, -i
        let f = p(&[-1, 1, -1, 1]);
        let half = Rect::new(rat(1, 2), rat(3, 2), rat(-1, 2), rat(1, 2));
        assert_eq!(count_roots_in_rect(&f, &half, 14), Some(1));
        let upper = Rect::new(rat(-1, 2), rat(1, 2), rat(1, 2), rat(3, 2));
        assert_eq!(count_roots_in_rect(&f, &upper, 14), Some(1));
    }
}
