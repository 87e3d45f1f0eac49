//! Permutations on `{1..n}`.
//!
//! Points are 1-based in all text I/O and 0-based in memory. Composition is
//! left-to-right: `a * b` applies `a` first, then `b`, so `p^(ab) = (p^a)^b`.

use std::fmt;
use std::ops::Mul;

use thiserror::Error;

/// Errors from building or parsing permutations.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("point {point} at byte {pos} is outside 1..={degree}")]
    PointOutOfRange { point: u64, pos: usize, degree: usize },
    #[error("point {point} repeated at byte {pos}")]
    RepeatedPoint { point: u32, pos: usize },
    #[error("image array is not a bijection on {degree} points")]
    NotBijection { degree: usize },
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("generator {0} has no assigned permutation")]
    Unassigned(usize),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from 0-based images, checking bijectivity.
    pub fn from_images(images: Vec<u32>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(PermError::NotBijection { degree: n });
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Self::from_images(images.clone()).is_ok());
        Permutation { images }
    }

    /// Builds a permutation from a list of 1-based cycles.
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Result<Self, PermError> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            for (k, &p) in cycle.iter().enumerate() {
                if p == 0 || p as usize > degree {
                    return Err(PermError::PointOutOfRange {
                        point: p as u64,
                        pos: 0,
                        degree,
                    });
                }
                if used[p as usize - 1] {
                    return Err(PermError::RepeatedPoint { point: p, pos: 0 });
                }
                used[p as usize - 1] = true;
                let next = cycle[(k + 1) % cycle.len()];
                images[p as usize - 1] = next - 1;
            }
        }
        Ok(Permutation { images })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of a 0-based point.
    #[inline]
    pub fn image(&self, point: u32) -> u32 {
        self.images[point as usize]
    }

    #[inline]
    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i as u32 == p)
    }

    /// Apply `self`, then `other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in compose");
        Permutation {
            images: self.images.iter().map(|&p| other.images[p as usize]).collect(),
        }
    }

    /// In-place `self = self * other`.
    pub fn compose_assign(&mut self, other: &Permutation) {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in compose");
        for p in self.images.iter_mut() {
            *p = other.images[*p as usize];
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.degree()];
        for (i, &p) in self.images.iter().enumerate() {
            inv[p as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn pow(&self, exp: i64) -> Permutation {
        let mut base = if exp < 0 { self.inverse() } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc.compose_assign(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    /// `g^-1 * self * g`.
    pub fn conjugate_by(&self, g: &Permutation) -> Permutation {
        assert_eq!(self.degree(), g.degree(), "degree mismatch in conjugate");
        let mut images = vec![0u32; self.degree()];
        for (i, &p) in self.images.iter().enumerate() {
            images[g.images[i] as usize] = g.images[p as usize];
        }
        Permutation { images }
    }

    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.images
            .iter()
            .zip(&other.images)
            .all(|(&a, &b)| other.images[a as usize] == self.images[b as usize])
    }

    /// First (smallest) 0-based point not fixed.
    pub fn first_moved_point(&self) -> Option<u32> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &p)| *i as u32 != p)
            .map(|(i, _)| i as u32)
    }

    /// Disjoint nontrivial cycles (0-based points), each starting at its
    /// least point, sorted by that point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                cycle.push(p as u32);
                p = self.images[p] as usize;
            }
            out.push(cycle);
        }
        out
    }

    /// Sorted multiset of cycle lengths, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut seen = vec![false; self.degree()];
        let mut lens = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                len += 1;
                p = self.images[p] as usize;
            }
            lens.push(len);
        }
        lens.sort_unstable();
        lens
    }

    /// Least `k >= 1` with `self^k = 1`: the lcm of the cycle lengths.
    ///
    /// Panics if the order does not fit in a `u64`.
    pub fn order(&self) -> u64 {
        let mut lens = self.cycle_type();
        lens.dedup();
        lens.into_iter().fold(1u64, |acc, l| {
            let l = l as u64;
            (acc / gcd(acc, l)).checked_mul(l).expect("element order overflows u64")
        })
    }

    /// Parses disjoint-cycle notation such as `(1,2)(3,6) (4,7)`.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Permutation, PermError> {
        let bytes = text.as_bytes();
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut used = vec![false; degree];
        let mut pos = 0;
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        loop {
            skip_ws(&mut pos);
            if pos >= bytes.len() {
                break;
            }
            if bytes[pos] != b'(' {
                return Err(PermError::Syntax {
                    pos,
                    msg: format!("expected '(' but found {:?}", bytes[pos] as char),
                });
            }
            pos += 1;
            skip_ws(&mut pos);
            if bytes.get(pos) == Some(&b')') {
                pos += 1;
                continue;
            }
            let mut cycle: Vec<u32> = Vec::new();
            loop {
                skip_ws(&mut pos);
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if start == pos {
                    return Err(PermError::Syntax {
                        pos,
                        msg: "expected a point number".into(),
                    });
                }
                let point: u64 = text[start..pos].parse().map_err(|_| PermError::Syntax {
                    pos: start,
                    msg: "point number too large".into(),
                })?;
                if point == 0 || point > degree as u64 {
                    return Err(PermError::PointOutOfRange {
                        point,
                        pos: start,
                        degree,
                    });
                }
                let p = point as u32;
                if used[p as usize - 1] {
                    return Err(PermError::RepeatedPoint { point: p, pos: start });
                }
                used[p as usize - 1] = true;
                cycle.push(p - 1);
                skip_ws(&mut pos);
                match bytes.get(pos) {
                    Some(b',') => pos += 1,
                    Some(b')') => {
                        pos += 1;
                        break;
                    }
                    Some(&c) => {
                        return Err(PermError::Syntax {
                            pos,
                            msg: format!("expected ',' or ')' but found {:?}", c as char),
                        })
                    }
                    None => {
                        return Err(PermError::Syntax {
                            pos,
                            msg: "unterminated cycle".into(),
                        })
                    }
                }
            }
            for (k, &p) in cycle.iter().enumerate() {
                images[p as usize] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    /// Acts as `p` on `0..m` and as `q` shifted by `m` on `m..m+n`.
    pub fn embed_direct_product(p: &Permutation, q: &Permutation) -> Permutation {
        let m = p.degree() as u32;
        let mut images = p.images.clone();
        images.extend(q.images.iter().map(|&x| x + m));
        Permutation { images }
    }

    /// Restriction to a block of points `offset..offset+len` that the
    /// permutation preserves, renumbered from zero.
    pub fn restrict(&self, offset: usize, len: usize) -> Permutation {
        let images = self.images[offset..offset + len]
            .iter()
            .map(|&p| {
                let p = p as usize;
                assert!(p >= offset && p < offset + len, "block not invariant");
                (p - offset) as u32
            })
            .collect();
        Permutation { images }
    }
}

impl Mul for &Permutation {
    type Output = Permutation;
    fn mul(self, rhs: &Permutation) -> Permutation {
        self.compose(rhs)
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation with 1-based points; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (k, p) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]{}", self.degree(), self)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const S0_TEXT: &str = "(1,2)(3,6)(4,7)(5,10)(8,14)(9,15)(11,19)(12,16)(13,17)(18,20)";

    #[test]
    fn parses_generator_image() {
        let p = Permutation::parse_cycles(S0_TEXT, 20).unwrap();
        assert_eq!(p.image(0), 1);
        assert_eq!(p.image(2), 5);
        assert_eq!(p.image(19), 17);
        assert_eq!(p.order(), 2);
        assert_eq!(p.to_string(), S0_TEXT);
    }

    #[test]
    fn parse_tolerates_whitespace() {
        let p = Permutation::parse_cycles(" (1, 2) (3,6)\n( 4 ,7 ) ", 7).unwrap();
        assert_eq!(p.to_string(), "(1,2)(3,6)(4,7)");
    }

    #[test]
    fn empty_text_is_identity() {
        let p = Permutation::parse_cycles("", 5).unwrap();
        assert!(p.is_identity());
        assert_eq!(p.degree(), 5);
        assert_eq!(p.to_string(), "()");
        assert!(Permutation::parse_cycles("()", 5).unwrap().is_identity());
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(
            Permutation::parse_cycles("(1,2)(1,3)", 3),
            Err(PermError::RepeatedPoint { point: 1, pos: 6 })
        );
        assert_eq!(
            Permutation::parse_cycles("(1,4)", 3),
            Err(PermError::PointOutOfRange {
                point: 4,
                pos: 3,
                degree: 3
            })
        );
        assert!(matches!(
            Permutation::parse_cycles("(1,2", 3),
            Err(PermError::Syntax { pos: 4, .. })
        ));
        assert!(matches!(
            Permutation::parse_cycles("1,2)", 3),
            Err(PermError::Syntax { pos: 0, .. })
        ));
        assert!(matches!(
            Permutation::parse_cycles("(1;2)", 3),
            Err(PermError::Syntax { pos: 2, .. })
        ));
    }

    #[test]
    fn composition_is_left_to_right() {
        // (1,2) then (2,3): 1 -> 2 -> 3.
        let a = Permutation::parse_cycles("(1,2)", 3).unwrap();
        let b = Permutation::parse_cycles("(2,3)", 3).unwrap();
        let ab = &a * &b;
        assert_eq!(ab.to_string(), "(1,3,2)");
        assert_eq!(ab.image(0), 2);
    }

    #[test]
    fn one_based_boundary() {
        let p = Permutation::parse_cycles("(1,3)", 3).unwrap();
        assert_eq!(p.images(), &[2, 1, 0]);
        assert_eq!(p.first_moved_point(), Some(0));
    }

    #[test]
    fn orders_and_embedding() {
        assert_eq!(Permutation::identity(4).order(), 1);
        let p = Permutation::parse_cycles("(1,2,3)", 3).unwrap();
        let q = Permutation::parse_cycles("(1,2)", 2).unwrap();
        let pq = Permutation::embed_direct_product(&p, &q);
        assert_eq!(pq.degree(), 5);
        assert_eq!(pq.to_string(), "(1,2,3)(4,5)");
        // brute-force powering agrees with the lcm law
        let brute = (1..=100).find(|&k| pq.pow(k).is_identity()).unwrap();
        assert_eq!(brute, 6);
        assert_eq!(pq.order(), 6);
        let id = Permutation::embed_direct_product(
            &Permutation::identity(3),
            &Permutation::identity(4),
        );
        assert!(id.is_identity());
        assert_eq!(id.degree(), 7);
        assert_eq!(pq.restrict(3, 2), q);
    }

    #[test]
    fn from_images_rejects_non_bijection() {
        assert!(Permutation::from_images(vec![0, 0, 1]).is_err());
        assert!(Permutation::from_images(vec![0, 3, 1]).is_err());
        assert!(Permutation::from_images(vec![2, 0, 1]).is_ok());
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n as u32).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    proptest! {
        #[test]
        fn group_laws(p in arb_perm(12), q in arb_perm(12), r in arb_perm(12)) {
            prop_assert_eq!((&(&p * &q)) * &r, &p * &(&q * &r));
            prop_assert!((&p * &p.inverse()).is_identity());
            prop_assert_eq!((&p * &q).inverse(), &q.inverse() * &p.inverse());
            prop_assert_eq!(q.conjugate_by(&p), &(&p.inverse() * &q) * &p);
            prop_assert_eq!(p.pow(-3), p.inverse().pow(3));
        }

        #[test]
        fn format_parse_round_trip(p in arb_perm(15)) {
            let text = p.to_string();
            let back = Permutation::parse_cycles(&text, 15).unwrap();
            prop_assert_eq!(back, p.clone());
            let firsts: Vec<u32> = p.cycles().iter().map(|c| c[0]).collect();
            let mut sorted = firsts.clone();
            sorted.sort_unstable();
            prop_assert_eq!(firsts, sorted);
        }

        #[test]
        fn embed_order_is_lcm(p in arb_perm(7), q in arb_perm(6)) {
            let e = Permutation::embed_direct_product(&p, &q);
            prop_assert_eq!(e.order(), lcm(p.order(), q.order()));
            prop_assert!(e.pow(e.order() as i64).is_identity());
        }
    }
}
