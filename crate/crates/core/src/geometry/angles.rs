use std::f64::consts::PI;

use super::{GeometryError, PLMetric, CLAMP};
use crate::mesh::{FaceId, Triangulation};

/// Side lengths of one triangle together with its (scaled) area.
/// `l[c]` is the side opposite corner `c`.
#[derive(Clone, Copy, Debug)]
pub struct FaceShape {
    pub l: [f64; 3],
    /// Four times the area; zero for degenerate triangles.
    area4: f64,
    /// Corner whose opposite side is at least the sum of the other two.
    flat_corner: Option<usize>,
}

impl FaceShape {
    pub fn new(l: [f64; 3]) -> Self {
        // Kahan's ordering: a >= b >= c.
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&x, &y| l[y].total_cmp(&l[x]));
        let (a, b, c) = (l[idx[0]], l[idx[1]], l[idx[2]]);
        let gap = c - (a - b);
        if gap <= 0.0 || !gap.is_finite() {
            return FaceShape {
                l,
                area4: 0.0,
                flat_corner: Some(idx[0]),
            };
        }
        let p = (a + (b + c)) * gap * (c + (a - b)) * (a + (b - c));
        // area = sqrt(p)/4, so 4·area = sqrt(p).
        let area4 = p.sqrt();
        if area4 > 0.0 {
            FaceShape {
                l,
                area4,
                flat_corner: None,
            }
        } else {
            FaceShape {
                l,
                area4: 0.0,
                flat_corner: Some(idx[0]),
            }
        }
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.flat_corner.is_none()
    }

    pub fn area(&self) -> f64 {
        0.25 * self.area4
    }

    /// `l[c+1]² + l[c+2]² − l[c]²`, i.e. `2·l[c+1]·l[c+2]·cos θ_c`.
    #[inline]
    fn cos_num(&self, c: usize) -> f64 {
        let (a, b, d) = (self.l[c], self.l[(c + 1) % 3], self.l[(c + 2) % 3]);
        (b - a) * (b + a) + d * d
    }

    /// Angles at the three corners. Degenerate triangles get the constant
    /// extension: π at the corner facing the too-long side, 0 elsewhere.
    pub fn angles(&self) -> [f64; 3] {
        match self.flat_corner {
            Some(c) => {
                let mut th = [0.0; 3];
                th[c] = PI;
                th
            }
            None => {
                let mut th = [0.0; 3];
                for (c, t) in th.iter_mut().enumerate() {
                    *t = self.area4.atan2(self.cos_num(c));
                }
                th
            }
        }
    }

    /// Cotangents of the three angles; extended angles map to ±[`CLAMP`].
    pub fn cotangents(&self) -> [f64; 3] {
        match self.flat_corner {
            Some(c) => {
                let mut ct = [CLAMP; 3];
                ct[c] = -CLAMP;
                ct
            }
            None => {
                let mut ct = [0.0; 3];
                for (c, v) in ct.iter_mut().enumerate() {
                    *v = (self.cos_num(c) / self.area4).clamp(-CLAMP, CLAMP);
                }
                ct
            }
        }
    }
}

/// Angles `(θ_i, θ_j, θ_k)` of a triangle with sides `(l_i, l_j, l_k)`, where
/// `θ_i` faces `l_i`. Degenerate triangles use the constant extension.
pub fn triangle_angles(li: f64, lj: f64, lk: f64) -> Result<[f64; 3], GeometryError> {
    for x in [li, lj, lk] {
        if !(x > 0.0 && x.is_finite()) {
            return Err(GeometryError::NonPositiveLength { length: x });
        }
    }
    Ok(FaceShape::new([li, lj, lk]).angles())
}

/// Cotangents of the angles of a triangle, with the extended-angle clamp.
pub fn triangle_cotangents(li: f64, lj: f64, lk: f64) -> Result<[f64; 3], GeometryError> {
    for x in [li, lj, lk] {
        if !(x > 0.0 && x.is_finite()) {
            return Err(GeometryError::NonPositiveLength { length: x });
        }
    }
    Ok(FaceShape::new([li, lj, lk]).cotangents())
}

/// Corner angles of face `f` in `metric`.
pub fn face_angles(tri: &Triangulation, metric: &PLMetric, f: FaceId) -> [f64; 3] {
    FaceShape::new(metric.face_lengths(tri, f)).angles()
}

/// Corner cotangents of face `f` in `metric`.
pub fn face_cotangents(tri: &Triangulation, metric: &PLMetric, f: FaceId) -> [f64; 3] {
    FaceShape::new(metric.face_lengths(tri, f)).cotangents()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
        a.iter().zip(&b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn equilateral() {
        let th = triangle_angles(1.0, 1.0, 1.0).unwrap();
        assert!(close(th, [PI / 3.0; 3], 1e-15));
    }

    #[test]
    fn right_triangle() {
        let th = triangle_angles(5.0, 4.0, 3.0).unwrap();
        assert!(close(
            th,
            [PI / 2.0, (4.0f64 / 5.0).asin(), (3.0f64 / 5.0).asin()],
            1e-15
        ));
    }

    #[test]
    fn degenerate_extension() {
        assert_eq!(triangle_angles(2.5, 1.0, 1.0).unwrap(), [PI, 0.0, 0.0]);
        assert_eq!(triangle_angles(1.0, 3.0, 1.0).unwrap(), [0.0, PI, 0.0]);
        // Boundary case l_i = l_j + l_k is already degenerate.
        assert_eq!(triangle_angles(1.0, 1.0, 2.0).unwrap(), [0.0, 0.0, PI]);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(triangle_angles(0.0, 1.0, 1.0).is_err());
        assert!(triangle_angles(1.0, -1.0, 1.0).is_err());
        assert!(triangle_angles(1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn cotangent_values() {
        let c = triangle_cotangents(1.0, 1.0, 1.0).unwrap();
        assert!(close(c, [1.0 / 3f64.sqrt(); 3], 1e-15));
        let c = triangle_cotangents(5.0, 4.0, 3.0).unwrap();
        assert!(c[0].abs() < 1e-15);
        assert!((c[1] - 0.75).abs() < 1e-15);
        let c = triangle_cotangents(2.5, 1.0, 1.0).unwrap();
        assert_eq!(c, [-CLAMP, CLAMP, CLAMP]);
    }

    proptest! {
        #[test]
        fn angles_sum_to_pi(a in 0.01f64..10.0, b in 0.01f64..10.0, c in 0.01f64..10.0) {
            let th = triangle_angles(a, b, c).unwrap();
            prop_assert!((th.iter().sum::<f64>() - PI).abs() < 1e-12);
            prop_assert!(th.iter().all(|t| (0.0..=PI).contains(t)));
        }

        #[test]
        fn matches_law_of_cosines(a in 0.1f64..5.0, b in 0.1f64..5.0, c in 0.1f64..5.0) {
            let s = FaceShape::new([a, b, c]);
            prop_assume!(s.is_nondegenerate());
            let th = s.angles();
            let want = ((b * b + c * c - a * a) / (2.0 * b * c)).clamp(-1.0, 1.0).acos();
            // acos loses accuracy near 0 and π; compare through cosines there.
            prop_assert!((th[0].cos() - want.cos()).abs() < 1e-12);
        }

        #[test]
        fn angles_continuous_at_degeneracy(b in 0.1f64..5.0, c in 0.1f64..5.0, eps in 1e-9f64..1e-6) {
            // Approaching a = b + c from inside: angle at a tends to π.
            let th = triangle_angles(b + c - eps * (b + c), b, c).unwrap();
            prop_assert!(th[0] > PI - 5e-2);
        }
    }
}
