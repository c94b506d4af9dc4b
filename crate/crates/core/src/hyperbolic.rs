//! Poincare-disk geometry: points, geodesic arcs, and the SU(1,1) matrix
//! algebra whose fractional linear action provides the disk isometries.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point strictly inside the unit disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    re: f64,
    im: f64,
}

impl DiskPoint {
    /// Construct a point, rejecting anything on or outside the unit circle.
    pub fn new(re: f64, im: f64) -> Result<DiskPoint> {
        if re * re + im * im >= 1.0 || !re.is_finite() || !im.is_finite() {
            return Err(Error::PointOutsideDisk { re, im });
        }
        Ok(DiskPoint { re, im })
    }

    pub const ORIGIN: DiskPoint = DiskPoint { re: 0.0, im: 0.0 };

    pub fn from_complex(z: Complex64) -> Result<DiskPoint> {
        DiskPoint::new(z.re, z.im)
    }

    /// Construct from a complex value that is inside the disk up to
    /// rounding; values that rounded onto the circle are pulled one
    /// epsilon inward. Values genuinely outside still error.
    pub fn from_complex_clamped(z: Complex64) -> Result<DiskPoint> {
        let n = z.norm();
        if n < 1.0 {
            return DiskPoint::new(z.re, z.im);
        }
        if n > 1.0 + 1e-9 || !n.is_finite() {
            return Err(Error::PointOutsideDisk { re: z.re, im: z.im });
        }
        let s = (1.0 - f64::EPSILON) / n;
        DiskPoint::new(z.re * s, z.im * s)
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm(&self) -> f64 {
        self.to_complex().norm()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

/// Hyperbolic distance between two disk points (curvature -1 metric).
pub fn hyperbolic_distance(z: &DiskPoint, w: &DiskPoint) -> f64 {
    let dz = z.to_complex() - w.to_complex();
    let arg = 1.0 + 2.0 * dz.norm_sqr() / ((1.0 - z.norm_sqr()) * (1.0 - w.norm_sqr()));
    // Rounding can land a hair below 1 for coincident points.
    arg.max(1.0).acosh()
}

/// Hyperbolic distance from the origin: ln((1+|z|)/(1-|z|)).
pub fn distance_from_origin(z: &DiskPoint) -> f64 {
    let n = z.norm();
    ((1.0 + n) / (1.0 - n)).ln()
}

/// An SU(1,1) matrix [[u, v], [conj(v), conj(u)]] with |u|^2 - |v|^2 = 1,
/// acting on the disk by z -> (u z + v)/(conj(v) z + conj(u)).
///
/// Stored modulo overall sign (the action ignores it); the representative
/// is canonicalized to Re(u) >= 0, ties broken by Im(u) >= 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoebiusMap {
    u: Complex64,
    v: Complex64,
}

impl MoebiusMap {
    pub const IDENTITY: MoebiusMap = MoebiusMap {
        u: Complex64::new(1.0, 0.0),
        v: Complex64::new(0.0, 0.0),
    };

    fn canonicalized(mut u: Complex64, mut v: Complex64) -> MoebiusMap {
        if u.re < 0.0 || (u.re == 0.0 && u.im < 0.0) {
            u = -u;
            v = -v;
        }
        MoebiusMap { u, v }
    }

    /// Renormalize to unit determinant, but only when the measured drift
    /// exceeds the rounding floor of the determinant evaluation itself:
    /// |u|^2 - |v|^2 is a difference of large squares, so for far-flung
    /// matrices its computed value carries noise of order eps*(|u|^2+|v|^2),
    /// and dividing by sqrt(1 + noise) would only inject that noise into
    /// otherwise-exact entries.
    fn renormalized(u: Complex64, v: Complex64) -> MoebiusMap {
        let nu = u.norm_sqr();
        let nv = v.norm_sqr();
        let det = nu - nv;
        let floor = 8.0 * f64::EPSILON * (nu + nv);
        if (det - 1.0).abs() > floor && det > 0.0 {
            let s = 1.0 / det.sqrt();
            MoebiusMap::canonicalized(u * s, v * s)
        } else {
            MoebiusMap::canonicalized(u, v)
        }
    }

    /// Build directly from entries, renormalizing and canonicalizing.
    pub fn from_entries(u: Complex64, v: Complex64) -> MoebiusMap {
        MoebiusMap::renormalized(u, v)
    }

    pub fn u(&self) -> Complex64 {
        self.u
    }

    pub fn v(&self) -> Complex64 {
        self.v
    }

    /// Translation-type generator mapping 0 to omega:
    /// -(1/sqrt(1-|omega|^2)) [[1, omega], [conj(omega), 1]].
    pub fn translation(omega: &DiskPoint) -> MoebiusMap {
        let w = omega.to_complex();
        let s = -1.0 / (1.0 - omega.norm_sqr()).sqrt();
        MoebiusMap::renormalized(Complex64::new(s, 0.0), s * w)
    }

    /// Half-turn about p: -(1/(1-|p|^2)) [[1+|p|^2, 2p], [2 conj(p), 1+|p|^2]].
    pub fn half_turn(p: &DiskPoint) -> MoebiusMap {
        let z = p.to_complex();
        let n2 = p.norm_sqr();
        let s = -1.0 / (1.0 - n2);
        MoebiusMap::renormalized(Complex64::new(s * (1.0 + n2), 0.0), s * 2.0 * z)
    }

    /// Apply the fractional linear action to a disk point.
    pub fn apply(&self, z: &DiskPoint) -> DiskPoint {
        let zz = z.to_complex();
        let w = (self.u * zz + self.v) / (self.v.conj() * zz + self.u.conj());
        DiskPoint::from_complex_clamped(w)
            .expect("isometry applied to an interior point stays in the disk")
    }

    /// Group multiplication: self then applied after other, so
    /// compose(m1, m2).apply(z) = m1.apply(m2.apply(z)).
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let u = self.u * other.u + self.v * other.v.conj();
        let v = self.u * other.v + self.v * other.u.conj();
        MoebiusMap::renormalized(u, v)
    }

    pub fn inverse(&self) -> MoebiusMap {
        MoebiusMap::canonicalized(self.u.conj(), -self.v)
    }

    /// True iff the trace magnitude |u + conj(u)| exceeds 2, i.e. the map
    /// translates along an invariant geodesic.
    pub fn is_hyperbolic(&self) -> bool {
        2.0 * self.u.re.abs() > 2.0
    }

    /// Hyperbolic distance d(0, m[0]) = 2 ln(|u| + |v|).
    ///
    /// Exact cancellation-free form: m[0] = v/conj(u) has modulus |v|/|u|,
    /// so the origin formula telescopes to a single logarithm that stays
    /// accurate even when |m[0]| rounds to 1.
    pub fn origin_displacement(&self) -> f64 {
        2.0 * (self.u.norm() + self.v.norm()).ln()
    }

    /// Max-norm deviation from the identity, respecting the sign quotient
    /// (the representative is already canonicalized to Re(u) >= 0).
    pub fn deviation_from_identity(&self) -> f64 {
        let du = (self.u - Complex64::new(1.0, 0.0)).norm();
        du.max(self.v.norm())
    }

    /// Determinant drift |(|u|^2 - |v|^2) - 1|, which the invariant keeps
    /// below 1e-12.
    pub fn det_drift(&self) -> f64 {
        (self.u.norm_sqr() - self.v.norm_sqr() - 1.0).abs()
    }
}

/// A geodesic: the arc of a Euclidean circle of radius `radius` whose
/// center sits at distance sqrt(1 + radius^2) from the origin, in the
/// direction `angle`. Such circles meet the unit circle at right angles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicArc {
    pub radius: f64,
    pub angle: f64,
}

impl GeodesicArc {
    pub fn new(radius: f64, angle: f64) -> GeodesicArc {
        let two_pi = 2.0 * std::f64::consts::PI;
        GeodesicArc {
            radius,
            angle: angle.rem_euclid(two_pi),
        }
    }

    /// Euclidean center of the supporting circle.
    pub fn center(&self) -> Complex64 {
        Complex64::from_polar((1.0 + self.radius * self.radius).sqrt(), self.angle)
    }

    /// Arc-length parametrization of the geodesic: s is the hyperbolic
    /// distance along the curve from its point nearest the origin.
    ///
    /// z(s) = e^{i angle} (cosh s + i R sinh s) / (sqrt(1+R^2) cosh s + R);
    /// algebraically |z - center| = R for every s, and |z| < 1 with the
    /// boundary approached as s -> +/-inf.
    pub fn point(&self, s: f64) -> DiskPoint {
        let r = self.radius;
        let sq = (1.0 + r * r).sqrt();
        let (sh, ch) = (s.sinh(), s.cosh());
        let num = Complex64::new(ch, r * sh);
        let den = sq * ch + r;
        let z = Complex64::from_polar(1.0, self.angle) * num / den;
        DiskPoint::from_complex_clamped(z)
            .expect("geodesic points lie inside the disk up to rounding")
    }
}

/// Backwards-friendly free function mirroring `GeodesicArc::point`.
pub fn geodesic_point(arc: &GeodesicArc, s: f64) -> DiskPoint {
    arc.point(s)
}
