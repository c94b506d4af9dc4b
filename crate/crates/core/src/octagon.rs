//! The symmetric fundamental octagon and its side-pairing group.
//!
//! A module (a, alpha) fixes a geodesic octagon with four vertices at
//! a*e^{ik pi/2} and four at b*e^{i(alpha + k pi/2)}; pairing opposite sides
//! yields four hyperbolic generators (plus inverses) of a discrete isometry
//! group whose quotient is a genus-two surface.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::{Error, Result};
use crate::hyperbolic::{DiskPoint, GeodesicArc, MoebiusMap};

/// Margin below which a module is treated as numerically degenerate even
/// though it is nominally above the admissibility bound.
const ADMISSIBILITY_MARGIN: f64 = 1e-9;

/// The one free parameter pair of the symmetric octagon family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleParams {
    /// Radial position of the first vertex, 0 < a < 1.
    pub a: f64,
    /// Angular position of the second vertex, 0 < alpha < pi/2 (radians).
    pub alpha: f64,
}

impl ModuleParams {
    pub fn new(a: f64, alpha: f64) -> ModuleParams {
        ModuleParams { a, alpha }
    }

    /// Lower bound on `a` for the octagon to exist: 1/(sqrt(2) cos(alpha - pi/4)).
    pub fn admissibility_bound(&self) -> f64 {
        1.0 / (std::f64::consts::SQRT_2 * (self.alpha - FRAC_PI_4).cos())
    }

    /// True iff the module describes a nondegenerate octagon (with a small
    /// safety margin above the exact bound).
    pub fn admissible(&self) -> bool {
        self.alpha > 0.0
            && self.alpha < FRAC_PI_2
            && self.a < 1.0
            && self.a - self.admissibility_bound() > ADMISSIBILITY_MARGIN
    }
}

/// Fully derived octagon: closed-form scalars, the eight vertices and side
/// arcs, the side-pairing targets, and the group generators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OctagonGeometry {
    pub params: ModuleParams,
    pub t_plus: f64,
    pub t_minus: f64,
    pub r_plus: f64,
    pub r_minus: f64,
    pub phi_plus: f64,
    pub phi_minus: f64,
    pub b: f64,
    /// Interior angle at the four a-vertices.
    pub beta: f64,
    /// Interior angle at the four b-vertices; beta + gamma_angle = pi/2.
    pub gamma_angle: f64,
    /// The eight vertices in counterclockwise order, starting at z = a.
    pub vertices: [DiskPoint; 8],
    /// Side arcs in counterclockwise order; `sides[2k]` joins
    /// `vertices[2k]` to `vertices[2k+1]`.
    pub sides: [GeodesicArc; 8],
    /// Side-pairing translation targets omega_0..omega_3.
    pub omega: [DiskPoint; 4],
    /// Half-turn points p_0..p_3 (geodesic midpoints of [0, omega_k]).
    pub midpoints: [DiskPoint; 4],
    /// Generators indexed 1..=8 as g0, g1, g2, g3, g0^-1, g1^-1, g2^-1, g3^-1;
    /// the inverse of index i is i +/- 4.
    pub generators: [MoebiusMap; 8],
}

impl OctagonGeometry {
    /// Derive the full geometry from the module, or reject it.
    pub fn build(params: ModuleParams) -> Result<OctagonGeometry> {
        if !params.admissible() {
            return Err(Error::InadmissibleModule {
                a: params.a,
                alpha: params.alpha,
                bound: params.admissibility_bound(),
            });
        }
        let a = params.a;
        let alpha = params.alpha;
        let a2 = a * a;
        let ca = (alpha - FRAC_PI_4).cos();

        let t_plus = a2 + (alpha - FRAC_PI_4).tan();
        let t_minus = a2 - (alpha - FRAC_PI_4).tan();
        let r_plus = (t_plus * t_plus + (1.0 - a2) * (1.0 - a2)).sqrt() / (2.0 * a);
        let r_minus = (t_minus * t_minus + (1.0 - a2) * (1.0 - a2)).sqrt() / (2.0 * a);
        let phi_plus = (t_plus / (1.0 + a2)).atan();
        let phi_minus = ((1.0 + a2) / t_minus).atan();

        // Interior angle at the a-vertices; the admissible region keeps the
        // denominator positive, so beta stays in (0, pi/2).
        let c2 = 2.0 * a2 * ca * ca;
        let tan_beta = (1.0 - a2) * c2 / (c2 - 1.0);
        let beta = tan_beta.atan();
        let gamma_angle = FRAC_PI_2 - beta;

        let b = 1.0 / (std::f64::consts::SQRT_2 * a * ca);
        let b2 = b * b;

        // Side-pairing targets: each generator carries a side arc onto the
        // opposite one; omega_k is the image of the origin.
        let e_ia = Complex64::from_polar(1.0, alpha);
        let den = 1.0 - a2 * b2;
        let common = e_ia * (b * (1.0 - a2));
        let i = Complex64::i();
        let omega_plus = (common + a * (1.0 - b2)) / den;
        let omega_minus = (common + i * (a * (1.0 - b2))) / den;
        let omega_c = [omega_plus, omega_minus, i * omega_plus, i * omega_minus];

        let mut omega = [DiskPoint::ORIGIN; 4];
        let mut midpoints = [DiskPoint::ORIGIN; 4];
        for (k, &w) in omega_c.iter().enumerate() {
            omega[k] = DiskPoint::from_complex(w)?;
            let p = w / (1.0 + (1.0 - w.norm_sqr()).sqrt());
            midpoints[k] = DiskPoint::from_complex(p)?;
        }

        let g: Vec<MoebiusMap> = omega.iter().map(MoebiusMap::translation).collect();
        let generators = [
            g[0],
            g[1],
            g[2],
            g[3],
            g[0].inverse(),
            g[1].inverse(),
            g[2].inverse(),
            g[3].inverse(),
        ];

        let mut vertices = [DiskPoint::ORIGIN; 8];
        let mut sides = [GeodesicArc::new(1.0, 0.0); 8];
        for k in 0..4 {
            let rot = k as f64 * FRAC_PI_2;
            vertices[2 * k] = DiskPoint::from_complex(Complex64::from_polar(a, rot))?;
            vertices[2 * k + 1] = DiskPoint::from_complex(Complex64::from_polar(b, alpha + rot))?;
            sides[2 * k] = GeodesicArc::new(r_plus, phi_plus + rot);
            sides[2 * k + 1] = GeodesicArc::new(r_minus, phi_minus + rot);
        }

        Ok(OctagonGeometry {
            params,
            t_plus,
            t_minus,
            r_plus,
            r_minus,
            phi_plus,
            phi_minus,
            b,
            beta,
            gamma_angle,
            vertices,
            sides,
            omega,
            midpoints,
            generators,
        })
    }

    /// Maximum absolute residual of the seven-equation consistency system
    /// tying the derived scalars together.
    ///
    /// The first entry is the angle-sum constraint. The second, third,
    /// fifth, and sixth say each vertex lies on its two side circles
    /// (law of cosines between the vertex ray and the circle-center ray).
    /// The fourth and seventh say the circles meet at the interior angle
    /// (law of cosines for the center-to-center chord, where the angle
    /// between the two radius vectors at the vertex is pi minus the
    /// interior angle).
    pub fn vertex_system_residual(&self) -> f64 {
        let a = self.params.a;
        let alpha = self.params.alpha;
        let b = self.b;
        let sp = (1.0 + self.r_plus * self.r_plus).sqrt();
        let sm = (1.0 + self.r_minus * self.r_minus).sqrt();
        let (fp, fm) = (self.phi_plus, self.phi_minus);
        let rr = self.r_plus * self.r_minus;

        let eqs = [
            self.beta + self.gamma_angle - FRAC_PI_2,
            1.0 + a * a - 2.0 * a * sp * fp.cos(),
            1.0 + a * a - 2.0 * a * sm * fm.sin(),
            a * a - a * (sp * fp.cos() + sm * fm.sin())
                + sp * sm * (fm - fp).sin()
                + rr * self.beta.cos(),
            1.0 + b * b - 2.0 * b * sp * (alpha - fp).cos(),
            1.0 + b * b - 2.0 * b * sm * (fm - alpha).cos(),
            b * b - b * (sp * (alpha - fp).cos() + sm * (fm - alpha).cos())
                + sp * sm * (fm - fp).cos()
                + rr * self.gamma_angle.cos(),
        ];
        eqs.iter().fold(0.0f64, |m, e| m.max(e.abs()))
    }

    /// Deviation from the identity of the defining relation word
    /// g0 g1^-1 g2 g3^-1 g0^-1 g1 g2^-1 g3.
    pub fn group_relation_deviation(&self) -> f64 {
        let g = &self.generators;
        let word = [0usize, 5, 2, 7, 4, 1, 6, 3];
        let mut acc = MoebiusMap::IDENTITY;
        for &k in &word {
            acc = acc.compose(&g[k]);
        }
        acc.deviation_from_identity()
    }

    /// Images of the origin under the eight generators: the centers of the
    /// adjacent cells, i.e. the first-generation tree sites.
    pub fn neighbor_centers(&self) -> [DiskPoint; 8] {
        let mut out = [DiskPoint::ORIGIN; 8];
        for (i, g) in self.generators.iter().enumerate() {
            out[i] = g.apply(&DiskPoint::ORIGIN);
        }
        out
    }
}

/// Family split of the generator indices (0-based): even indices carry the
/// omega_0/omega_2 pair ("plus" family), odd ones omega_1/omega_3 ("minus").
pub fn is_plus_family(index0: usize) -> bool {
    index0 % 2 == 0
}
