//! Array-response and beam-footprint mathematics.
//!
//! Covers uniform rectangular array (URA) steering vectors, half-power
//! beamwidth (HPBW), the effective footprint diameter (EFD) a beam casts on
//! the surface plane, and the minimum inter-spacing between adjacent sub-RIS
//! panels so that one footprint illuminates exactly one panel.
//!
//! All angles are radians. All lengths are metres. Every function here is a
//! pure function of its inputs.

use num_complex::Complex64;

use crate::{Error, Result};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Wavelength in metres for a carrier frequency given in GHz.
pub fn wavelength_m(f_c_ghz: f64) -> f64 {
    SPEED_OF_LIGHT / (f_c_ghz * 1e9)
}

/// Uniform rectangular array layout: element counts along the x/y axes,
/// element spacings, and the operating wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UraGeometry {
    pub n_x: usize,
    pub n_y: usize,
    /// Element separation along the x-axis (metres).
    pub spacing_x: f64,
    /// Element separation along the y-axis (metres).
    pub spacing_y: f64,
    /// Signal wavelength (metres).
    pub wavelength: f64,
}

impl UraGeometry {
    pub fn new(
        n_x: usize,
        n_y: usize,
        spacing_x: f64,
        spacing_y: f64,
        wavelength: f64,
    ) -> Result<Self> {
        if n_x == 0 || n_y == 0 {
            return Err(Error::InvalidInput("element counts must be >= 1".into()));
        }
        if !(spacing_x > 0.0 && spacing_y > 0.0 && wavelength > 0.0) {
            return Err(Error::InvalidInput(
                "spacings and wavelength must be positive".into(),
            ));
        }
        Ok(Self {
            n_x,
            n_y,
            spacing_x,
            spacing_y,
            wavelength,
        })
    }

    /// Array with half-wavelength spacing on both axes.
    pub fn half_wavelength(n_x: usize, n_y: usize, wavelength: f64) -> Result<Self> {
        Self::new(n_x, n_y, wavelength / 2.0, wavelength / 2.0, wavelength)
    }

    /// Total element count N = n_x * n_y.
    pub fn len(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// An azimuth/elevation direction pair in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglePair {
    pub azimuth: f64,
    pub elevation: f64,
}

impl AnglePair {
    pub fn new(azimuth: f64, elevation: f64) -> Self {
        Self { azimuth, elevation }
    }

    /// Unit direction vector in Cartesian coordinates, used for angular
    /// distance between directions.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (saz, caz) = self.azimuth.sin_cos();
        let (sel, cel) = self.elevation.sin_cos();
        [cel * caz, cel * saz, sel]
    }

    /// Angle in radians between this direction and `other`.
    pub fn angular_distance(&self, other: &AnglePair) -> f64 {
        let a = self.unit_vector();
        let b = other.unit_vector();
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        dot.clamp(-1.0, 1.0).acos()
    }
}

/// In-plane wave-number vector `(2pi/lambda) [sin(el)cos(az), sin(el)sin(az)]`
/// for a URA lying in the x-y plane.
pub fn wave_vector(angles: AnglePair, wavelength: f64) -> [f64; 2] {
    let scale = 2.0 * std::f64::consts::PI / wavelength;
    let (saz, caz) = angles.azimuth.sin_cos();
    let sel = angles.elevation.sin();
    [scale * sel * caz, scale * sel * saz]
}

/// Normalized array response of a URA: length-N vector with unit Euclidean
/// norm, every entry of magnitude `1/sqrt(N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector(Vec<Complex64>);

impl SteeringVector {
    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Euclidean norm; equals 1 for any valid steering vector.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hermitian inner product `self^H other`.
    pub fn inner(&self, other: &SteeringVector) -> Complex64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// URA steering vector toward `angles`. Element `n = n_y * N_x + n_x` has
/// value `(1/sqrt(N)) exp(j k^T p_n)` with `p_n = [n_x dx, n_y dy]`.
pub fn ura_response(geom: &UraGeometry, angles: AnglePair) -> Result<SteeringVector> {
    if !(angles.azimuth.is_finite() && angles.elevation.is_finite()) {
        return Err(Error::InvalidInput("angles must be finite".into()));
    }
    let k = wave_vector(angles, geom.wavelength);
    let n = geom.len();
    let scale = 1.0 / (n as f64).sqrt();
    let mut entries = Vec::with_capacity(n);
    for ny in 0..geom.n_y {
        let phase_y = k[1] * ny as f64 * geom.spacing_y;
        for nx in 0..geom.n_x {
            let phase = k[0] * nx as f64 * geom.spacing_x + phase_y;
            entries.push(Complex64::from_polar(scale, phase));
        }
    }
    Ok(SteeringVector(entries))
}

/// Half-power beamwidth of an array axis: `0.891 lambda / (n * spacing)`.
pub fn hpbw(n_axis: usize, spacing: f64, wavelength: f64) -> f64 {
    debug_assert!(n_axis >= 1 && spacing > 0.0 && wavelength > 0.0);
    0.891 * wavelength / (n_axis as f64 * spacing)
}

/// Effective footprint diameter at distance `d` for a beam of width `hpbw`
/// hitting the surface at incidence angle `theta0` from broadside:
/// `2 d sin(hpbw/2) / cos(hpbw/2 + theta0)`.
///
/// Fails when the beam grazes the surface (cosine term not positive).
pub fn efd_exact(d: f64, hpbw: f64, theta0: f64) -> Result<f64> {
    if d <= 0.0 || d.is_nan() {
        return Err(Error::InvalidInput("distance must be positive".into()));
    }
    let half = hpbw / 2.0;
    if half + theta0.abs() >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::Domain(format!(
            "beam grazes the surface: hpbw/2 + |theta0| = {} >= pi/2",
            half + theta0.abs()
        )));
    }
    Ok(2.0 * d * half.sin() / (half + theta0).cos())
}

/// Small-beamwidth footprint approximation at normal incidence:
/// `hpbw * d` (first MacLaurin term of the exact tangent form).
pub fn efd_approx(d: f64, hpbw: f64) -> f64 {
    debug_assert!(d > 0.0 && hpbw < std::f64::consts::FRAC_PI_2);
    hpbw * d
}

/// Side length of a sub-RIS panel along one axis: `m_axis * spacing`.
pub fn sub_ris_side_length(m_axis: usize, spacing: f64) -> f64 {
    debug_assert!(m_axis >= 1 && spacing > 0.0);
    m_axis as f64 * spacing
}

/// Minimum edge-to-edge spacing between adjacent sub-RIS panels so a
/// footprint of diameter `efd` covers only the target panel of side `iota`:
/// `(efd - iota) / 2`.
///
/// The signed value is returned; a negative result means the footprint is
/// smaller than the panel and no extra spacing is required.
pub fn sub_ris_spacing(efd: f64, iota: f64) -> f64 {
    debug_assert!(efd >= 0.0 && iota >= 0.0);
    (efd - iota) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    const TOL: f64 = 1e-12;

    fn lambda28() -> f64 {
        wavelength_m(28.0)
    }

    #[test]
    fn broadside_response_is_uniform() {
        let geom = UraGeometry::half_wavelength(10, 10, lambda28()).unwrap();
        let sv = ura_response(&geom, AnglePair::new(0.0, 0.0)).unwrap();
        for e in sv.entries() {
            assert!((e.re - 0.1).abs() < TOL && e.im.abs() < TOL);
        }
    }

    #[test]
    fn two_element_response_at_grazing_elevation() {
        // k^T p_1 = (2pi/lambda)(lambda/2) = pi, so entries are
        // (1/sqrt(2)) [1, -1].
        let lam = lambda28();
        let geom = UraGeometry::half_wavelength(2, 1, lam).unwrap();
        let sv = ura_response(&geom, AnglePair::new(0.0, FRAC_PI_2)).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        assert!((sv.entries()[0] - Complex64::new(s, 0.0)).norm() < TOL);
        assert!((sv.entries()[1] - Complex64::new(-s, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn steering_vector_norm_and_entry_magnitudes() {
        let lam = lambda28();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n_x = rng.random_range(1..=12);
            let n_y = rng.random_range(1..=12);
            let geom = UraGeometry::half_wavelength(n_x, n_y, lam).unwrap();
            let angles = AnglePair::new(
                rng.random_range(-PI..PI),
                rng.random_range(-FRAC_PI_2..FRAC_PI_2),
            );
            let sv = ura_response(&geom, angles).unwrap();
            assert!((sv.norm() - 1.0).abs() < TOL);
            let mag = 1.0 / (geom.len() as f64).sqrt();
            for e in sv.entries() {
                assert!((e.norm() - mag).abs() < TOL);
            }
        }
    }

    #[test]
    fn rejects_non_finite_angles() {
        let geom = UraGeometry::half_wavelength(4, 4, lambda28()).unwrap();
        assert!(ura_response(&geom, AnglePair::new(f64::NAN, 0.0)).is_err());
        assert!(ura_response(&geom, AnglePair::new(0.0, f64::INFINITY)).is_err());
    }

    #[test]
    fn hpbw_values() {
        let lam = lambda28();
        assert!((hpbw(10, lam / 2.0, lam) - 0.1782).abs() < TOL);
        assert!((hpbw(1, lam, lam) - 0.891).abs() < TOL);
        // Doubling the axis count halves the beamwidth exactly.
        assert_eq!(hpbw(20, lam / 2.0, lam), hpbw(10, lam / 2.0, lam) / 2.0);
    }

    #[test]
    fn efd_exact_values() {
        // Direct evaluation: 2*10*sin(0.0891)/cos(0.0891) = 1.7867307.
        let v = efd_exact(10.0, 0.1782, 0.0).unwrap();
        assert!((v - 1.786_730_676_083_543_7).abs() < 1e-12);
        // Oblique incidence, direct evaluation.
        let v = efd_exact(2.5, 0.1782, FRAC_PI_3).unwrap();
        assert!((v - 1.056_906_150_388_81).abs() < 1e-12);
    }

    #[test]
    fn efd_exact_grazing_is_domain_error() {
        let h = 0.1782;
        let theta0 = FRAC_PI_2 - h / 2.0;
        assert!(matches!(
            efd_exact(10.0, h, theta0),
            Err(Error::Domain(_))
        ));
        assert!(efd_exact(10.0, h, theta0 + 0.1).is_err());
    }

    #[test]
    fn efd_approx_values() {
        assert!((efd_approx(10.0, 0.1782) - 1.782).abs() < TOL);
        assert_eq!(efd_approx(10.0, 0.0), 0.0);
        let exact = efd_exact(10.0, 0.1782, 0.0).unwrap();
        let rel = (exact - 1.782) / exact;
        assert!(rel > 0.0 && rel < 0.003);
    }

    #[test]
    fn efd_exact_dominates_approx_and_grows_with_incidence() {
        for i in 1..30 {
            let h = i as f64 * 0.01;
            let exact = efd_exact(5.0, h, 0.0).unwrap();
            let approx = efd_approx(5.0, h);
            assert!(exact >= approx);
            assert!((exact - approx) / exact < 0.01, "h = {h}");
        }
        // Strictly increasing in |theta0|.
        let h = 0.1782;
        let mut prev = efd_exact(5.0, h, 0.0).unwrap();
        for i in 1..=40 {
            let t = i as f64 * 0.03;
            let cur = efd_exact(5.0, h, t).unwrap();
            assert!(cur > prev, "theta0 = {t}");
            prev = cur;
        }
    }

    #[test]
    fn sub_ris_side_length_values() {
        let lam = lambda28();
        let iota = sub_ris_side_length(10, lam / 2.0);
        assert!((iota - 0.053_534_367_5).abs() < 1e-9);
        assert_eq!(sub_ris_side_length(1, lam / 2.0), lam / 2.0);
        assert!((sub_ris_side_length(20, lam / 2.0) - 2.0 * iota).abs() < TOL);
    }

    #[test]
    fn sub_ris_spacing_compositions() {
        let lam = lambda28();
        let h = hpbw(10, lam / 2.0, lam);
        let iota = sub_ris_side_length(10, lam / 2.0);
        let indoor = sub_ris_spacing(efd_approx(2.5, h), iota);
        assert!((indoor - 0.195_982_816_25).abs() < 1e-9);
        let outdoor = sub_ris_spacing(efd_approx(20.0, h), iota);
        assert!((outdoor - 1.755_232_816_25).abs() < 1e-9);
        assert_eq!(sub_ris_spacing(iota, iota), 0.0);
        // Signed output when the footprint is smaller than the panel.
        assert!(sub_ris_spacing(iota / 2.0, iota) < 0.0);
    }

    #[test]
    fn spacing_decreases_with_bs_array_size() {
        let lam = lambda28();
        let iota = sub_ris_side_length(10, lam / 2.0);
        let mut prev = f64::INFINITY;
        for n in [6, 8, 10, 12, 16, 20, 30] {
            let delta = sub_ris_spacing(efd_approx(2.5, hpbw(n, lam / 2.0, lam)), iota);
            assert!(delta < prev);
            prev = delta;
        }
    }

    #[test]
    fn angular_distance_basics() {
        let a = AnglePair::new(0.0, 0.0);
        let b = AnglePair::new(PI / 2.0, 0.0);
        assert!((a.angular_distance(&b) - PI / 2.0).abs() < 1e-12);
        assert!(a.angular_distance(&a) < 1e-7);
    }
}
