//! Point-level radial distortion transforms.
//!
//! All coordinates are normalized: the origin sits on the principal point
//! (the image center) and the unit length is half the image diagonal, so
//! every pixel of the frame lies within radius 1.
//!
//! Two families are supported, each controlled by a single coefficient λ:
//!
//! ```text
//! division model:   p_u = p_d / (1 + λ r_d²)
//! Kannala-Brandt:   p_u = λ θ(r_d) · p_d / r_d
//! ```
//!
//! where θ(r_d) depends on the projection variant. "Undistort" maps a point
//! of the distorted image to its location in the undistorted image; "distort"
//! is the exact inverse.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A point in normalized image coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormPoint {
    pub x: f64,
    pub y: f64,
}

impl NormPoint {
    pub const ORIGIN: NormPoint = NormPoint { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn radius(self) -> Radius {
        radius(self)
    }

    fn scaled(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

/// Nonnegative, finite distance from the principal point.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Radius(f64);

impl Radius {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(Self(value))
        } else {
            Err(Error::Domain(format!("radius must be finite and >= 0, got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Euclidean distance of `p` from the distortion center.
pub fn radius(p: NormPoint) -> Radius {
    Radius(p.x.hypot(p.y))
}

/// Division-model scale factor `1 + λ r_d²`.
pub fn dm_delta(r_d: Radius, lambda: f64) -> f64 {
    1.0 + lambda * r_d.0 * r_d.0
}

/// Maps a distorted point to its undistorted location under the division model.
pub fn dm_undistort(p_d: NormPoint, lambda: f64) -> NormPoint {
    let delta = dm_delta(radius(p_d), lambda);
    NormPoint::new(p_d.x / delta, p_d.y / delta)
}

/// Inverse of [`dm_undistort`].
///
/// Solves `λ r_u r_d² − r_d + r_u = 0` and keeps the smaller root, the branch
/// that tends to the identity as λ → 0. The root is evaluated in the
/// rationalized form `2 r_u / (1 + √(1 − 4λr_u²))`, which has no cancellation
/// for small λ and needs no special case at λ = 0 or r_u = 0.
pub fn dm_distort(p_u: NormPoint, lambda: f64) -> Result<NormPoint> {
    let r_u = radius(p_u).0;
    let disc = 1.0 - 4.0 * lambda * r_u * r_u;
    if disc < 0.0 {
        return Err(Error::Domain(format!(
            "undistorted radius {r_u} has no distorted preimage for lambda {lambda}"
        )));
    }
    Ok(p_u.scaled(2.0 / (1.0 + disc.sqrt())))
}

/// Kannala-Brandt projection variant: selects the incidence-angle formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KbVariant {
    Perspective,
    Stereographic,
    Equidistance,
    Equisolid,
    Orthogonal,
}

impl KbVariant {
    pub const ALL: [KbVariant; 5] = [
        KbVariant::Perspective,
        KbVariant::Stereographic,
        KbVariant::Equidistance,
        KbVariant::Equisolid,
        KbVariant::Orthogonal,
    ];

    /// One-letter tag used in model descriptors (`kbp`, `kbs`, ...).
    pub fn tag(self) -> char {
        match self {
            KbVariant::Perspective => 'p',
            KbVariant::Stereographic => 's',
            KbVariant::Equidistance => 'd',
            KbVariant::Equisolid => 'e',
            KbVariant::Orthogonal => 'o',
        }
    }

    pub fn from_tag(tag: char) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.tag() == tag)
    }

    /// Whether the distorted radius for angle θ is defined and unique.
    fn accepts_angle(self, theta: f64) -> bool {
        match self {
            KbVariant::Perspective => theta < FRAC_PI_2,
            KbVariant::Stereographic => theta < PI,
            KbVariant::Equidistance => true,
            KbVariant::Equisolid => theta <= PI,
            KbVariant::Orthogonal => theta <= FRAC_PI_2,
        }
    }
}

/// Incidence angle θ (radians) for a distorted radius.
pub fn kb_theta(variant: KbVariant, r_d: Radius, focal: f64) -> Result<f64> {
    let r = r_d.0;
    let arcsin_arg = |a: f64| {
        if a <= 1.0 {
            Ok(a.asin())
        } else {
            Err(Error::Domain(format!(
                "radius {r} outside the {variant:?} projection range for f = {focal}"
            )))
        }
    };
    match variant {
        KbVariant::Perspective => Ok((r / focal).atan()),
        KbVariant::Stereographic => Ok(2.0 * (r / (2.0 * focal)).atan()),
        KbVariant::Equidistance => Ok(r / focal),
        KbVariant::Equisolid => arcsin_arg(r / (2.0 * focal)).map(|a| 2.0 * a),
        KbVariant::Orthogonal => arcsin_arg(r / focal),
    }
}

/// Maps a distorted point to its undistorted location under a KB variant.
///
/// The center is a removable singularity and maps to itself.
pub fn kb_undistort(p_d: NormPoint, variant: KbVariant, lambda: f64, focal: f64) -> Result<NormPoint> {
    let r_d = radius(p_d);
    let theta = kb_theta(variant, r_d, focal)?;
    if r_d.0 == 0.0 {
        return Ok(NormPoint::ORIGIN);
    }
    Ok(p_d.scaled(lambda * theta / r_d.0))
}

/// Inverse of [`kb_undistort`].
pub fn kb_distort(p_u: NormPoint, variant: KbVariant, lambda: f64, focal: f64) -> Result<NormPoint> {
    let r_u = radius(p_u).0;
    let theta = r_u / lambda;
    if !variant.accepts_angle(theta) {
        return Err(Error::Domain(format!(
            "angle {theta} outside the invertible range of the {variant:?} projection"
        )));
    }
    if r_u == 0.0 {
        return Ok(NormPoint::ORIGIN);
    }
    let r_d = match variant {
        KbVariant::Perspective => focal * theta.tan(),
        KbVariant::Stereographic => 2.0 * focal * (theta / 2.0).tan(),
        KbVariant::Equidistance => focal * theta,
        KbVariant::Equisolid => 2.0 * focal * (theta / 2.0).sin(),
        KbVariant::Orthogonal => focal * theta.sin(),
    };
    Ok(p_u.scaled(r_d / r_u))
}

/// A single-coefficient radial distortion model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistortionModel {
    Division { lambda: f64 },
    KannalaBrandt { variant: KbVariant, lambda: f64, focal: f64 },
}

impl DistortionModel {
    /// Division model with `0 <= λ < 1`.
    pub fn division(lambda: f64) -> Result<Self> {
        let m = DistortionModel::Division { lambda };
        m.validate()?;
        Ok(m)
    }

    /// Kannala-Brandt model with unit focal length.
    pub fn kannala_brandt(variant: KbVariant, lambda: f64) -> Result<Self> {
        Self::kannala_brandt_with_focal(variant, lambda, 1.0)
    }

    pub fn kannala_brandt_with_focal(variant: KbVariant, lambda: f64, focal: f64) -> Result<Self> {
        let m = DistortionModel::KannalaBrandt {
            variant,
            lambda,
            focal,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DistortionModel::Division { lambda } => {
                if !(lambda.is_finite() && (0.0..1.0).contains(&lambda)) {
                    return Err(Error::InvalidModel(format!(
                        "division model needs 0 <= lambda < 1, got {lambda}"
                    )));
                }
            }
            DistortionModel::KannalaBrandt { lambda, focal, .. } => {
                if !(lambda.is_finite() && lambda > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "Kannala-Brandt model needs lambda > 0, got {lambda}"
                    )));
                }
                if !(focal.is_finite() && focal > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "Kannala-Brandt model needs f > 0, got {focal}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        match *self {
            DistortionModel::Division { lambda } | DistortionModel::KannalaBrandt { lambda, .. } => lambda,
        }
    }

    pub fn family(&self) -> ModelFamily {
        match *self {
            DistortionModel::Division { .. } => ModelFamily::Division,
            DistortionModel::KannalaBrandt { variant, focal, .. } => ModelFamily::KannalaBrandt { variant, focal },
        }
    }

    /// True when the model maps every point to itself exactly.
    pub fn is_identity(&self) -> bool {
        match *self {
            DistortionModel::Division { lambda } => lambda == 0.0,
            DistortionModel::KannalaBrandt {
                variant: KbVariant::Equidistance,
                lambda,
                focal,
            } => lambda == focal,
            DistortionModel::KannalaBrandt { .. } => false,
        }
    }

    /// Distorted-image point to undistorted-image point.
    pub fn undistort(&self, p_d: NormPoint) -> Result<NormPoint> {
        match *self {
            DistortionModel::Division { lambda } => Ok(dm_undistort(p_d, lambda)),
            DistortionModel::KannalaBrandt {
                variant,
                lambda,
                focal,
            } => kb_undistort(p_d, variant, lambda, focal),
        }
    }

    /// Undistorted-image point to distorted-image point.
    pub fn distort(&self, p_u: NormPoint) -> Result<NormPoint> {
        match *self {
            DistortionModel::Division { lambda } => dm_distort(p_u, lambda),
            DistortionModel::KannalaBrandt {
                variant,
                lambda,
                focal,
            } => kb_distort(p_u, variant, lambda, focal),
        }
    }

    /// Undistorted radius as a function of distorted radius.
    pub fn undistorted_radius(&self, r_d: f64) -> Result<f64> {
        self.undistort(NormPoint::new(r_d, 0.0)).map(|p| p.x)
    }

    /// Limit of `r_u / r_d` as `r_d → 0`.
    pub fn central_scale(&self) -> f64 {
        match *self {
            DistortionModel::Division { .. } => 1.0,
            DistortionModel::KannalaBrandt { lambda, focal, .. } => lambda / focal,
        }
    }
}

impl fmt::Display for DistortionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DistortionModel::Division { lambda } => write!(f, "dm:{lambda}"),
            DistortionModel::KannalaBrandt {
                variant,
                lambda,
                focal,
            } => {
                write!(f, "kb{}:{lambda}", variant.tag())?;
                if focal != 1.0 {
                    write!(f, ":f={focal}")?;
                }
                Ok(())
            }
        }
    }
}

fn parse_scalar(what: &'static str, s: &str) -> Result<f64> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::parse(what, s)),
    }
}

fn parse_focal(s: &str) -> Result<f64> {
    let v = s
        .strip_prefix("f=")
        .ok_or_else(|| Error::parse("focal length", s))?;
    parse_scalar("focal length", v)
}

impl FromStr for DistortionModel {
    type Err = Error;

    /// Parses `dm:<λ>` or `kb<p|s|d|e|o>:<λ>[:f=<f>]`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let (family, lambda, rest) = match parts.as_slice() {
            [family, lambda, rest @ ..] => (ModelFamily::from_str(family)?, parse_scalar("lambda", lambda)?, rest),
            _ => return Err(Error::parse("model descriptor", s)),
        };
        let family = match (family, rest) {
            (f, []) => f,
            (ModelFamily::KannalaBrandt { variant, .. }, [focal]) => ModelFamily::KannalaBrandt {
                variant,
                focal: parse_focal(focal)?,
            },
            _ => return Err(Error::parse("model descriptor", s)),
        };
        family.with_lambda(lambda)
    }
}

/// A model family without its coefficient, used for coefficient ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelFamily {
    Division,
    KannalaBrandt { variant: KbVariant, focal: f64 },
}

impl ModelFamily {
    pub fn with_lambda(self, lambda: f64) -> Result<DistortionModel> {
        match self {
            ModelFamily::Division => DistortionModel::division(lambda),
            ModelFamily::KannalaBrandt { variant, focal } => {
                DistortionModel::kannala_brandt_with_focal(variant, lambda, focal)
            }
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ModelFamily::Division => f.write_str("dm"),
            ModelFamily::KannalaBrandt { variant, focal } => {
                write!(f, "kb{}", variant.tag())?;
                if focal != 1.0 {
                    write!(f, ":f={focal}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for ModelFamily {
    type Err = Error;

    /// Parses `dm` or `kb<p|s|d|e|o>[:f=<f>]`.
    fn from_str(s: &str) -> Result<Self> {
        let (tag, focal) = match s.split_once(':') {
            Some((tag, focal)) => (tag, Some(parse_focal(focal)?)),
            None => (s, None),
        };
        if tag == "dm" {
            return match focal {
                None => Ok(ModelFamily::Division),
                Some(_) => Err(Error::parse("model family", s)),
            };
        }
        let mut chars = tag.chars();
        match (chars.next(), chars.next(), chars.next(), chars.next()) {
            (Some('k'), Some('b'), Some(c), None) => {
                let variant = KbVariant::from_tag(c).ok_or_else(|| Error::parse("model family", s))?;
                Ok(ModelFamily::KannalaBrandt {
                    variant,
                    focal: focal.unwrap_or(1.0),
                })
            }
            _ => Err(Error::parse("model family", s)),
        }
    }
}
