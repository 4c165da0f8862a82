use core::fmt;

/// Every failure the simulation layers can report.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter block violates its invariants.
    InvalidParams(&'static str),
    /// One RK4 step rotated a sublattice by more than the allowed angle.
    StepTooLarge {
        t: f64,
        angle: f64,
    },
    /// The Néel vector collapsed; resistance is undefined.
    DegenerateNeel {
        t: f64,
    },
    InvalidGeometry(&'static str),
    /// The nodal conductance matrix has no inverse.
    SingularNetwork,
    /// Corner query outside the tabulated VDD/temperature envelope.
    UnknownCorner {
        vdd: f64,
        temperature_c: f64,
    },
    /// The unperturbed operating point already violates the rate target.
    NominalFails {
        upper_bound: f64,
    },
    /// Calibration did not reach its tolerance; carries the best error found.
    CalibrationFailed {
        max_rel_error: f64,
    },
}

impl Error {
    /// Short variant name, used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "InvalidParams",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::DegenerateNeel { .. } => "DegenerateNeel",
            Error::InvalidGeometry(_) => "InvalidGeometry",
            Error::SingularNetwork => "SingularNetwork",
            Error::UnknownCorner { .. } => "UnknownCorner",
            Error::NominalFails { .. } => "NominalFails",
            Error::CalibrationFailed { .. } => "CalibrationFailed",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams(why) => write!(f, "invalid parameters: {why}"),
            Error::StepTooLarge { t, angle } => write!(
                f,
                "integration step at t = {t:.4e} s rotated a sublattice by {angle:.3} rad (limit 0.5)"
            ),
            Error::DegenerateNeel { t } => {
                write!(f, "Néel vector collapsed at t = {t:.4e} s")
            }
            Error::InvalidGeometry(why) => write!(f, "invalid bitline geometry: {why}"),
            Error::SingularNetwork => f.write_str("bitline conductance matrix is singular"),
            Error::UnknownCorner { vdd, temperature_c } => write!(
                f,
                "corner VDD = {vdd} V, T = {temperature_c} °C is outside the characterized envelope"
            ),
            Error::NominalFails { upper_bound } => write!(
                f,
                "nominal point fails its target (upper bound {upper_bound:.3e})"
            ),
            Error::CalibrationFailed { max_rel_error } => write!(
                f,
                "calibration stalled at max relative error {:.2}%",
                max_rel_error * 100.0
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
