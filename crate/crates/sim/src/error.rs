use afmtj_core::Error as CoreError;

/// Everything a run can fail with, grouped by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config invalid: {0}")]
    Config(String),
    #[error("simulation error in {module}: {name}: {source}")]
    Simulation {
        module: &'static str,
        name: &'static str,
        source: CoreError,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Module whose contract defines `e`.
pub fn origin(e: &CoreError) -> &'static str {
    match e {
        CoreError::InvalidParams(_)
        | CoreError::StepTooLarge { .. }
        | CoreError::DegenerateNeel { .. } => "core-dynamics",
        CoreError::InvalidGeometry(_) | CoreError::SingularNetwork => "array-circuit",
        CoreError::UnknownCorner { .. } => "peripherals",
        CoreError::NominalFails { .. } => "montecarlo",
        CoreError::CalibrationFailed { .. } => "experiments",
    }
}

impl From<CoreError> for CliError {
    fn from(source: CoreError) -> Self {
        CliError::Simulation {
            module: origin(&source),
            name: source.name(),
            source,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Simulation { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_error_kind() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        let e: CliError = CoreError::SingularNetwork.into();
        assert_eq!(e.exit_code(), 3);
        let msg = e.to_string();
        assert!(
            msg.contains("array-circuit") && msg.contains("SingularNetwork"),
            "{msg}"
        );
        let e: CliError = CoreError::CalibrationFailed { max_rel_error: 0.2 }.into();
        assert!(e.to_string().contains("experiments"));
    }
}
