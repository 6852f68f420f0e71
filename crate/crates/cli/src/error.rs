use std::fmt;

/// Failure of a subcommand, carrying the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(hedgetomo::Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use hedgetomo::Error as E;
        match self {
            CliError::Input(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                E::SolverFailure { .. } | E::DegenerateLoss => 3,
                E::ImpossibleData => 4,
                E::InvalidState(_)
                | E::InvalidDataset(_)
                | E::InvalidParameter(_)
                | E::UndefinedDifference(_) => 2,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Io(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<hedgetomo::Error> for CliError {
    fn from(e: hedgetomo::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn input<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Input(msg.into()))
}
