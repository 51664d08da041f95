use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Invalid input; exit status 1.
    Precondition,
    /// Numerical failure during the run; exit status 2.
    Numerical,
}

/// A failure reported as one `key=value` line on stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: Kind,
    pub field: Option<String>,
    pub value: Option<String>,
    pub range: Option<String>,
    pub message: String,
}

impl CliError {
    pub fn precondition(field: &str, message: impl Into<String>) -> Self {
        CliError {
            kind: Kind::Precondition,
            field: Some(field.to_string()),
            value: None,
            range: None,
            message: message.into(),
        }
    }

    pub fn out_of_range(field: &str, value: String, range: &str) -> Self {
        CliError {
            kind: Kind::Precondition,
            field: Some(field.to_string()),
            message: format!("{field} = {value} is outside {range}"),
            value: Some(value),
            range: Some(range.to_string()),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError {
            kind: Kind::Numerical,
            field: None,
            value: None,
            range: None,
            message: message.into(),
        }
    }

    pub fn io(what: &str, err: std::io::Error) -> Self {
        CliError {
            kind: Kind::Numerical,
            field: None,
            value: None,
            range: None,
            message: format!("{what}: {err}"),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            Kind::Precondition => 1,
            Kind::Numerical => 2,
        }
    }
}

/// `error kind=precondition field=problem.params.beta value=1.5 range=(0,1) message="..."`
impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            Kind::Precondition => "precondition",
            Kind::Numerical => "numerical",
        };
        write!(f, "error kind={kind}")?;
        if let Some(field) = &self.field {
            write!(f, " field={field}")?;
        }
        if let Some(v) = &self.value {
            write!(f, " value={v}")?;
        }
        if let Some(r) = &self.range {
            write!(f, " range={r}")?;
        }
        write!(f, " message={:?}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<abel_sonin::Error> for CliError {
    fn from(e: abel_sonin::Error) -> Self {
        use abel_sonin::Error as E;
        match &e {
            E::Domain { name, value, range } => CliError {
                kind: Kind::Precondition,
                field: Some(name.to_string()),
                value: Some(value.to_string()),
                range: Some(range.replace(' ', "")),
                message: e.to_string(),
            },
            _ if e.is_precondition() => CliError {
                kind: Kind::Precondition,
                field: None,
                value: None,
                range: None,
                message: e.to_string(),
            },
            _ => CliError::numerical(e.to_string()),
        }
    }
}
