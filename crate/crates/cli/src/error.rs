use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum ToolError {
    /// Bad configuration or arguments.
    #[error("{0}")]
    Validation(String),
    /// Input file that violates its format.
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    /// Invalid input rejected by the numerical kernels.
    #[error(transparent)]
    Core(#[from] cfi_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// A computation ran but did not produce an acceptable result.
    #[error("{0}")]
    Runtime(String),
}

impl ToolError {
    pub fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Self::Format {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for validation errors, 2 for runtime errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) | Self::Format { .. } | Self::Core(_) => 1,
            Self::Io { .. } | Self::Runtime(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, ToolError>;
