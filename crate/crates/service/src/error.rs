use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

use qsim_core::Error;

/// JSON error body: `{"error": {"kind", "message", "row"?, "column"?}}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub kind: &'static str,
    pub message: String,
    pub row: Option<usize>,
    pub column: Option<usize>,
}

#[derive(Serialize)]
struct Body<'a> {
    error: Detail<'a>,
}

#[derive(Serialize)]
struct Detail<'a> {
    kind: &'a str,
    message: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    row: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<usize>,
}

impl ApiError {
    pub fn bad_request(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            kind: "validation",
            message: message.into(),
            row: None,
            column: None,
        }
    }

    /// Deserializes a JSON body, naming the offending field on failure.
    pub fn parse_body<T: serde::de::DeserializeOwned>(body: &[u8]) -> Result<T, Self> {
        let de = &mut serde_json::Deserializer::from_slice(body);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path.is_empty() || path == "." {
                Self::bad_request(format!("invalid request: {inner}"))
            } else {
                Self::bad_request(format!("invalid request field `{path}`: {inner}"))
            }
        })
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            kind: "internal",
            message: message.into(),
            row: None,
            column: None,
        }
    }

    /// Grid-shape problems are schema errors rather than circuit semantics.
    pub fn schema(err: Error) -> Self {
        let mut e = Self::from(err);
        if e.status == StatusCode::UNPROCESSABLE_ENTITY {
            e.status = StatusCode::BAD_REQUEST;
            e.kind = "schema";
        }
        e
    }
}

impl From<Error> for ApiError {
    fn from(err: Error) -> Self {
        let message = err.to_string();
        let (status, kind, row, column) = match &err {
            Error::ResourceLimit { .. } => {
                (StatusCode::PAYLOAD_TOO_LARGE, "resource_limit", None, None)
            }
            Error::Circuit { row, column, .. } => {
                (StatusCode::UNPROCESSABLE_ENTITY, "circuit", *row, *column)
            }
            Error::UnknownGate(_)
            | Error::ParamCount { .. }
            | Error::NonFiniteAngle { .. }
            | Error::InvalidQubits(_) => (StatusCode::UNPROCESSABLE_ENTITY, "circuit", None, None),
            Error::Parse { .. } => (StatusCode::BAD_REQUEST, "schema", None, None),
            Error::NoiseRate { .. } | Error::Factorization(_) | Error::Ansatz(_) => {
                (StatusCode::BAD_REQUEST, "validation", None, None)
            }
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal", None, None),
        };
        Self {
            status,
            kind,
            message,
            row,
            column,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Body {
            error: Detail {
                kind: self.kind,
                message: &self.message,
                row: self.row,
                column: self.column,
            },
        };
        (self.status, Json(body)).into_response()
    }
}
