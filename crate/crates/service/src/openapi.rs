use serde_json::{json, Value};

fn error_response(description: &str) -> Value {
    json!({
        "description": description,
        "content": {"application/json": {"schema": {"$ref": "#/components/schemas/Error"}}}
    })
}

/// OpenAPI 3.0 description of the `/api/v1` surface.
pub fn document() -> Value {
    json!({
        "openapi": "3.0.3",
        "info": {"title": "qsim local simulation API", "version": env!("CARGO_PKG_VERSION")},
        "servers": [{"url": "/api/v1"}],
        "paths": {
            "/gates": {"get": {
                "summary": "Gate catalog",
                "responses": {
                    "200": {"description": "Gate descriptors", "headers": {"ETag": {"schema": {"type": "string"}}},
                        "content": {"application/json": {"schema": {"type": "array", "items": {"$ref": "#/components/schemas/Gate"}}}}},
                    "304": {"description": "Not modified"}
                }
            }},
            "/simulate": {"post": {
                "summary": "Simulate a circuit",
                "requestBody": {"required": true,
                    "content": {"application/json": {"schema": {"$ref": "#/components/schemas/SimulationRequest"}}}},
                "responses": {
                    "200": {"description": "Probabilities, Bloch trace, densities and heatmap",
                        "content": {"application/json": {"schema": {"type": "object"}}}},
                    "400": error_response("Malformed request or invalid parameters"),
                    "413": error_response("Qubit count above the mode's cap"),
                    "422": error_response("Invalid circuit; row and column locate the cell")
                }
            }},
            "/vqe/factor": {"post": {
                "summary": "Factor an odd integer with VQE, streamed as server-sent events",
                "description": "Emits one `iteration` event per iterate and a terminal `result` (or `error`) event. Closing the connection aborts the run.",
                "requestBody": {"required": true,
                    "content": {"application/json": {"schema": {"$ref": "#/components/schemas/FactorRequest"}}}},
                "responses": {
                    "200": {"description": "Event stream", "content": {"text/event-stream": {"schema": {"type": "string"}}}},
                    "400": error_response("Invalid problem or optimizer settings")
                }
            }},
            "/spec": {"get": {"summary": "This document", "responses": {"200": {"description": "OpenAPI JSON"}}}}
        },
        "components": {"schemas": {
            "Complex": {"type": "object", "properties": {"re": {"type": "number"}, "im": {"type": "number"}}},
            "Gate": {"type": "object", "properties": {
                "name": {"type": "string"}, "token": {"type": "string", "nullable": true},
                "symbol": {"type": "string"}, "qubits": {"type": "integer"},
                "params": {"type": "array", "items": {"type": "string"}},
                "matrix": {"type": "array", "items": {"type": "array", "items": {"$ref": "#/components/schemas/Complex"}}}
            }},
            "Noise": {"type": "object", "required": ["p"], "properties": {
                "p": {"type": "number"}, "mode": {"type": "string", "enum": ["overshoot", "stochastic"]},
                "seed": {"type": "integer"}
            }},
            "Circuit": {"type": "object", "required": ["format_version", "qubits", "stages", "init", "grid"], "properties": {
                "format_version": {"type": "integer", "enum": [1]},
                "qubits": {"type": "integer"}, "stages": {"type": "integer"},
                "init": {"type": "string", "description": "Bitstring, qubit 0 rightmost"},
                "grid": {"type": "array", "items": {"type": "array", "items": {"type": "object", "required": ["op"],
                    "properties": {"op": {"type": "string"}, "params": {"type": "array", "items": {"type": "number"}}}}}},
                "measure": {"type": "array", "items": {"type": "integer"}},
                "noise": {"$ref": "#/components/schemas/Noise"}
            }},
            "SimulationRequest": {"type": "object", "required": ["circuit"], "properties": {
                "circuit": {"$ref": "#/components/schemas/Circuit"},
                "noise": {"$ref": "#/components/schemas/Noise"},
                "mode": {"type": "string", "enum": ["matrix", "vector"], "default": "matrix"},
                "include_trace": {"type": "boolean", "default": false},
                "include_density": {"type": "boolean", "default": false}
            }},
            "FactorRequest": {"type": "object", "required": ["target", "bits_p", "bits_q"], "properties": {
                "target": {"type": "integer"}, "bits_p": {"type": "integer"}, "bits_q": {"type": "integer"},
                "layers": {"type": "integer"}, "learning_rate": {"type": "number"}, "max_iters": {"type": "integer"},
                "convergence_amplitude": {"type": "number"}, "seed": {"type": "integer"},
                "initial_params": {"type": "array", "items": {"type": "number"}},
                "normalize_cost": {"type": "boolean"}
            }},
            "Error": {"type": "object", "properties": {"error": {"type": "object", "properties": {
                "kind": {"type": "string"}, "message": {"type": "string"},
                "row": {"type": "integer"}, "column": {"type": "integer"}
            }}}}
        }}
    })
}
