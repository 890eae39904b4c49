//! Built-in test domains.

use serde::Serialize;

use crate::domain::{Domain, DomainConfig};
use crate::Error;

#[derive(Clone, Debug, Serialize)]
pub struct BuiltinDomain {
    pub name: &'static str,
    pub description: &'static str,
    /// Values a correct implementation reproduces on this domain.
    pub expected: &'static [&'static str],
    pub config: DomainConfig,
}

impl BuiltinDomain {
    pub fn domain(&self) -> Domain {
        Domain::from_config(&self.config).expect("built-in domains are valid")
    }
}

fn config(defining: &str, nvars: usize, m: u32, reference: Option<Vec<[f64; 2]>>) -> DomainConfig {
    DomainConfig {
        defining: defining.to_string(),
        nvars: Some(nvars),
        m,
        w0: 0.5,
        rmax: 10.0,
        bbox: None,
        reference,
        sample_radius: None,
    }
}

pub fn builtin_domains() -> Vec<BuiltinDomain> {
    vec![
        BuiltinDomain {
            name: "model",
            description: "y1 + x2^4 + x3^6 + y3^10 in C^3; lineally convex, linear type 6 at 0",
            expected: &[
                "degree 10",
                "complex orders at 0: e2 -> 4, e3 -> 6",
                "real orders at 0: i*e2 -> inf, i*e3 -> 10",
                "tau(0, e2, eps) = eps^(1/4)",
            ],
            config: config("y1 + x2^4 + x3^6 + y3^10", 3, 5, None),
        },
        BuiltinDomain {
            name: "half-space",
            description: "y1 < 0 in C^3",
            expected: &["tau(0, e1, eps) = eps", "tangential tau capped at rmax", "d(0, -i delta e1) = delta"],
            config: config("y1", 3, 1, None),
        },
        BuiltinDomain {
            name: "ball",
            description: "unit ball in C^3, reference point e1",
            expected: &["normal at e1 is e1", "tangential tau equal", "slice P^2 = |w2|^2"],
            config: config(
                "x1^2 + y1^2 + x2^2 + y2^2 + x3^2 + y3^2 - 1",
                3,
                1,
                Some(vec![[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]),
            ),
        },
        BuiltinDomain {
            name: "rigid-2d",
            description: "y1 + x2^4 in C^2",
            expected: &["linear type 4 at 0", "support function -i z1 - eps z2^4"],
            config: config("y1 + x2^4", 2, 2, None),
        },
    ]
}

pub fn builtin(name: &str) -> Result<Domain, Error> {
    builtin_domains()
        .into_iter()
        .find(|b| b.name == name)
        .map(|b| b.domain())
        .ok_or_else(|| Error::InvalidInput(format!("unknown built-in domain '{name}'")))
}
