//! Published metrics for the full-scale protocol, kept as non-binding
//! metadata. They were produced with a different framework, RNG and
//! initializers, so runs here are not expected to reproduce them.

use serde::Serialize;

/// Column order of the synthetic table.
pub const SYNTHETIC_COLUMNS: [&str; 6] = ["relu", "gelu", "tanh", "sigmoid", "lla", "qla"];

/// `(function, [(mse, mae); 6])` in [`SYNTHETIC_COLUMNS`] order.
pub const SYNTHETIC: [(&str, [(f64, f64); 6]); 8] = [
    ("ackley", [(0.42, 0.495), (0.389, 0.465), (0.358, 0.449), (0.367, 0.452), (0.335, 0.469), (0.357, 0.454)]),
    ("shubert", [(1.552, 0.818), (1.581, 0.838), (1.664, 0.855), (2.16, 0.915), (1.432, 0.776), (0.345, 0.437)]),
    (
        "hyperellipsoid",
        [
            (3881.647, 47.877),
            (3015.138, 44.654),
            (24875495.187, 3998.474),
            (24925986.568, 4003.899),
            (4326.411, 50.334),
            (19.361, 3.224),
        ],
    ),
    ("levy", [(3.717, 1.219), (2.316, 1.046), (2.107, 1.0), (3.403, 1.354), (1.386, 0.861), (1.99, 0.994)]),
    ("styblinski", [(2.386, 1.157), (0.105, 0.224), (15.954, 1.369), (355.686, 12.665), (1.085, 0.38), (0.075, 0.195)]),
    ("shekel", [(1.581, 0.925), (1.415, 0.856), (0.109, 0.236), (1.905, 1.041), (0.649, 0.562), (0.123, 0.261)]),
    ("griewank", [(1.498, 0.9), (1.811, 1.009), (5.635, 1.672), (3.178, 1.247), (1.019, 0.754), (426.561, 15.083)]),
    ("zhou", [(0.012, 0.076), (0.061, 0.174), (0.011, 0.077), (1.042, 0.57), (0.006, 0.062), (0.003, 0.042)]),
];

/// `(dataset, relu test mse, qla test mse)`.
pub const FORECAST: [(&str, f64, f64); 4] = [
    ("ETTh1", 1.561, 0.953),
    ("ETTm1", 0.597, 0.540),
    ("ETTh2", 0.717, 0.563),
    ("ETTm2", 0.203, 0.208),
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReferenceValue {
    pub target: String,
    pub activation: String,
    pub mse: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mae: Option<f64>,
    pub binding: bool,
}

pub fn synthetic(function: &str, activation: &str) -> Option<ReferenceValue> {
    let col = SYNTHETIC_COLUMNS.iter().position(|c| *c == activation)?;
    let (_, row) = SYNTHETIC.iter().find(|(f, _)| *f == function)?;
    Some(ReferenceValue {
        target: function.to_string(),
        activation: activation.to_string(),
        mse: row[col].0,
        mae: Some(row[col].1),
        binding: false,
    })
}

pub fn forecast(dataset: &str, activation: &str) -> Option<ReferenceValue> {
    let (name, relu, qla) = FORECAST.iter().find(|(d, _, _)| d.eq_ignore_ascii_case(dataset))?;
    let mse = match activation {
        "relu" => *relu,
        "qla" => *qla,
        _ => return None,
    };
    Some(ReferenceValue {
        target: name.to_string(),
        activation: activation.to_string(),
        mse,
        mae: None,
        binding: false,
    })
}
