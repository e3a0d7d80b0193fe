//! Configurations shipped with the binary, one per reproduced experiment.

macro_rules! presets {
    ($($name:literal),* $(,)?) => {
        /// `(name, TOML text)` pairs.
        pub const PRESETS: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../presets/", $name, ".toml")))),*
        ];
    };
}

presets!(
    "bilinear_sgd",
    "bilinear_isog",
    "bilinear_omega",
    "quadratic_sgd",
    "quadratic_isog",
    "quadratic_omega",
    "quadratic_sgdm",
    "quadratic_omegam",
    "quadlin_sgd",
    "quadlin_isog",
    "quadlin_omega",
);

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}
