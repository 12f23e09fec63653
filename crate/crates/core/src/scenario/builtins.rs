//! Scenarios shipped with the crate, stored in the configuration text format.

const EXAMPLE_1D_UNILATERAL: &str = "
name = example_1d_unilateral
[grid]
lower = -1
upper = 1
nodes = 1025
[operator]
family = linear
[data]
f = 0
phi = -abs(x1)^1.5 + 1
psi = 1000
g = 0
exact = -abs(x1)^1.5 + 1
p = 2
q = 2
beta1 = 0.5
[output]
center = 0
";

const POISSON_NO_CONTACT: &str = "
name = poisson_no_contact
[grid]
lower = -1
upper = 1
nodes = 2049
[operator]
family = linear
[data]
f = 2
phi = -1000
psi = 1000
g = 0
exact = 1 - x1^2
p = 2
q = 2
[output]
center = 0
";

const BILATERAL_CLIP_1D: &str = "
name = bilateral_clip_1d
[grid]
lower = -1
upper = 1
nodes = 1025
[operator]
family = linear
[data]
f = 2
phi = -1000
psi = 0.5
g = 0
exact = 0.5 - max(abs(x1) - 0.2928932188134524, 0)^2
p = 2
q = 2
[output]
center = 0
";

const PUCCI_2D_BILATERAL: &str = "
name = pucci_2d_bilateral
[grid]
lower = -1, -1
upper = 1, 1
nodes = 65, 65
[operator]
family = pucci_plus
lambda = 1
big_lambda = 2
mu = 0.5
[data]
f = 2
phi = 0.3 - 4*(r - 0.6)^2
psi = 0.2 + 0.5*r^2
g = 0
p = 3
q = 3
beta1 = 0.5
[output]
center = 0, 0
";

const ROUGH_F_1D: &str = "
name = rough_f_1d
[grid]
lower = -1
upper = 1
nodes = 1025
[operator]
family = linear
[data]
f = min(abs(x1)^(-0.25), 10)
phi = -1000
psi = 0.35
g = 0
p = 1.5
q = 3
beta1 = 0.5
exponent_dim = 2
[output]
center = 0
";

const BUILTINS: &[(&str, &str)] = &[
    ("example_1d_unilateral", EXAMPLE_1D_UNILATERAL),
    ("poisson_no_contact", POISSON_NO_CONTACT),
    ("bilateral_clip_1d", BILATERAL_CLIP_1D),
    ("pucci_2d_bilateral", PUCCI_2D_BILATERAL),
    ("rough_f_1d", ROUGH_F_1D),
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.iter().map(|(n, _)| *n).collect()
}

/// Configuration text of a built-in scenario.
pub fn builtin_text(name: &str) -> Option<&'static str> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
