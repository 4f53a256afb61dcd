use proptest::prelude::*;
use qtraj_core::scenario::parse_scenario;

fn scenario_text(
    k: f64,
    a: f64,
    b: f64,
    c: [f64; 3],
    r0: [f64; 3],
    t_end: f64,
    omega: f64,
) -> String {
    format!(
        "[physics]
hbar = 1.0
mass = 1.0
[potential]
x = free
y = free
z = harmonic
z.omega = {omega}
[solutions.x]
source = catalog:free
k = {k}
[solutions.y]
source = catalog:zero_energy_free
[solutions.z]
source = numerov
energy = 0.5
domain = -2, 2
step = 0.01
ic1 = 1, 0
ic2 = 0, 1
ic_at = 0
[field]
theta = {} * u1 * u1 * u1 - {} * u2 * u1 * u2
phi = {} * u2 * u1 * u1
[action]
a = {a}
b = {b}
[trajectory]
r0 = {}, {}, {}
t_end = {t_end}
[metric]
points = 0.1, 0.2, 0.3; {}, {}, {}
",
        c[0], c[1], c[2], r0[0], r0[1], r0[2], r0[0], r0[1], r0[2]
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parse_serialize_parse_is_identity(
        k in 0.1f64..4.0,
        a in prop_oneof![0.1f64..5.0, -5.0f64..-0.1],
        b in -5.0f64..5.0,
        c in prop::array::uniform3(0.1f64..10.0),
        r0 in prop::array::uniform3(-1.0f64..1.0),
        t_end in 0.1f64..50.0,
        omega in 0.2f64..3.0,
    ) {
        let first = parse_scenario(&scenario_text(k, a, b, c, r0, t_end, omega)).unwrap();
        let text = first.to_string();
        let second = parse_scenario(&text).unwrap();
        prop_assert_eq!(&first, &second);
        prop_assert_eq!(text, second.to_string());
    }
}
