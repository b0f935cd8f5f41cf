//! One- and two-variable Bernstein functions, completely monotone CM₂
//! generators and the inequalities they satisfy.

use pdik::special::{
    bernstein1_eval, bernstein2_eval, check_two_variable_inequalities, cm2_eval, omega_e_terms, Bernstein1Spec,
    Bernstein2Spec, Cm2Spec,
};

fn main() -> pdik::Result<()> {
    let ones = [
        Bernstein1Spec::Linear(2.0),
        Bernstein1Spec::Power(0.5),
        Bernstein1Spec::Log1p,
        Bernstein1Spec::ExpSaturate(1.5),
    ];
    println!("{:<22} {:>10} {:>10} {:>10}", "g(t)", "t=0.5", "t=2", "t=10");
    for g in &ones {
        let row: Vec<String> =
            [0.5, 2.0, 10.0].iter().map(|&t| format!("{:>10.5}", bernstein1_eval(g, t).unwrap())).collect();
        println!("{:<22} {}", g.label(), row.join(" "));
    }

    let mix = Bernstein2Spec::Mixture2(vec![(0.5, 1.0, 1.0), (3.0, 0.2, 0.5), (0.0, 2.0, 0.1)]);
    println!("\n{}: g(1, 2) = {:.6}", mix.label(), bernstein2_eval(&mix, 1.0, 2.0)?);

    let tuples: Vec<(f64, f64, f64, f64)> = (0..400)
        .map(|i| {
            let f = i as f64;
            ((f * 0.37) % 5.0, (f * 0.71) % 4.0, (f * 0.13) % 3.0 + 0.01, (f * 0.53) % 6.0 + 0.01)
        })
        .collect();
    let report = check_two_variable_inequalities(&mix, &tuples)?;
    println!(
        "inequalities over {} tuples: holds = {}, max scaling excess {:.2e}, max subadditivity excess {:.2e}",
        report.samples,
        report.holds(),
        report.max_scaling_excess,
        report.max_subadditivity_excess
    );

    for psi in [Cm2Spec::PowerA(1.5), Cm2Spec::TLogT, Cm2Spec::exponential(1.0)?] {
        println!("{:<24} psi(0.5) = {:.6}  psi(4) = {:.6}", psi.label(), cm2_eval(&psi, 0.5)?, cm2_eval(&psi, 4.0)?);
    }

    println!("\n  s     omega_2    e_2        E_2");
    for s in [0.1, 1.0, 5.0] {
        let t = omega_e_terms(2, s)?;
        println!("{s:>4} {:>10.6} {:>10.6} {:>10.6}", t.omega, t.e, t.big_e);
    }
    Ok(())
}
