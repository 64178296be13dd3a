//! Check analytic ranking-loss gradients against central finite
//! differences for every model kind.

use unischema::prelude::*;

fn main() -> unischema::Result<()> {
    let mut all_passed = true;
    for kind in ModelKind::all() {
        let report = check_gradients(&GradCheckConfig {
            kind,
            ..GradCheckConfig::default()
        })?;
        println!(
            "{kind:<4} {} instances, {:>5} coordinates, max relative error {:.2e}: {}",
            report.instances,
            report.coordinates,
            report.max_rel_error,
            if report.passed() { "ok" } else { "MISMATCH" }
        );
        all_passed &= report.passed();
    }
    if !all_passed {
        std::process::exit(3);
    }
    Ok(())
}
