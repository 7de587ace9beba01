//! Building a model, grid and noise from a TOML run configuration.

use delayconv::RunConfig;

const CONFIG: &str = r#"
eigenvalues.kind = "square"
modes = 16
a1.c = 0.5
a1.mu = 0.5
a2.c = 0.25
a2.nu = 0.5
delay.r = 1.0
kernel.form = "linear"
kernel.params = [1.0, 0.5]

[grid]
m = 128
intervals = 2

[noise]
kind = "power-law"
exponent = 1.5

[run]
seed = 7
paths = 50
"#;

fn main() -> delayconv::Result<()> {
    let config = RunConfig::from_toml_str(CONFIG)?;
    let model = config.model()?;
    let grid = config.grid()?;
    let noise = config.noise_for(&model)?;
    println!("eigenvalues {:?} ..", &model.eigenvalues()[..4]);
    println!(
        "kernel a(-r) = {}, sup |a| = {}",
        model.kernel().eval(-1.0),
        model.kernel().sup_norm()
    );
    println!("grid h = {}, horizon {}", grid.step(), grid.horizon());
    println!(
        "noise trace {:.5} over {} modes",
        noise.trace(),
        noise.modes()
    );
    println!("\nnormalized configuration:\n{}", config.to_toml_string()?);
    Ok(())
}
