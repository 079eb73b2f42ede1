//! Parses an expression and evaluates it with first and second derivatives.

use knotlight::exprlang::parse;

fn main() {
    let text = std::env::args().nth(1).unwrap_or_else(|| "(x+i*y)^2/(1+t^2)".into());
    match parse(&text) {
        Ok(e) => match e.eval_jet(&[0.5, 1.0, -1.0, 2.0]) {
            Ok(j) => {
                println!("value {}", j.value);
                println!("gradient (t, x, y, z) {:?}", j.grad);
            }
            Err(err) => println!("{err}"),
        },
        Err(err) => println!("{err}"),
    }
}
