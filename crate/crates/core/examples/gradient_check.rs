//! Backpropagation against central finite differences on a random network.

use relaylearn::mlp::{Architecture, Mlp};
use relaylearn::rng;

fn main() -> relaylearn::Result<()> {
    let arch = Architecture::new(4, vec![10, 5])?;
    let mut net = Mlp::init(&arch, &mut rng::seeded(7))?;
    let rows = [vec![0.3, -1.2, 0.8, 0.05], vec![-0.7, 0.4, 1.5, -0.9], vec![1.1, 0.2, -0.3, 0.6]];
    let labels = [1, 0, 1];
    let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();

    let (loss, grads) = net.backward(&refs, &labels)?;
    println!("{} parameters, batch loss {loss:.6}", net.num_params());

    let h = 1e-5;
    let mut worst = 0.0f64;
    for k in 0..net.layers().len() {
        for i in 0..net.layers()[k].weights().len() {
            let orig = net.layers()[k].weights()[i];
            net.layers_mut()[k].weights_mut()[i] = orig + h;
            let up = net.loss(&refs, &labels)?;
            net.layers_mut()[k].weights_mut()[i] = orig - h;
            let down = net.loss(&refs, &labels)?;
            net.layers_mut()[k].weights_mut()[i] = orig;

            let numeric = (up - down) / (2.0 * h);
            let analytic = grads.layers[k].weights[i];
            let scale = numeric.abs().max(analytic.abs());
            if scale > 0.0 {
                worst = worst.max((numeric - analytic).abs() / scale);
            }
        }
    }
    println!("max relative error over all weights: {worst:.2e}");
    Ok(())
}
