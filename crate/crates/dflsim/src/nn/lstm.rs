//! Single-layer LSTM over scalar sequences with a linear scalar head,
//! trained by backpropagation through time.
//!
//! Layout (input dim I, hidden H): for each gate in order
//! input/forget/cell/output the blocks `(I, H)` W_x, `(H, H)` W_h, `(1, H)` b,
//! then the head `(H, 1)` w and `(1, 1)` b. Weight blocks are row-major.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

use super::{sigmoid, Arch, GradientVector, ModelParams};

const GATES: usize = 4; // input, forget, cell candidate, output
const FORGET: usize = 1;

/// Seeded init: weights uniform in `±1/sqrt(I+H)`, head in `±1/sqrt(H)`,
/// biases zero except the forget-gate bias, which starts at 1 so early
/// training does not wash out state.
pub fn init_lstm(input_dim: usize, hidden_dim: usize, seed: u64) -> Result<ModelParams> {
    if input_dim == 0 || hidden_dim == 0 {
        return Err(Error::invalid("lstm dims must be positive"));
    }
    let mut shapes = Vec::new();
    for _ in 0..GATES {
        shapes.push((input_dim, hidden_dim));
        shapes.push((hidden_dim, hidden_dim));
        shapes.push((1, hidden_dim));
    }
    shapes.push((hidden_dim, 1));
    shapes.push((1, 1));

    let mut rng = rng::stream(seed, "nn.init_lstm", &[input_dim as u64, hidden_dim as u64]);
    let sw = 1.0 / ((input_dim + hidden_dim) as f64).sqrt();
    let sh = 1.0 / (hidden_dim as f64).sqrt();
    let mut values = Vec::new();
    for gate in 0..GATES {
        for _ in 0..input_dim * hidden_dim {
            values.push(rng.gen_range(-sw..sw));
        }
        for _ in 0..hidden_dim * hidden_dim {
            values.push(rng.gen_range(-sw..sw));
        }
        let bias = if gate == FORGET { 1.0 } else { 0.0 };
        values.extend(std::iter::repeat(bias).take(hidden_dim));
    }
    for _ in 0..hidden_dim {
        values.push(rng.gen_range(-sh..sh));
    }
    values.push(0.0);
    ModelParams::new(Arch::LstmRegressor, shapes, values)
}

struct LstmView<'a> {
    hidden: usize,
    wx: [&'a [f64]; GATES],
    wh: [&'a [f64]; GATES],
    b: [&'a [f64]; GATES],
    head_w: &'a [f64],
    head_b: f64,
}

fn view(m: &ModelParams) -> Result<LstmView<'_>> {
    if m.arch() != Arch::LstmRegressor || m.shapes().len() != GATES * 3 + 2 {
        return Err(Error::invalid("params are not an lstm_regressor"));
    }
    let (input, hidden) = m.shapes()[0];
    if input != 1 {
        return Err(Error::invalid(format!(
            "scalar sequence regression needs input dim 1, model has {input}"
        )));
    }
    let block = |g: usize, part: usize| m.block(g * 3 + part);
    Ok(LstmView {
        hidden,
        wx: [block(0, 0), block(1, 0), block(2, 0), block(3, 0)],
        wh: [block(0, 1), block(1, 1), block(2, 1), block(3, 1)],
        b: [block(0, 2), block(1, 2), block(2, 2), block(3, 2)],
        head_w: m.block(GATES * 3),
        head_b: m.block(GATES * 3 + 1)[0],
    })
}

/// Per-step activations kept for the backward pass.
struct StepTrace {
    x: f64,
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    gates: [Vec<f64>; GATES], // post-nonlinearity i, f, g, o
    tanh_c: Vec<f64>,
}

fn forward_trace(v: &LstmView<'_>, sequence: &[f64]) -> (f64, Vec<StepTrace>) {
    let h0 = vec![0.0; v.hidden];
    let mut h = h0.clone();
    let mut c = h0;
    let mut traces = Vec::with_capacity(sequence.len());
    for &x in sequence {
        let mut acts: [Vec<f64>; GATES] = Default::default();
        for gate in 0..GATES {
            let mut a: Vec<f64> = v.b[gate].to_vec();
            for (j, aj) in a.iter_mut().enumerate() {
                *aj += v.wx[gate][j] * x;
            }
            for (k, &hk) in h.iter().enumerate() {
                if hk != 0.0 {
                    let row = &v.wh[gate][k * v.hidden..(k + 1) * v.hidden];
                    for (j, &w) in row.iter().enumerate() {
                        a[j] += w * hk;
                    }
                }
            }
            acts[gate] = a
                .into_iter()
                .map(|z| if gate == 2 { z.tanh() } else { sigmoid(z) })
                .collect();
        }
        let c_prev = c.clone();
        let h_prev = h.clone();
        for j in 0..v.hidden {
            c[j] = acts[FORGET][j] * c_prev[j] + acts[0][j] * acts[2][j];
        }
        let tanh_c: Vec<f64> = c.iter().map(|&z| z.tanh()).collect();
        for j in 0..v.hidden {
            h[j] = acts[3][j] * tanh_c[j];
        }
        traces.push(StepTrace {
            x,
            h_prev,
            c_prev,
            gates: acts,
            tanh_c,
        });
    }
    let y = v.head_b
        + v.head_w
            .iter()
            .zip(&h)
            .map(|(w, hj)| w * hj)
            .sum::<f64>();
    (y, traces)
}

/// Scalar regression output for a nonempty sequence.
pub fn lstm_regress(m: &ModelParams, sequence: &[f64]) -> Result<f64> {
    let v = view(m)?;
    if sequence.is_empty() {
        return Err(Error::invalid("lstm_regress: empty sequence"));
    }
    Ok(forward_trace(&v, sequence).0)
}

/// Output plus `dY/dparams`, via backpropagation through time.
pub fn lstm_regress_grad(m: &ModelParams, sequence: &[f64]) -> Result<(f64, GradientVector)> {
    let v = view(m)?;
    if sequence.is_empty() {
        return Err(Error::invalid("lstm_regress_grad: empty sequence"));
    }
    let (y, traces) = forward_trace(&v, sequence);
    let hidden = v.hidden;
    let mut grad = GradientVector::zeros_like(m);

    let head_w_off = m.block_offset(GATES * 3);
    let head_b_off = m.block_offset(GATES * 3 + 1);
    let last = traces.last().unwrap();
    let h_last: Vec<f64> = (0..hidden)
        .map(|j| last.gates[3][j] * last.tanh_c[j])
        .collect();
    {
        let g = grad.values_mut();
        for j in 0..hidden {
            g[head_w_off + j] = h_last[j];
        }
        g[head_b_off] = 1.0;
    }

    let mut dh: Vec<f64> = v.head_w.to_vec();
    let mut dc = vec![0.0; hidden];
    for t in (0..traces.len()).rev() {
        let tr = &traces[t];
        let [gi, gf, gg, go] = [&tr.gates[0], &tr.gates[1], &tr.gates[2], &tr.gates[3]];
        let mut da: [Vec<f64>; GATES] = [
            vec![0.0; hidden],
            vec![0.0; hidden],
            vec![0.0; hidden],
            vec![0.0; hidden],
        ];
        let mut dc_prev = vec![0.0; hidden];
        for j in 0..hidden {
            let do_j = dh[j] * tr.tanh_c[j];
            let dct = dc[j] + dh[j] * go[j] * (1.0 - tr.tanh_c[j] * tr.tanh_c[j]);
            da[3][j] = do_j * go[j] * (1.0 - go[j]);
            da[0][j] = dct * gg[j] * gi[j] * (1.0 - gi[j]);
            da[2][j] = dct * gi[j] * (1.0 - gg[j] * gg[j]);
            da[1][j] = dct * tr.c_prev[j] * gf[j] * (1.0 - gf[j]);
            dc_prev[j] = dct * gf[j];
        }
        let g = grad.values_mut();
        let mut dh_prev = vec![0.0; hidden];
        for gate in 0..GATES {
            let wx_off = m.block_offset(gate * 3);
            let wh_off = m.block_offset(gate * 3 + 1);
            let b_off = m.block_offset(gate * 3 + 2);
            for j in 0..hidden {
                let d = da[gate][j];
                if d == 0.0 {
                    continue;
                }
                g[wx_off + j] += d * tr.x;
                g[b_off + j] += d;
            }
            for (k, &hk) in tr.h_prev.iter().enumerate() {
                let row_off = wh_off + k * hidden;
                let wrow = &v.wh[gate][k * hidden..(k + 1) * hidden];
                for j in 0..hidden {
                    let d = da[gate][j];
                    if hk != 0.0 {
                        g[row_off + j] += d * hk;
                    }
                    dh_prev[k] += wrow[j] * d;
                }
            }
        }
        dh = dh_prev;
        dc = dc_prev;
    }
    Ok((y, grad))
}

/// Squared error `(y − target)²` and its gradient for one sequence.
pub fn lstm_mse_grad(
    m: &ModelParams,
    sequence: &[f64],
    target: f64,
) -> Result<(f64, GradientVector)> {
    let (y, mut grad) = lstm_regress_grad(m, sequence)?;
    let err = y - target;
    grad.scale(2.0 * err);
    Ok((err * err, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::testutil::{finite_difference_grad, grad_relative_error};
    use rand::Rng;

    #[test]
    fn parameter_count_matches_gate_arithmetic() {
        for (i, h) in [(1usize, 4usize), (1, 32), (2, 5)] {
            let m = init_lstm(i, h, 0).unwrap();
            assert_eq!(m.len(), 4 * h * (i + h + 1) + h + 1);
        }
    }

    #[test]
    fn init_deterministic_with_forget_bias_one() {
        let a = init_lstm(1, 8, 5).unwrap();
        assert_eq!(a, init_lstm(1, 8, 5).unwrap());
        // Forget-gate bias is the third block of the second gate.
        assert!(a.block(FORGET * 3 + 2).iter().all(|&v| v == 1.0));
        assert!(a.block(2).iter().all(|&v| v == 0.0)); // input-gate bias
    }

    #[test]
    fn regress_rejects_empty_sequence() {
        let m = init_lstm(1, 4, 0).unwrap();
        assert!(matches!(
            lstm_regress(&m, &[]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn output_finite_on_unit_range_sequences() {
        let m = init_lstm(1, 6, 2).unwrap();
        let mut rng = crate::rng::stream(9, "test.lstm", &[]);
        for _ in 0..20 {
            let seq: Vec<f64> = (0..30).map(|_| rng.gen_range(-1.0..1.0)).collect();
            assert!(lstm_regress(&m, &seq).unwrap().is_finite());
        }
    }

    #[test]
    fn zeroed_input_weights_ignore_constant_shift() {
        let mut m = init_lstm(1, 4, 3).unwrap();
        for gate in 0..GATES {
            let off = m.block_offset(gate * 3);
            let len = m.shapes()[gate * 3].0 * m.shapes()[gate * 3].1;
            for v in &mut m.values_mut()[off..off + len] {
                *v = 0.0;
            }
        }
        let seq: Vec<f64> = (0..10).map(|i| i as f64 * 0.05).collect();
        let shifted: Vec<f64> = seq.iter().map(|v| v + 0.3).collect();
        let a = lstm_regress(&m, &seq).unwrap();
        let b = lstm_regress(&m, &shifted).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        // The spec instance: sequence length 8, hidden 4, rel err < 1e-3.
        let m = init_lstm(1, 4, 17).unwrap();
        let mut rng = crate::rng::stream(18, "test.lstm.fd", &[]);
        let seq: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let target = 2.5;
        let (_, analytic) = lstm_mse_grad(&m, &seq, target).unwrap();
        let fd = finite_difference_grad(&m, 1e-5, |p| {
            lstm_mse_grad(p, &seq, target).unwrap().0
        });
        let err = grad_relative_error(analytic.values(), &fd);
        assert!(err < 1e-3, "relative error {err}");
    }

    #[test]
    fn mse_grad_descends() {
        let mut m = init_lstm(1, 4, 21).unwrap();
        let seq = [0.9, 0.7, 0.5, 0.4, 0.3];
        let target = 3.0;
        let (mut prev, _) = lstm_mse_grad(&m, &seq, target).unwrap();
        for _ in 0..50 {
            let (_, g) = lstm_mse_grad(&m, &seq, target).unwrap();
            m = crate::nn::sgd_step(&m, &g, 0.05).unwrap();
        }
        let (after, _) = lstm_mse_grad(&m, &seq, target).unwrap();
        assert!(after < prev * 0.1, "loss {prev} -> {after}");
        prev = after;
        let _ = prev;
    }

    #[test]
    fn non_scalar_input_dim_rejected_at_inference() {
        let m = init_lstm(2, 4, 0).unwrap();
        assert!(matches!(
            lstm_regress(&m, &[0.1, 0.2]),
            Err(Error::InvalidArgument(_))
        ));
    }
}
