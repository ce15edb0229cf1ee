//! Activation gradients against closed forms written out here, and full
//! network gradients against central differences.

use learnact::activations::{ActivationGrad, ActivationKind, ActivationLibrary, ActivationSpec, BaseActivation, Lla, Qla};
use learnact::network::{Architecture, Mlp};
use learnact::numcore::{Matrix, Rng};
use learnact::optim::mse_loss;

const SET: [BaseActivation; 4] = [
    BaseActivation::Relu,
    BaseActivation::Tanh,
    BaseActivation::Sigmoid,
    BaseActivation::Sine,
];

/// Values and derivatives of `SET`, from textbook formulas.
fn basis(x: f64) -> ([f64; 4], [f64; 4]) {
    let s = 1.0 / (1.0 + (-x).exp());
    let t = x.tanh();
    (
        [x.max(0.0), t, s, x.sin()],
        [if x > 0.0 { 1.0 } else { 0.0 }, 1.0 - t * t, s * (1.0 - s), x.cos()],
    )
}

fn inputs(rng: &mut Rng, n: usize) -> Matrix {
    let v = (0..n)
        .map(|_| {
            let z = 2.0 * rng.standard_normal();
            if z.abs() < 1e-3 { 0.5 } else { z }
        })
        .collect();
    Matrix::from_vec(n / 3, 3, v).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn constrained_lla_matches_softmax_chain_rule() {
    let lib = ActivationLibrary::new(SET.to_vec()).unwrap();
    let theta = vec![0.3, -1.2, 0.7, 0.05];
    let spec = ActivationSpec::Lla(Lla::new(lib, theta.clone(), true).unwrap());
    let mut rng = Rng::new(4);
    let x = inputs(&mut rng, 30);
    let u = inputs(&mut rng, 30);
    let (_, cache) = spec.forward(&x);
    let (dx, grad) = spec.backward(&cache, &u).unwrap();

    let m = theta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = theta.iter().map(|t| (t - m).exp()).sum();
    let lambda: Vec<f64> = theta.iter().map(|t| (t - m).exp() / z).collect();
    let mut want = [0.0; 4];
    for (i, (&xi, &ui)) in x.as_slice().iter().zip(u.as_slice()).enumerate() {
        let (a, da) = basis(xi);
        let g: f64 = (0..4).map(|j| lambda[j] * a[j]).sum();
        for (k, w) in want.iter_mut().enumerate() {
            *w += ui * lambda[k] * (a[k] - g);
        }
        let slope: f64 = (0..4).map(|j| lambda[j] * da[j]).sum();
        assert!(close(dx.as_slice()[i], ui * slope));
    }
    let ActivationGrad::Lla { theta: got } = grad else { panic!("expected lla gradient") };
    for k in 0..4 {
        assert!(close(got[k], want[k]), "theta[{k}]: {} vs {}", got[k], want[k]);
    }
}

#[test]
fn unconstrained_lla_gradient_is_basis_sum() {
    let lib = ActivationLibrary::new(SET.to_vec()).unwrap();
    let spec = ActivationSpec::Lla(Lla::new(lib, vec![0.5, 1.5, -0.25, 2.0], false).unwrap());
    let mut rng = Rng::new(5);
    let x = inputs(&mut rng, 30);
    let u = inputs(&mut rng, 30);
    let (_, cache) = spec.forward(&x);
    let (_, grad) = spec.backward(&cache, &u).unwrap();
    let ActivationGrad::Lla { theta: got } = grad else { panic!("expected lla gradient") };
    for k in 0..4 {
        let want: f64 = x.as_slice().iter().zip(u.as_slice()).map(|(&xi, &ui)| ui * basis(xi).0[k]).sum();
        assert!(close(got[k], want));
    }
}

#[test]
fn qla_matches_closed_form() {
    let lib = ActivationLibrary::new(SET.to_vec()).unwrap();
    let linear = vec![0.4, -0.3, 1.1, 0.2];
    let quadratic: Vec<f64> = (0..10).map(|i| 0.1 * i as f64 - 0.45).collect();
    let spec = ActivationSpec::Qla(Qla::new(lib, linear.clone(), quadratic.clone(), false).unwrap());
    let q = |j: usize, k: usize| quadratic[j * (8 - j + 1) / 2 + (k - j)];
    let mut rng = Rng::new(6);
    let x = inputs(&mut rng, 30);
    let u = inputs(&mut rng, 30);
    let (y, cache) = spec.forward(&x);
    let (dx, grad) = spec.backward(&cache, &u).unwrap();
    let ActivationGrad::Qla { linear: gl, quadratic: gq } = grad else { panic!("expected qla gradient") };

    let mut want_l = [0.0; 4];
    let mut want_q = [0.0; 10];
    for (i, (&xi, &ui)) in x.as_slice().iter().zip(u.as_slice()).enumerate() {
        let (a, da) = basis(xi);
        let mut value = 0.0;
        let mut slope = 0.0;
        for j in 0..4 {
            value += linear[j] * a[j];
            slope += linear[j] * da[j];
            want_l[j] += ui * a[j];
            for k in j..4 {
                value += q(j, k) * a[j] * a[k];
                slope += q(j, k) * (da[j] * a[k] + a[j] * da[k]);
                want_q[j * (8 - j + 1) / 2 + (k - j)] += ui * a[j] * a[k];
            }
        }
        assert!(close(y.as_slice()[i], value));
        assert!(close(dx.as_slice()[i], ui * slope));
    }
    for j in 0..4 {
        assert!(close(gl[j], want_l[j]));
    }
    for p in 0..10 {
        assert!(close(gq[p], want_q[p]), "quadratic[{p}]: {} vs {}", gq[p], want_q[p]);
    }
}

#[test]
fn full_network_matches_central_differences() {
    let lib = ActivationLibrary::new(SET.to_vec()).unwrap();
    let arch = Architecture {
        input_dim: 3,
        hidden: vec![(6, ActivationKind::Lla { constrained: true }), (5, ActivationKind::Fixed(BaseActivation::Tanh))],
        output_dim: 2,
    };
    let net = Mlp::init(&arch, Some(&lib), 21).unwrap();
    let mut rng = Rng::new(8);
    let x = inputs(&mut rng, 15);
    let y = Matrix::from_vec(5, 2, (0..10).map(|_| rng.standard_normal()).collect()).unwrap();
    let grads = net.gradients(&x, |yh| Ok(mse_loss(yh, &y)?.1)).unwrap();
    let analytic: Vec<f64> = grads.tensors().into_iter().flat_map(|(_, g)| g.to_vec()).collect();
    let base = net.flat_params();
    assert_eq!(analytic.len(), base.len());

    let mut probe = net.clone();
    let h = 1e-6;
    for i in 0..base.len() {
        let mut p = base.clone();
        p[i] += h;
        probe.set_flat_params(&p).unwrap();
        let up = mse_loss(&probe.predict(&x).unwrap(), &y).unwrap().0;
        p[i] -= 2.0 * h;
        probe.set_flat_params(&p).unwrap();
        let down = mse_loss(&probe.predict(&x).unwrap(), &y).unwrap().0;
        let numeric = (up - down) / (2.0 * h);
        let err = (analytic[i] - numeric).abs() / analytic[i].abs().max(numeric.abs()).max(1e-6);
        assert!(err < 1e-5, "param {i}: analytic {} numeric {numeric}", analytic[i]);
    }
}
