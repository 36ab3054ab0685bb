#pragma once

#include "speclearn/nn/tensor.hpp"

namespace speclearn::nn {

// All backward functions accumulate (+=) into the gradient tensors they are
// given; pass nullptr to skip a gradient.

/// y = x W + b.  x:[B,I]  W:[I,O]  b:[O]  ->  y:[B,O]
Tensor dense_forward(const Tensor& x, const Tensor& W, const Tensor& b);
void dense_backward(const Tensor& x, const Tensor& W, const Tensor& gy, Tensor* gx, Tensor* gW,
                    Tensor* gb);

/// Cross-correlation with zero padding.  x:[B,C,H,W]  k:[F,C,3,3]
/// -> y:[B,F,OH,OW] with OH = (H + 2*padding - 3)/stride + 1.
Tensor conv2d_forward(const Tensor& x, const Tensor& k, int stride = 2, int padding = 1);
void conv2d_backward(const Tensor& x, const Tensor& k, const Tensor& gy, int stride, int padding,
                     Tensor* gx, Tensor* gk);

/// Transposed convolution, defined as the adjoint of conv2d with stride 2 and
/// padding 1 mapping [B,C,2H,2W] -> [B,F,H,W].  y:[B,F,H,W]  k:[F,C,3,3]
/// -> x:[B,C,2H,2W], so <conv2d(x,k), y> == <x, deconv2d(y,k)>.
Tensor deconv2d_forward(const Tensor& y, const Tensor& k, int stride = 2);
void deconv2d_backward(const Tensor& y, const Tensor& k, const Tensor& gx_out, Tensor* gy,
                       Tensor* gk);

Tensor relu_forward(const Tensor& x);
void relu_backward(const Tensor& x, const Tensor& gy, Tensor* gx);

Tensor sigmoid_forward(const Tensor& x);
/// Takes the forward output s = sigmoid(x), not x.
void sigmoid_backward(const Tensor& s, const Tensor& gy, Tensor* gx);

/// z = mu + exp(0.5*logvar) .* noise. The caller supplies the N(0,1) draw so
/// the whole step stays a pure function of its inputs.
Tensor reparameterize(const Tensor& mu, const Tensor& logvar, const Tensor& noise);
void reparameterize_backward(const Tensor& logvar, const Tensor& noise, const Tensor& gz,
                             Tensor* gmu, Tensor* glogvar);

/// KL(q(z)=N(mu,exp(logvar)) || N(0,1)) summed over dims, mean over batch.
double kl_gaussian(const Tensor& mu, const Tensor& logvar);
void kl_gaussian_backward(const Tensor& mu, const Tensor& logvar, double scale, Tensor* gmu,
                          Tensor* glogvar);

/// Binary cross-entropy, mean over all elements; predictions are clamped to
/// [1e-7, 1-1e-7] before the logs.
double bce(const Tensor& pred, const Tensor& target);
void bce_backward(const Tensor& pred, const Tensor& target, double scale, Tensor* gpred);

}  // namespace speclearn::nn
