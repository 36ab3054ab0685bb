#include "speclearn/nn/ops.hpp"

#include <algorithm>
#include <cmath>

namespace speclearn::nn {

namespace {

constexpr double kBceClamp = 1e-7;

struct ConvDims {
    int B, C, H, W, F, OH, OW, stride, pad;
};

ConvDims conv_dims(const Tensor& x, const Tensor& k, int stride, int pad) {
    if (x.ndim() != 4 || k.ndim() != 4) throw std::invalid_argument("conv2d: rank-4 tensors expected");
    if (k.dim(2) != 3 || k.dim(3) != 3) throw std::invalid_argument("conv2d: kernel must be 3x3");
    if (k.dim(1) != x.dim(1))
        throw std::invalid_argument("conv2d: channel mismatch " + x.shape_str() + " vs " + k.shape_str());
    if (stride < 1 || pad < 0) throw std::invalid_argument("conv2d: bad stride/padding");
    ConvDims d;
    d.B = x.dim(0), d.C = x.dim(1), d.H = x.dim(2), d.W = x.dim(3);
    d.F = k.dim(0);
    d.stride = stride, d.pad = pad;
    d.OH = (d.H + 2 * pad - 3) / stride + 1;
    d.OW = (d.W + 2 * pad - 3) / stride + 1;
    if (d.OH < 1 || d.OW < 1) throw std::invalid_argument("conv2d: output would be empty");
    return d;
}

// Output rows oh with 0 <= oh*stride - pad + kh < H.
inline void tap_bounds(int extent, int out_extent, int stride, int pad, int ktap, int& lo, int& hi) {
    const int shift = pad - ktap;
    lo = shift <= 0 ? 0 : (shift + stride - 1) / stride;
    hi = std::min(out_extent, (extent - 1 + shift) / stride + 1);
}

/// y[b,f,:,:] += sum_c x[b,c] (*) k[f,c]
void conv_output_accum(const Tensor& x, const Tensor& k, const ConvDims& d, Tensor& y) {
    for (int b = 0; b < d.B; ++b)
        for (int f = 0; f < d.F; ++f) {
            double* yplane = y.ptr() + (static_cast<size_t>(b) * d.F + f) * d.OH * d.OW;
            for (int c = 0; c < d.C; ++c) {
                const double* xplane = x.ptr() + (static_cast<size_t>(b) * d.C + c) * d.H * d.W;
                const double* kpatch = k.ptr() + (static_cast<size_t>(f) * d.C + c) * 9;
                for (int kh = 0; kh < 3; ++kh) {
                    int oh0, oh1;
                    tap_bounds(d.H, d.OH, d.stride, d.pad, kh, oh0, oh1);
                    for (int kw = 0; kw < 3; ++kw) {
                        const double w = kpatch[kh * 3 + kw];
                        if (w == 0.0) continue;
                        int ow0, ow1;
                        tap_bounds(d.W, d.OW, d.stride, d.pad, kw, ow0, ow1);
                        for (int oh = oh0; oh < oh1; ++oh) {
                            const double* xrow = xplane + static_cast<size_t>(oh * d.stride - d.pad + kh) * d.W - d.pad + kw;
                            double* yrow = yplane + static_cast<size_t>(oh) * d.OW;
                            for (int ow = ow0; ow < ow1; ++ow) yrow[ow] += w * xrow[ow * d.stride];
                        }
                    }
                }
            }
        }
}

/// gx[b,c,:,:] += sum_f gy[b,f] scattered through k[f,c]
void conv_input_scatter(const Tensor& gy, const Tensor& k, const ConvDims& d, Tensor& gx) {
    for (int b = 0; b < d.B; ++b)
        for (int f = 0; f < d.F; ++f) {
            const double* gyplane = gy.ptr() + (static_cast<size_t>(b) * d.F + f) * d.OH * d.OW;
            for (int c = 0; c < d.C; ++c) {
                double* gxplane = gx.ptr() + (static_cast<size_t>(b) * d.C + c) * d.H * d.W;
                const double* kpatch = k.ptr() + (static_cast<size_t>(f) * d.C + c) * 9;
                for (int kh = 0; kh < 3; ++kh) {
                    int oh0, oh1;
                    tap_bounds(d.H, d.OH, d.stride, d.pad, kh, oh0, oh1);
                    for (int kw = 0; kw < 3; ++kw) {
                        const double w = kpatch[kh * 3 + kw];
                        if (w == 0.0) continue;
                        int ow0, ow1;
                        tap_bounds(d.W, d.OW, d.stride, d.pad, kw, ow0, ow1);
                        for (int oh = oh0; oh < oh1; ++oh) {
                            double* gxrow = gxplane + static_cast<size_t>(oh * d.stride - d.pad + kh) * d.W - d.pad + kw;
                            const double* gyrow = gyplane + static_cast<size_t>(oh) * d.OW;
                            for (int ow = ow0; ow < ow1; ++ow) gxrow[ow * d.stride] += w * gyrow[ow];
                        }
                    }
                }
            }
        }
}

/// gk[f,c,:,:] += sum_b x[b,c] (*) gy[b,f]
void conv_kernel_grad(const Tensor& x, const Tensor& gy, const ConvDims& d, Tensor& gk) {
    for (int b = 0; b < d.B; ++b)
        for (int f = 0; f < d.F; ++f) {
            const double* gyplane = gy.ptr() + (static_cast<size_t>(b) * d.F + f) * d.OH * d.OW;
            for (int c = 0; c < d.C; ++c) {
                const double* xplane = x.ptr() + (static_cast<size_t>(b) * d.C + c) * d.H * d.W;
                double* kpatch = gk.ptr() + (static_cast<size_t>(f) * d.C + c) * 9;
                for (int kh = 0; kh < 3; ++kh) {
                    int oh0, oh1;
                    tap_bounds(d.H, d.OH, d.stride, d.pad, kh, oh0, oh1);
                    for (int kw = 0; kw < 3; ++kw) {
                        int ow0, ow1;
                        tap_bounds(d.W, d.OW, d.stride, d.pad, kw, ow0, ow1);
                        double acc = 0.0;
                        for (int oh = oh0; oh < oh1; ++oh) {
                            const double* xrow = xplane + static_cast<size_t>(oh * d.stride - d.pad + kh) * d.W - d.pad + kw;
                            const double* gyrow = gyplane + static_cast<size_t>(oh) * d.OW;
                            for (int ow = ow0; ow < ow1; ++ow) acc += xrow[ow * d.stride] * gyrow[ow];
                        }
                        kpatch[kh * 3 + kw] += acc;
                    }
                }
            }
        }
}

void check_grad_target(const Tensor& value, const Tensor* grad, const char* what) {
    if (grad && grad->shape != value.shape)
        throw std::invalid_argument(std::string(what) + ": gradient shape mismatch");
}

}  // namespace

Tensor dense_forward(const Tensor& x, const Tensor& W, const Tensor& b) {
    if (x.ndim() != 2 || W.ndim() != 2 || b.ndim() != 1 || x.dim(1) != W.dim(0) ||
        W.dim(1) != b.dim(0))
        throw std::invalid_argument("dense: shape mismatch " + x.shape_str() + " " + W.shape_str() +
                                    " " + b.shape_str());
    const int B = x.dim(0), I = x.dim(1), O = W.dim(1);
    Tensor y({B, O});
    for (int r = 0; r < B; ++r) {
        double* yrow = y.ptr() + static_cast<size_t>(r) * O;
        for (int o = 0; o < O; ++o) yrow[o] = b.data[o];
        const double* xrow = x.ptr() + static_cast<size_t>(r) * I;
        for (int i = 0; i < I; ++i) {
            const double xv = xrow[i];
            const double* wrow = W.ptr() + static_cast<size_t>(i) * O;
            for (int o = 0; o < O; ++o) yrow[o] += xv * wrow[o];
        }
    }
    return y;
}

void dense_backward(const Tensor& x, const Tensor& W, const Tensor& gy, Tensor* gx, Tensor* gW,
                    Tensor* gb) {
    const int B = x.dim(0), I = x.dim(1), O = W.dim(1);
    if (gy.shape != std::vector<int>{B, O}) throw std::invalid_argument("dense: bad gy shape");
    check_grad_target(x, gx, "dense gx");
    check_grad_target(W, gW, "dense gW");
    for (int r = 0; r < B; ++r) {
        const double* gyrow = gy.ptr() + static_cast<size_t>(r) * O;
        const double* xrow = x.ptr() + static_cast<size_t>(r) * I;
        if (gx) {
            double* gxrow = gx->ptr() + static_cast<size_t>(r) * I;
            for (int i = 0; i < I; ++i) {
                const double* wrow = W.ptr() + static_cast<size_t>(i) * O;
                double acc = 0.0;
                for (int o = 0; o < O; ++o) acc += gyrow[o] * wrow[o];
                gxrow[i] += acc;
            }
        }
        if (gW) {
            for (int i = 0; i < I; ++i) {
                const double xv = xrow[i];
                double* gwrow = gW->ptr() + static_cast<size_t>(i) * O;
                for (int o = 0; o < O; ++o) gwrow[o] += xv * gyrow[o];
            }
        }
        if (gb)
            for (int o = 0; o < O; ++o) gb->data[o] += gyrow[o];
    }
}

Tensor conv2d_forward(const Tensor& x, const Tensor& k, int stride, int padding) {
    const ConvDims d = conv_dims(x, k, stride, padding);
    Tensor y({d.B, d.F, d.OH, d.OW});
    conv_output_accum(x, k, d, y);
    return y;
}

void conv2d_backward(const Tensor& x, const Tensor& k, const Tensor& gy, int stride, int padding,
                     Tensor* gx, Tensor* gk) {
    const ConvDims d = conv_dims(x, k, stride, padding);
    if (gy.shape != std::vector<int>{d.B, d.F, d.OH, d.OW})
        throw std::invalid_argument("conv2d: bad gy shape " + gy.shape_str());
    check_grad_target(x, gx, "conv2d gx");
    check_grad_target(k, gk, "conv2d gk");
    if (gx) conv_input_scatter(gy, k, d, *gx);
    if (gk) conv_kernel_grad(x, gy, d, *gk);
}

Tensor deconv2d_forward(const Tensor& y, const Tensor& k, int stride) {
    if (stride != 2) throw std::invalid_argument("deconv2d: only stride 2 is supported");
    if (y.ndim() != 4 || k.ndim() != 4 || y.dim(1) != k.dim(0))
        throw std::invalid_argument("deconv2d: shape mismatch " + y.shape_str() + " vs " +
                                    k.shape_str());
    const int B = y.dim(0), C = k.dim(1), H = y.dim(2), W = y.dim(3);
    Tensor x({B, C, 2 * H, 2 * W});
    const ConvDims d = conv_dims(x, k, 2, 1);
    conv_input_scatter(y, k, d, x);
    return x;
}

void deconv2d_backward(const Tensor& y, const Tensor& k, const Tensor& gx_out, Tensor* gy,
                       Tensor* gk) {
    const ConvDims d = conv_dims(gx_out, k, 2, 1);
    if (y.shape != std::vector<int>{d.B, d.F, d.OH, d.OW})
        throw std::invalid_argument("deconv2d: input/output shape mismatch");
    check_grad_target(y, gy, "deconv2d gy");
    check_grad_target(k, gk, "deconv2d gk");
    // the adjoint pairing: d/dy is a plain convolution of the output gradient
    if (gy) conv_output_accum(gx_out, k, d, *gy);
    if (gk) conv_kernel_grad(gx_out, y, d, *gk);
}

Tensor relu_forward(const Tensor& x) {
    Tensor y = x;
    for (double& v : y.data) v = v > 0.0 ? v : 0.0;
    return y;
}

void relu_backward(const Tensor& x, const Tensor& gy, Tensor* gx) {
    if (!gx) return;
    if (!x.same_shape(gy) || !x.same_shape(*gx)) throw std::invalid_argument("relu: shape mismatch");
    for (size_t i = 0; i < x.numel(); ++i)
        if (x.data[i] > 0.0) gx->data[i] += gy.data[i];
}

Tensor sigmoid_forward(const Tensor& x) {
    Tensor y = x;
    for (double& v : y.data) v = 1.0 / (1.0 + std::exp(-v));
    return y;
}

void sigmoid_backward(const Tensor& s, const Tensor& gy, Tensor* gx) {
    if (!gx) return;
    if (!s.same_shape(gy) || !s.same_shape(*gx))
        throw std::invalid_argument("sigmoid: shape mismatch");
    for (size_t i = 0; i < s.numel(); ++i) gx->data[i] += gy.data[i] * s.data[i] * (1.0 - s.data[i]);
}

Tensor reparameterize(const Tensor& mu, const Tensor& logvar, const Tensor& noise) {
    if (!mu.same_shape(logvar) || !mu.same_shape(noise))
        throw std::invalid_argument("reparameterize: shape mismatch");
    Tensor z = mu;
    for (size_t i = 0; i < z.numel(); ++i)
        z.data[i] += std::exp(0.5 * logvar.data[i]) * noise.data[i];
    return z;
}

void reparameterize_backward(const Tensor& logvar, const Tensor& noise, const Tensor& gz,
                             Tensor* gmu, Tensor* glogvar) {
    if (!logvar.same_shape(noise) || !logvar.same_shape(gz))
        throw std::invalid_argument("reparameterize: shape mismatch");
    for (size_t i = 0; i < gz.numel(); ++i) {
        if (gmu) gmu->data[i] += gz.data[i];
        if (glogvar)
            glogvar->data[i] += gz.data[i] * 0.5 * std::exp(0.5 * logvar.data[i]) * noise.data[i];
    }
}

double kl_gaussian(const Tensor& mu, const Tensor& logvar) {
    if (!mu.same_shape(logvar) || mu.ndim() != 2)
        throw std::invalid_argument("kl_gaussian: expected matching [B,K] tensors");
    double total = 0.0;
    for (size_t i = 0; i < mu.numel(); ++i) {
        const double m = mu.data[i], lv = logvar.data[i];
        total += m * m + std::exp(lv) - lv - 1.0;
    }
    return 0.5 * total / mu.dim(0);
}

void kl_gaussian_backward(const Tensor& mu, const Tensor& logvar, double scale, Tensor* gmu,
                          Tensor* glogvar) {
    const double inv_b = scale / mu.dim(0);
    for (size_t i = 0; i < mu.numel(); ++i) {
        if (gmu) gmu->data[i] += inv_b * mu.data[i];
        if (glogvar) glogvar->data[i] += inv_b * 0.5 * (std::exp(logvar.data[i]) - 1.0);
    }
}

double bce(const Tensor& pred, const Tensor& target) {
    if (!pred.same_shape(target)) throw std::invalid_argument("bce: shape mismatch");
    double total = 0.0;
    for (size_t i = 0; i < pred.numel(); ++i) {
        const double p = std::clamp(pred.data[i], kBceClamp, 1.0 - kBceClamp);
        const double t = target.data[i];
        total += t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    }
    return -total / static_cast<double>(pred.numel());
}

void bce_backward(const Tensor& pred, const Tensor& target, double scale, Tensor* gpred) {
    if (!gpred) return;
    const double inv_n = scale / static_cast<double>(pred.numel());
    for (size_t i = 0; i < pred.numel(); ++i) {
        const double p = pred.data[i];
        if (p < kBceClamp || p > 1.0 - kBceClamp) continue;  // clamp region has zero slope
        const double t = target.data[i];
        gpred->data[i] += inv_n * (-(t / p) + (1.0 - t) / (1.0 - p));
    }
}

}  // namespace speclearn::nn
