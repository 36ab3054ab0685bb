#include "speclearn/specmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "speclearn/errors.hpp"
#include "speclearn/nn/ops.hpp"

namespace speclearn {

using nn::Tensor;

namespace {

int half_up(int v) { return (v + 1) / 2; }

Tensor crop_center(const Tensor& t, int out) {
    const int S = t.dim(2);
    const int off = (S - out) / 2;
    Tensor y({t.dim(0), t.dim(1), out, out});
    for (int b = 0; b < t.dim(0); ++b)
        for (int c = 0; c < t.dim(1); ++c)
            for (int r = 0; r < out; ++r)
                std::memcpy(y.ptr() + ((static_cast<size_t>(b) * t.dim(1) + c) * out + r) * out,
                            t.ptr() + ((static_cast<size_t>(b) * t.dim(1) + c) * S + (r + off)) * S + off,
                            sizeof(double) * out);
    return y;
}

Tensor uncrop_center(const Tensor& g, int full) {
    const int H = g.dim(2);
    const int off = (full - H) / 2;
    Tensor y({g.dim(0), g.dim(1), full, full});
    for (int b = 0; b < g.dim(0); ++b)
        for (int c = 0; c < g.dim(1); ++c)
            for (int r = 0; r < H; ++r)
                std::memcpy(y.ptr() + ((static_cast<size_t>(b) * g.dim(1) + c) * full + (r + off)) * full + off,
                            g.ptr() + ((static_cast<size_t>(b) * g.dim(1) + c) * H + r) * H,
                            sizeof(double) * H);
    return y;
}

}  // namespace

nn::Tensor image_to_tensor(const Image& img) {
    Tensor t({3, img.height, img.width});
    for (int c = 0; c < 3; ++c)
        for (int r = 0; r < img.height; ++r)
            for (int col = 0; col < img.width; ++col)
                t.data[(static_cast<size_t>(c) * img.height + r) * img.width + col] =
                    img.at(r, col, c);
    return t;
}

struct SpecModel::ImagePass {
    Tensor x;                        // [1,3,H,W]
    Tensor a1, r1, a2, r2, a3, r3;   // encoder convs
    Tensor flat, enc_out;            // [1,4*h3*h3], [1,30]
    Tensor mu, logvar, noise, z;     // [1,15]
    Tensor d0, dv0;                  // decoder dense pre-relu, reshaped post-relu
    Tensor u1, u1r, u2, u2r, u3, u3s;
    Tensor recon;                    // [1,3,H,W]
    double recon_loss = 0.0;
    double kl_loss = 0.0;
    bool has_decoder = false;
};

struct SpecModel::ClassifierPass {
    Tensor zin;         // [N,17]
    Tensor a1, r1;      // [N,64]
    Tensor a2, r2;      // [N,32]
    Tensor logit, pred; // [N,1]
};

SpecModel::SpecModel(UserType type, LossWeights weights, uint64_t init_seed, int image_size)
    : user_type_(type), weights_(weights), image_size_(image_size) {
    h1_ = half_up(image_size_);
    h2_ = half_up(h1_);
    h3_ = half_up(h2_);
    if (8 * h3_ < image_size_)
        throw std::invalid_argument("specmodel: image size incompatible with decoder geometry");
    init_params(init_seed);
    init_checksum_ = params_.value_checksum();
}

void SpecModel::init_params(uint64_t seed) {
    Rng rng(derive_seed(seed, {0x1217ULL, static_cast<uint64_t>(user_type_)}));
    auto he = [&rng](Tensor& t, int fan_in) {
        const double s = std::sqrt(2.0 / fan_in);
        for (double& v : t.data) v = rng.normal() * s;
    };
    auto glorot = [&rng](Tensor& t, int fan_in, int fan_out) {
        const double l = std::sqrt(6.0 / (fan_in + fan_out));
        for (double& v : t.data) v = rng.uniform(-l, l);
    };
    const int flat = 4 * h3_ * h3_;

    he(params_.add("enc/conv1/k", Tensor({16, 3, 3, 3})), 3 * 9);
    he(params_.add("enc/conv2/k", Tensor({8, 16, 3, 3})), 16 * 9);
    he(params_.add("enc/conv3/k", Tensor({4, 8, 3, 3})), 8 * 9);
    glorot(params_.add("enc/fc/W", Tensor({flat, 2 * kSceneLatentDim})), flat, 2 * kSceneLatentDim);
    params_.add("enc/fc/b", Tensor({2 * kSceneLatentDim}));

    glorot(params_.add("dec/fc/W", Tensor({kSceneLatentDim, flat})), kSceneLatentDim, flat);
    params_.add("dec/fc/b", Tensor({flat}));
    he(params_.add("dec/deconv1/k", Tensor({4, 8, 3, 3})), 4 * 9);
    he(params_.add("dec/deconv2/k", Tensor({8, 16, 3, 3})), 8 * 9);
    he(params_.add("dec/deconv3/k", Tensor({16, 3, 3, 3})), 16 * 9);

    glorot(params_.add("cls/fc1/W", Tensor({kFullLatentDim, 64})), kFullLatentDim, 64);
    params_.add("cls/fc1/b", Tensor({64}));
    glorot(params_.add("cls/fc2/W", Tensor({64, 32})), 64, 32);
    params_.add("cls/fc2/b", Tensor({32}));
    glorot(params_.add("cls/fc3/W", Tensor({32, 1})), 32, 1);
    params_.add("cls/fc3/b", Tensor({1}));
}

SpecModel::ImagePass SpecModel::image_forward(const Tensor& image, const double* noise15) const {
    ImagePass p;
    if (image.numel() != static_cast<size_t>(3) * image_size_ * image_size_)
        throw std::invalid_argument("specmodel: image has wrong shape " + image.shape_str());
    p.x = Tensor({1, 3, image_size_, image_size_}, image.data);

    p.a1 = nn::conv2d_forward(p.x, params_.at("enc/conv1/k").value);
    p.r1 = nn::relu_forward(p.a1);
    p.a2 = nn::conv2d_forward(p.r1, params_.at("enc/conv2/k").value);
    p.r2 = nn::relu_forward(p.a2);
    p.a3 = nn::conv2d_forward(p.r2, params_.at("enc/conv3/k").value);
    p.r3 = nn::relu_forward(p.a3);
    p.flat = Tensor({1, 4 * h3_ * h3_}, p.r3.data);
    p.enc_out = nn::dense_forward(p.flat, params_.at("enc/fc/W").value, params_.at("enc/fc/b").value);

    p.mu = Tensor({1, kSceneLatentDim});
    p.logvar = Tensor({1, kSceneLatentDim});
    for (int i = 0; i < kSceneLatentDim; ++i) {
        p.mu.data[i] = p.enc_out.data[i];
        p.logvar.data[i] = p.enc_out.data[kSceneLatentDim + i];
    }
    if (!noise15) return p;  // encoder-only pass

    p.noise = Tensor({1, kSceneLatentDim},
                     std::vector<double>(noise15, noise15 + kSceneLatentDim));
    p.z = nn::reparameterize(p.mu, p.logvar, p.noise);
    p.kl_loss = nn::kl_gaussian(p.mu, p.logvar);

    if (weights_.alpha != 0.0) {
        p.has_decoder = true;
        p.d0 = nn::dense_forward(p.z, params_.at("dec/fc/W").value, params_.at("dec/fc/b").value);
        Tensor d0r = nn::relu_forward(p.d0);
        p.dv0 = Tensor({1, 4, h3_, h3_}, std::move(d0r.data));
        p.u1 = nn::deconv2d_forward(p.dv0, params_.at("dec/deconv1/k").value);
        p.u1r = nn::relu_forward(p.u1);
        p.u2 = nn::deconv2d_forward(p.u1r, params_.at("dec/deconv2/k").value);
        p.u2r = nn::relu_forward(p.u2);
        p.u3 = nn::deconv2d_forward(p.u2r, params_.at("dec/deconv3/k").value);
        p.u3s = nn::sigmoid_forward(p.u3);
        p.recon = crop_center(p.u3s, image_size_);
        p.recon_loss = nn::bce(p.recon, p.x);
    }
    return p;
}

void SpecModel::image_backward(ImagePass& p, double recon_scale, double kl_scale,
                               const std::vector<double>& g_z_extra) {
    Tensor g_z({1, kSceneLatentDim});
    for (int i = 0; i < kSceneLatentDim; ++i) g_z.data[i] = g_z_extra[i];

    if (p.has_decoder && recon_scale != 0.0) {
        Tensor g_recon({1, 3, image_size_, image_size_});
        nn::bce_backward(p.recon, p.x, recon_scale, &g_recon);
        Tensor g_u3s = uncrop_center(g_recon, 8 * h3_);
        Tensor g_u3(g_u3s.shape);
        nn::sigmoid_backward(p.u3s, g_u3s, &g_u3);

        Tensor g_u2r(p.u2r.shape);
        nn::deconv2d_backward(p.u2r, params_.at("dec/deconv3/k").value, g_u3, &g_u2r,
                              &params_.at("dec/deconv3/k").grad);
        Tensor g_u2(p.u2.shape);
        nn::relu_backward(p.u2, g_u2r, &g_u2);

        Tensor g_u1r(p.u1r.shape);
        nn::deconv2d_backward(p.u1r, params_.at("dec/deconv2/k").value, g_u2, &g_u1r,
                              &params_.at("dec/deconv2/k").grad);
        Tensor g_u1(p.u1.shape);
        nn::relu_backward(p.u1, g_u1r, &g_u1);

        Tensor g_dv0(p.dv0.shape);
        nn::deconv2d_backward(p.dv0, params_.at("dec/deconv1/k").value, g_u1, &g_dv0,
                              &params_.at("dec/deconv1/k").grad);
        Tensor g_d0relu({1, 4 * h3_ * h3_}, std::move(g_dv0.data));
        Tensor g_d0(p.d0.shape);
        nn::relu_backward(p.d0, g_d0relu, &g_d0);
        nn::dense_backward(p.z, params_.at("dec/fc/W").value, g_d0, &g_z,
                           &params_.at("dec/fc/W").grad, &params_.at("dec/fc/b").grad);
    }

    Tensor g_mu({1, kSceneLatentDim});
    Tensor g_logvar({1, kSceneLatentDim});
    if (kl_scale != 0.0)
        nn::kl_gaussian_backward(p.mu, p.logvar, kl_scale, &g_mu, &g_logvar);
    nn::reparameterize_backward(p.logvar, p.noise, g_z, &g_mu, &g_logvar);

    Tensor g_enc_out({1, 2 * kSceneLatentDim});
    for (int i = 0; i < kSceneLatentDim; ++i) {
        g_enc_out.data[i] = g_mu.data[i];
        g_enc_out.data[kSceneLatentDim + i] = g_logvar.data[i];
    }
    Tensor g_flat(p.flat.shape);
    nn::dense_backward(p.flat, params_.at("enc/fc/W").value, g_enc_out, &g_flat,
                       &params_.at("enc/fc/W").grad, &params_.at("enc/fc/b").grad);

    Tensor g_r3(p.r3.shape, std::move(g_flat.data));
    Tensor g_a3(p.a3.shape);
    nn::relu_backward(p.a3, g_r3, &g_a3);
    Tensor g_r2(p.r2.shape);
    nn::conv2d_backward(p.r2, params_.at("enc/conv3/k").value, g_a3, 2, 1, &g_r2,
                        &params_.at("enc/conv3/k").grad);
    Tensor g_a2(p.a2.shape);
    nn::relu_backward(p.a2, g_r2, &g_a2);
    Tensor g_r1(p.r1.shape);
    nn::conv2d_backward(p.r1, params_.at("enc/conv2/k").value, g_a2, 2, 1, &g_r1,
                        &params_.at("enc/conv2/k").grad);
    Tensor g_a1(p.a1.shape);
    nn::relu_backward(p.a1, g_r1, &g_a1);
    // input image needs no gradient
    nn::conv2d_backward(p.x, params_.at("enc/conv1/k").value, g_a1, 2, 1, nullptr,
                        &params_.at("enc/conv1/k").grad);
}

SpecModel::ClassifierPass SpecModel::classifier_forward(const Tensor& z_batch) const {
    ClassifierPass c;
    c.zin = z_batch;
    c.a1 = nn::dense_forward(c.zin, params_.at("cls/fc1/W").value, params_.at("cls/fc1/b").value);
    c.r1 = nn::relu_forward(c.a1);
    c.a2 = nn::dense_forward(c.r1, params_.at("cls/fc2/W").value, params_.at("cls/fc2/b").value);
    c.r2 = nn::relu_forward(c.a2);
    c.logit = nn::dense_forward(c.r2, params_.at("cls/fc3/W").value, params_.at("cls/fc3/b").value);
    c.pred = nn::sigmoid_forward(c.logit);
    return c;
}

void SpecModel::classifier_backward(ClassifierPass& c, const Tensor& g_pred, Tensor* g_input) {
    Tensor g_logit(c.logit.shape);
    nn::sigmoid_backward(c.pred, g_pred, &g_logit);
    Tensor g_r2(c.r2.shape);
    nn::dense_backward(c.r2, params_.at("cls/fc3/W").value, g_logit, &g_r2,
                       &params_.at("cls/fc3/W").grad, &params_.at("cls/fc3/b").grad);
    Tensor g_a2(c.a2.shape);
    nn::relu_backward(c.a2, g_r2, &g_a2);
    Tensor g_r1(c.r1.shape);
    nn::dense_backward(c.r1, params_.at("cls/fc2/W").value, g_a2, &g_r1,
                       &params_.at("cls/fc2/W").grad, &params_.at("cls/fc2/b").grad);
    Tensor g_a1(c.a1.shape);
    nn::relu_backward(c.a1, g_r1, &g_a1);
    nn::dense_backward(c.zin, params_.at("cls/fc1/W").value, g_a1, g_input,
                       &params_.at("cls/fc1/W").grad, &params_.at("cls/fc1/b").grad);
}

LatentCode SpecModel::encode(const Tensor& image, const Tensor& noise) const {
    if (noise.numel() != kSceneLatentDim)
        throw std::invalid_argument("encode: noise must have 15 elements");
    ImagePass p = image_forward(image, nullptr);
    LatentCode code;
    code.mu.assign(p.mu.data.begin(), p.mu.data.end());
    code.logvar.assign(p.logvar.data.begin(), p.logvar.data.end());
    code.z_scene.resize(kSceneLatentDim);
    for (int i = 0; i < kSceneLatentDim; ++i)
        code.z_scene[i] = code.mu[i] + std::exp(0.5 * code.logvar[i]) * noise.data[i];
    return code;
}

std::vector<double> SpecModel::encode_mean(const Tensor& image) const {
    ImagePass p = image_forward(image, nullptr);
    return {p.mu.data.begin(), p.mu.data.end()};
}

Tensor SpecModel::decode(const std::vector<double>& z_scene) const {
    if (z_scene.size() != kSceneLatentDim)
        throw std::invalid_argument("decode: z must have 15 elements");
    Tensor z({1, kSceneLatentDim}, z_scene);
    Tensor d0 = nn::dense_forward(z, params_.at("dec/fc/W").value, params_.at("dec/fc/b").value);
    Tensor d0r = nn::relu_forward(d0);
    Tensor dv0({1, 4, h3_, h3_}, std::move(d0r.data));
    Tensor u1 = nn::relu_forward(nn::deconv2d_forward(dv0, params_.at("dec/deconv1/k").value));
    Tensor u2 = nn::relu_forward(nn::deconv2d_forward(u1, params_.at("dec/deconv2/k").value));
    Tensor u3 = nn::sigmoid_forward(nn::deconv2d_forward(u2, params_.at("dec/deconv3/k").value));
    Tensor out = crop_center(u3, image_size_);
    return Tensor({3, image_size_, image_size_}, std::move(out.data));
}

double SpecModel::classify(const std::vector<double>& z_full) const {
    if (z_full.size() != kFullLatentDim)
        throw std::invalid_argument("classify: z must have 17 elements");
    ClassifierPass c = classifier_forward(Tensor({1, kFullLatentDim}, z_full));
    return c.pred.data[0];
}

double SpecModel::classify_with_theta_grad(const std::vector<double>& z_full,
                                           Vec2* grad_theta) const {
    ClassifierPass c = classifier_forward(Tensor({1, kFullLatentDim}, z_full));
    if (grad_theta) {
        Tensor g_pred({1, 1}, {1.0});
        Tensor g_logit(c.logit.shape);
        nn::sigmoid_backward(c.pred, g_pred, &g_logit);
        Tensor g_r2(c.r2.shape);
        nn::dense_backward(c.r2, params_.at("cls/fc3/W").value, g_logit, &g_r2, nullptr, nullptr);
        Tensor g_a2(c.a2.shape);
        nn::relu_backward(c.a2, g_r2, &g_a2);
        Tensor g_r1(c.r1.shape);
        nn::dense_backward(c.r1, params_.at("cls/fc2/W").value, g_a2, &g_r1, nullptr, nullptr);
        Tensor g_a1(c.a1.shape);
        nn::relu_backward(c.a1, g_r1, &g_a1);
        Tensor g_zin(c.zin.shape);
        nn::dense_backward(c.zin, params_.at("cls/fc1/W").value, g_a1, &g_zin, nullptr, nullptr);
        grad_theta->x = g_zin.data[kSceneLatentDim];
        grad_theta->y = g_zin.data[kSceneLatentDim + 1];
    }
    return c.pred.data[0];
}

double SpecModel::predict_validity(const Tensor& image, const Vec2& theta) const {
    return predict_validity_mu(encode_mean(image), theta);
}

double SpecModel::predict_validity_mu(const std::vector<double>& mu, const Vec2& theta) const {
    std::vector<double> z = mu;
    z.push_back(theta.x);
    z.push_back(theta.y);
    return classify(z);
}

std::vector<double> SpecModel::classify_batch(const std::vector<double>& mu,
                                              const std::vector<Vec2>& thetas) const {
    if (mu.size() != kSceneLatentDim)
        throw std::invalid_argument("classify_batch: mu must have 15 elements");
    const int n = static_cast<int>(thetas.size());
    if (n == 0) return {};
    Tensor z({n, kFullLatentDim});
    for (int i = 0; i < n; ++i) {
        double* row = z.ptr() + static_cast<size_t>(i) * kFullLatentDim;
        std::copy(mu.begin(), mu.end(), row);
        row[kSceneLatentDim] = thetas[i].x;
        row[kSceneLatentDim + 1] = thetas[i].y;
    }
    ClassifierPass c = classifier_forward(z);
    return c.pred.data;
}

std::vector<double> SpecModel::latent_grid_sample(const Tensor& image, int grid_n) const {
    if (grid_n < 1) throw std::invalid_argument("latent_grid_sample: grid_n must be >= 1");
    const std::vector<double> mu = encode_mean(image);
    std::vector<Vec2> thetas;
    thetas.reserve(static_cast<size_t>(grid_n) * grid_n);
    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j < grid_n; ++j)
            thetas.push_back({(j + 0.5) / grid_n, (i + 0.5) / grid_n});
    return classify_batch(mu, thetas);
}

LossBreakdown SpecModel::loss(const Tensor& image, const Vec2& theta, int v, const Tensor& noise) {
    if (v != 0 && v != 1) throw std::invalid_argument("loss: v must be 0 or 1");
    if (noise.numel() != kSceneLatentDim)
        throw std::invalid_argument("loss: noise must have 15 elements");

    // single-demonstration case of the batched step below
    ImagePass p = image_forward(image, noise.ptr());

    Tensor z_full({1, kFullLatentDim});
    std::copy(p.z.data.begin(), p.z.data.end(), z_full.data.begin());
    z_full.data[kSceneLatentDim] = theta.x;
    z_full.data[kSceneLatentDim + 1] = theta.y;
    ClassifierPass c = classifier_forward(z_full);
    const Tensor target({1, 1}, {static_cast<double>(v)});
    const double cls = nn::bce(c.pred, target);

    LossBreakdown lb;
    lb.recon = p.recon_loss;
    lb.kl = p.kl_loss;
    lb.cls = cls;
    lb.total = weights_.alpha * lb.recon + weights_.beta * lb.kl + weights_.gamma * lb.cls;

    Tensor g_pred({1, 1});
    nn::bce_backward(c.pred, target, weights_.gamma, &g_pred);
    Tensor g_zin({1, kFullLatentDim});
    classifier_backward(c, g_pred, &g_zin);
    std::vector<double> g_z(g_zin.data.begin(), g_zin.data.begin() + kSceneLatentDim);
    image_backward(p, weights_.alpha, weights_.beta, g_z);
    return lb;
}

LossBreakdown SpecModel::batch_loss(const std::vector<BatchRef>& batch, Rng& noise_rng,
                                    int* correct) {
    const int n_images = static_cast<int>(batch.size());
    int n_demos = 0;
    for (const auto& b : batch) n_demos += b.demo_count;

    std::vector<ImagePass> passes;
    passes.reserve(n_images);
    std::vector<double> noise(kSceneLatentDim);
    double recon_term = 0.0, kl_term = 0.0;
    for (const auto& b : batch) {
        for (double& nv : noise) nv = noise_rng.normal();
        passes.push_back(image_forward(b.scene->image, noise.data()));
        const double w = static_cast<double>(b.demo_count) / n_demos;
        recon_term += w * passes.back().recon_loss;
        kl_term += w * passes.back().kl_loss;
    }

    Tensor z_batch({n_demos, kFullLatentDim});
    Tensor targets({n_demos, 1});
    int row = 0;
    for (int i = 0; i < n_images; ++i)
        for (int d = 0; d < batch[i].demo_count; ++d, ++row) {
            double* dst = z_batch.ptr() + static_cast<size_t>(row) * kFullLatentDim;
            std::copy(passes[i].z.data.begin(), passes[i].z.data.end(), dst);
            dst[kSceneLatentDim] = batch[i].demos[d].theta.x;
            dst[kSceneLatentDim + 1] = batch[i].demos[d].theta.y;
            targets.data[row] = batch[i].demos[d].valid ? 1.0 : 0.0;
        }

    ClassifierPass c = classifier_forward(z_batch);
    const double cls = nn::bce(c.pred, targets);
    if (correct) {
        for (int i = 0; i < n_demos; ++i)
            if ((c.pred.data[i] >= 0.5) == (targets.data[i] >= 0.5)) ++*correct;
    }

    LossBreakdown lb;
    lb.recon = recon_term;
    lb.kl = kl_term;
    lb.cls = cls;
    lb.total = weights_.alpha * lb.recon + weights_.beta * lb.kl + weights_.gamma * lb.cls;

    Tensor g_pred({n_demos, 1});
    nn::bce_backward(c.pred, targets, weights_.gamma, &g_pred);
    Tensor g_zin({n_demos, kFullLatentDim});
    classifier_backward(c, g_pred, &g_zin);

    row = 0;
    std::vector<double> g_z(kSceneLatentDim);
    for (int i = 0; i < n_images; ++i) {
        std::fill(g_z.begin(), g_z.end(), 0.0);
        for (int d = 0; d < batch[i].demo_count; ++d, ++row) {
            const double* src = g_zin.ptr() + static_cast<size_t>(row) * kFullLatentDim;
            for (int j = 0; j < kSceneLatentDim; ++j) g_z[j] += src[j];
        }
        const double w = static_cast<double>(batch[i].demo_count) / n_demos;
        image_backward(passes[i], weights_.alpha * w, weights_.beta * w, g_z);
    }
    return lb;
}

TrainLog SpecModel::train(const std::vector<TrainScene>& scenes, const TrainConfig& cfg,
                          nn::AdamState* opt, int start_epoch) {
    if (scenes.empty()) throw std::invalid_argument("train: empty dataset");
    size_t total_demos = 0;
    for (const auto& s : scenes) {
        if (s.user_type != user_type_)
            throw std::invalid_argument("train: demonstration user type does not match the model");
        total_demos += s.demos.size();
    }
    if (total_demos == 0) throw std::invalid_argument("train: empty dataset");

    nn::AdamState local_state(params_);
    nn::AdamState& state = opt ? *opt : local_state;
    nn::AdamConfig acfg;
    acfg.lr = cfg.lr;

    constexpr int kMaxScenesPerBatch = 5;

    TrainLog log;
    for (int epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
        Rng rng(derive_seed(cfg.seed, {0xE70C4ULL, static_cast<uint64_t>(epoch)}));
        std::vector<int> order(scenes.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        rng.shuffle(order);

        double sum_recon = 0, sum_kl = 0, sum_cls = 0, sum_total = 0;
        int correct = 0, counted = 0;
        size_t pos = 0;
        while (pos < order.size()) {
            std::vector<BatchRef> batch;
            int demos_in_batch = 0;
            while (pos < order.size() && static_cast<int>(batch.size()) < kMaxScenesPerBatch) {
                const TrainScene& s = scenes[static_cast<size_t>(order[pos])];
                const int k = static_cast<int>(s.demos.size());
                if (k == 0) {
                    ++pos;
                    continue;
                }
                if (!batch.empty() && demos_in_batch + k > cfg.batch_size) break;
                batch.push_back({&s, s.demos.data(), k});
                demos_in_batch += k;
                ++pos;
            }
            if (batch.empty()) break;

            const LossBreakdown lb = batch_loss(batch, rng, &correct);
            state.step(params_, acfg);

            sum_recon += lb.recon * demos_in_batch;
            sum_kl += lb.kl * demos_in_batch;
            sum_cls += lb.cls * demos_in_batch;
            sum_total += lb.total * demos_in_batch;
            counted += demos_in_batch;
        }

        EpochStats stats;
        stats.epoch = epoch;
        if (counted > 0) {
            stats.loss.recon = sum_recon / counted;
            stats.loss.kl = sum_kl / counted;
            stats.loss.cls = sum_cls / counted;
            stats.loss.total = sum_total / counted;
            stats.accuracy = static_cast<double>(correct) / counted;
        }
        log.push_back(stats);
    }
    return log;
}

void SpecModel::save_checkpoint(const std::filesystem::path& stem, int epoch,
                                uint64_t seed) const {
    std::filesystem::path params_path = stem;
    params_path += ".spc";
    params_.save(params_path);

    nlohmann::json sidecar{{"user_type", to_string(user_type_)}, {"alpha", weights_.alpha},
                           {"beta", weights_.beta},             {"gamma", weights_.gamma},
                           {"epoch", epoch},                    {"seed", seed}};
    std::filesystem::path json_path = stem;
    json_path += ".json";
    std::ofstream os(json_path);
    if (!os) throw IoError("cannot write " + json_path.string());
    os << sidecar.dump(1) << '\n';
}

SpecModel SpecModel::load_checkpoint(const std::filesystem::path& stem) {
    std::filesystem::path json_path = stem;
    json_path += ".json";
    std::ifstream is(json_path);
    if (!is) throw IoError("cannot read " + json_path.string());
    nlohmann::json sidecar = nlohmann::json::parse(is, nullptr, /*allow_exceptions=*/false);
    if (sidecar.is_discarded()) throw SchemaError("checkpoint sidecar is not valid JSON");
    try {
        const UserType type = user_type_from_string(sidecar.at("user_type").get<std::string>());
        LossWeights w{sidecar.at("alpha").get<double>(), sidecar.at("beta").get<double>(),
                      sidecar.at("gamma").get<double>()};
        const uint64_t seed = sidecar.at("seed").get<uint64_t>();
        SpecModel model(type, w, seed);
        std::filesystem::path params_path = stem;
        params_path += ".spc";
        nn::ParamStore loaded = nn::ParamStore::load(params_path);
        for (const auto& [path, p] : model.params_) {
            if (!loaded.contains(path) || loaded.at(path).value.shape != p.value.shape)
                throw SchemaError("checkpoint parameter mismatch at " + path);
        }
        model.params_ = std::move(loaded);
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("checkpoint sidecar: ") + e.what());
    }
}

int SpecModel::checkpoint_epoch(const std::filesystem::path& stem) {
    std::filesystem::path json_path = stem;
    json_path += ".json";
    std::ifstream is(json_path);
    if (!is) throw IoError("cannot read " + json_path.string());
    nlohmann::json sidecar = nlohmann::json::parse(is, nullptr, /*allow_exceptions=*/false);
    if (sidecar.is_discarded() || !sidecar.contains("epoch"))
        throw SchemaError("checkpoint sidecar missing epoch");
    return sidecar.at("epoch").get<int>();
}

}  // namespace speclearn
