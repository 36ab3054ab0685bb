#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "speclearn/nn/adam.hpp"
#include "speclearn/nn/param_store.hpp"
#include "speclearn/nn/tensor.hpp"
#include "speclearn/rng.hpp"
#include "speclearn/scene.hpp"
#include "speclearn/trajectory.hpp"

namespace speclearn {

inline constexpr int kSceneLatentDim = 15;
inline constexpr int kThetaDim = 2;
inline constexpr int kFullLatentDim = kSceneLatentDim + kThetaDim;

/// Coefficients of the three loss terms. The ablations map onto these:
/// the AE variant sets beta = 0, the classifier variant alpha = beta = 0.
struct LossWeights {
    double alpha = 1.0;
    double beta = 4.0;
    double gamma = 10.0;
};

struct LossBreakdown {
    double recon = 0.0;
    double kl = 0.0;
    double cls = 0.0;
    double total = 0.0;
};

struct LatentCode {
    std::vector<double> mu;       // 15
    std::vector<double> logvar;   // 15
    std::vector<double> z_scene;  // 15, sampled
    Vec2 z_theta;                 // filled in by the caller when known
};

/// One scene of the training set: its rendered image plus the demonstrations
/// attached to it.
struct TrainScene {
    nn::Tensor image;  // [3,H,W]
    UserType user_type = UserType::Careful;
    std::vector<Demonstration> demos;
};

struct TrainConfig {
    int epochs = 150;
    int batch_size = 32;
    double lr = 1e-3;
    uint64_t seed = 1;
};

struct EpochStats {
    int epoch = 0;
    LossBreakdown loss;
    double accuracy = 0.0;
};
using TrainLog = std::vector<EpochStats>;

/// Converts a rendered scene image (HxWx3) to the [3,H,W] tensor layout the
/// encoder consumes.
nn::Tensor image_to_tensor(const Image& img);

/// The specification model for one user type: convolutional VAE over the
/// scene image plus a fully connected validity classifier over the
/// concatenated latent (15 scene dims + the 2 trajectory dims).
class SpecModel {
public:
    SpecModel(UserType type, LossWeights weights, uint64_t init_seed, int image_size = kImageSize);

    UserType user_type() const { return user_type_; }
    LossWeights& weights() { return weights_; }
    const LossWeights& weights() const { return weights_; }
    int image_size() const { return image_size_; }
    nn::ParamStore& params() { return params_; }
    const nn::ParamStore& params() const { return params_; }
    uint64_t init_checksum() const { return init_checksum_; }
    bool is_trained() const { return params_.value_checksum() != init_checksum_; }

    /// Encoder pass; z_scene is sampled with the supplied noise (15 values).
    LatentCode encode(const nn::Tensor& image, const nn::Tensor& noise) const;
    /// Posterior mean only (the noise-free code used at inference time).
    std::vector<double> encode_mean(const nn::Tensor& image) const;
    nn::Tensor decode(const std::vector<double>& z_scene) const;

    /// Classifier score for a full 17-dim latent.
    double classify(const std::vector<double>& z_full) const;
    /// Score plus d(score)/d(z_theta); powers the refinement module.
    double classify_with_theta_grad(const std::vector<double>& z_full, Vec2* grad_theta) const;

    double predict_validity(const nn::Tensor& image, const Vec2& theta) const;
    double predict_validity_mu(const std::vector<double>& mu, const Vec2& theta) const;
    /// Scores for many control points against one encoded scene.
    std::vector<double> classify_batch(const std::vector<double>& mu,
                                       const std::vector<Vec2>& thetas) const;

    /// Validity scores over a grid_n x grid_n lattice of control points with
    /// cell-center coordinates; row-major, row index = theta.y.
    std::vector<double> latent_grid_sample(const nn::Tensor& image, int grid_n) const;

    /// Full three-term loss for one demonstration; accumulates parameter
    /// gradients. v must be 0 or 1.
    LossBreakdown loss(const nn::Tensor& image, const Vec2& theta, int v, const nn::Tensor& noise);

    /// Adam training on scene-grouped batches. When `opt` is supplied the run
    /// continues from `start_epoch` with the given optimizer state, which is
    /// how checkpoint resume replays identically.
    TrainLog train(const std::vector<TrainScene>& scenes, const TrainConfig& cfg,
                   nn::AdamState* opt = nullptr, int start_epoch = 0);

    /// Checkpoint: <stem>.spc parameter container + <stem>.json sidecar.
    void save_checkpoint(const std::filesystem::path& stem, int epoch, uint64_t seed) const;
    static SpecModel load_checkpoint(const std::filesystem::path& stem);
    /// Epoch recorded in a checkpoint sidecar (for resume).
    static int checkpoint_epoch(const std::filesystem::path& stem);

private:
    struct ImagePass;
    struct ClassifierPass;

    void init_params(uint64_t seed);
    ImagePass image_forward(const nn::Tensor& image, const double* noise15) const;
    void image_backward(ImagePass& pass, double recon_scale, double kl_scale,
                        const std::vector<double>& g_z_extra);
    ClassifierPass classifier_forward(const nn::Tensor& z_batch) const;
    void classifier_backward(ClassifierPass& pass, const nn::Tensor& g_pred, nn::Tensor* g_input);

    struct BatchRef {
        const TrainScene* scene;
        const Demonstration* demos;
        int demo_count;
    };
    LossBreakdown batch_loss(const std::vector<BatchRef>& batch, Rng& noise_rng, int* correct);

    UserType user_type_;
    LossWeights weights_;
    int image_size_;
    int h1_, h2_, h3_;  // encoder feature map extents
    nn::ParamStore params_;
    uint64_t init_checksum_ = 0;
};

}  // namespace speclearn
