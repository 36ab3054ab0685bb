#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "speclearn/experiment/config.hpp"
#include "speclearn/experiment/dataset.hpp"

namespace speclearn {

// CLI entry points. Each returns a process exit code: 0 success, 3 when the
// causal direction-structure gate fails; config and IO problems are thrown
// as ConfigError / IoError and mapped by the caller.

int cmd_generate(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
int cmd_train(const ExperimentConfig& cfg, const std::filesystem::path& data_dir,
              const std::filesystem::path& ckpt_dir);
int cmd_eval(const ExperimentConfig& cfg, const std::filesystem::path& data_dir,
             const std::filesystem::path& out_dir);
int cmd_refine(const ExperimentConfig& cfg, const std::filesystem::path& ckpt_dir,
               const std::filesystem::path& data_dir, const std::filesystem::path& out_dir);
int cmd_causal(const ExperimentConfig& cfg, const std::filesystem::path& ckpt_dir,
               const std::filesystem::path& data_dir, const std::filesystem::path& out_dir);
int cmd_report(const std::filesystem::path& root);

/// Runs independent jobs across up to `n_threads` workers; the first
/// exception (if any) is rethrown after all workers finish.
void run_parallel(std::vector<std::function<void()>> jobs, int n_threads);

std::filesystem::path checkpoint_stem(const std::filesystem::path& ckpt_dir,
                                      const std::string& ablation, uint64_t seed, UserType type);

/// Accuracy of a trained model on the held-out demonstrations of its type.
double eval_accuracy(const SpecModel& model, const Dataset& data);

struct EvalRow {
    int k = 0;
    std::string variant;
    uint64_t seed = 0;
    double accuracy = 0.0;
};

struct EvalAggregate {
    int k = 0;
    std::string variant;
    double mean = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

/// The Fig-6 style sweep: for every (trajectories-per-scene, variant, seed)
/// triple, train the three user-type models on the subsampled data and pool
/// their held-out accuracy.
std::vector<EvalRow> run_eval_sweep(const ExperimentConfig& cfg, const Dataset& data);
std::vector<EvalAggregate> aggregate_eval(const ExperimentConfig& cfg,
                                          const std::vector<EvalRow>& rows);

}  // namespace speclearn
