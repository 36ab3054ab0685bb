#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "speclearn/nn/tensor.hpp"

namespace speclearn::nn {

struct Param {
    Tensor value;
    Tensor grad;
};

/// Named parameters with mirrored gradients; iteration order is sorted by
/// path so every reduction and serialization is deterministic.
class ParamStore {
public:
    Tensor& add(const std::string& path, Tensor init);
    Param& at(const std::string& path);
    const Param& at(const std::string& path) const;
    bool contains(const std::string& path) const { return params_.count(path) > 0; }

    void zero_grads();
    size_t total_size() const;
    size_t count() const { return params_.size(); }

    /// FNV-1a over the raw value bytes; used to detect untouched (untrained)
    /// parameter sets.
    uint64_t value_checksum() const;

    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }
    auto begin() const { return params_.begin(); }
    auto end() const { return params_.end(); }

    /// Container format: "SPC1" magic, little-endian u64 manifest length,
    /// manifest JSON {dtype, params:[{path, shape}]}, then one float64 blob
    /// per parameter in sorted-path order.
    void save(const std::filesystem::path& path) const;
    static ParamStore load(const std::filesystem::path& path);

private:
    std::map<std::string, Param> params_;
};

}  // namespace speclearn::nn
