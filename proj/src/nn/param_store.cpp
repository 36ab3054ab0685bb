#include "speclearn/nn/param_store.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "speclearn/errors.hpp"

namespace speclearn::nn {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'C', '1'};

void write_u64le(std::ostream& os, uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    os.write(reinterpret_cast<const char*>(b), 8);
}

uint64_t read_u64le(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
}

void write_f64le(std::ostream& os, const double* data, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        uint64_t bits;
        std::memcpy(&bits, &data[i], 8);
        write_u64le(os, bits);
    }
}

void read_f64le(std::istream& is, double* data, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        const uint64_t bits = read_u64le(is);
        std::memcpy(&data[i], &bits, 8);
    }
}

}  // namespace

Tensor& ParamStore::add(const std::string& path, Tensor init) {
    auto [it, inserted] = params_.try_emplace(path);
    if (!inserted) throw std::invalid_argument("param already registered: " + path);
    it->second.grad = Tensor::zeros(init.shape);
    it->second.value = std::move(init);
    return it->second.value;
}

Param& ParamStore::at(const std::string& path) {
    auto it = params_.find(path);
    if (it == params_.end()) throw std::out_of_range("no such param: " + path);
    return it->second;
}

const Param& ParamStore::at(const std::string& path) const {
    auto it = params_.find(path);
    if (it == params_.end()) throw std::out_of_range("no such param: " + path);
    return it->second;
}

void ParamStore::zero_grads() {
    for (auto& [path, p] : params_) p.grad.fill(0.0);
}

size_t ParamStore::total_size() const {
    size_t n = 0;
    for (const auto& [path, p] : params_) n += p.value.numel();
    return n;
}

uint64_t ParamStore::value_checksum() const {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* bytes, size_t n) {
        const unsigned char* b = static_cast<const unsigned char*>(bytes);
        for (size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& [path, p] : params_) {
        mix(path.data(), path.size());
        mix(p.value.data.data(), p.value.data.size() * sizeof(double));
    }
    return h;
}

void ParamStore::save(const std::filesystem::path& path) const {
    nlohmann::json manifest;
    manifest["dtype"] = "f64";
    auto& list = manifest["params"] = nlohmann::json::array();
    for (const auto& [name, p] : params_)
        list.push_back({{"path", name}, {"shape", p.value.shape}});
    const std::string mtext = manifest.dump();

    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path.string());
    os.write(kMagic, 4);
    write_u64le(os, mtext.size());
    os.write(mtext.data(), static_cast<std::streamsize>(mtext.size()));
    for (const auto& [name, p] : params_) write_f64le(os, p.value.ptr(), p.value.numel());
    if (!os.good()) throw IoError("write failed for " + path.string());
}

ParamStore ParamStore::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot read " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is.good() || std::memcmp(magic, kMagic, 4) != 0)
        throw SchemaError("not a parameter container: " + path.string());
    const uint64_t mlen = read_u64le(is);
    std::string mtext(mlen, '\0');
    is.read(mtext.data(), static_cast<std::streamsize>(mlen));
    nlohmann::json manifest = nlohmann::json::parse(mtext, nullptr, /*allow_exceptions=*/false);
    if (manifest.is_discarded() || manifest.value("dtype", "") != "f64")
        throw SchemaError("bad parameter manifest in " + path.string());

    ParamStore store;
    try {
        for (const auto& entry : manifest.at("params")) {
            const std::string name = entry.at("path").get<std::string>();
            Tensor t(entry.at("shape").get<std::vector<int>>());
            read_f64le(is, t.ptr(), t.numel());
            store.add(name, std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("bad parameter manifest: ") + e.what());
    }
    if (!is.good()) throw SchemaError("truncated parameter container: " + path.string());
    return store;
}

}  // namespace speclearn::nn
