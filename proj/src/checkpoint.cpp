// Binary layout (host byte order, little-endian on every supported platform):
//   "WQEDMPS\0"  u32 version  u64 n_sites  u64 center  u8 canonical
//   u64 n_meta, then per entry: u64 len, key bytes, u64 len, value bytes
//   per site: u8 kind, u8 channel, u64 time_index, u64 left, u64 phys, u64 right,
//             left*phys*right pairs of f64 (re, im) in column-major order

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

#include "wqed/errors.hpp"
#include "wqed/tensor.hpp"

namespace wqed::tn {
namespace {

constexpr std::array<char, 8> kMagic{'W', 'Q', 'E', 'D', 'M', 'P', 'S', '\0'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_string(std::ostream& out, const std::string& s) {
    put<std::uint64_t>(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <class T>
T get(std::istream& in) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
        throw CheckpointError("unexpected end of checkpoint data");
    return v;
}

std::string get_string(std::istream& in) {
    const auto n = get<std::uint64_t>(in);
    if (n > (1u << 20)) throw CheckpointError("metadata string too long");
    std::string s(n, '\0');
    if (n && !in.read(s.data(), static_cast<std::streamsize>(n)))
        throw CheckpointError("unexpected end of checkpoint data");
    return s;
}

} // namespace

void save_checkpoint(std::ostream& out, const Mps& state,
                     const std::map<std::string, std::string>& meta) {
    out.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(out, kVersion);
    put<std::uint64_t>(out, state.size());
    put<std::uint64_t>(out, state.center());
    put<std::uint8_t>(out, state.is_canonical() ? 1 : 0);
    put<std::uint64_t>(out, meta.size());
    for (const auto& [k, v] : meta) {
        put_string(out, k);
        put_string(out, v);
    }
    for (const auto& site : state.sites()) {
        put<std::uint8_t>(out, site.label.kind == SiteLabel::Kind::Emitter ? 1 : 0);
        put<std::uint8_t>(out, static_cast<std::uint8_t>(site.label.channel));
        put<std::uint64_t>(out, site.label.time_index);
        put<std::uint64_t>(out, site.left());
        put<std::uint64_t>(out, site.phys());
        put<std::uint64_t>(out, site.right());
        out.write(reinterpret_cast<const char*>(site.data.data()),
                  static_cast<std::streamsize>(site.data.size() * sizeof(cd)));
    }
    if (!out) throw CheckpointError("failed to write checkpoint");
}

Checkpoint load_checkpoint(std::istream& in) {
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic)
        throw CheckpointError("not a state checkpoint (bad magic)");
    const auto version = get<std::uint32_t>(in);
    if (version != kVersion)
        throw CheckpointError(fmt::format("unsupported checkpoint version {}", version));
    const auto n = get<std::uint64_t>(in);
    const auto center = get<std::uint64_t>(in);
    const bool canonical = get<std::uint8_t>(in) != 0;
    Checkpoint cp;
    const auto n_meta = get<std::uint64_t>(in);
    for (std::uint64_t i = 0; i < n_meta; ++i) {
        std::string k = get_string(in);
        cp.meta[k] = get_string(in);
    }
    std::vector<SiteTensor> sites;
    sites.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        SiteLabel label;
        label.kind = get<std::uint8_t>(in) ? SiteLabel::Kind::Emitter : SiteLabel::Kind::Bin;
        const auto ch = get<std::uint8_t>(in);
        if (ch > 1) throw CheckpointError("invalid channel tag");
        label.channel = static_cast<Channel>(ch);
        label.time_index = get<std::uint64_t>(in);
        const auto l = get<std::uint64_t>(in), p = get<std::uint64_t>(in), r = get<std::uint64_t>(in);
        if (l == 0 || p == 0 || r == 0 || l * p * r > kMaxElements)
            throw CheckpointError(fmt::format("implausible site shape ({}, {}, {})", l, p, r));
        std::vector<cd> data(l * p * r);
        if (!in.read(reinterpret_cast<char*>(data.data()),
                     static_cast<std::streamsize>(data.size() * sizeof(cd))))
            throw CheckpointError("unexpected end of checkpoint data");
        sites.emplace_back(Tensor({l, p, r}, std::move(data)), label);
    }
    try {
        cp.state = Mps(std::move(sites));
    } catch (const ShapeMismatch& e) {
        throw CheckpointError(std::string("inconsistent bonds: ") + e.what());
    }
    if (canonical) {
        if (n == 0 || center >= n) throw CheckpointError("centre index out of range");
        cp.state.set_center(center);
    }
    return cp;
}

void save_checkpoint(const std::string& path, const Mps& state,
                     const std::map<std::string, std::string>& meta) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("cannot open " + path + " for writing");
    save_checkpoint(out, state, meta);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open " + path);
    return load_checkpoint(in);
}

} // namespace wqed::tn
