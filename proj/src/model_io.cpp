#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "pgc/error.hpp"
#include "pgc/nn.hpp"

namespace pgc::nn {

namespace {

constexpr char kMagic[4] = {'P', 'G', 'C', 'M'};
constexpr std::uint32_t kMaxLayers = 1024;
constexpr std::uint32_t kMaxDim = 1u << 20;

void put_u32(std::ostream& os, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                       static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    os.write(b, 4);
}

void put_f32s(std::ostream& os, const std::vector<float>& v) {
    std::string buf(v.size() * 4, '\0');
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto u = std::bit_cast<std::uint32_t>(v[i]);
        buf[4 * i + 0] = static_cast<char>(u & 0xFF);
        buf[4 * i + 1] = static_cast<char>((u >> 8) & 0xFF);
        buf[4 * i + 2] = static_cast<char>((u >> 16) & 0xFF);
        buf[4 * i + 3] = static_cast<char>((u >> 24) & 0xFF);
    }
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void read_exact(std::istream& is, char* dst, std::size_t n, const char* what) {
    is.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n) {
        throw FormatError(std::string("model file truncated while reading ") + what);
    }
}

std::uint32_t get_u32(std::istream& is, const char* what) {
    unsigned char b[4];
    read_exact(is, reinterpret_cast<char*>(b), 4, what);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void get_f32s(std::istream& is, std::vector<float>& v, const char* what) {
    std::string buf(v.size() * 4, '\0');
    read_exact(is, buf.data(), buf.size(), what);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto* p = reinterpret_cast<const unsigned char*>(buf.data() + 4 * i);
        const std::uint32_t u = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                                (static_cast<std::uint32_t>(p[2]) << 16) |
                                (static_cast<std::uint32_t>(p[3]) << 24);
        v[i] = std::bit_cast<float>(u);
    }
}

// Hourglass models (strictly narrowing then widening) get their latent layer
// back on load; the file does not store it.
std::optional<std::size_t> infer_bottleneck(const MlpModel& m) {
    const auto d = m.dims();
    if (d.size() < 4) return std::nullopt;
    std::size_t argmin = 1;
    for (std::size_t i = 1; i + 1 < d.size(); ++i) {
        if (d[i] < d[argmin]) argmin = i;
    }
    for (std::size_t i = 1; i <= argmin; ++i) {
        if (d[i] >= d[i - 1]) return std::nullopt;
    }
    for (std::size_t i = argmin + 1; i < d.size(); ++i) {
        if (d[i] <= d[i - 1]) return std::nullopt;
    }
    return argmin - 1;
}

} // namespace

std::size_t model_file_size(const MlpModel& m, bool has_threshold) {
    const std::size_t header = 4 + 4 + 4 + 12 * m.layers.size();
    const std::size_t trailer = 1 + (has_threshold ? 4 : 0);
    return header + 4 * (m.weight_count() + m.bias_count()) + trailer;
}

void save_model(const MlpModel& m, std::optional<double> threshold, std::ostream& os) {
    m.validate();
    os.write(kMagic, 4);
    put_u32(os, kModelFormatVersion);
    put_u32(os, static_cast<std::uint32_t>(m.layers.size()));
    for (const auto& l : m.layers) {
        put_u32(os, static_cast<std::uint32_t>(l.spec.in_dim));
        put_u32(os, static_cast<std::uint32_t>(l.spec.out_dim));
        put_u32(os, static_cast<std::uint32_t>(l.spec.activation));
    }
    for (const auto& l : m.layers) put_f32s(os, l.weight);
    for (const auto& l : m.layers) put_f32s(os, l.bias);
    os.put(threshold ? 1 : 0);
    if (threshold) put_f32s(os, {static_cast<float>(*threshold)});
    if (!os) throw IoError("save_model: stream write failed");
}

void save_model(const MlpModel& m, std::optional<double> threshold, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    save_model(m, threshold, os);
}

SavedModel load_model(std::istream& is) {
    char magic[4];
    read_exact(is, magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("not a PGCM model file (bad magic)");
    const std::uint32_t version = get_u32(is, "version");
    if (version != kModelFormatVersion) {
        throw FormatError("unsupported PGCM version " + std::to_string(version));
    }
    const std::uint32_t count = get_u32(is, "layer count");
    if (count == 0 || count > kMaxLayers) throw FormatError("implausible layer count " + std::to_string(count));

    SavedModel out;
    out.model.layers.resize(count);
    for (auto& l : out.model.layers) {
        const std::uint32_t in = get_u32(is, "layer header");
        const std::uint32_t outd = get_u32(is, "layer header");
        const std::uint32_t act = get_u32(is, "layer header");
        if (in == 0 || outd == 0 || in > kMaxDim || outd > kMaxDim) throw FormatError("implausible layer dimensions");
        if (act > 2) throw FormatError("unknown activation code " + std::to_string(act));
        l.spec = {in, outd, static_cast<Activation>(act)};
        l.weight.resize(static_cast<std::size_t>(in) * outd);
        l.bias.resize(outd);
    }
    for (auto& l : out.model.layers) get_f32s(is, l.weight, "weights");
    for (auto& l : out.model.layers) get_f32s(is, l.bias, "biases");
    char flag = 0;
    read_exact(is, &flag, 1, "threshold flag");
    if (flag == 1) {
        std::vector<float> t(1);
        get_f32s(is, t, "threshold");
        out.threshold = t[0];
    } else if (flag != 0) {
        throw FormatError("bad threshold flag");
    }
    try {
        out.model.validate();
    } catch (const DimensionError& e) {
        throw FormatError(std::string("model file layers do not chain: ") + e.what());
    }
    out.model.bottleneck_index = infer_bottleneck(out.model);
    return out;
}

SavedModel load_model(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open model " + path.string());
    try {
        return load_model(is);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

} // namespace pgc::nn
