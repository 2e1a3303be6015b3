#include "cosaref/latent.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace cosaref {

double Latent::norm() const {
    double acc = 0.0;
    for (float v : values) acc += static_cast<double>(v) * v;
    return std::sqrt(acc);
}

bool Latent::all_finite() const {
    for (float v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

namespace {
constexpr char kMagic[4] = {'C', 'S', 'L', 'T'};

void write_u32(std::ofstream& f, uint32_t v) {
    uint8_t b[4] = {uint8_t(v & 0xff), uint8_t((v >> 8) & 0xff), uint8_t((v >> 16) & 0xff),
                    uint8_t((v >> 24) & 0xff)};
    f.write(reinterpret_cast<const char*>(b), 4);
}
uint32_t read_u32(std::ifstream& f) {
    uint8_t b[4];
    f.read(reinterpret_cast<char*>(b), 4);
    if (!f) throw LatentError("truncated latent file");
    return b[0] | (uint32_t(b[1]) << 8) | (uint32_t(b[2]) << 16) | (uint32_t(b[3]) << 24);
}
}  // namespace

void latent_save(const std::string& path, const Latent& z) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw LatentError("cannot write latent file: " + path);
    f.write(kMagic, 4);
    write_u32(f, static_cast<uint32_t>(z.channels));
    write_u32(f, static_cast<uint32_t>(z.frames));
    write_u32(f, static_cast<uint32_t>(z.downsample_ratio));
    write_u32(f, static_cast<uint32_t>(z.source_rate));
    f.write(reinterpret_cast<const char*>(z.values.data()),
            static_cast<std::streamsize>(z.values.size() * sizeof(float)));
}

Latent latent_load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw LatentError("cannot open latent file: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, kMagic, 4) != 0)
        throw LatentError("not a latent file: " + path);
    const int c = static_cast<int>(read_u32(f));
    const int fr = static_cast<int>(read_u32(f));
    const int d = static_cast<int>(read_u32(f));
    const int rate = static_cast<int>(read_u32(f));
    if (c <= 0 || fr < 0 || c > 1 << 16 || fr > 1 << 28)
        throw LatentError("implausible latent shape in " + path);
    Latent z(c, fr, d, rate);
    f.read(reinterpret_cast<char*>(z.values.data()),
           static_cast<std::streamsize>(z.values.size() * sizeof(float)));
    if (!f) throw LatentError("truncated latent file: " + path);
    return z;
}

namespace {
void check_shapes(const Latent& a, const Latent& b) {
    if (!a.same_shape(b)) throw LatentError("latent shape mismatch");
}
}  // namespace

Latent operator+(const Latent& a, const Latent& b) {
    check_shapes(a, b);
    Latent out = a;
    for (size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
    return out;
}

Latent operator-(const Latent& a, const Latent& b) {
    check_shapes(a, b);
    Latent out = a;
    for (size_t i = 0; i < out.values.size(); ++i) out.values[i] -= b.values[i];
    return out;
}

Latent operator*(double s, const Latent& a) {
    Latent out = a;
    for (auto& v : out.values) v = static_cast<float>(s * v);
    return out;
}

double latent_dot(const Latent& a, const Latent& b) {
    check_shapes(a, b);
    double acc = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i)
        acc += static_cast<double>(a.values[i]) * b.values[i];
    return acc;
}

double relative_l2(const Latent& a, const Latent& b) {
    const double denom = b.norm();
    if (denom == 0.0) return a.norm() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return (a - b).norm() / denom;
}

}  // namespace cosaref
