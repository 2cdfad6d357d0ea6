#include "vmad/rng.hpp"

#include "vmad/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vmad {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

} // namespace

RngState RngState::seeded(std::uint64_t seed) {
    return RngState{mix64(seed ^ 0xA0761D6478BD642Full), 0};
}

RngState RngState::split(std::uint64_t stream) const {
    return RngState{mix64(key + mix64(stream ^ 0xE7037ED1A0B428DBull)), 0};
}

std::uint64_t RngState::next_u64() {
    return mix64(key + kGamma * ++counter);
}

double RngState::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngState::next_normal() {
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log1p(-u1)); // log(1-u1), u1 < 1
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

Vec sample_standard_normal(std::size_t dim, RngState& rng) {
    if (dim == 0) throw std::invalid_argument("sample_standard_normal: dim must be >= 1");
    Vec out(dim);
    fill_standard_normal(out, rng);
    return out;
}

void fill_standard_normal(std::span<double> out, RngState& rng) {
    std::size_t i = 0;
    while (i + 1 < out.size()) {
        const double u1 = rng.next_unit();
        const double u2 = rng.next_unit();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        const double a = 2.0 * std::numbers::pi * u2;
        out[i] = r * std::cos(a);
        out[i + 1] = r * std::sin(a);
        i += 2;
    }
    if (i < out.size()) out[i] = rng.next_normal();
}

} // namespace vmad
