#pragma once

#include "vmad/gmm.hpp"
#include "vmad/rng.hpp"

#include <atomic>
#include <functional>
#include <memory>

namespace vmad {

// Evaluable map (flattened point, time) -> velocity vector. Backends must
// be pure and safe to call concurrently from several threads.
using VelocityField = std::function<Vec(const Vec&, double)>;

inline VelocityField zero_field() {
    return [](const Vec& x, double) { return Vec(x.size(), 0.0); };
}

inline VelocityField constant_field(Vec c) {
    return [c = std::move(c)](const Vec&, double) { return c; };
}

inline VelocityField gmm_oracle_field(GMMSpec gmm) {
    gmm.validate();
    return [gmm = std::move(gmm)](const Vec& x, double t) {
        return oracle_velocity(gmm, t, x);
    };
}

// Adds a fixed offset to every output of `base`; used for perturbed-oracle
// checks.
inline VelocityField offset_field(VelocityField base, Vec offset) {
    return [base = std::move(base), offset = std::move(offset)](const Vec& x, double t) {
        Vec v = base(x, t);
        for (std::size_t i = 0; i < v.size() && i < offset.size(); ++i) v[i] += offset[i];
        return v;
    };
}

// Wraps a field with a shared evaluation counter (one increment per call).
inline VelocityField counting_field(VelocityField base,
                                    std::shared_ptr<std::atomic<std::uint64_t>> counter) {
    return [base = std::move(base), counter = std::move(counter)](const Vec& x, double t) {
        counter->fetch_add(1, std::memory_order_relaxed);
        return base(x, t);
    };
}

} // namespace vmad
