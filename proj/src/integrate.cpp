#include "vmad/integrate.hpp"

#include <stdexcept>

namespace vmad {

Vec integrate_euler(const VelocityField& field, Vec x_start, double t_start, double t_end,
                    std::size_t steps) {
    if (!(t_start >= 0.0) || !(t_end <= 1.0) || !(t_start < t_end))
        throw std::invalid_argument("integrate_euler: need 0 <= t_start < t_end <= 1");
    if (steps == 0) throw std::invalid_argument("integrate_euler: steps must be >= 1");
    const double h = (t_end - t_start) / static_cast<double>(steps);
    Vec x = std::move(x_start);
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = t_start + h * static_cast<double>(i);
        const Vec v = field(x, t);
        if (v.size() != x.size())
            throw std::invalid_argument("integrate_euler: field output dimension mismatch");
        for (std::size_t k = 0; k < x.size(); ++k) x[k] += h * v[k];
    }
    return x;
}

} // namespace vmad
