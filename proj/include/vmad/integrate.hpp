#pragma once

#include "vmad/velocity_field.hpp"

namespace vmad {

// Forward Euler over [t_start, t_end] with uniform step (t_end - t_start)/steps.
// The field is evaluated at the left endpoint of each step, never at t_end.
Vec integrate_euler(const VelocityField& field, Vec x_start, double t_start, double t_end,
                    std::size_t steps);

} // namespace vmad
