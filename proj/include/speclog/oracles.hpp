#pragma once

#include "speclog/coremath.hpp"

namespace speclog {

/// n omega_n int_0^R r^{n+2s-1} ln r^2 dr by adaptive tanh-sinh quadrature, split at r = 1.
double ball_integral_quadrature(const SpectralParams& params, double radius);

}  // namespace speclog
