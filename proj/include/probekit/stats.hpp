#pragma once

#include <cmath>
#include <span>

#include <boost/math/distributions/students_t.hpp>

#include "probekit/common.hpp"

namespace probekit {

struct ConfidenceInterval {
    double mean = 0.0;
    double half_width = 0.0;
};

inline double mean_of(std::span<const double> values) {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

/// Sample standard deviation (n - 1 denominator).
inline double sample_sd(std::span<const double> values) {
    const double m = mean_of(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

/// Two-sided 95% Student-t interval: half width = t(0.975, n-1) * sd / sqrt(n).
/// The half width is not clamped; callers clamp for display only.
inline ConfidenceInterval confidence_interval(std::span<const double> values) {
    if (values.size() < 2) {
        throw ValidationError("confidence_interval: need at least 2 values");
    }
    const double n = static_cast<double>(values.size());
    const boost::math::students_t dist(n - 1.0);
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    return {mean_of(values), t * sample_sd(values) / std::sqrt(n)};
}

}  // namespace probekit
