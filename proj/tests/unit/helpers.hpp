#pragma once

#include "magspec/types.hpp"

#include <random>

namespace testutil {

inline magspec::Vec3 random_point(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng), u(rng)};
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace testutil

#include "magspec/degennes.hpp"

#include <memory>

namespace testutil {

/// Half-line model minimum on a coarse mesh, shared by the tests that need a trial state.
inline std::shared_ptr<const magspec::degennes::DeGennesMinimum> model() {
    static const auto m = std::make_shared<const magspec::degennes::DeGennesMinimum>(
        magspec::degennes::minimize_mu({20.0, 1e-3}, 1e-6));
    return m;
}

} // namespace testutil
