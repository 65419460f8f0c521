#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace testutil {

inline Eigen::VectorXd normals(std::mt19937_64& rng, Eigen::Index n, double mean = 0.0, double sd = 1.0) {
    std::normal_distribution<double> nd(mean, sd);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = nd(rng);
    return v;
}

inline Eigen::VectorXd uniforms(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
    std::uniform_real_distribution<double> ud(lo, hi);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = ud(rng);
    return v;
}

}  // namespace testutil
