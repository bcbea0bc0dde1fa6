#pragma once

#include <vector>

#include <boost/random/sobol.hpp>

namespace hardy {

// First n points of the d-dimensional Sobol sequence in [0,1)^d, row-major.
inline std::vector<double> sobol_points(int d, size_t n, size_t skip = 0) {
    boost::random::sobol gen(d);
    gen.discard(skip * d);
    const double scale = 1.0 / (static_cast<double>(gen.max()) - gen.min() + 1.0);
    std::vector<double> p(n * d);
    for (double& v : p) v = (static_cast<double>(gen()) - gen.min() + 0.5) * scale;
    return p;
}

}  // namespace hardy
