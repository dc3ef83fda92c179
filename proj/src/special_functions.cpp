#include "randsum/special_functions.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <stdexcept>

namespace randsum {

double normal_quantile(double q) {
    if (!(q > 0.0 && q < 1.0))
        throw std::domain_error("randsum: normal_quantile requires q in (0, 1)");
    // Phi^{-1}(q) = -sqrt(2) * erfc_inv(2q)
    return -sqrt_two * boost::math::erfc_inv(2.0 * q);
}

}  // namespace randsum
