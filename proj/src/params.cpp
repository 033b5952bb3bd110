#include "mixlap/params.hpp"

#include "mixlap/errors.hpp"

#include <cmath>
#include <string>

namespace mixlap {

void KernelParams::validate() const {
    if (n < 1) {
        throw DomainError("dimension n must be >= 1, got " + std::to_string(n));
    }
    if (!(s > 0.0 && s < 1.0)) {
        throw DomainError("fractional order s must lie in (0, 1), got " + std::to_string(s));
    }
}

double operator_symbol(double r, double s) {
    return r * r + std::pow(r, 2.0 * s);
}

} // namespace mixlap
