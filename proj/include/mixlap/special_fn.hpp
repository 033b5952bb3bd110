#pragma once

namespace mixlap::special {

/// Order of a Bessel function. Only nonnegative orders are accepted.
class BesselOrder {
public:
    explicit BesselOrder(double nu);

    double value() const noexcept { return nu_; }

    /// True when nu = l + 1/2 for some integer l >= 0.
    bool is_half_integer() const noexcept;

private:
    double nu_;
};

/// Gamma function on x > 0.
double gamma(double x);

/// Bessel function of the first kind J_nu(x), x >= 0.
double bessel_j(BesselOrder order, double x);

/// Modified Bessel function of the third kind K_nu(x), x > 0.
double bessel_k(BesselOrder order, double x);

/// m-th positive zero of J_nu (m >= 1).
double bessel_j_zero(BesselOrder order, int m);

} // namespace mixlap::special
