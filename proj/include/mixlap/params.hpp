#pragma once

namespace mixlap {

/// Dimension and fractional order of the operator -Laplacian + (-Laplacian)^s.
struct KernelParams {
    int n = 2;
    double s = 0.5;

    /// Throws DomainError unless n >= 1 and 0 < s < 1.
    void validate() const;
};

/// Fourier symbol |xi|^2 + |xi|^{2s} at radius r = |xi|.
double operator_symbol(double r, double s);

} // namespace mixlap
