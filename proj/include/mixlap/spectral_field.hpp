#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace mixlap::spectral {

/// Periodic box [-L, L)^n sampled with N points per axis.
///
/// Grid point j along an axis sits at x_j = -L + j (2L / N); the box center is
/// j = N/2. Discrete frequencies are xi_k = k / (2L), k in [-N/2, N/2).
struct GridSpec {
    int n = 2;
    double L = 20.0;
    int N = 256;

    /// Throws DomainError unless n in {1, 2, 3}, L > 0, N >= 16 even, and
    /// N^n <= max_points.
    void validate(std::size_t max_points = std::size_t{1} << 28) const;

    std::size_t size() const;          ///< N^n
    std::size_t spectral_size() const; ///< N^{n-1} (N/2 + 1)
    double spacing() const { return 2.0 * L / N; }
    double cell_volume() const;
    double box_volume() const;
    double coordinate(int j) const { return -L + j * spacing(); }
    /// Signed frequency index of storage index k along a full axis.
    int signed_index(int k) const { return k < N / 2 ? k : k - N; }

    bool operator==(const GridSpec& other) const = default;
};

/// Real grid function in row-major order (last axis fastest).
struct RealField {
    GridSpec grid;
    std::vector<double> data;

    RealField() = default;
    explicit RealField(const GridSpec& g, double value = 0.0);

    /// Builds a field from f(x) evaluated at every grid point.
    static RealField sample(const GridSpec& g, const std::function<double(const double*)>& f);

    std::size_t index(const int* j) const;
    void unravel(std::size_t flat, int* j) const;

    double max() const;
    double min() const;
    std::size_t argmax() const; ///< smallest flat index among maximizers

    /// Throws StructuralError when data does not match the grid or holds non-finite values.
    void validate() const;

    RealField& operator+=(const RealField& other);
    RealField& operator-=(const RealField& other);
    RealField& operator*=(double factor);
};

RealField operator+(RealField a, const RealField& b);
RealField operator-(RealField a, const RealField& b);
RealField operator*(double factor, RealField a);

/// Half-spectrum transform coefficients, normalized so that the zero mode is the mean.
/// Layout: full axes for the first n-1 dimensions, N/2 + 1 entries on the last.
struct SpectralCoeffs {
    GridSpec grid;
    std::vector<std::complex<double>> coeffs;

    /// |xi| of storage index flat.
    double frequency_norm(std::size_t flat) const;
    /// Multiplicity of a stored mode in the full spectrum (1 or 2).
    double parseval_weight(std::size_t flat) const;
    bool is_nyquist(std::size_t flat) const;
};

SpectralCoeffs forward(const RealField& f);
RealField inverse(const SpectralCoeffs& c);

/// Multiplies every mode by symbol(|xi|).
SpectralCoeffs multiply(SpectralCoeffs c, const std::function<double(double)>& symbol);
RealField apply_multiplier(const RealField& f, const std::function<double(double)>& symbol);

/// Inverse transform of (|xi|^2 + |xi|^{2s} [+ 1]) f^.
RealField apply_operator(const RealField& f, double s, bool include_identity);
/// Inverse transform of f^ / (1 + |xi|^2 + |xi|^{2s}).
RealField apply_resolvent(const RealField& f, double s);

/// Copies the modes |k| < min(N, N') / 2 onto a grid with the same box and N' points;
/// Nyquist modes are dropped. Used for zero-padding and truncation.
SpectralCoeffs resample(const SpectralCoeffs& c, int target_N);

struct Norms {
    double l2 = 0.0;
    double h1_seminorm = 0.0; ///< (box \sum |xi|^2 |c|^2)^{1/2}, the |xi|^2 part of the symbol
    double hs_seminorm = 0.0; ///< (box \sum |xi|^{2s} |c|^2)^{1/2}
    double linf = 0.0;
    double sobolev_s = 0.0;   ///< (l2^2 + h1^2 + hs^2)^{1/2}
};

Norms norms(const RealField& f, double s);
double lp_norm(const RealField& f, double p);

/// Grid inner product: cell volume times the pointwise sum.
double inner_product(const RealField& f, const RealField& g);
/// <f, (1 + m) g> evaluated in coefficient space.
double energy_inner_product(const RealField& f, const RealField& g, double s);

/// Version string of the FFT library.
std::string fft_backend_version();

} // namespace mixlap::spectral
