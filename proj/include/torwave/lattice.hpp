#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace torwave {

/// Frequency vector mu in Z^2.
struct LatticePoint {
    std::int64_t mu1 = 0;
    std::int64_t mu2 = 0;

    auto operator<=>(const LatticePoint&) const = default;
};

struct PrimePower {
    std::uint64_t prime = 0;
    int exponent = 0;

    bool operator==(const PrimePower&) const = default;
};

/// Prime factorization with strictly increasing primes; empty for m = 1.
using Factorization = std::vector<PrimePower>;

/*!
 * The eigenvalue 4 pi^2 m of the flat torus together with its frequency set.
 *
 * `points` is E = {mu : mu1^2 + mu2^2 = m} in lexicographic order.
 * `half_points` keeps one vector per antipodal pair {mu, -mu}: the one with
 * mu1 > 0, or mu1 = 0 and mu2 > 0. N is |points|; it is 0 when m is not a
 * sum of two squares.
 */
struct EigenvalueSpec {
    std::uint64_t m = 0;
    double lambda = 0.0;  // 2 pi sqrt(m)
    Factorization factorization;
    std::vector<LatticePoint> points;
    std::vector<LatticePoint> half_points;

    std::size_t N() const noexcept { return points.size(); }
};

using IntMatrix2 = std::array<std::array<std::int64_t, 2>, 2>;

bool is_prime(std::uint64_t n);

/// Trial division up to 1e6, then Miller-Rabin / Pollard rho for the cofactor.
Factorization factorize(std::uint64_t m);

EigenvalueSpec enumerate_lattice_points(std::uint64_t m);

/// 4 * prod (a_j + 1) over primes p_j = 1 mod 4 when every prime = 3 mod 4
/// has even exponent, else 0. Equals |E|.
std::uint64_t multiplicity_formula(const Factorization& f);

/// Sum over E of mu mu^T. Isotropy makes this (N m / 2) I exactly.
IntMatrix2 spectral_matrix(const EigenvalueSpec& spec);

/// k-th Fourier coefficient of the angular measure of E. The imaginary part
/// vanishes by antipodal symmetry; odd k give exactly 0.
double angular_fourier(const EigenvalueSpec& spec, int k);

/// Default chord window m^{1/4} for arc_statistic_B.
double default_arc_window(std::uint64_t m);

/// Largest number of points of E on a closed arc (angular extent at most pi)
/// of the radius-sqrt(m) circle whose chord is at most `window`.
std::size_t arc_statistic_B(const EigenvalueSpec& spec, double window);

}  // namespace torwave
