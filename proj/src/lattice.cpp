#include "torwave/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "torwave/error.hpp"

namespace torwave {
namespace {

using u64 = std::uint64_t;
__extension__ using u128 = unsigned __int128;
__extension__ using i128 = __int128;

constexpr u64 kTrialDivisionLimit = 1'000'000;

u64 mulmod(u64 a, u64 b, u64 n) { return static_cast<u64>(static_cast<u128>(a) * b % n); }

u64 powmod(u64 base, u64 e, u64 n)
{
    u64 result = 1 % n;
    base %= n;
    while (e > 0) {
        if (e & 1) result = mulmod(result, base, n);
        base = mulmod(base, base, n);
        e >>= 1;
    }
    return result;
}

// Pollard rho with Brent's cycle detection; n must be odd and composite.
u64 pollard_rho(u64 n)
{
    for (u64 c = 1;; ++c) {
        auto step = [&](u64 x) { return (mulmod(x, x, n) + c) % n; };
        u64 y = 2, x = 2, d = 1, q = 1, ys = 2;
        u64 r = 1;
        constexpr u64 batch = 64;
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = step(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(batch, r - k); ++i) {
                    y = step(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                d = std::gcd(q, n);
                k += batch;
            } while (k < r && d == 1);
            r *= 2;
        } while (d == 1);
        if (d == n) {
            do {
                ys = step(ys);
                d = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (d == 1);
        }
        if (d != n) return d;
    }
}

void split_cofactor(u64 n, std::vector<u64>& primes)
{
    if (n == 1) return;
    if (is_prime(n)) {
        primes.push_back(n);
        return;
    }
    const u64 d = pollard_rho(n);
    split_cofactor(d, primes);
    split_cofactor(n / d, primes);
}

std::int64_t isqrt(u64 n)
{
    auto r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
    while (static_cast<u128>(r) * r > n) --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
    return static_cast<std::int64_t>(r);
}

void require_nonempty(const EigenvalueSpec& spec, const char* op)
{
    if (spec.N() == 0) {
        throw InvalidArgument(std::string(op) + ": m = " + std::to_string(spec.m) +
                              " is not a sum of two squares (N = 0)");
    }
}

}  // namespace

bool is_prime(u64 n)
{
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // These bases are deterministic for all n < 2^64.
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

Factorization factorize(u64 m)
{
    if (m == 0 || m > static_cast<u64>(INT64_MAX)) {
        throw InvalidArgument("factorize: m must lie in [1, 2^63 - 1]");
    }
    Factorization out;
    u64 rest = m;
    for (u64 p = 2; p <= kTrialDivisionLimit && p * p <= rest; p += (p == 2 ? 1 : 2)) {
        if (rest % p != 0) continue;
        int e = 0;
        while (rest % p == 0) {
            rest /= p;
            ++e;
        }
        out.push_back({p, e});
    }
    if (rest > 1) {
        std::vector<u64> primes;
        split_cofactor(rest, primes);
        std::sort(primes.begin(), primes.end());
        for (u64 p : primes) {
            if (!out.empty() && out.back().prime == p) {
                ++out.back().exponent;
            } else {
                out.push_back({p, 1});
            }
        }
    }
    return out;
}

std::uint64_t multiplicity_formula(const Factorization& f)
{
    u64 n = 4;
    for (const auto& [p, e] : f) {
        if (p % 4 == 3 && e % 2 != 0) return 0;
        if (p % 4 == 1) n *= static_cast<u64>(e + 1);
    }
    return n;
}

EigenvalueSpec enumerate_lattice_points(u64 m)
{
    if (m == 0) throw InvalidArgument("enumerate_lattice_points: m must be positive");
    EigenvalueSpec spec;
    spec.m = m;
    spec.lambda = 2.0 * std::numbers::pi * std::sqrt(static_cast<double>(m));
    spec.factorization = factorize(m);

    const std::int64_t r = isqrt(m);
    for (std::int64_t x = -r; x <= r; ++x) {
        const u64 rest = m - static_cast<u64>(x * x);
        const std::int64_t y = isqrt(rest);
        if (static_cast<u64>(y * y) != rest) continue;
        spec.points.push_back({x, -y});
        if (y != 0) spec.points.push_back({x, y});
    }
    // The scan runs in increasing mu1 with mu2 = -y before +y, which is
    // already lexicographic.
    for (const auto& p : spec.points) {
        if (p.mu1 > 0 || (p.mu1 == 0 && p.mu2 > 0)) spec.half_points.push_back(p);
    }
    return spec;
}

IntMatrix2 spectral_matrix(const EigenvalueSpec& spec)
{
    require_nonempty(spec, "spectral_matrix");
    i128 s11 = 0, s12 = 0, s22 = 0;
    for (const auto& p : spec.points) {
        s11 += static_cast<i128>(p.mu1) * p.mu1;
        s12 += static_cast<i128>(p.mu1) * p.mu2;
        s22 += static_cast<i128>(p.mu2) * p.mu2;
    }
    for (auto v : {s11, s12, s22}) {
        if (v > INT64_MAX || v < INT64_MIN) throw NumericError("spectral_matrix: int64 overflow");
    }
    return {{{static_cast<std::int64_t>(s11), static_cast<std::int64_t>(s12)},
             {static_cast<std::int64_t>(s12), static_cast<std::int64_t>(s22)}}};
}

double angular_fourier(const EigenvalueSpec& spec, int k)
{
    require_nonempty(spec, "angular_fourier");
    // Pair mu with -mu: cos(k(theta + pi)) = (-1)^k cos(k theta).
    const double pair_weight = (k % 2 == 0) ? 2.0 : 0.0;
    double sum = 0.0;
    for (const auto& p : spec.half_points) {
        const double theta = std::atan2(static_cast<double>(p.mu2), static_cast<double>(p.mu1));
        sum += pair_weight * std::cos(k * theta);
    }
    return sum / static_cast<double>(spec.N());
}

double default_arc_window(u64 m) { return std::pow(static_cast<double>(m), 0.25); }

std::size_t arc_statistic_B(const EigenvalueSpec& spec, double window)
{
    require_nonempty(spec, "arc_statistic_B");
    if (!(window > 0.0)) throw InvalidArgument("arc_statistic_B: window must be positive");

    // Counterclockwise order starting from angle (-pi, pi]; computed exactly by
    // half-plane then cross product.
    std::vector<LatticePoint> pts = spec.points;
    auto upper = [](const LatticePoint& p) { return p.mu2 > 0 || (p.mu2 == 0 && p.mu1 > 0); };
    std::sort(pts.begin(), pts.end(), [&](const LatticePoint& a, const LatticePoint& b) {
        const bool ua = upper(a), ub = upper(b);
        if (ua != ub) return ua;
        return static_cast<i128>(a.mu1) * b.mu2 - static_cast<i128>(a.mu2) * b.mu1 > 0;
    });

    const std::size_t n = pts.size();
    const double w2 = window * window;
    // An arc of extent <= pi from a to b: cross(a, b) >= 0 (b ccw of a).
    auto fits = [&](const LatticePoint& a, const LatticePoint& b) {
        const auto cross = static_cast<i128>(a.mu1) * b.mu2 - static_cast<i128>(a.mu2) * b.mu1;
        if (cross < 0) return false;
        const auto dx = static_cast<i128>(a.mu1 - b.mu1);
        const auto dy = static_cast<i128>(a.mu2 - b.mu2);
        return static_cast<long double>(dx * dx + dy * dy) <= static_cast<long double>(w2);
    };

    std::size_t best = 1;
    std::size_t j = 0;  // arc covers pts[i .. i + j] (cyclic)
    for (std::size_t i = 0; i < n; ++i) {
        if (j > 0) --j;
        while (j + 1 < n && fits(pts[i], pts[(i + j + 1) % n])) ++j;
        best = std::max(best, j + 1);
    }
    return best;
}

}  // namespace torwave
