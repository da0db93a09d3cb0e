/**
 * @file complexutil.hpp
 * @brief Complex-arithmetic conventions shared by every module of the library.
 *
 * Conventions (used consistently everywhere):
 * - N >= 2 is an integer, omega = exp(2*pi*i/N), and for complex exponents
 *   omega^x := exp(2*pi*i*x/N).  The square root of omega used by the
 *   quantum-group structure is xi = q = exp(pi*i/N).
 * - The complex logarithm has its branch cut on the negative real axis with
 *   Im log in (-pi, pi].  std::log almost implements this convention but maps
 *   points on the cut to Im = +pi or -pi depending on the sign of the zero
 *   imaginary part; plog() normalizes the -pi case to +pi.
 *
 * The RootOfUnityContext bundles the level N together with the associated
 * root-of-unity constants so that downstream functions never recompute or
 * disagree about them.
 */

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qinv {

using cplx = std::complex<double>;

inline constexpr double PI = std::numbers::pi;
inline constexpr double TWO_PI = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/**
 * @brief Principal logarithm with Im log in (-pi, pi].
 *
 * std::log returns Im in [-pi, pi]; inputs exactly on the negative real axis
 * with negative-signed zero imaginary part would get Im = -pi, so we fold that
 * boundary case to +pi to match the stated convention.
 */
inline cplx plog(cplx z) {
    if (z == cplx(0.0, 0.0)) throw std::domain_error("plog: log of zero");
    cplx w = std::log(z);
    if (w.imag() == -PI) w = cplx(w.real(), PI);
    return w;
}

/** @brief exp(2*pi*i*x) for complex x. */
inline cplx e2pi(cplx x) { return std::exp(cplx(0.0, TWO_PI) * x); }

/** @brief exp(pi*i*x) for complex x. */
inline cplx epi(cplx x) { return std::exp(cplx(0.0, PI) * x); }

/**
 * @brief The level context: N, omega = e^{2 pi i/N}, xi = e^{pi i/N}.
 *
 * omegaPow implements the convention omega^x := exp(2*pi*i*x/N) for an
 * arbitrary complex exponent x; xiPow likewise gives xi^x = exp(pi*i*x/N).
 */
struct RootOfUnityContext {
    int N;
    cplx omega;
    cplx xi;

    explicit RootOfUnityContext(int level) : N(level) {
        if (level < 2) throw std::invalid_argument("RootOfUnityContext: N must be >= 2");
        omega = std::exp(cplx(0.0, TWO_PI / level));
        xi = std::exp(cplx(0.0, PI / level));
    }

    /** @brief omega^x = exp(2 pi i x / N) for complex x. */
    cplx omegaPow(cplx x) const { return std::exp(cplx(0.0, TWO_PI / N) * x); }

    /** @brief xi^x = exp(pi i x / N) for complex x. */
    cplx xiPow(cplx x) const { return std::exp(cplx(0.0, PI / N) * x); }
};

/** @brief Euclidean residue: the unique r with r == k (mod N) and 0 <= r < N. */
inline int modN(long long k, int N) {
    long long r = k % N;
    if (r < 0) r += N;
    return static_cast<int>(r);
}

/** @brief Indicator of 0 <= k <= N-1 (cutoff function for pinched R-matrices). */
inline int cutoff(long long k, int N) { return (k >= 0 && k <= N - 1) ? 1 : 0; }

/** @brief Relative distance |a-b| / max(1, |a|, |b|), for approximate tests. */
inline double relDist(cplx a, cplx b) {
    double scale = std::max(1.0, std::max(std::abs(a), std::abs(b)));
    return std::abs(a - b) / scale;
}

} // namespace qinv
