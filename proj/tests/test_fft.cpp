#include "wframe/fft.hpp"

#include <gtest/gtest.h>

#include <vector>

using wframe::cplx;
using wframe::pi;

namespace {

std::vector<cplx> random_vec(std::size_t n, std::uint64_t seed) {
    wframe::Pcg32 rng(seed);
    std::vector<cplx> v(n);
    for (auto& z : v) z = cplx{rng.next_gauss(), rng.next_gauss()};
    return v;
}

std::vector<cplx> dft_direct(const std::vector<cplx>& x) {
    std::size_t n = x.size();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx s{0, 0};
        for (std::size_t j = 0; j < n; ++j)
            s += x[j] * std::polar(1.0, -2.0 * pi * double(j) * double(k) / double(n));
        out[k] = s;
    }
    return out;
}

// reference for czt: out[k] = sum_n x[n] e^{sign 2pi i (n0+n)(k0+k) p/q}
std::vector<cplx> czt_direct(const std::vector<cplx>& x, long long n0, long long k0,
                             std::size_t m, double ratio, int sign) {
    std::vector<cplx> out(m);
    for (std::size_t k = 0; k < m; ++k) {
        cplx s{0, 0};
        for (std::size_t n = 0; n < x.size(); ++n) {
            double turns = double(n0 + (long long)n) * double(k0 + (long long)k) * ratio;
            s += x[n] * std::polar(1.0, (sign < 0 ? -2.0 : 2.0) * pi * std::fmod(turns, 1.0));
        }
        out[k] = s;
    }
    return out;
}

}  // namespace

TEST(Fft, MatchesDirectDft) {
    auto x = random_vec(64, 7);
    auto want = dft_direct(x);
    auto got = x;
    wframe::Fft f(64);
    f.forward(got.data());
    for (std::size_t i = 0; i < x.size(); ++i)
        ASSERT_NEAR(std::abs(got[i] - want[i]), 0.0, 1e-11) << "bin " << i;
}

TEST(Fft, RoundTrip) {
    auto x = random_vec(1024, 3);
    auto y = x;
    wframe::Fft f(1024);
    f.forward(y.data());
    f.inverse(y.data());
    for (std::size_t i = 0; i < x.size(); ++i)
        ASSERT_NEAR(std::abs(y[i] - x[i]), 0.0, 1e-12);
}

TEST(Czt, RationalMatchesDirect) {
    auto x = random_vec(37, 11);
    long long p = 3, q = 157;
    for (int sign : {+1, -1}) {
        auto got = wframe::czt_rational(x, -18, -40, 93, p, q, sign);
        auto want = czt_direct(x, -18, -40, 93, double(p) / double(q), sign);
        for (std::size_t k = 0; k < got.size(); ++k)
            ASSERT_NEAR(std::abs(got[k] - want[k]), 0.0, 1e-10) << "k=" << k << " sign=" << sign;
    }
}

TEST(Czt, RationalAsPlainDft) {
    auto x = random_vec(32, 5);
    auto want = dft_direct(x);
    auto got = wframe::czt_rational(x, 0, 0, 32, 1, 32, -1);
    for (std::size_t k = 0; k < 32; ++k)
        ASSERT_NEAR(std::abs(got[k] - want[k]), 0.0, 1e-11);
}

TEST(Czt, LargePhaseStaysExact) {
    // kn up to ~2e9: double angle reduction would drift ~1e-7 here, the rational
    // path must not.
    std::vector<cplx> x{{1.0, 0.0}};
    long long n0 = 44001, k0 = 50000;
    long long p = 1, q = 97003;
    auto got = wframe::czt_rational(x, n0, k0, 5, p, q, +1);
    for (std::size_t k = 0; k < 5; ++k) {
        long long e = ((n0 % q) * ((k0 + (long long)k) % q)) % q;
        cplx want = std::polar(1.0, 2.0 * pi * double(e) / double(q));
        ASSERT_NEAR(std::abs(got[k] - want), 0.0, 1e-12);
    }
}

TEST(Czt, DoubleVariantAgreesOnSmallPhases) {
    auto x = random_vec(25, 13);
    double alpha = 0.001234;
    auto got = wframe::czt_double(x, 2, -7, 40, alpha, -1);
    auto want = czt_direct(x, 2, -7, 40, alpha, -1);
    for (std::size_t k = 0; k < got.size(); ++k)
        ASSERT_NEAR(std::abs(got[k] - want[k]), 0.0, 1e-9);
}
