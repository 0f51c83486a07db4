#pragma once
// Power-of-two FFT plus a Bluestein chirp-Z transform with exact rational
// phase reduction. The rational path keeps lattice phases e^{2pi i k n p/q}
// accurate to machine eps even when k*n is ~1e9, which double angle reduction
// cannot do; the reconstruction engine depends on that.
#include <cstdint>
#include <numeric>
#include <vector>

#include "common.hpp"

namespace wframe {

class Fft {
public:
    explicit Fft(std::size_t n) : n_(n) {
        if (n == 0 || (n & (n - 1)) != 0) throw Error("fft size must be a power of two");
        log2n_ = 0;
        while ((std::size_t{1} << log2n_) < n) ++log2n_;
        tw_.resize(n / 2);
        for (std::size_t j = 0; j < n / 2; ++j)
            tw_[j] = std::polar(1.0, -2.0 * pi * static_cast<double>(j) / static_cast<double>(n));
        rev_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t bit = 0; bit < log2n_; ++bit)
                if (i & (std::size_t{1} << bit)) r |= std::size_t{1} << (log2n_ - 1 - bit);
            rev_[i] = static_cast<std::uint32_t>(r);
        }
    }

    std::size_t size() const { return n_; }

    // X_k = sum_n x_n e^{-2pi i nk/N}, in place
    void forward(cplx* x) const {
        for (std::size_t i = 0; i < n_; ++i)
            if (i < rev_[i]) std::swap(x[i], x[rev_[i]]);
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            std::size_t half = len >> 1, stride = n_ / len;
            for (std::size_t start = 0; start < n_; start += len) {
                for (std::size_t j = 0; j < half; ++j) {
                    cplx w = tw_[j * stride];
                    cplx u = x[start + j];
                    cplx v = x[start + j + half] * w;
                    x[start + j] = u + v;
                    x[start + j + half] = u - v;
                }
            }
        }
    }

    void inverse(cplx* x) const {
        for (std::size_t i = 0; i < n_; ++i) x[i] = std::conj(x[i]);
        forward(x);
        double inv = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i) x[i] = std::conj(x[i]) * inv;
    }

private:
    std::size_t n_, log2n_ = 0;
    std::vector<cplx> tw_;
    std::vector<std::uint32_t> rev_;
};

namespace detail {

inline long long mulmod_ll(long long a, long long b, long long m) {
    return static_cast<long long>(static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b) %
                                  static_cast<unsigned __int128>(m));
}

// e^{sign * 2 pi i * num/den} with 0 <= num < den
inline cplx unit_frac(long long num, long long den, int sign) {
    double ang = 2.0 * pi * (static_cast<double>(num) / static_cast<double>(den));
    return std::polar(1.0, sign < 0 ? -ang : ang);
}

}  // namespace detail

// Exact-phase chirp-Z: out[k] = sum_{n=0}^{x.size()-1} x[n] *
// exp(sign * 2 pi i * (n0+n)(k0+k) * p/q), for k = 0..out_count-1.
inline std::vector<cplx> czt_rational(const std::vector<cplx>& x, long long n0, long long k0,
                                      std::size_t out_count, long long p, long long q, int sign) {
    using detail::mulmod_ll;
    using detail::unit_frac;
    if (q <= 0) throw Error("czt: nonpositive denominator");
    std::size_t nn = x.size();
    std::vector<cplx> out(out_count, cplx{0.0, 0.0});
    if (nn == 0 || out_count == 0) return out;
    long long g = std::gcd(p < 0 ? -p : p, q);
    if (g > 1) { p /= g; q /= g; }
    p = ((p % q) + q) % q;
    long long q2 = 2 * q;

    // strip the index offsets: (n0+n)(k0+k) = nk + n k0 + n0 (k0+k)
    long long k0m = ((k0 % q) + q) % q;
    std::vector<cplx> y(nn);
    for (std::size_t n = 0; n < nn; ++n) {
        long long e = mulmod_ll(mulmod_ll(static_cast<long long>(n) % q, k0m, q), p, q);
        y[n] = x[n] * unit_frac(e, q, sign);
    }

    auto half_exp = [&](long long t) {  // (t^2 * p) mod 2q, t >= 0
        long long tm = t % q2;
        return mulmod_ll(mulmod_ll(tm, tm, q2), p, q2);
    };

    std::size_t conv_len = nn + out_count - 1;
    std::size_t L = 1;
    while (L < conv_len) L <<= 1;
    Fft fft(L);

    std::vector<cplx> a(L, cplx{0.0, 0.0}), b(L, cplx{0.0, 0.0});
    for (std::size_t n = 0; n < nn; ++n)
        a[n] = y[n] * unit_frac(half_exp(static_cast<long long>(n)), q2, sign);
    for (long long m = -(static_cast<long long>(nn) - 1); m < static_cast<long long>(out_count); ++m) {
        long long idx = ((m % static_cast<long long>(L)) + static_cast<long long>(L)) % static_cast<long long>(L);
        b[static_cast<std::size_t>(idx)] = unit_frac(half_exp(m < 0 ? -m : m), q2, -sign);
    }
    fft.forward(a.data());
    fft.forward(b.data());
    for (std::size_t i = 0; i < L; ++i) a[i] *= b[i];
    fft.inverse(a.data());

    long long n0m = ((n0 % q) + q) % q;
    for (std::size_t k = 0; k < out_count; ++k) {
        cplx v = a[k] * unit_frac(half_exp(static_cast<long long>(k)), q2, sign);
        long long kk = ((k0 + static_cast<long long>(k)) % q + q) % q;
        long long e = mulmod_ll(mulmod_ll(n0m, kk, q), p, q);
        out[k] = v * unit_frac(e, q, sign);
    }
    return out;
}

// Same transform with an irrational (or huge-denominator) phase ratio alpha;
// angles reduced in double, so expect ~|kn|*eps phase error. Exploration only.
inline std::vector<cplx> czt_double(const std::vector<cplx>& x, long long n0, long long k0,
                                    std::size_t out_count, double alpha, int sign) {
    std::size_t nn = x.size();
    std::vector<cplx> out(out_count, cplx{0.0, 0.0});
    if (nn == 0 || out_count == 0) return out;
    auto frac_phase = [&](double turns) {
        double f = std::fmod(turns, 1.0);
        if (f < 0) f += 1.0;
        return std::polar(1.0, (sign < 0 ? -2.0 : 2.0) * pi * f);
    };
    std::vector<cplx> y(nn);
    for (std::size_t n = 0; n < nn; ++n)
        y[n] = x[n] * frac_phase(static_cast<double>(n) * static_cast<double>(k0) * alpha);

    std::size_t conv_len = nn + out_count - 1;
    std::size_t L = 1;
    while (L < conv_len) L <<= 1;
    Fft fft(L);
    auto half_turns = [&](long long t) { return 0.5 * alpha * static_cast<double>(t) * static_cast<double>(t); };
    std::vector<cplx> a(L, cplx{0.0, 0.0}), b(L, cplx{0.0, 0.0});
    for (std::size_t n = 0; n < nn; ++n) a[n] = y[n] * frac_phase(half_turns(static_cast<long long>(n)));
    for (long long m = -(static_cast<long long>(nn) - 1); m < static_cast<long long>(out_count); ++m) {
        long long idx = ((m % static_cast<long long>(L)) + static_cast<long long>(L)) % static_cast<long long>(L);
        b[static_cast<std::size_t>(idx)] = std::conj(frac_phase(half_turns(m)));
    }
    fft.forward(a.data());
    fft.forward(b.data());
    for (std::size_t i = 0; i < L; ++i) a[i] *= b[i];
    fft.inverse(a.data());
    for (std::size_t k = 0; k < out_count; ++k) {
        cplx v = a[k] * frac_phase(half_turns(static_cast<long long>(k)));
        out[k] = v * frac_phase(static_cast<double>(n0) * static_cast<double>(k0 + static_cast<long long>(k)) * alpha);
    }
    return out;
}

}  // namespace wframe
