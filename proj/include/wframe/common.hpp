#pragma once
// Shared basics: error taxonomy, deterministic RNG, compensated summation,
// shortest round-trip number formatting.
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wframe {

using cplx = std::complex<double>;
inline constexpr double pi = 3.141592653589793238462643383279502884;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A sum's tail cannot be bounded (no envelope, no support bound, no control at 0).
struct NoTailControl : Error { using Error::Error; };
// A truncated sum hit the hard term cap before meeting its tolerance.
struct TruncationBudgetExceeded : Error { using Error::Error; };
// Evaluation requested outside the representable range of a spectrum.
struct OutOfRange : Error { using Error::Error; };
// The dual-generator denominator drops below tolerance somewhere on the annulus.
struct DenominatorVanishes : Error {
    double gamma;
    explicit DenominatorVanishes(double g)
        : Error("dual denominator vanishes near gamma=" + std::to_string(g)), gamma(g) {}
};
// epsilon_K >= sqrt(2bA): the closed-form error bound does not apply.
struct BoundInapplicable : Error { using Error::Error; };
// plan_for_target exhausted its K cap.
struct TargetUnreachable : Error { using Error::Error; };
// Feasibility check failed (truncated Calderon sum vanishes on the annulus).
struct FrameConditionViolated : Error { using Error::Error; };
// A decay-envelope fit cannot be certified beyond the probe range.
struct EnvelopeUnsound : Error { using Error::Error; };

// PCG32 (O'Neill); fixed algorithm so streams are identical on every platform.
class Pcg32 {
public:
    explicit Pcg32(std::uint64_t seed, std::uint64_t seq = 0xda3e39cb94b95bdbULL) {
        state_ = 0;
        inc_ = (seq << 1) | 1u;
        next_u32();
        state_ += seed;
        next_u32();
    }
    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }
    // 53-bit uniform in [0,1)
    double next_double() {
        std::uint64_t hi = next_u32(), lo = next_u32();
        return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
    }
    // Box-Muller; returns one N(0,1) variate per call, caching the pair partner.
    double next_gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double(), u2 = next_double();
        while (u1 <= 0x1.0p-60) u1 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 2.0 * pi * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

private:
    std::uint64_t state_ = 0, inc_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Kahan-Neumaier compensated accumulator; fixed-order summation stays bitwise
// reproducible and loses almost nothing to cancellation.
class Kahan {
public:
    void add(double x) {
        double t = s_ + x;
        if (std::abs(s_) >= std::abs(x))
            c_ += (s_ - t) + x;
        else
            c_ += (x - t) + s_;
        s_ = t;
    }
    double sum() const { return s_ + c_; }

private:
    double s_ = 0.0, c_ = 0.0;
};

// Shortest representation that round-trips exactly (std::to_chars default).
inline std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string fmt_int(long long v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace wframe
