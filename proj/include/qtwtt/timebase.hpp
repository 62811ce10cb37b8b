#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qtwtt {

using int128 = __int128;

inline constexpr std::int64_t kFsPerSecond = 1'000'000'000'000'000LL;

/// Signed femtosecond span. Stored as a 128-bit integer: an int64 of
/// femtoseconds saturates near 9200 s, well short of the multi-hour spans a
/// session can cover.
struct Duration {
    int128 fs{0};

    constexpr Duration() = default;
    constexpr explicit Duration(int128 v) : fs(v) {}

    static constexpr Duration from_fs(int128 v) { return Duration(v); }
    static constexpr Duration from_ps(int128 v) { return Duration(v * 1000); }
    static constexpr Duration from_ns(int128 v) { return Duration(v * 1'000'000); }
    static constexpr Duration from_us(int128 v) { return Duration(v * 1'000'000'000); }
    static constexpr Duration from_seconds(std::int64_t s)
    {
        return Duration(static_cast<int128>(s) * kFsPerSecond);
    }

    /// Nearest-femtosecond conversion from a floating-point femtosecond value.
    static Duration from_fs_double(double v)
    {
        if (!std::isfinite(v))
            throw std::invalid_argument("Duration: non-finite femtosecond value");
        if (v >= 9.2e18 || v <= -9.2e18)
            throw std::overflow_error("Duration: femtosecond value out of range");
        return Duration(static_cast<int128>(std::llround(v)));
    }

    constexpr double to_fs_double() const { return static_cast<double>(fs); }
    constexpr double to_seconds() const
    {
        return static_cast<double>(fs) / static_cast<double>(kFsPerSecond);
    }

    constexpr Duration operator-() const { return Duration(-fs); }
    constexpr Duration operator+(Duration o) const { return Duration(fs + o.fs); }
    constexpr Duration operator-(Duration o) const { return Duration(fs - o.fs); }
    constexpr Duration operator*(std::int64_t k) const { return Duration(fs * k); }
    Duration& operator+=(Duration o) { fs += o.fs; return *this; }
    Duration& operator-=(Duration o) { fs -= o.fs; return *this; }

    constexpr auto operator<=>(const Duration&) const = default;

    /// Exact halving; odd femtosecond counts round to the even neighbour.
    constexpr Duration half_round_even() const
    {
        int128 q = fs >> 1;       // floor division by 2
        if (fs & 1) {
            if (q & 1) q += 1;    // odd quotient: round up to even
        }
        return Duration(q);
    }
};

/// One detection timestamp as an exact two-part integer: whole seconds plus
/// femtoseconds within the second. Ordering is lexicographic, which equals
/// value order because frac_fs stays in [0, 1e15).
struct TimeTag {
    std::int64_t seconds{0};
    std::int64_t frac_fs{0};

    constexpr auto operator<=>(const TimeTag&) const = default;
};

inline constexpr TimeTag kEpoch{0, 0};

/// Exact difference a - b in femtoseconds. The 128-bit result cannot
/// overflow for any pair of valid tags.
constexpr Duration tag_sub(TimeTag a, TimeTag b)
{
    int128 d = static_cast<int128>(a.seconds - b.seconds) * kFsPerSecond
             + (a.frac_fs - b.frac_fs);
    return Duration(d);
}

/// a + d with the fractional part renormalized into [0, 1e15). Throws if the
/// seconds field would leave the int64 range, which signals a misconfigured
/// scenario rather than a recoverable condition.
constexpr TimeTag tag_add(TimeTag a, Duration d)
{
    int128 total = static_cast<int128>(a.frac_fs) + d.fs;
    int128 carry = total / kFsPerSecond;
    int128 frac = total % kFsPerSecond;
    if (frac < 0) {
        frac += kFsPerSecond;
        carry -= 1;
    }
    int128 secs = static_cast<int128>(a.seconds) + carry;
    if (secs > INT64_MAX || secs < INT64_MIN)
        throw std::overflow_error("tag_add: seconds overflow");
    return TimeTag{static_cast<std::int64_t>(secs), static_cast<std::int64_t>(frac)};
}

constexpr bool valid_tag(TimeTag t)
{
    return t.frac_fs >= 0 && t.frac_fs < kFsPerSecond;
}

/// Seconds elapsed since `epoch`, as a double. Good to well below a
/// femtosecond for spans up to a few hours.
inline double elapsed_seconds(TimeTag t, TimeTag epoch)
{
    return tag_sub(t, epoch).to_seconds();
}

std::string to_string(int128 v);
inline std::string to_string(Duration d) { return to_string(d.fs); }

} // namespace qtwtt
