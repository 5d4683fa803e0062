#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mz {

// UTC instant with millisecond resolution. Text form is RFC 3339 with a 'Z'
// suffix; fractional seconds are emitted only when non-zero.
class Timestamp {
public:
    using clock_type = std::chrono::system_clock;
    using time_point = std::chrono::sys_time<std::chrono::milliseconds>;

    constexpr Timestamp() = default;
    constexpr explicit Timestamp(time_point tp) : tp_(tp) {}

    static Timestamp now();
    static Timestamp from_millis(std::int64_t ms_since_epoch);
    // Accepts "YYYY-MM-DDTHH:MM:SS[.fff...](Z|+HH:MM|-HH:MM)".
    static std::optional<Timestamp> parse(std::string_view text);

    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] std::int64_t millis() const { return tp_.time_since_epoch().count(); }
    [[nodiscard]] time_point time() const { return tp_; }

    friend constexpr auto operator<=>(const Timestamp&, const Timestamp&) = default;

private:
    time_point tp_{};
};

}  // namespace mz
