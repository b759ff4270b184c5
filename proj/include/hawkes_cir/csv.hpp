#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

namespace hawkes_cir {

/// Shortest round-trip decimal, independent of the global locale.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// Writes fields separated by commas and terminates the row.
template <class... Fields>
void csv_row(std::ostream& out, const Fields&... fields) {
    bool first = true;
    auto put = [&](const auto& f) {
        if (!first) out << ',';
        first = false;
        if constexpr (std::is_floating_point_v<std::decay_t<decltype(f)>>) {
            out << format_double(f);
        } else {
            out << f;
        }
    };
    (put(fields), ...);
    out << '\n';
}

}  // namespace hawkes_cir
