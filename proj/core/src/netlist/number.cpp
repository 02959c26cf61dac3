#include "gridflux/netlist/number.hpp"

#include <cctype>
#include <charconv>

#include "text_util.hpp"

namespace gridflux::netlist {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

// Length of the mantissa/exponent part, 0 if there is none.
std::size_t scan_mantissa(std::string_view s) {
    std::size_t i = 0;
    bool digits = false;
    while (i < s.size() && is_digit(s[i])) {
        ++i;
        digits = true;
    }
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && is_digit(s[i])) {
            ++i;
            digits = true;
        }
    }
    if (!digits) return 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && is_digit(s[j])) {
            while (j < s.size() && is_digit(s[j])) ++j;
            i = j;
        }
    }
    return i;
}

std::optional<double> scale_of(std::string_view suffix) {
    if (suffix.empty()) return 1.0;
    double scale = 1.0;
    std::string_view rest = suffix;
    if (detail::istarts_with(rest, "meg")) {
        scale = 1e6;
        rest.remove_prefix(3);
    } else {
        switch (detail::lower(rest.front())) {
            case 'k': scale = 1e3; rest.remove_prefix(1); break;
            case 'm': scale = 1e-3; rest.remove_prefix(1); break;
            case 'u': scale = 1e-6; rest.remove_prefix(1); break;
            case 'n': scale = 1e-9; rest.remove_prefix(1); break;
            case 'p': scale = 1e-12; rest.remove_prefix(1); break;
            default: break;
        }
    }
    if (rest.empty()) return scale;
    if (rest.size() == 1) {
        switch (detail::lower(rest.front())) {
            case 'v': case 'a': case 's': case 'f': case 'h':
                return scale;
            default:
                break;
        }
    }
    return std::nullopt;
}

}  // namespace

std::size_t scan_spice_number(std::string_view text) {
    std::size_t n = scan_mantissa(text);
    if (n == 0) return 0;
    while (n < text.size() && is_alpha(text[n])) ++n;
    return n;
}

std::optional<double> parse_spice_number(std::string_view text) {
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    const std::size_t n = scan_mantissa(body);
    if (n == 0) return std::nullopt;
    double mantissa = 0.0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + n, mantissa);
    if (ec != std::errc() || ptr != body.data() + n) return std::nullopt;
    auto scale = scale_of(body.substr(n));
    if (!scale) return std::nullopt;
    const double v = *scale == 1.0 ? mantissa : mantissa * *scale;
    return negative ? -v : v;
}

}  // namespace gridflux::netlist
