#pragma once

#include <optional>
#include <string_view>

namespace gridflux::netlist {

/// SPICE numeric literal: decimal/exponent mantissa, optional scale suffix
/// (k, MEG, m, u, n, p; case-insensitive, MEG checked before m) and an
/// optional unit letter (V, A, S, F, H) that is ignored. Returns nullopt when
/// `text` is not entirely a number.
std::optional<double> parse_spice_number(std::string_view text);

/// Length of the numeric prefix of `text` including suffix letters, or 0.
std::size_t scan_spice_number(std::string_view text);

}  // namespace gridflux::netlist
