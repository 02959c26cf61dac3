#pragma once

#include <string_view>

#include "gridflux/netlist/document.hpp"

namespace gridflux::acgrid {

/// Text of lib/powergrid.cir as shipped with this build.
std::string_view powergrid_library_text();

/// The parsed library (SLACK, CPL, ACBRANCH, MACHINE, CHVDC2). Parsed once.
const netlist::NetlistDocument& powergrid_library();

/// Expands one X card against the library into primitive cards with
/// hierarchical names, all parameters substituted.
std::vector<netlist::DeviceCard> expand_instance(const netlist::DeviceCard& x_card);

}  // namespace gridflux::acgrid
