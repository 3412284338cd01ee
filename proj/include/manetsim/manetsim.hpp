#pragma once

// Umbrella header: the whole simulator in one include.

#include "aodv.hpp"      // IWYU pragma: export
#include "config.hpp"    // IWYU pragma: export
#include "core.hpp"      // IWYU pragma: export
#include "dsdv.hpp"      // IWYU pragma: export
#include "dsr.hpp"       // IWYU pragma: export
#include "energy.hpp"    // IWYU pragma: export
#include "messages.hpp"  // IWYU pragma: export
#include "metrics.hpp"   // IWYU pragma: export
#include "mobility.hpp"  // IWYU pragma: export
#include "phy.hpp"       // IWYU pragma: export
#include "report.hpp"    // IWYU pragma: export
#include "routing.hpp"   // IWYU pragma: export
#include "simulation.hpp"  // IWYU pragma: export
#include "sweep.hpp"     // IWYU pragma: export
#include "traffic.hpp"   // IWYU pragma: export
