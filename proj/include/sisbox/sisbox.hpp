#pragma once

#include "catalog.hpp"
#include "commands.hpp"
#include "decomposition.hpp"
#include "document.hpp"
#include "errors.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "membership.hpp"
#include "report.hpp"
#include "sampling_space.hpp"
#include "signal.hpp"
#include "spectral_core.hpp"
