#pragma once

/// Convenience umbrella for the whole library.

#include "csf/analytic.hpp"
#include "csf/compliance.hpp"
#include "csf/config.hpp"
#include "csf/csv.hpp"
#include "csf/defaults.hpp"
#include "csf/errors.hpp"
#include "csf/estimation.hpp"
#include "csf/integrator.hpp"
#include "csf/params.hpp"
#include "csf/scenario.hpp"
#include "csf/timeline.hpp"
#include "csf/trace.hpp"
#include "csf/validation.hpp"
