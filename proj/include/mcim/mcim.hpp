#pragma once

// Umbrella header: closed-form bias of the missing covariate indicator
// method, the grid sweep that summarizes it, and the asymptotic and
// Monte Carlo machinery that verifies it.

#include "mcim/analytic.hpp"
#include "mcim/errors.hpp"
#include "mcim/estimators.hpp"
#include "mcim/montecarlo.hpp"
#include "mcim/params.hpp"
#include "mcim/sweep.hpp"
#include "mcim/tables.hpp"
