#pragma once

#include "dimcurse/bench_oracle.hpp"
#include "dimcurse/bounds_audit.hpp"
#include "dimcurse/budgeting.hpp"
#include "dimcurse/core_types.hpp"
#include "dimcurse/errors.hpp"
#include "dimcurse/log_io.hpp"
#include "dimcurse/meta_engine.hpp"
#include "dimcurse/univariate.hpp"
