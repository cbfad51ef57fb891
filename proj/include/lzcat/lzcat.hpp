#pragma once

#include "lzcat/analytics.hpp"
#include "lzcat/error.hpp"
#include "lzcat/fockspace.hpp"
#include "lzcat/hamiltonians.hpp"
#include "lzcat/observables.hpp"
#include "lzcat/ode/dop853.hpp"
#include "lzcat/propagator.hpp"
#include "lzcat/special/pcf.hpp"
#include "lzcat/version.hpp"
