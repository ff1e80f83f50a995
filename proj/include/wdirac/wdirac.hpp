#pragma once

// Umbrella header for the weighted Dirac operator toolbox.

#include "wdirac/common.hpp"
#include "wdirac/expr.hpp"
#include "wdirac/fields.hpp"
#include "wdirac/quadrature.hpp"
#include "wdirac/dirac.hpp"
#include "wdirac/rk.hpp"
#include "wdirac/ode.hpp"
#include "wdirac/boundary.hpp"
#include "wdirac/solutions.hpp"
#include "wdirac/weyl.hpp"
#include "wdirac/measure.hpp"
#include "wdirac/debranges.hpp"
#include "wdirac/gauge.hpp"
#include "wdirac/generators.hpp"
#include "wdirac/verify_suites.hpp"
