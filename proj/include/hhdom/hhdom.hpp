#pragma once

// Library umbrella header (everything except the CLI front end).

#include "hhdom/convexity.hpp"
#include "hhdom/error.hpp"
#include "hhdom/expr.hpp"
#include "hhdom/geometry.hpp"
#include "hhdom/hadamard.hpp"
#include "hhdom/kernel.hpp"
#include "hhdom/quadrature.hpp"
#include "hhdom/sampling.hpp"
#include "hhdom/search.hpp"
