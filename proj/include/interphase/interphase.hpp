#pragma once

// Umbrella header: effective conductivity of composites with thin interphase
// layers — closed-form assemblage values, first-order interface-shift
// corrections, a spectral periodic-cell solver for cross-validation, and the
// sweep/plot/validation utilities used by the command-line tool.

#include "interphase/assemblage.hpp"
#include "interphase/cellio.hpp"
#include "interphase/mesh.hpp"
#include "interphase/quadrature.hpp"
#include "interphase/shift.hpp"
#include "interphase/solver.hpp"
#include "interphase/svgplot.hpp"
#include "interphase/sweep.hpp"
#include "interphase/tensor.hpp"
#include "interphase/util.hpp"
#include "interphase/validation.hpp"
