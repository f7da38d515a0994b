#pragma once

// Umbrella header: compound Poisson subordinators driven by non-singular
// convolution kernels, their closed-form transition densities, the matching
// convolution operators, Laplace cross-validation, simulation and the risk
// reserve application.

#include "densities.hpp"
#include "kernels.hpp"
#include "laplace.hpp"
#include "operators.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "risk.hpp"
#include "series.hpp"
#include "simulate.hpp"
#include "specfun.hpp"
