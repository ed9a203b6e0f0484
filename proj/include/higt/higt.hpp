#pragma once
// Everything except the JSON conversions in config.hpp.
#include <higt/errors.hpp>
#include <higt/core.hpp>
#include <higt/io.hpp>
#include <higt/tree.hpp>
#include <higt/screening.hpp>
#include <higt/prox.hpp>
#include <higt/solver.hpp>
#include <higt/rng.hpp>
#include <higt/simulation.hpp>
#include <higt/metrics.hpp>
#include <higt/bench.hpp>
