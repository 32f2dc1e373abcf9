#pragma once

// Umbrella header for the truce-dynamics library: the coordination game,
// strategy-density and aggregate replicator dynamics, equilibrium and
// bifurcation analysis, the command authority's enforcement problem, and
// the policy levers that make peace its optimal choice.

#include "trucedyn/command.hpp"
#include "trucedyn/config.hpp"
#include "trucedyn/density.hpp"
#include "trucedyn/dynamics.hpp"
#include "trucedyn/equilibria.hpp"
#include "trucedyn/errors.hpp"
#include "trucedyn/game.hpp"
#include "trucedyn/policy.hpp"
#include "trucedyn/serialize.hpp"
