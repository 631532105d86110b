/**
 * @file vortex_atlas.hpp
 * @brief Umbrella header for the library (the CLI lives in cli.hpp).
 */
#pragma once

#include "vortex_atlas/catalog.hpp"
#include "vortex_atlas/classify.hpp"
#include "vortex_atlas/dislocation.hpp"
#include "vortex_atlas/errors.hpp"
#include "vortex_atlas/expr.hpp"
#include "vortex_atlas/field.hpp"
#include "vortex_atlas/helmholtz.hpp"
#include "vortex_atlas/json_io.hpp"
#include "vortex_atlas/linalg.hpp"
#include "vortex_atlas/parallel.hpp"
#include "vortex_atlas/phasefield.hpp"
#include "vortex_atlas/strata.hpp"
#include "vortex_atlas/taylor.hpp"
