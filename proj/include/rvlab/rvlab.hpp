#pragma once

// Everything in one include.

#include "rvlab/catalog.hpp"
#include "rvlab/config.hpp"
#include "rvlab/core.hpp"
#include "rvlab/error.hpp"
#include "rvlab/estimators.hpp"
#include "rvlab/experiment.hpp"
#include "rvlab/geometry.hpp"
#include "rvlab/grammar.hpp"
#include "rvlab/io.hpp"
#include "rvlab/limits.hpp"
#include "rvlab/moduli.hpp"
#include "rvlab/parallel.hpp"
#include "rvlab/random.hpp"
#include "rvlab/samplers.hpp"
#include "rvlab/tailmeasure.hpp"
