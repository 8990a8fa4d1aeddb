#pragma once

#include "bits.hpp"
#include "eigensolver.hpp"
#include "errors.hpp"
#include "evolve.hpp"
#include "fixtures.hpp"
#include "ising.hpp"
#include "metrics.hpp"
#include "perturb.hpp"
#include "random.hpp"
#include "sat2.hpp"
#include "schedule.hpp"
#include "spectra.hpp"
#include "state.hpp"
