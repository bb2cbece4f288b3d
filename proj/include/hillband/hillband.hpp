#pragma once

// Umbrella header: the full band-gap engine for 1-D periodic Schrodinger
// operators with distributional (H^-1) potentials.

#include "hillband/errors.hpp"
#include "hillband/io.hpp"
#include "hillband/oracle.hpp"
#include "hillband/parallel.hpp"
#include "hillband/parity.hpp"
#include "hillband/potential.hpp"
#include "hillband/propagator.hpp"
#include "hillband/rk45.hpp"
#include "hillband/spectrum.hpp"
