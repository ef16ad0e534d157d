/// Umbrella header: pulls in the whole library.
#pragma once

#include "capacitance.hpp"
#include "chain.hpp"
#include "chebyshev.hpp"
#include "errors.hpp"
#include "gap.hpp"
#include "hashing.hpp"
#include "io.hpp"
#include "stability.hpp"
#include "topology.hpp"
#include "tridiag.hpp"
#include "version.hpp"
