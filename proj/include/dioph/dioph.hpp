#pragma once

#include "dioph/approx_function.hpp"
#include "dioph/contfrac.hpp"
#include "dioph/dims.hpp"
#include "dioph/errors.hpp"
#include "dioph/exact_real.hpp"
#include "dioph/interval.hpp"
#include "dioph/io.hpp"
#include "dioph/lattice.hpp"
#include "dioph/numeric.hpp"
#include "dioph/series.hpp"
#include "dioph/witness.hpp"
