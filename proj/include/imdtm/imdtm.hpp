#pragma once

#include "imdtm/baseline.hpp"
#include "imdtm/config.hpp"
#include "imdtm/diagnostics.hpp"
#include "imdtm/equations.hpp"
#include "imdtm/errors.hpp"
#include "imdtm/evolver.hpp"
#include "imdtm/grid.hpp"
#include "imdtm/parallel.hpp"
#include "imdtm/run.hpp"
#include "imdtm/series2.hpp"
#include "imdtm/stencil.hpp"
