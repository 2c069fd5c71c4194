#pragma once

#include "shiftseq/design.hpp"
#include "shiftseq/errors.hpp"
#include "shiftseq/estimator.hpp"
#include "shiftseq/experiment.hpp"
#include "shiftseq/filtering.hpp"
#include "shiftseq/fluctuation.hpp"
#include "shiftseq/graph.hpp"
#include "shiftseq/linalg.hpp"
#include "shiftseq/matrix_io.hpp"
#include "shiftseq/parallel.hpp"
#include "shiftseq/rng.hpp"
