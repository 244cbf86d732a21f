#pragma once

#include "qcollapse/errors.hpp"
#include "qcollapse/io.hpp"
#include "qcollapse/lattice.hpp"
#include "qcollapse/local_polytope.hpp"
#include "qcollapse/matrix.hpp"
#include "qcollapse/nonlocality.hpp"
#include "qcollapse/process_trace.hpp"
#include "qcollapse/rng.hpp"
#include "qcollapse/schmidt.hpp"
#include "qcollapse/selection.hpp"
#include "qcollapse/space.hpp"
#include "qcollapse/state.hpp"
#include "qcollapse/synapse.hpp"
#include "qcollapse/zeno.hpp"
