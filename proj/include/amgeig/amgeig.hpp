#pragma once

// Sparse multilevel eigensolver for symmetric generalized problems:
// algebraic coarsening, V-cycle solves, and eigenpair correction sweeps,
// plus the finite-element model problems and experiment drivers around them.

#include "coarsening.hpp"   // IWYU pragma: export
#include "correction.hpp"   // IWYU pragma: export
#include "dense.hpp"        // IWYU pragma: export
#include "eig.hpp"          // IWYU pragma: export
#include "experiment.hpp"   // IWYU pragma: export
#include "fem.hpp"          // IWYU pragma: export
#include "hierarchy.hpp"    // IWYU pragma: export
#include "matrix_market.hpp" // IWYU pragma: export
#include "mesh.hpp"         // IWYU pragma: export
#include "solve.hpp"        // IWYU pragma: export
#include "sparse.hpp"       // IWYU pragma: export
#include "types.hpp"        // IWYU pragma: export
#include "vector_ops.hpp"   // IWYU pragma: export
