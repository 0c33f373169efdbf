#pragma once

// Convenience header pulling in the whole public API.

#include "orthorand/basis.hpp"
#include "orthorand/correlations.hpp"
#include "orthorand/ensembles.hpp"
#include "orthorand/errors.hpp"
#include "orthorand/harness.hpp"
#include "orthorand/limit_laws.hpp"
#include "orthorand/linalg.hpp"
#include "orthorand/mrs.hpp"
#include "orthorand/parallel.hpp"
#include "orthorand/probes.hpp"
#include "orthorand/quadrature.hpp"
#include "orthorand/recurrence.hpp"
#include "orthorand/rootfind.hpp"
#include "orthorand/weight.hpp"
