#pragma once

#include "dpnp/coupling.hpp"
#include "dpnp/darcy.hpp"
#include "dpnp/diagnostics.hpp"
#include "dpnp/elliptic.hpp"
#include "dpnp/errors.hpp"
#include "dpnp/grid.hpp"
#include "dpnp/linear_algebra.hpp"
#include "dpnp/model.hpp"
#include "dpnp/oracle.hpp"
#include "dpnp/parallel.hpp"
#include "dpnp/poisson.hpp"
#include "dpnp/state.hpp"
#include "dpnp/transport.hpp"
