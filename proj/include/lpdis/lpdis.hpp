#pragma once

#include "lpdis/chains.hpp"
#include "lpdis/disintegration.hpp"
#include "lpdis/dyadic.hpp"
#include "lpdis/finite_atomic.hpp"
#include "lpdis/infinite_atomic.hpp"
#include "lpdis/isometry.hpp"
#include "lpdis/oracle.hpp"
#include "lpdis/powers.hpp"
#include "lpdis/projection.hpp"
#include "lpdis/rational.hpp"
#include "lpdis/schedule.hpp"
#include "lpdis/step_function.hpp"
#include "lpdis/tree.hpp"
#include "lpdis/vector.hpp"
