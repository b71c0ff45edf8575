#pragma once

#include "inertia/integrator.hpp"
#include "inertia/io.hpp"
#include "inertia/linalg.hpp"
#include "inertia/lyapunov.hpp"
#include "inertia/oracle.hpp"
#include "inertia/problems.hpp"
#include "inertia/solver.hpp"
#include "inertia/version.hpp"
