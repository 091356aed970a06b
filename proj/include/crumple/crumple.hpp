#pragma once

// Umbrella header for the crumple vehicle-deformation library.

#include "crumple/binding.hpp"
#include "crumple/binding_io.hpp"
#include "crumple/collision.hpp"
#include "crumple/control_mesh.hpp"
#include "crumple/convex_hull.hpp"
#include "crumple/dynamics.hpp"
#include "crumple/error.hpp"
#include "crumple/harness.hpp"
#include "crumple/hull_simplify.hpp"
#include "crumple/math.hpp"
#include "crumple/obj_io.hpp"
#include "crumple/rigid_core.hpp"
#include "crumple/scenario.hpp"
#include "crumple/snapshot.hpp"
#include "crumple/surface_mesh.hpp"
#include "crumple/vehicle.hpp"
